//! File format, orbit-log serialization, and SVG rendering behind the
//! `rauzy` binary. Kept as a library so the boundary logic is testable
//! without spawning processes.

pub mod document;
pub mod logfmt;
pub mod render;

pub use document::SurfaceDocument;
pub use render::{render_svg, RenderSpec, RenderTarget, LAYOUT_DIGITS};

use rauzy_core::geometry::GeometryError;
use rauzy_core::iet::IetError;
use rauzy_core::induction::InductionError;
use rauzy_core::numeric::NumericError;
use rauzy_core::suspension::SuspensionError;

/// Boundary error: every failure is shaped here so the process exit code
/// is decided in one place.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot parse surface document: {0}")]
    Parse(String),
    #[error("invalid surface: {0}")]
    Validation(String),
    #[error("precision exhausted: {0}")]
    Precision(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Run(String),
}

impl CliError {
    /// 0 is reserved for success (orbit stops included — they are results,
    /// not failures); 2 covers anything wrong with the input document or
    /// flags; 4 means the witnesses could not decide a sign exactly.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) | CliError::Validation(_) => 2,
            CliError::Precision(_) => 4,
            CliError::Io(_) | CliError::Run(_) => 1,
        }
    }
}

/// Whether a failing operation was still vetting the input (its errors are
/// the user's problem: exit 2) or already computing (exit 1), with
/// precision exhaustion overriding both (exit 4).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Load,
    Run,
}

/// Core error carrying an optional numeric root cause; used to route
/// `PrecisionExhausted` to its dedicated exit code no matter how deeply
/// it is wrapped.
pub trait CoreFailure: std::fmt::Display {
    fn numeric_root(&self) -> Option<&NumericError>;
}

impl CoreFailure for NumericError {
    fn numeric_root(&self) -> Option<&NumericError> {
        Some(self)
    }
}

impl CoreFailure for IetError {
    fn numeric_root(&self) -> Option<&NumericError> {
        match self {
            IetError::Numeric(n) => Some(n),
            _ => None,
        }
    }
}

impl CoreFailure for SuspensionError {
    fn numeric_root(&self) -> Option<&NumericError> {
        match self {
            SuspensionError::Numeric(n) => Some(n),
            SuspensionError::Iet(e) => e.numeric_root(),
            _ => None,
        }
    }
}

impl CoreFailure for InductionError {
    fn numeric_root(&self) -> Option<&NumericError> {
        match self {
            InductionError::Numeric(n) => Some(n),
        }
    }
}

impl CoreFailure for GeometryError {
    fn numeric_root(&self) -> Option<&NumericError> {
        match self {
            GeometryError::Numeric(n) => Some(n),
            GeometryError::Suspension(e) => e.numeric_root(),
            GeometryError::Induction(e) => e.numeric_root(),
            _ => None,
        }
    }
}

pub fn classify<E: CoreFailure>(e: E, phase: Phase) -> CliError {
    if matches!(
        e.numeric_root(),
        Some(NumericError::PrecisionExhausted { .. })
    ) {
        return CliError::Precision(e.to_string());
    }
    match phase {
        Phase::Load => CliError::Validation(e.to_string()),
        Phase::Run => CliError::Run(e.to_string()),
    }
}
