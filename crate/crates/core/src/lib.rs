//! Exact Rauzy-Veech induction on suspensions of interval exchange
//! transformations.
//!
//! The crate works over scalars that are rational linear combinations of a
//! finite set of named basis elements ("1", "sqrt2", ...), so every length,
//! height, and translation parameter is carried exactly. Signs that depend on
//! the real values of the basis elements are decided with high-precision
//! decimal witnesses and outward-rounded interval evaluation; nothing is ever
//! compared through floating point.

pub mod geometry;
pub mod iet;
pub mod induction;
pub mod numeric;
pub mod samples;
pub mod suspension;

pub use geometry::{
    enumerate_saddle_connections, minimality_probe, origin_winner, trace_horizontal, Crossing,
    GeometryError, MinimalityReport, MinimalityVerdict, SaddleConnection, SeparatrixTrace,
    TraceOutcome, TraceStart, XCoord,
};
pub use iet::{
    Alphabet, Direction, Iet, IetError, KeaneCheck, PermutationPair, StepKind, StepRecord, Symbol,
};
pub use induction::{
    backward_orbit, backward_step, backward_type, completeness_report, forward_orbit,
    forward_step_suspension, tau_decay_monitor, BackwardOutcome, Checkpoint, CompletenessReport,
    ForwardOutcome, InductionError, IntMatrix, OrbitLog, StopReason, SymbolStats, TauDecayReport,
};
pub use numeric::{Basis, Interval, NumericError, Rational, Sign, SymbolicReal};
pub use suspension::{
    Corner, Point, Polygon, SideCopy, SingularityClass, SingularityClasses, Surface,
    SuspensionError, VertexId,
};
