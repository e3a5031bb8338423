//! The on-disk surface description: symbol orders, a witnessed basis, and
//! coefficient maps for the lengths and the suspension heights. Parsing
//! re-checks every structural invariant, so a loaded surface is always
//! usable as-is.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use rauzy_core::iet::{Alphabet, PermutationPair, Symbol};
use rauzy_core::numeric::{decimal_approx, Basis, SymbolicReal, UNIT};
use rauzy_core::suspension::Surface;

use crate::{classify, CliError, CoreFailure, Phase};

fn load<E: CoreFailure>(e: E) -> CliError {
    classify(e, Phase::Load)
}

/// Significant digits used when writing witnesses back out; matches the
/// precision of the witnesses bundled with the library.
pub const WITNESS_OUT_DIGITS: usize = 310;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceDocument {
    /// Symbol names; their order here fixes the coefficient-vector order.
    pub alphabet: Vec<String>,
    pub top: Vec<String>,
    pub bottom: Vec<String>,
    /// Basis element name → decimal witness. The rational unit "1" is
    /// implicit and never listed.
    pub basis: BTreeMap<String, String>,
    /// Symbol name → coefficient map (basis element → rational string).
    pub lambda: BTreeMap<String, SymbolicReal>,
    pub tau: BTreeMap<String, SymbolicReal>,
}

impl SurfaceDocument {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    /// Canonical rendering: fixed field order, maps sorted by key, reduced
    /// rationals, two-space indent, trailing newline. `parse ∘ print` is
    /// the identity on parsed documents.
    pub fn print(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("document serialization");
        out.push('\n');
        out
    }

    pub fn to_surface(&self) -> Result<Surface, CliError> {
        let alphabet = Arc::new(Alphabet::new(self.alphabet.clone()).map_err(load)?);
        let order = |names: &[String]| -> Result<Vec<Symbol>, CliError> {
            names
                .iter()
                .map(|n| alphabet.symbol(n).map_err(load))
                .collect()
        };
        let perm = PermutationPair::new(order(&self.top)?, order(&self.bottom)?).map_err(load)?;
        if self.basis.contains_key(UNIT) {
            return Err(CliError::Validation(format!(
                "basis must not list the implicit unit `{UNIT}`"
            )));
        }
        let basis = Arc::new(
            Basis::from_witnesses(self.basis.iter().map(|(k, v)| (k.as_str(), v.as_str())))
                .map_err(load)?,
        );
        let coeffs = |map: &BTreeMap<String, SymbolicReal>,
                      what: &str|
         -> Result<Vec<SymbolicReal>, CliError> {
            for key in map.keys() {
                if alphabet.symbol(key).is_err() {
                    return Err(CliError::Validation(format!(
                        "{what} names unknown symbol `{key}`"
                    )));
                }
            }
            alphabet
                .names()
                .map(|name| {
                    map.get(name).cloned().ok_or_else(|| {
                        CliError::Validation(format!("{what} entry for `{name}` is missing"))
                    })
                })
                .collect()
        };
        let lambda = coeffs(&self.lambda, "lambda")?;
        let tau = coeffs(&self.tau, "tau")?;
        Surface::new(alphabet, basis, perm, lambda, tau).map_err(load)
    }

    /// Inverse of [`to_surface`](Self::to_surface) up to canonical form;
    /// witnesses are written at [`WITNESS_OUT_DIGITS`] significant digits,
    /// which reproduces any witness that was stored at that precision or
    /// less.
    pub fn from_surface(s: &Surface) -> Self {
        let name_of = |sym: Symbol| s.alphabet.name(sym).to_string();
        let per_symbol = |values: &[SymbolicReal]| {
            s.alphabet
                .symbols()
                .map(|sym| (name_of(sym), values[sym.0].clone()))
                .collect::<BTreeMap<_, _>>()
        };
        SurfaceDocument {
            alphabet: s.alphabet.names().map(str::to_string).collect(),
            top: s.perm.top().iter().copied().map(name_of).collect(),
            bottom: s.perm.bottom().iter().copied().map(name_of).collect(),
            basis: s
                .basis
                .names()
                .filter(|n| *n != UNIT)
                .map(|n| {
                    let w = s.basis.witness(n).expect("listed name");
                    (n.to_string(), decimal_approx(w, WITNESS_OUT_DIGITS))
                })
                .collect(),
            lambda: per_symbol(&s.lengths),
            tau: per_symbol(&s.tau),
        }
    }
}

/// Reads and validates a surface file.
pub fn load_surface(path: &std::path::Path) -> Result<(SurfaceDocument, Surface), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    let doc = SurfaceDocument::parse(&text)?;
    let surface = doc.to_surface()?;
    Ok((doc, surface))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rauzy_core::samples;

    fn reversing_document() -> String {
        format!(
            r#"{{
                "alphabet": ["A", "B", "C", "D"],
                "top": ["A", "B", "C", "D"],
                "bottom": ["D", "C", "B", "A"],
                "basis": {{"sqrt2": "{w}"}},
                "lambda": {{"A": {{"1": "1"}}, "B": {{"1": "1"}}, "C": {{"1": "1"}}, "D": {{"1": "1"}}}},
                "tau": {{"A": {{"1": "2"}}, "B": {{"1": "1/2"}}, "C": {{"1": "-1/2"}}, "D": {{"sqrt2": "-1"}}}}
            }}"#,
            w = samples::SQRT2_WITNESS
        )
    }

    #[test]
    fn documents_round_trip_through_print_and_parse() {
        let doc = SurfaceDocument::parse(&reversing_document()).unwrap();
        let printed = doc.print();
        let again = SurfaceDocument::parse(&printed).unwrap();
        assert_eq!(doc, again);
        // Printing is canonical: a second pass is byte-identical.
        assert_eq!(printed, again.print());
    }

    #[test]
    fn unreduced_rationals_normalize_on_parse() {
        let text = reversing_document().replace("\"1/2\"", "\"2/4\"");
        let doc = SurfaceDocument::parse(&text).unwrap();
        let again = SurfaceDocument::parse(&doc.print()).unwrap();
        assert_eq!(doc, again);
        assert!(doc.print().contains("\"1/2\""));
    }

    #[test]
    fn valid_document_loads_as_a_surface() {
        let doc = SurfaceDocument::parse(&reversing_document()).unwrap();
        let s = doc.to_surface().unwrap();
        // Same data as the bundled sample; the document just declares a
        // smaller basis.
        let sample = samples::reversed4_sqrt2_last();
        assert_eq!(s.perm, sample.perm);
        assert_eq!(s.lengths, sample.lengths);
        assert_eq!(s.tau, sample.tau);
        assert_eq!(s.basis.names().collect::<Vec<_>>(), vec!["1", "sqrt2"]);
    }

    #[test]
    fn reducible_orders_are_rejected_with_the_prefix_index() {
        let text = reversing_document().replace(
            r#""bottom": ["D", "C", "B", "A"]"#,
            r#""bottom": ["A", "C", "D", "B"]"#,
        );
        let err = SurfaceDocument::parse(&text)
            .unwrap()
            .to_surface()
            .unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("reducible"), "{err}");
        assert!(err.to_string().contains('1'), "{err}");
    }

    #[test]
    fn nonpositive_lengths_are_rejected_by_symbol() {
        let text = reversing_document().replace(r#""B": {"1": "1"}"#, r#""B": {"1": "-1"}"#);
        let err = SurfaceDocument::parse(&text)
            .unwrap()
            .to_surface()
            .unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains('B'), "{err}");
        assert!(err.to_string().contains("positive"), "{err}");
    }

    #[test]
    fn cone_violations_carry_side_and_prefix() {
        let text = reversing_document().replace(r#""A": {"1": "2"}"#, r#""A": {"1": "-2"}"#);
        let err = SurfaceDocument::parse(&text)
            .unwrap()
            .to_surface()
            .unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("cone"), "{err}");
    }

    #[test]
    fn short_witnesses_are_rejected() {
        let doc = reversing_document().replace(samples::SQRT2_WITNESS, "1.41421356");
        let err = SurfaceDocument::parse(&doc)
            .unwrap()
            .to_surface()
            .unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("significant digits"), "{err}");
    }

    #[test]
    fn missing_and_unknown_coefficients_are_reported() {
        let missing = reversing_document().replace(r#""C": {"1": "-1/2"}, "#, "");
        let err = SurfaceDocument::parse(&missing)
            .unwrap()
            .to_surface()
            .unwrap_err();
        assert!(err.to_string().contains("tau entry for `C`"), "{err}");

        let unknown =
            reversing_document().replace(r#""tau": {"A""#, r#""tau": {"E": {"1": "1"}, "A""#);
        let err = SurfaceDocument::parse(&unknown)
            .unwrap()
            .to_surface()
            .unwrap_err();
        assert!(err.to_string().contains("unknown symbol `E`"), "{err}");
    }

    #[test]
    fn every_bundled_sample_survives_document_conversion() {
        for name in samples::NAMED {
            let s = samples::by_name(name).unwrap();
            let doc = SurfaceDocument::from_surface(&s);
            let back = doc.to_surface().unwrap();
            assert_eq!(back, s, "document round-trip changed `{name}`");
            let reparsed = SurfaceDocument::parse(&doc.print()).unwrap();
            assert_eq!(reparsed, doc);
        }
    }
}
