//! Saddle-connection search and the minimality probe.
//!
//! Horizontal saddle connections are found by tracing every rightward
//! separatrix germ up to a length budget. The minimality probe then walks
//! the backward induction orbit and asks, step by step, whether all the
//! connections found on the original surface are realized simultaneously as
//! horizontal sides of the current polygon — the combinatorial shadow of the
//! criterion tying minimality of the horizontal flow to the behaviour of the
//! connections under the induction.

mod trace;
mod xcoord;

use std::collections::BTreeMap;

use crate::iet::Symbol;
use crate::induction::{
    backward_orbit, backward_step, completeness_report, BackwardOutcome, CompletenessReport,
    InductionError, StopReason,
};
use crate::numeric::{NumericError, Sign, SymbolicReal};
use crate::suspension::{Corner, SingularityClasses, Surface, SuspensionError, VertexId};

pub use trace::{
    origin_winner, trace_horizontal, Crossing, SeparatrixTrace, TraceOutcome, TraceStart,
};
pub use xcoord::XCoord;

use trace::canonical_vertex;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GeometryError {
    /// The vertex's sector does not contain the rightward direction.
    #[error("vertex {vertex:?} has no rightward separatrix germ")]
    DegenerateStart { vertex: VertexId },
    /// Στ = 0: the origin separatrix ends in a vertex instead of crossing a
    /// side, so it selects no symbol.
    #[error("the origin separatrix crosses no side when the heights balance")]
    OriginUndefined,
    /// Two boundary events coincide exactly, or a ray escaped the polygon;
    /// the suspension data is not embedded.
    #[error("coincident or missing boundary events; polygon is degenerate")]
    DegenerateEvent,
    #[error("trace exceeded {cap} side crossings")]
    TooManyCrossings { cap: usize },
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error(transparent)]
    Suspension(#[from] SuspensionError),
    #[error(transparent)]
    Induction(#[from] InductionError),
}

/// A horizontal segment between singularities, traversed left to right.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SaddleConnection {
    /// Corner whose germ starts the connection.
    pub start_corner: Corner,
    pub start_class: usize,
    pub end_vertex: VertexId,
    pub end_class: usize,
    pub length: SymbolicReal,
    /// Symbols of the sides crossed along the way; empty for a connection
    /// that stays inside the polygon (or runs along a horizontal side).
    pub word: Vec<Symbol>,
}

/// Traces every rightward separatrix germ and keeps those that end in a
/// singularity within `max_length`.
///
/// Germs are visited class by class in corner-walk order: the origin corner,
/// upper corners whose right side rises (τ > 0), and lower corners whose
/// right side falls (τ < 0) carry interior germs; a lower corner whose right
/// side is horizontal (τ = 0) yields the run-along connection for that side.
/// The germ count per class is checked against the count derived from the
/// corner angles.
pub fn enumerate_saddle_connections(
    s: &Surface,
    max_length: &SymbolicReal,
) -> Result<Vec<SaddleConnection>, GeometryError> {
    let basis = &s.basis;
    let classes = s.singularity_classes()?;
    let d = s.d();
    let mut out = Vec::new();
    for (ci, class) in classes.classes.iter().enumerate() {
        let mut germs = 0usize;
        for &corner in &class.corners {
            match corner {
                Corner::Origin => {
                    germs += 1;
                    let t = trace_horizontal(s, TraceStart::Origin, max_length)?;
                    push_if_hit(&mut out, &classes, ci, corner, t);
                }
                Corner::Upper(k) => {
                    let tau = &s.tau[s.perm.top_at(k).0];
                    // A horizontal side's germ is handled at its lower corner.
                    if tau.is_zero() {
                        continue;
                    }
                    if tau.sign(basis)? == Sign::Positive {
                        germs += 1;
                        let t =
                            trace_horizontal(s, TraceStart::Vertex(VertexId::Top(k)), max_length)?;
                        push_if_hit(&mut out, &classes, ci, corner, t);
                    }
                }
                Corner::Lower(j) => {
                    let b = s.perm.bottom_at(j);
                    let tau = &s.tau[b.0];
                    if tau.is_zero() {
                        germs += 1;
                        let length = s.lengths[b.0].clone();
                        if (&length - max_length).sign(basis)? == Sign::Positive {
                            continue;
                        }
                        let end = canonical_vertex(d, VertexId::Bottom(j + 1));
                        out.push(SaddleConnection {
                            start_corner: corner,
                            start_class: ci,
                            end_vertex: end,
                            end_class: classes.class_of_vertex(end),
                            length,
                            word: Vec::new(),
                        });
                    } else if tau.sign(basis)? == Sign::Negative {
                        germs += 1;
                        let t = trace_horizontal(
                            s,
                            TraceStart::Vertex(VertexId::Bottom(j)),
                            max_length,
                        )?;
                        push_if_hit(&mut out, &classes, ci, corner, t);
                    }
                }
                Corner::Closing => {}
            }
        }
        assert_eq!(
            germs, class.rightward_germs,
            "germ walk disagrees with the angle bookkeeping"
        );
    }
    Ok(out)
}

fn push_if_hit(
    out: &mut Vec<SaddleConnection>,
    classes: &SingularityClasses,
    ci: usize,
    corner: Corner,
    t: SeparatrixTrace,
) {
    if let TraceOutcome::HitSingularity { vertex, length } = t.outcome {
        out.push(SaddleConnection {
            start_corner: corner,
            start_class: ci,
            end_vertex: vertex,
            end_class: classes.class_of_vertex(vertex),
            length,
            word: t.crossings.iter().map(|c| c.symbol).collect(),
        });
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MinimalityVerdict {
    /// At some backward step every connection was matched by a horizontal
    /// side, all of them at once (multiset-wise by fingerprint).
    MinimalEvidence {
        simultaneous_step: usize,
    },
    /// The orbit ran its full horizon, part of the alphabet froze, and some
    /// connection was never realized as a horizontal side.
    NonminimalEvidence,
    Inconclusive,
}

#[derive(Debug, Clone)]
pub struct MinimalityReport {
    pub connections: Vec<SaddleConnection>,
    /// Earliest backward step at which a horizontal side matching the
    /// connection's fingerprint existed; indexed like `connections`.
    pub first_match_step: Vec<Option<usize>>,
    pub simultaneous_step: Option<usize>,
    pub verdict: MinimalityVerdict,
    pub steps_executed: usize,
    pub stop: StopReason,
    pub completeness: CompletenessReport,
}

/// Exact length plus the (angle, germ-count) data of the classes at the two
/// ends, left end first. This is how a connection is recognized when it
/// reappears as a horizontal polygon side after some backward steps.
type MatchKey = ((usize, usize), (usize, usize), SymbolicReal);

fn class_fp(classes: &SingularityClasses, i: usize) -> (usize, usize) {
    (
        classes.classes[i].half_turns,
        classes.classes[i].rightward_germs,
    )
}

fn side_key(state: &Surface, classes: &SingularityClasses, b: Symbol) -> MatchKey {
    let j = state.perm.bottom_pos(b);
    let left = classes.class_of_vertex(VertexId::Bottom(j));
    let right = classes.class_of_vertex(VertexId::Bottom(j + 1));
    (
        class_fp(classes, left),
        class_fp(classes, right),
        state.lengths[b.0].clone(),
    )
}

/// Runs the backward orbit and checks, at every state, whether the horizontal
/// saddle connections of `s` (within `max_length`) are all realized as
/// horizontal sides at once.
///
/// Matching is by fingerprint (exact length and end-class angle data) and is
/// counted: two connections with the same fingerprint need two distinct
/// horizontal sides. A surface with no connections within the budget is
/// vacuously matched at step 0. If the orbit stops before `max_steps` and no
/// simultaneous match was seen, the verdict is inconclusive.
pub fn minimality_probe(
    s: &Surface,
    max_length: &SymbolicReal,
    max_steps: usize,
) -> Result<MinimalityReport, GeometryError> {
    let connections = enumerate_saddle_connections(s, max_length)?;
    let log = backward_orbit(s, max_steps, 0)?;
    let completeness = completeness_report(&log);
    let executed = log.executed_steps();

    let source_classes = s.singularity_classes()?;
    let keys: Vec<MatchKey> = connections
        .iter()
        .map(|c| {
            (
                class_fp(&source_classes, c.start_class),
                class_fp(&source_classes, c.end_class),
                c.length.clone(),
            )
        })
        .collect();
    let mut needed: BTreeMap<&MatchKey, usize> = BTreeMap::new();
    for key in &keys {
        *needed.entry(key).or_default() += 1;
    }

    let mut first_match: Vec<Option<usize>> = vec![None; connections.len()];
    let mut simultaneous: Option<usize> = None;

    let mut state = s.clone();
    for n in 0..=executed {
        if connections.is_empty() {
            if simultaneous.is_none() {
                simultaneous = Some(n);
            }
        } else {
            let horizontals = state.horizontal_symbols();
            if !horizontals.is_empty() {
                let classes = state.singularity_classes()?;
                let mut available: BTreeMap<MatchKey, usize> = BTreeMap::new();
                for &b in &horizontals {
                    *available.entry(side_key(&state, &classes, b)).or_default() += 1;
                }
                for (i, key) in keys.iter().enumerate() {
                    if first_match[i].is_none() && available.contains_key(key) {
                        first_match[i] = Some(n);
                    }
                }
                let all = needed
                    .iter()
                    .all(|(key, need)| available.get(*key).copied().unwrap_or(0) >= *need);
                if all && simultaneous.is_none() {
                    simultaneous = Some(n);
                }
            }
        }
        if n < executed {
            match backward_step(&state)? {
                BackwardOutcome::Step { next, .. } => state = next,
                BackwardOutcome::Stop => unreachable!("the logged orbit executed this step"),
            }
        }
    }

    let verdict = if let Some(step) = simultaneous {
        MinimalityVerdict::MinimalEvidence {
            simultaneous_step: step,
        }
    } else if !matches!(log.stop, StopReason::Completed) {
        MinimalityVerdict::Inconclusive
    } else {
        let some_never = first_match.iter().any(|m| m.is_none());
        if some_never && !completeness.frozen_symbols.is_empty() {
            MinimalityVerdict::NonminimalEvidence
        } else {
            MinimalityVerdict::Inconclusive
        }
    };

    Ok(MinimalityReport {
        connections,
        first_match_step: first_match,
        simultaneous_step: simultaneous,
        verdict,
        steps_executed: executed,
        stop: log.stop,
        completeness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iet::{Alphabet, PermutationPair};
    use crate::numeric::{parse_rational, Basis};
    use crate::samples;
    use std::sync::Arc;

    fn sym(c: char) -> Symbol {
        Symbol((c as u8 - b'A') as usize)
    }

    fn pair(top: &str, bottom: &str) -> PermutationPair {
        PermutationPair::new(
            top.chars().map(sym).collect(),
            bottom.chars().map(sym).collect(),
        )
        .unwrap()
    }

    fn val(text: &str) -> SymbolicReal {
        match text.split_once('*') {
            None => SymbolicReal::from_rational(parse_rational(text).unwrap()),
            Some((q, name)) => SymbolicReal::term(name, parse_rational(q).unwrap()),
        }
    }

    fn vals(texts: &[&str]) -> Vec<SymbolicReal> {
        texts
            .iter()
            .map(|t| {
                t.split('+')
                    .map(val)
                    .fold(SymbolicReal::zero(), |acc, v| &acc + &v)
            })
            .collect()
    }

    fn surface(top: &str, bottom: &str, lengths: &[&str], tau: &[&str]) -> Surface {
        let names: Vec<String> = {
            let mut v: Vec<String> = top.chars().map(|c| c.to_string()).collect();
            v.sort();
            v
        };
        let basis = Basis::from_witnesses([("sqrt2", samples::SQRT2_WITNESS)]).unwrap();
        Surface::new(
            Arc::new(Alphabet::new(names).unwrap()),
            Arc::new(basis),
            pair(top, bottom),
            vals(lengths),
            vals(tau),
        )
        .unwrap()
    }

    #[test]
    fn horizontal_side_is_the_only_short_connection() {
        let s = surface("ABC", "CBA", &["1", "1", "1"], &["1*sqrt2", "0", "-1"]);
        let found = enumerate_saddle_connections(&s, &val("10")).unwrap();
        assert_eq!(found.len(), 1);
        let c = &found[0];
        assert_eq!(c.start_corner, Corner::Lower(1));
        assert_eq!(c.end_vertex, VertexId::Bottom(2));
        assert_eq!(c.length, val("1"));
        assert!(c.word.is_empty());
        assert_ne!(c.start_class, c.end_class);
    }

    #[test]
    fn parallel_connections_are_both_found() {
        let s = surface(
            "ABCD",
            "DCBA",
            &["1", "1", "1", "1"],
            &["1*sqrt2", "1/2", "-1/2", "-1"],
        );
        let found = enumerate_saddle_connections(&s, &val("3")).unwrap();
        assert_eq!(found.len(), 2);
        let ends: Vec<(Corner, VertexId)> = found
            .iter()
            .map(|c| (c.start_corner, c.end_vertex))
            .collect();
        assert!(ends.contains(&(Corner::Upper(1), VertexId::Top(3))));
        assert!(ends.contains(&(Corner::Lower(1), VertexId::Bottom(3))));
        for c in &found {
            assert_eq!(c.length, val("2"));
            assert!(c.word.is_empty());
        }
    }

    #[test]
    fn connection_realized_as_side_gives_minimal_evidence_immediately() {
        let s = surface("ABC", "CBA", &["1", "1", "1"], &["1*sqrt2", "0", "-1"]);
        let report = minimality_probe(&s, &val("10"), 40).unwrap();
        assert_eq!(report.connections.len(), 1);
        assert_eq!(report.first_match_step, vec![Some(0)]);
        assert_eq!(report.simultaneous_step, Some(0));
        assert_eq!(
            report.verdict,
            MinimalityVerdict::MinimalEvidence {
                simultaneous_step: 0
            }
        );
        assert_eq!(report.steps_executed, 40);
    }

    #[test]
    fn unrealized_connections_with_frozen_symbols_give_nonminimal_evidence() {
        let s = surface(
            "ABCD",
            "DCBA",
            &["1", "1", "1", "1"],
            &["1*sqrt2", "1/2", "-1/2", "-1"],
        );
        let report = minimality_probe(&s, &val("3"), 120).unwrap();
        assert_eq!(report.connections.len(), 2);
        assert_eq!(report.simultaneous_step, None);
        assert_eq!(report.verdict, MinimalityVerdict::NonminimalEvidence);
        assert!(report.completeness.frozen_symbols.contains(&sym('B')));
        assert!(report.completeness.frozen_symbols.contains(&sym('C')));
    }

    #[test]
    fn orbit_stopping_early_is_inconclusive() {
        let s = surface(
            "ABCD",
            "DCBA",
            &["1", "1", "1", "1"],
            &["2", "1/2", "-1/2", "-1"],
        );
        let report = minimality_probe(&s, &val("3"), 10).unwrap();
        assert_eq!(report.connections.len(), 2);
        assert_eq!(report.steps_executed, 3);
        assert_eq!(report.stop, StopReason::SigmaTauZero { step: 4 });
        assert_eq!(report.verdict, MinimalityVerdict::Inconclusive);
    }
}
