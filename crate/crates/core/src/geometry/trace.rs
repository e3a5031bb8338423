//! Horizontal separatrix tracing through the polygon presentation.
//!
//! A trace follows the horizontal ray to the right of a starting germ. In
//! each polygon pass it finds the first event to the right of the current
//! point: either an exactly-matching vertex (the ray ends in a singularity)
//! or the crossing of a non-horizontal side, in which case the point
//! teleports to the identified side copy and continues. The event search
//! assumes the polygon is embedded: two distinct events at the same exact
//! point mean crossing sides or coincident vertices and are reported as
//! degenerate rather than resolved arbitrarily.

use super::{GeometryError, XCoord};
use crate::iet::Symbol;
use crate::numeric::{Sign, SymbolicReal};
use crate::suspension::{Point, Polygon, SideCopy, Surface, VertexId};

/// Hard cap on crossings per trace; a horizontal segment of finite length
/// crosses the sides finitely often, so hitting this means degenerate input
/// slipped past validation.
const MAX_CROSSINGS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceStart {
    /// The germ at the common left endpoint of the two broken lines.
    Origin,
    Vertex(VertexId),
}

/// One side crossing: where the ray left the polygon and where it re-entered
/// after translating to the identified copy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Crossing {
    pub symbol: Symbol,
    /// The copy that was crossed (the exit side).
    pub copy: SideCopy,
    pub exit_x: XCoord,
    pub exit_y: SymbolicReal,
    pub enter_x: XCoord,
    pub enter_y: SymbolicReal,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceOutcome {
    /// The ray reached a vertex exactly, after the recorded crossings.
    HitSingularity {
        vertex: VertexId,
        length: SymbolicReal,
    },
    /// The ray passed the length budget without meeting a vertex.
    Survived,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparatrixTrace {
    pub start: TraceStart,
    /// The length bound the trace was run with.
    pub budget: SymbolicReal,
    pub crossings: Vec<Crossing>,
    pub outcome: TraceOutcome,
}

struct SideRef {
    symbol: Symbol,
    copy: SideCopy,
    left: Point,
    right: Point,
}

pub(super) enum EventKind {
    Vertex(VertexId),
    Side(usize),
}

pub(super) struct Tracer<'a> {
    s: &'a Surface,
    sides: Vec<SideRef>,
    /// Distinct polygon vertices: the shared endpoints are enumerated once,
    /// as Top(0) and Top(d).
    vertices: Vec<(VertexId, Point)>,
    /// Per symbol: bottom-copy left endpoint minus top-copy left endpoint.
    deltas: Vec<(SymbolicReal, SymbolicReal)>,
    /// Side index of the identified copy.
    twin: Vec<usize>,
}

/// The shared endpoints have two names; the tracer uses the Top one.
pub(super) fn canonical_vertex(d: usize, v: VertexId) -> VertexId {
    match v {
        VertexId::Bottom(0) => VertexId::Top(0),
        VertexId::Bottom(k) if k == d => VertexId::Top(d),
        other => other,
    }
}

impl<'a> Tracer<'a> {
    pub(super) fn new(s: &'a Surface) -> Self {
        let d = s.d();
        let poly: Polygon = s.polygon();
        let mut sides = Vec::with_capacity(2 * d);
        for k in 0..d {
            sides.push(SideRef {
                symbol: s.perm.top_at(k),
                copy: SideCopy::Top,
                left: poly.upper[k].clone(),
                right: poly.upper[k + 1].clone(),
            });
        }
        for j in 0..d {
            sides.push(SideRef {
                symbol: s.perm.bottom_at(j),
                copy: SideCopy::Bottom,
                left: poly.lower[j].clone(),
                right: poly.lower[j + 1].clone(),
            });
        }
        let mut vertices = Vec::with_capacity(2 * d);
        for k in 0..=d {
            vertices.push((VertexId::Top(k), poly.upper[k].clone()));
        }
        for j in 1..d {
            vertices.push((VertexId::Bottom(j), poly.lower[j].clone()));
        }
        let deltas = s
            .alphabet
            .symbols()
            .map(|a| {
                let top_left = &poly.upper[s.perm.top_pos(a)];
                let bottom_left = &poly.lower[s.perm.bottom_pos(a)];
                (&bottom_left.x - &top_left.x, &bottom_left.y - &top_left.y)
            })
            .collect();
        let twin = (0..2 * d)
            .map(|i| {
                let a = sides[i].symbol;
                match sides[i].copy {
                    SideCopy::Top => d + s.perm.bottom_pos(a),
                    SideCopy::Bottom => s.perm.top_pos(a),
                }
            })
            .collect();
        Tracer {
            s,
            sides,
            vertices,
            deltas,
            twin,
        }
    }

    /// First event strictly to the right of `px` on the horizontal line at
    /// height `y`. `entered` names the side copy the point lies on (skipped
    /// structurally); `skip` names the vertex the ray starts at.
    pub(super) fn scan(
        &self,
        px: &XCoord,
        y: &SymbolicReal,
        entered: Option<usize>,
        skip: Option<VertexId>,
    ) -> Result<Option<(XCoord, EventKind)>, GeometryError> {
        let basis = &self.s.basis;
        let mut best: Option<(XCoord, EventKind)> = None;
        let consider = |best: &mut Option<(XCoord, EventKind)>,
                        x: XCoord,
                        kind: EventKind|
         -> Result<(), GeometryError> {
            match best {
                None => *best = Some((x, kind)),
                Some((bx, _)) => match x.sub(bx).sign(basis)? {
                    Sign::Negative => *best = Some((x, kind)),
                    Sign::Zero => return Err(GeometryError::DegenerateEvent),
                    Sign::Positive => {}
                },
            }
            Ok(())
        };

        for (v, p) in &self.vertices {
            if skip == Some(*v) {
                continue;
            }
            if !(&p.y - y).is_zero() {
                continue;
            }
            let x = XCoord::from_symbolic(p.x.clone());
            match x.sub(px).sign(basis)? {
                Sign::Positive => consider(&mut best, x, EventKind::Vertex(*v))?,
                Sign::Zero => return Err(GeometryError::DegenerateEvent),
                Sign::Negative => {}
            }
        }

        for (i, side) in self.sides.iter().enumerate() {
            if entered == Some(i) {
                continue;
            }
            let tau = &self.s.tau[side.symbol.0];
            if tau.is_zero() {
                continue;
            }
            let s1 = (y - &side.left.y).sign(basis)?;
            let s2 = (y - &side.right.y).sign(basis)?;
            let straddles = matches!(
                (s1, s2),
                (Sign::Positive, Sign::Negative) | (Sign::Negative, Sign::Positive)
            );
            if !straddles {
                continue;
            }
            let dy = y - &side.left.y;
            let x = XCoord::crossing(&side.left.x, &dy, &self.s.lengths[side.symbol.0], tau);
            match x.sub(px).sign(basis)? {
                Sign::Positive => consider(&mut best, x, EventKind::Side(i))?,
                Sign::Zero => return Err(GeometryError::DegenerateEvent),
                Sign::Negative => {}
            }
        }
        Ok(best)
    }
}

/// Follows the rightward horizontal separatrix from a vertex germ (or the
/// origin) until it hits a singularity or survives past `max_length`.
///
/// Vertices whose sector does not contain the rightward direction have no
/// germ and are rejected; a vertex whose rightward ray runs along a
/// horizontal side reports the immediate hit of that side's right endpoint.
pub fn trace_horizontal(
    s: &Surface,
    start: TraceStart,
    max_length: &SymbolicReal,
) -> Result<SeparatrixTrace, GeometryError> {
    let d = s.d();
    let basis = &s.basis;
    let poly = s.polygon();

    // Resolve the germ: starting point, or an immediate run-along hit.
    let run_along =
        |length: SymbolicReal, vertex: VertexId| -> Result<SeparatrixTrace, GeometryError> {
            let outcome = match (&length - max_length).sign(basis)? {
                Sign::Positive => TraceOutcome::Survived,
                _ => TraceOutcome::HitSingularity {
                    vertex: canonical_vertex(d, vertex),
                    length,
                },
            };
            Ok(SeparatrixTrace {
                start,
                budget: max_length.clone(),
                crossings: Vec::new(),
                outcome,
            })
        };

    let (start_point, skip): (Point, VertexId) = match start {
        TraceStart::Origin => (poly.upper[0].clone(), VertexId::Top(0)),
        TraceStart::Vertex(v) => {
            let v = canonical_vertex(d, v);
            match v {
                VertexId::Top(0) => (poly.upper[0].clone(), v),
                VertexId::Top(k) if k == d => {
                    return Err(GeometryError::DegenerateStart { vertex: v })
                }
                VertexId::Top(k) => {
                    let tau = &s.tau[s.perm.top_at(k).0];
                    if tau.is_zero() {
                        let a = s.perm.top_at(k);
                        return run_along(s.lengths[a.0].clone(), VertexId::Top(k + 1));
                    }
                    if tau.sign(basis)? != Sign::Positive {
                        return Err(GeometryError::DegenerateStart { vertex: v });
                    }
                    (poly.upper[k].clone(), v)
                }
                VertexId::Bottom(j) => {
                    let tau = &s.tau[s.perm.bottom_at(j).0];
                    if tau.is_zero() {
                        let b = s.perm.bottom_at(j);
                        return run_along(s.lengths[b.0].clone(), VertexId::Bottom(j + 1));
                    }
                    if tau.sign(basis)? != Sign::Negative {
                        return Err(GeometryError::DegenerateStart { vertex: v });
                    }
                    (poly.lower[j].clone(), v)
                }
            }
        }
    };

    let tracer = Tracer::new(s);
    let mut px = XCoord::from_symbolic(start_point.x.clone());
    let mut y = start_point.y.clone();
    // Sum of teleport x-shifts; the length travelled up to a point at x is
    // x − start.x − offset, exactly.
    let mut offset = SymbolicReal::zero();
    let mut entered: Option<usize> = None;
    let mut skip_vertex = Some(skip);
    let mut crossings = Vec::new();

    loop {
        let event = tracer.scan(&px, &y, entered, skip_vertex.take())?;
        let Some((x, kind)) = event else {
            // A rightward ray inside a closed polygon always meets the
            // boundary; reaching this means the data was not embedded.
            return Err(GeometryError::DegenerateEvent);
        };
        let travelled = x.sub_symbolic(&(&start_point.x + &offset));
        let over_budget = travelled.sub_symbolic(max_length).sign(basis)? == Sign::Positive;
        match kind {
            EventKind::Vertex(v) => {
                if over_budget {
                    return Ok(SeparatrixTrace {
                        start,
                        budget: max_length.clone(),
                        crossings,
                        outcome: TraceOutcome::Survived,
                    });
                }
                let length = travelled
                    .as_symbolic()
                    .expect("vertex positions and teleports stay in the span")
                    .clone();
                return Ok(SeparatrixTrace {
                    start,
                    budget: max_length.clone(),
                    crossings,
                    outcome: TraceOutcome::HitSingularity { vertex: v, length },
                });
            }
            EventKind::Side(i) => {
                if over_budget {
                    return Ok(SeparatrixTrace {
                        start,
                        budget: max_length.clone(),
                        crossings,
                        outcome: TraceOutcome::Survived,
                    });
                }
                if crossings.len() >= MAX_CROSSINGS {
                    return Err(GeometryError::TooManyCrossings { cap: MAX_CROSSINGS });
                }
                let symbol = tracer.sides[i].symbol;
                let copy = tracer.sides[i].copy;
                let (dx, dy) = &tracer.deltas[symbol.0];
                let (enter_x, enter_y) = match copy {
                    SideCopy::Top => {
                        let mut e = x.clone();
                        e.shift(dx);
                        offset += dx;
                        (e, &y + dy)
                    }
                    SideCopy::Bottom => {
                        let mut e = x.clone();
                        e.shift(&-dx);
                        offset -= dx;
                        (e, &y - dy)
                    }
                };
                crossings.push(Crossing {
                    symbol,
                    copy,
                    exit_x: x,
                    exit_y: y.clone(),
                    enter_x: enter_x.clone(),
                    enter_y: enter_y.clone(),
                });
                entered = Some(tracer.twin[i]);
                px = enter_x;
                y = enter_y;
            }
        }
    }
}

/// Symbol of the first side crossed by the rightward separatrix leaving the
/// origin. Undefined when Στ = 0 (the origin ray then ends in the closing
/// vertex instead of crossing a side).
pub fn origin_winner(s: &Surface) -> Result<Symbol, GeometryError> {
    if s.total_tau().sign(&s.basis)? == Sign::Zero {
        return Err(GeometryError::OriginUndefined);
    }
    let tracer = Tracer::new(s);
    let px = XCoord::zero();
    let y = SymbolicReal::zero();
    match tracer.scan(&px, &y, None, Some(VertexId::Top(0)))? {
        Some((_, EventKind::Side(i))) => Ok(tracer.sides[i].symbol),
        _ => Err(GeometryError::DegenerateEvent),
    }
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
    fn origin_trace_hits_closing_vertex_when_tau_balances() {
        // Στ = 0: the origin ray crosses nothing and ends at the closing
        // vertex, at distance |λ| = 7.
        let s = surface(
            "ABCD",
            "DCBA",
            &["4", "1", "1", "1"],
            &["1", "1/2", "-1/2", "-1"],
        );
        let t = trace_horizontal(&s, TraceStart::Origin, &val("100")).unwrap();
        assert!(t.crossings.is_empty());
        assert_eq!(
            t.outcome,
            TraceOutcome::HitSingularity {
                vertex: VertexId::Top(4),
                length: val("7"),
            }
        );
    }

    #[test]
    fn direct_vertex_hits_between_equal_heights() {
        let s = surface(
            "ABCD",
            "DCBA",
            &["1", "1", "1", "1"],
            &["1*sqrt2", "1/2", "-1/2", "-1"],
        );
        let up = trace_horizontal(&s, TraceStart::Vertex(VertexId::Top(1)), &val("10")).unwrap();
        assert!(up.crossings.is_empty());
        assert_eq!(
            up.outcome,
            TraceOutcome::HitSingularity {
                vertex: VertexId::Top(3),
                length: val("2"),
            }
        );
        let down =
            trace_horizontal(&s, TraceStart::Vertex(VertexId::Bottom(1)), &val("10")).unwrap();
        assert!(down.crossings.is_empty());
        assert_eq!(
            down.outcome,
            TraceOutcome::HitSingularity {
                vertex: VertexId::Bottom(3),
                length: val("2"),
            }
        );
    }

    #[test]
    fn origin_ray_survives_budget_after_bouncing() {
        // Three-symbol surface with a horizontal side; the origin germ winds
        // through B-free crossings (A and C alternate) and never meets a
        // vertex before length 10.
        let s = surface("ABC", "CBA", &["1", "1", "1"], &["1*sqrt2", "0", "-1"]);
        let t = trace_horizontal(&s, TraceStart::Origin, &val("10")).unwrap();
        assert_eq!(t.outcome, TraceOutcome::Survived);
        let seen: Vec<(Symbol, SideCopy)> =
            t.crossings.iter().map(|c| (c.symbol, c.copy)).collect();
        assert_eq!(
            seen,
            vec![
                (sym('A'), SideCopy::Bottom),
                (sym('C'), SideCopy::Top),
                (sym('A'), SideCopy::Bottom),
                (sym('C'), SideCopy::Top),
            ]
        );
    }

    #[test]
    fn crossing_coordinates_match_hand_computed_values() {
        let s = surface("ABC", "CBA", &["1", "1", "1"], &["1*sqrt2", "0", "-1"]);
        let t = trace_horizontal(&s, TraceStart::Origin, &val("10")).unwrap();
        // 2+1/√2, 1+√2, 1+√2, 2√2 — traced by hand through the polygon.
        let expected = [
            "2.70710678119",
            "2.41421356237",
            "2.41421356237",
            "2.82842712475",
        ];
        let got: Vec<String> = t
            .crossings
            .iter()
            .map(|c| c.exit_x.approx_decimal(&s.basis, 12).unwrap())
            .collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn reentry_lands_on_the_identified_copy() {
        // After every crossing the trace continues from the twin side: the
        // re-entry point must sit on that side's line at the recorded height.
        let s = surface("ABC", "CBA", &["1", "1", "1"], &["1*sqrt2", "0", "-1"]);
        let poly = s.polygon();
        let t = trace_horizontal(&s, TraceStart::Origin, &val("10")).unwrap();
        assert_eq!(t.crossings.len(), 4);
        for c in &t.crossings {
            let twin_left = match c.copy {
                SideCopy::Top => &poly.lower[s.perm.bottom_pos(c.symbol)],
                SideCopy::Bottom => &poly.upper[s.perm.top_pos(c.symbol)],
            };
            let dy = &c.enter_y - &twin_left.y;
            let expected = XCoord::crossing(
                &twin_left.x,
                &dy,
                &s.lengths[c.symbol.0],
                &s.tau[c.symbol.0],
            );
            assert_eq!(c.enter_x, expected);
        }
    }

    #[test]
    fn run_along_starts_hit_the_adjacent_vertex() {
        let s = surface("ABC", "CBA", &["1", "1", "1"], &["1*sqrt2", "0", "-1"]);
        let t = trace_horizontal(&s, TraceStart::Vertex(VertexId::Bottom(1)), &val("10")).unwrap();
        assert!(t.crossings.is_empty());
        assert_eq!(
            t.outcome,
            TraceOutcome::HitSingularity {
                vertex: VertexId::Bottom(2),
                length: val("1"),
            }
        );
        let t = trace_horizontal(&s, TraceStart::Vertex(VertexId::Top(1)), &val("10")).unwrap();
        assert_eq!(
            t.outcome,
            TraceOutcome::HitSingularity {
                vertex: VertexId::Top(2),
                length: val("1"),
            }
        );
    }

    #[test]
    fn vertices_without_rightward_germs_are_rejected() {
        let s = surface("ABC", "CBA", &["1", "1", "1"], &["1*sqrt2", "0", "-1"]);
        // τ of the side right of a(2) is negative: the sector there opens
        // leftward only.
        assert!(matches!(
            trace_horizontal(&s, TraceStart::Vertex(VertexId::Top(2)), &val("10")),
            Err(GeometryError::DegenerateStart {
                vertex: VertexId::Top(2)
            })
        ));
        // The closing vertex never has a rightward germ.
        assert!(matches!(
            trace_horizontal(&s, TraceStart::Vertex(VertexId::Bottom(3)), &val("10")),
            Err(GeometryError::DegenerateStart {
                vertex: VertexId::Top(3)
            })
        ));
    }

    #[test]
    fn origin_winner_matches_backward_winner() {
        // Στ > 0: the bottom-last symbol's side is the unique candidate.
        let s = surface(
            "ABCD",
            "DCBA",
            &["1", "1", "1", "1"],
            &["2", "1/2", "-1/2", "-1"],
        );
        assert_eq!(origin_winner(&s).unwrap(), sym('A'));

        // Στ = 2−2√2 < 0: the top-last side wins.
        let s2 = surface(
            "ABCD",
            "DCBA",
            &["4", "1", "1", "1"],
            &["2+-1*sqrt2", "1/2", "-1/2", "-1*sqrt2"],
        );
        assert_eq!(origin_winner(&s2).unwrap(), sym('D'));

        // Στ = 0: undefined.
        let s3 = surface(
            "ABCD",
            "DCBA",
            &["4", "1", "1", "1"],
            &["1", "1/2", "-1/2", "-1"],
        );
        assert!(matches!(
            origin_winner(&s3),
            Err(GeometryError::OriginUndefined)
        ));

        let swap = surface("AB", "BA", &["2", "1"], &["1", "-2"]);
        assert_eq!(origin_winner(&swap).unwrap(), sym('B'));
    }
}
