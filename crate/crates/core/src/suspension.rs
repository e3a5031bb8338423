//! Suspension data over an IET: the cone of valid vertical displacements,
//! the polygon between the two broken lines, zippered-rectangle heights, and
//! the identification of polygon vertices into singularities.
//!
//! Vertex identification and cone angles are read off the polygon
//! presentation: each corner of the polygon contributes the angular sector
//! between its two adjacent sides, corners are chained through the side
//! gluings, and the cone angle of a class is π times the number of
//! horizontal-axis crossings of its sectors. The sector bookkeeping assumes
//! the polygon is embedded (the broken lines only meet at the shared
//! endpoints); suspension data can violate that without violating the cone
//! conditions, in which case angle counts refer to the immersed picture.

use crate::iet::{Iet, IetError, PermutationPair, Symbol};
use crate::numeric::{Basis, NumericError, Sign, SymbolicReal};
use std::collections::BTreeMap;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SuspensionError {
    #[error("suspension cone violated: {side} partial sum {k} has the wrong sign")]
    ThetaViolated { side: &'static str, k: usize },
    #[error("height of `{symbol}` is not strictly positive")]
    NonPositiveHeight { symbol: String },
    #[error(transparent)]
    Iet(#[from] IetError),
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

/// A point of the plane with exact coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Point {
    pub x: SymbolicReal,
    pub y: SymbolicReal,
}

/// Which copy of a symbol's side: the segment on the upper broken line or
/// the identified one on the lower broken line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SideCopy {
    Top,
    Bottom,
}

impl SideCopy {
    pub fn as_str(self) -> &'static str {
        match self {
            SideCopy::Top => "top",
            SideCopy::Bottom => "bottom",
        }
    }
}

/// A polygon vertex: `Top(k)` is a(k) on the upper broken line, `Bottom(k)`
/// is b(k) on the lower one, k = 0..=d. Top(0) and Bottom(0) name the same
/// point, as do Top(d) and Bottom(d).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VertexId {
    Top(usize),
    Bottom(usize),
}

/// A corner of the polygon: the angular sector the surface occupies at a
/// vertex. Interior vertices of the upper line are `Upper(k)` (at a(k)),
/// of the lower line `Lower(j)` (at b(j)), k, j = 1..d−1; the two shared
/// endpoints are `Origin` and `Closing`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Corner {
    Origin,
    Upper(usize),
    Lower(usize),
    Closing,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polygon {
    /// a(0)..a(d)
    pub upper: Vec<Point>,
    /// b(0)..b(d)
    pub lower: Vec<Point>,
}

impl Polygon {
    pub fn vertex(&self, v: VertexId) -> &Point {
        match v {
            VertexId::Top(k) => &self.upper[k],
            VertexId::Bottom(k) => &self.lower[k],
        }
    }
}

/// One identified vertex class with its cone data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SingularityClass {
    /// The gluing walk around the class, in cycle order.
    pub corners: Vec<Corner>,
    /// Polygon vertices belonging to the class.
    pub vertices: Vec<VertexId>,
    /// Cone angle = half_turns · π.
    pub half_turns: usize,
    /// Number of horizontal rightward separatrix germs leaving the class.
    pub rightward_germs: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SingularityClasses {
    pub classes: Vec<SingularityClass>,
    class_of: BTreeMap<Corner, usize>,
    d: usize,
}

impl SingularityClasses {
    pub fn class_of_corner(&self, c: Corner) -> usize {
        self.class_of[&c]
    }

    pub fn class_of_vertex(&self, v: VertexId) -> usize {
        let d = self.d;
        let corner = match v {
            VertexId::Top(0) | VertexId::Bottom(0) => Corner::Origin,
            VertexId::Top(k) if k == d => Corner::Closing,
            VertexId::Bottom(k) if k == d => Corner::Closing,
            VertexId::Top(k) => Corner::Upper(k),
            VertexId::Bottom(k) => Corner::Lower(k),
        };
        self.class_of[&corner]
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }
}

/// Suspension data (π, λ, τ): an IET together with vertical displacements
/// in the suspension cone, presenting a translation surface.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Surface {
    pub alphabet: Arc<crate::iet::Alphabet>,
    pub basis: Arc<Basis>,
    pub perm: PermutationPair,
    pub lengths: Vec<SymbolicReal>,
    pub tau: Vec<SymbolicReal>,
}

/// Checks the 2(d−1) strict cone conditions: top partial sums of τ
/// positive, bottom partial sums negative, for prefix lengths 1..d−1.
pub fn validate_suspension(
    perm: &PermutationPair,
    tau: &[SymbolicReal],
    basis: &Basis,
) -> Result<(), SuspensionError> {
    let d = perm.d();
    let mut top_sum = SymbolicReal::zero();
    let mut bottom_sum = SymbolicReal::zero();
    for k in 1..d {
        top_sum += &tau[perm.top_at(k - 1).0];
        if top_sum.sign(basis)? != Sign::Positive {
            return Err(SuspensionError::ThetaViolated { side: "top", k });
        }
        bottom_sum += &tau[perm.bottom_at(k - 1).0];
        if bottom_sum.sign(basis)? != Sign::Negative {
            return Err(SuspensionError::ThetaViolated { side: "bottom", k });
        }
    }
    Ok(())
}

impl Surface {
    pub fn new(
        alphabet: Arc<crate::iet::Alphabet>,
        basis: Arc<Basis>,
        perm: PermutationPair,
        lengths: Vec<SymbolicReal>,
        tau: Vec<SymbolicReal>,
    ) -> Result<Self, SuspensionError> {
        let d = alphabet.len();
        if tau.len() != d {
            return Err(IetError::WrongArity {
                expected: d,
                got: tau.len(),
            }
            .into());
        }
        for t in &tau {
            t.check_basis(&basis)?;
        }
        // Length validation (positivity, arity, basis closure) is shared
        // with the plain IET constructor.
        let iet = Iet::new(alphabet, Arc::clone(&basis), perm, lengths)?;
        validate_suspension(&iet.perm, &tau, &basis)?;
        Ok(Surface {
            alphabet: iet.alphabet,
            basis,
            perm: iet.perm,
            lengths: iet.lengths,
            tau,
        })
    }

    pub fn d(&self) -> usize {
        self.alphabet.len()
    }

    /// The underlying interval exchange (π, λ).
    pub fn iet(&self) -> Iet {
        Iet {
            alphabet: Arc::clone(&self.alphabet),
            basis: Arc::clone(&self.basis),
            perm: self.perm.clone(),
            lengths: self.lengths.clone(),
        }
    }

    pub fn total_length(&self) -> SymbolicReal {
        SymbolicReal::sum(self.lengths.iter())
    }

    pub fn total_tau(&self) -> SymbolicReal {
        SymbolicReal::sum(self.tau.iter())
    }

    /// Symbols whose τ entry is exactly zero: their sides are horizontal.
    pub fn horizontal_symbols(&self) -> Vec<Symbol> {
        self.alphabet
            .symbols()
            .filter(|s| self.tau[s.0].is_zero())
            .collect()
    }

    /// Cumulative vertices of the two broken lines:
    /// a(k) = Σ_{top position < k} (λ, τ), likewise b(k) along the bottom
    /// order. Both lines start at the origin and close up at the same point.
    pub fn polygon(&self) -> Polygon {
        let d = self.d();
        let chain = |order: &[Symbol]| {
            let mut pts = Vec::with_capacity(d + 1);
            let mut x = SymbolicReal::zero();
            let mut y = SymbolicReal::zero();
            pts.push(Point {
                x: x.clone(),
                y: y.clone(),
            });
            for &s in order {
                x += &self.lengths[s.0];
                y += &self.tau[s.0];
                pts.push(Point {
                    x: x.clone(),
                    y: y.clone(),
                });
            }
            pts
        };
        let upper = chain(self.perm.top());
        let lower = chain(self.perm.bottom());
        debug_assert_eq!(upper[d], lower[d], "polygon must close up exactly");
        Polygon { upper, lower }
    }

    /// Endpoints of the given copy of a symbol's side, left then right.
    pub fn side_endpoints(&self, polygon: &Polygon, s: Symbol, copy: SideCopy) -> (Point, Point) {
        match copy {
            SideCopy::Top => {
                let k = self.perm.top_pos(s);
                (polygon.upper[k].clone(), polygon.upper[k + 1].clone())
            }
            SideCopy::Bottom => {
                let k = self.perm.bottom_pos(s);
                (polygon.lower[k].clone(), polygon.lower[k + 1].clone())
            }
        }
    }

    /// Zippered-rectangle heights h = Ωᵀτ; strictly positive on the cone.
    pub fn heights(&self) -> Result<Vec<SymbolicReal>, SuspensionError> {
        let d = self.d();
        let mut out = Vec::with_capacity(d);
        for a in 0..d {
            let mut h = SymbolicReal::zero();
            for b in 0..d {
                match self.perm.omega(Symbol(b), Symbol(a)) {
                    1 => h += &self.tau[b],
                    -1 => h -= &self.tau[b],
                    _ => {}
                }
            }
            if h.sign(&self.basis)? != Sign::Positive {
                return Err(SuspensionError::NonPositiveHeight {
                    symbol: self.alphabet.name(Symbol(a)).to_string(),
                });
            }
            out.push(h);
        }
        Ok(out)
    }

    /// Area Σ_α λ_α·h_α of the surface, exact when each term has a rational
    /// factor (always true for the rational-length surfaces used in the
    /// conservation tests). `None` when some term is a product of two
    /// irrational values, which the scalar representation cannot hold.
    pub fn area(&self) -> Result<Option<SymbolicReal>, SuspensionError> {
        let heights = self.heights()?;
        let mut area = SymbolicReal::zero();
        for (l, h) in self.lengths.iter().zip(&heights) {
            if let Some(q) = l.as_rational() {
                area += &h.scale(&q);
            } else if let Some(q) = h.as_rational() {
                area += &l.scale(&q);
            } else {
                return Ok(None);
            }
        }
        Ok(Some(area))
    }

    /// The corner that follows `c` when walking around its vertex class
    /// through the side gluings.
    fn next_corner(&self, c: Corner) -> Corner {
        let d = self.d();
        match c {
            Corner::Origin => {
                let a = self.perm.top_at(0);
                // bottom_pos ≥ 1: the pair would be reducible otherwise.
                Corner::Lower(self.perm.bottom_pos(a))
            }
            Corner::Upper(k) => {
                let a = self.perm.top_at(k);
                match self.perm.bottom_pos(a) {
                    0 => Corner::Origin,
                    j => Corner::Lower(j),
                }
            }
            Corner::Lower(j) => {
                let g = self.perm.bottom_at(j - 1);
                let k = self.perm.top_pos(g) + 1;
                if k == d {
                    Corner::Closing
                } else {
                    Corner::Upper(k)
                }
            }
            Corner::Closing => {
                let g = self.perm.bottom_at(d - 1);
                // top_pos ≤ d−2 by irreducibility.
                Corner::Upper(self.perm.top_pos(g) + 1)
            }
        }
    }

    /// Horizontal-axis crossings (+x germs, −x rays) of the sector at one
    /// corner. Sectors are half-open so that consecutive corners in the
    /// gluing walk share each boundary direction exactly once; with that
    /// convention a class's crossings sum to its cone angle in half-turns,
    /// and its +x count is the number of rightward separatrix germs.
    fn corner_crossings(&self, c: Corner) -> Result<(usize, usize), NumericError> {
        let sign = |s: Symbol| self.tau[s.0].sign(&self.basis);
        let d = self.d();
        Ok(match c {
            Corner::Origin => (1, 0),
            Corner::Upper(k) => {
                let plus = sign(self.perm.top_at(k))? == Sign::Positive;
                let minus = sign(self.perm.top_at(k - 1))? != Sign::Positive;
                (plus as usize, minus as usize)
            }
            Corner::Lower(j) => {
                let plus = sign(self.perm.bottom_at(j))? != Sign::Positive;
                let minus = sign(self.perm.bottom_at(j - 1))? == Sign::Positive;
                (plus as usize, minus as usize)
            }
            Corner::Closing => {
                let upper_in = sign(self.perm.top_at(d - 1))? != Sign::Positive;
                let lower_in = sign(self.perm.bottom_at(d - 1))? == Sign::Positive;
                (0, (upper_in && lower_in) as usize)
            }
        })
    }

    /// Partition of the 2(d+1) polygon vertices into identified classes,
    /// with cone angles (as half-turns) and rightward germ counts.
    pub fn singularity_classes(&self) -> Result<SingularityClasses, SuspensionError> {
        let d = self.d();
        let mut all = Vec::with_capacity(2 * d);
        all.push(Corner::Origin);
        for k in 1..d {
            all.push(Corner::Upper(k));
        }
        for j in 1..d {
            all.push(Corner::Lower(j));
        }
        all.push(Corner::Closing);

        let mut class_of = BTreeMap::new();
        let mut classes = Vec::new();
        for &start in &all {
            if class_of.contains_key(&start) {
                continue;
            }
            let id = classes.len();
            let mut corners = Vec::new();
            let mut c = start;
            loop {
                let prev = class_of.insert(c, id);
                assert!(prev.is_none(), "vertex gluing walk revisited {c:?}");
                corners.push(c);
                c = self.next_corner(c);
                if c == start {
                    break;
                }
            }
            let mut plus = 0;
            let mut minus = 0;
            for &corner in &corners {
                let (p, m) = self.corner_crossings(corner)?;
                plus += p;
                minus += m;
            }
            let vertices = corners
                .iter()
                .flat_map(|&corner| match corner {
                    Corner::Origin => vec![VertexId::Top(0), VertexId::Bottom(0)],
                    Corner::Closing => vec![VertexId::Top(d), VertexId::Bottom(d)],
                    Corner::Upper(k) => vec![VertexId::Top(k)],
                    Corner::Lower(j) => vec![VertexId::Bottom(j)],
                })
                .collect();
            classes.push(SingularityClass {
                corners,
                vertices,
                half_turns: plus + minus,
                rightward_germs: plus,
            });
        }
        Ok(SingularityClasses {
            classes,
            class_of,
            d,
        })
    }
}
