//! Interval exchange transformations: alphabets, permutation pairs, the
//! translation matrix Ω, the map itself, Keane's condition, and the forward
//! Rauzy-Veech step on (π, λ).
//!
//! Permutations are stored as ranked orders: `top[k]` is the symbol whose
//! interval comes (k+1)-th from the left on the top side, likewise `bottom`.
//! All positions in this crate are 0-based; the Rauzy moves become O(d) list
//! splices.

use crate::numeric::{compare, Basis, NumericError, Rational, Sign, SymbolicReal};
use num_traits::Zero;
use std::cmp::Ordering;
use std::sync::Arc;

/// Index into an [`Alphabet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(pub usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IetError {
    #[error("alphabet needs at least 2 symbols, got {got}")]
    AlphabetTooSmall { got: usize },
    #[error("duplicate symbol `{name}`")]
    DuplicateSymbol { name: String },
    #[error("unknown symbol `{name}`")]
    UnknownSymbol { name: String },
    #[error("{order} order is not a permutation of the alphabet")]
    NotAPermutation { order: &'static str },
    #[error("permutation pair is reducible: first {k} top symbols equal the first {k} bottom symbols as a set")]
    Reducible { k: usize },
    #[error("expected {expected} entries, got {got}")]
    WrongArity { expected: usize, got: usize },
    #[error("length of `{symbol}` is not strictly positive")]
    NonPositiveLength { symbol: String },
    #[error("point lies outside [0, |λ|)")]
    OutOfDomain,
    #[error("forward Rauzy step undefined: the two last intervals have equal length")]
    RauzyUndefined,
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

impl Alphabet {
    pub fn new<I, S>(names: I) -> Result<Self, IetError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.len() < 2 {
            return Err(IetError::AlphabetTooSmall { got: names.len() });
        }
        for (i, name) in names.iter().enumerate() {
            if names[..i].contains(name) {
                return Err(IetError::DuplicateSymbol { name: name.clone() });
            }
        }
        Ok(Alphabet { names })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction requires at least two symbols
    }

    pub fn name(&self, s: Symbol) -> &str {
        &self.names[s.0]
    }

    pub fn symbol(&self, name: &str) -> Result<Symbol, IetError> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(Symbol)
            .ok_or_else(|| IetError::UnknownSymbol {
                name: name.to_string(),
            })
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> {
        (0..self.names.len()).map(Symbol)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.names.iter().map(|s| s.as_str())
    }
}

/// Which of the two orders drives a Rauzy move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StepKind {
    Top,
    Bottom,
}

impl StepKind {
    pub fn as_str(self) -> &'static str {
        match self {
            StepKind::Top => "top",
            StepKind::Bottom => "bottom",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Forward => "forward",
            Direction::Backward => "backward",
        }
    }
}

/// One induction move: its direction, type, winner, and loser.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepRecord {
    pub direction: Direction,
    pub kind: StepKind,
    pub winner: Symbol,
    pub loser: Symbol,
}

/// A pair of ranked orders over the same alphabet, validated irreducible:
/// no proper prefix of the top order equals the same-length bottom prefix as
/// a set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PermutationPair {
    top: Vec<Symbol>,
    bottom: Vec<Symbol>,
    top_pos: Vec<usize>,
    bottom_pos: Vec<usize>,
}

fn positions(order: &[Symbol], which: &'static str) -> Result<Vec<usize>, IetError> {
    let d = order.len();
    let mut pos = vec![usize::MAX; d];
    for (k, s) in order.iter().enumerate() {
        if s.0 >= d || pos[s.0] != usize::MAX {
            return Err(IetError::NotAPermutation { order: which });
        }
        pos[s.0] = k;
    }
    Ok(pos)
}

impl PermutationPair {
    pub fn new(top: Vec<Symbol>, bottom: Vec<Symbol>) -> Result<Self, IetError> {
        let d = top.len();
        if d < 2 {
            return Err(IetError::AlphabetTooSmall { got: d });
        }
        if bottom.len() != d {
            return Err(IetError::WrongArity {
                expected: d,
                got: bottom.len(),
            });
        }
        let top_pos = positions(&top, "top")?;
        let bottom_pos = positions(&bottom, "bottom")?;
        // The first k+1 top symbols equal the first k+1 bottom symbols as a
        // set exactly when the largest bottom position among them is k.
        let mut max_bottom = 0;
        for k in 0..d - 1 {
            max_bottom = max_bottom.max(bottom_pos[top[k].0]);
            if max_bottom == k {
                return Err(IetError::Reducible { k: k + 1 });
            }
        }
        Ok(PermutationPair {
            top,
            bottom,
            top_pos,
            bottom_pos,
        })
    }

    pub fn d(&self) -> usize {
        self.top.len()
    }

    pub fn top(&self) -> &[Symbol] {
        &self.top
    }

    pub fn bottom(&self) -> &[Symbol] {
        &self.bottom
    }

    pub fn order(&self, kind: StepKind) -> &[Symbol] {
        match kind {
            StepKind::Top => &self.top,
            StepKind::Bottom => &self.bottom,
        }
    }

    /// 0-based position of `s` in the top order.
    pub fn top_pos(&self, s: Symbol) -> usize {
        self.top_pos[s.0]
    }

    pub fn bottom_pos(&self, s: Symbol) -> usize {
        self.bottom_pos[s.0]
    }

    pub fn top_at(&self, k: usize) -> Symbol {
        self.top[k]
    }

    pub fn bottom_at(&self, k: usize) -> Symbol {
        self.bottom[k]
    }

    pub fn top_last(&self) -> Symbol {
        *self.top.last().unwrap()
    }

    pub fn bottom_last(&self) -> Symbol {
        *self.bottom.last().unwrap()
    }

    /// Entry ω_{ab} of the translation matrix: +1 when a precedes b on top
    /// and follows it on the bottom, −1 in the mirrored case, 0 otherwise.
    pub fn omega(&self, a: Symbol, b: Symbol) -> i8 {
        let top = self.top_pos[a.0].cmp(&self.top_pos[b.0]);
        let bottom = self.bottom_pos[a.0].cmp(&self.bottom_pos[b.0]);
        match (top, bottom) {
            (Ordering::Less, Ordering::Greater) => 1,
            (Ordering::Greater, Ordering::Less) => -1,
            _ => 0,
        }
    }

    pub fn omega_matrix(&self) -> Vec<Vec<i8>> {
        let d = self.d();
        (0..d)
            .map(|a| (0..d).map(|b| self.omega(Symbol(a), Symbol(b))).collect())
            .collect()
    }

    /// Forward Rauzy move on the orders. TOP type: the bottom-last symbol is
    /// removed and re-inserted immediately after the winner (the top-last
    /// symbol) in the bottom order. BOTTOM type is the mirror image.
    pub(crate) fn forward_spliced(&self, kind: StepKind) -> PermutationPair {
        let (stay, mut moved) = match kind {
            StepKind::Top => (self.top.clone(), self.bottom.clone()),
            StepKind::Bottom => (self.bottom.clone(), self.top.clone()),
        };
        let winner = *stay.last().unwrap();
        let loser = moved.pop().unwrap();
        let winner_pos = moved.iter().position(|&s| s == winner).unwrap();
        moved.insert(winner_pos + 1, loser);
        let (top, bottom) = match kind {
            StepKind::Top => (stay, moved),
            StepKind::Bottom => (moved, stay),
        };
        PermutationPair::new(top, bottom).expect("forward Rauzy move preserves irreducibility")
    }

    /// Backward Rauzy move on the orders. TOP type: the symbol following the
    /// winner (the top-last symbol) in the bottom order moves to the end of
    /// the bottom order; that symbol is returned (the donor whose length and
    /// suspension data are absorbed by the winner). BOTTOM type mirrored.
    pub(crate) fn backward_spliced(&self, kind: StepKind) -> (PermutationPair, Symbol) {
        let (stay, mut moved) = match kind {
            StepKind::Top => (self.top.clone(), self.bottom.clone()),
            StepKind::Bottom => (self.bottom.clone(), self.top.clone()),
        };
        let winner = *stay.last().unwrap();
        let winner_pos = moved.iter().position(|&s| s == winner).unwrap();
        // The winner cannot also be last in the other order: the pair would
        // be reducible at d−1.
        let donor = moved.remove(winner_pos + 1);
        moved.push(donor);
        let (top, bottom) = match kind {
            StepKind::Top => (stay, moved),
            StepKind::Bottom => (moved, stay),
        };
        let pair = PermutationPair::new(top, bottom)
            .expect("backward Rauzy move preserves irreducibility");
        (pair, donor)
    }
}

/// The result of a Keane-condition check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KeaneCheck {
    /// The length coefficient vectors over the basis have full rank d: no
    /// nontrivial rational relation exists, which is sufficient for Keane's
    /// condition on an irreducible pair.
    IndependentSufficient,
    /// Discontinuity orbits were followed to `depth` steps with no
    /// coincidence beyond the allowed one-step T(a) = 0 case.
    NoViolationUpTo { depth: usize },
    /// T^steps(start) = target for a discontinuity `start` and a point
    /// `target` that is a discontinuity or 0 (outside the allowed case).
    Violated {
        steps: usize,
        start: SymbolicReal,
        target: SymbolicReal,
    },
}

/// An interval exchange transformation with exact lengths.
#[derive(Debug, Clone)]
pub struct Iet {
    pub alphabet: Arc<Alphabet>,
    pub basis: Arc<Basis>,
    pub perm: PermutationPair,
    pub lengths: Vec<SymbolicReal>,
}

impl Iet {
    pub fn new(
        alphabet: Arc<Alphabet>,
        basis: Arc<Basis>,
        perm: PermutationPair,
        lengths: Vec<SymbolicReal>,
    ) -> Result<Self, IetError> {
        let d = alphabet.len();
        if perm.d() != d {
            return Err(IetError::WrongArity {
                expected: d,
                got: perm.d(),
            });
        }
        if lengths.len() != d {
            return Err(IetError::WrongArity {
                expected: d,
                got: lengths.len(),
            });
        }
        for (i, l) in lengths.iter().enumerate() {
            l.check_basis(&basis)?;
            if l.sign(&basis)? != Sign::Positive {
                return Err(IetError::NonPositiveLength {
                    symbol: alphabet.name(Symbol(i)).to_string(),
                });
            }
        }
        Ok(Iet {
            alphabet,
            basis,
            perm,
            lengths,
        })
    }

    pub fn d(&self) -> usize {
        self.alphabet.len()
    }

    pub fn total_length(&self) -> SymbolicReal {
        SymbolicReal::sum(self.lengths.iter())
    }

    /// Left endpoint of each symbol's interval in the given order:
    /// entry k is the partial sum of the first k lengths.
    pub fn left_endpoints(&self, kind: StepKind) -> Vec<SymbolicReal> {
        let order = self.perm.order(kind);
        let mut out = Vec::with_capacity(self.d());
        let mut acc = SymbolicReal::zero();
        for &s in order {
            out.push(acc.clone());
            acc += &self.lengths[s.0];
        }
        out
    }

    /// δ = Ω_π λ: the translation applied on each symbol's interval.
    pub fn displacements(&self) -> Vec<SymbolicReal> {
        let d = self.d();
        (0..d)
            .map(|a| {
                let mut delta = SymbolicReal::zero();
                for b in 0..d {
                    match self.perm.omega(Symbol(a), Symbol(b)) {
                        1 => delta += &self.lengths[b],
                        -1 => delta -= &self.lengths[b],
                        _ => {}
                    }
                }
                delta
            })
            .collect()
    }

    /// Symbol of the interval containing `x` (intervals are left-closed
    /// right-open in top order).
    pub fn symbol_at(&self, x: &SymbolicReal) -> Result<Symbol, IetError> {
        if x.sign(&self.basis)? == Sign::Negative {
            return Err(IetError::OutOfDomain);
        }
        let mut right = SymbolicReal::zero();
        for &s in self.perm.top() {
            right += &self.lengths[s.0];
            if compare(x, &right, &self.basis)? == Ordering::Less {
                return Ok(s);
            }
        }
        Err(IetError::OutOfDomain)
    }

    /// T(x) = x + δ_α for x ∈ I_α.
    pub fn apply(&self, x: &SymbolicReal) -> Result<SymbolicReal, IetError> {
        let s = self.symbol_at(x)?;
        Ok(x + &self.displacements()[s.0])
    }

    /// Depth-bounded Keane check: full-rank lengths are reported as
    /// sufficient outright; otherwise the orbit of every discontinuity is
    /// followed `depth` steps looking for a hit on a discontinuity or on 0,
    /// ignoring the single allowed coincidence T(a) = 0 at one step.
    pub fn keane_check(&self, depth: usize) -> Result<KeaneCheck, IetError> {
        if self.length_rank() == self.d() {
            return Ok(KeaneCheck::IndependentSufficient);
        }
        let lefts = self.left_endpoints(StepKind::Top);
        let discontinuities: Vec<SymbolicReal> = lefts[1..].to_vec();
        let mut targets = discontinuities.clone();
        targets.push(SymbolicReal::zero());
        let delta = self.displacements();
        for start in &discontinuities {
            let mut x = start.clone();
            for n in 1..=depth {
                let s = self.symbol_at(&x)?;
                x = &x + &delta[s.0];
                for target in &targets {
                    if &x == target {
                        if n == 1 && target.is_zero() {
                            continue; // T(a) = 0 is the allowed coincidence
                        }
                        return Ok(KeaneCheck::Violated {
                            steps: n,
                            start: start.clone(),
                            target: target.clone(),
                        });
                    }
                }
            }
        }
        Ok(KeaneCheck::NoViolationUpTo { depth })
    }

    /// Rank over ℚ of the matrix whose rows are the length coefficient
    /// vectors over the basis.
    #[allow(clippy::needless_range_loop)] // row ops read one row while writing another
    fn length_rank(&self) -> usize {
        let cols: Vec<&str> = self.basis.names().collect();
        let mut rows: Vec<Vec<Rational>> = self
            .lengths
            .iter()
            .map(|l| cols.iter().map(|c| l.coeff(c)).collect())
            .collect();
        let mut rank = 0;
        for col in 0..cols.len() {
            let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
                continue;
            };
            rows.swap(rank, pivot);
            let head = rows[rank][col].clone();
            for r in rank + 1..rows.len() {
                if rows[r][col].is_zero() {
                    continue;
                }
                let factor = &rows[r][col] / &head;
                for c in col..cols.len() {
                    let sub = &rows[rank][c] * &factor;
                    rows[r][c] = &rows[r][c] - &sub;
                }
            }
            rank += 1;
            if rank == rows.len() {
                break;
            }
        }
        rank
    }

    /// One forward Rauzy-Veech step: the longer of the two last intervals
    /// wins, its length shrinks by the loser's, and the loser is re-inserted
    /// immediately after the winner in its order.
    pub fn forward_step(&self) -> Result<(Iet, StepRecord), IetError> {
        let top_last = self.perm.top_last();
        let bottom_last = self.perm.bottom_last();
        let kind = match compare(
            &self.lengths[top_last.0],
            &self.lengths[bottom_last.0],
            &self.basis,
        )? {
            Ordering::Greater => StepKind::Top,
            Ordering::Less => StepKind::Bottom,
            Ordering::Equal => return Err(IetError::RauzyUndefined),
        };
        let (winner, loser) = match kind {
            StepKind::Top => (top_last, bottom_last),
            StepKind::Bottom => (bottom_last, top_last),
        };
        let perm = self.perm.forward_spliced(kind);
        let mut lengths = self.lengths.clone();
        let shrunk = &lengths[winner.0] - &lengths[loser.0];
        lengths[winner.0] = shrunk;
        let record = StepRecord {
            direction: Direction::Forward,
            kind,
            winner,
            loser,
        };
        let next = Iet {
            alphabet: Arc::clone(&self.alphabet),
            basis: Arc::clone(&self.basis),
            perm,
            lengths,
        };
        Ok((next, record))
    }
}
