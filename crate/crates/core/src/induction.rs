//! Forward and backward Rauzy-Veech induction on suspensions, with exact
//! integer transport matrices, orbit logs, and the reports built on them.
//!
//! A forward step subtracts the shorter of the two last intervals from the
//! longer one; it is undefined on a tie. A backward step is its inverse: the
//! sign of Στ picks the unique type that could have produced the current
//! surface, the winner reabsorbs a donor symbol, and Στ = 0 means no
//! predecessor exists (the orbit stops cleanly).
//!
//! Transport matrices are accumulated so that `matrix · initial = current`
//! along backward orbits and `matrix · current = initial` along forward
//! ones, for both λ and τ; orbit logs re-verify those identities at every
//! checkpoint.

use crate::iet::{Direction, StepKind, StepRecord, Symbol};
use crate::numeric::{NumericError, Rational, Sign, SymbolicReal};
use crate::suspension::Surface;
use num_bigint::BigInt;
use num_traits::{One, Zero};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InductionError {
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

/// Dense square integer matrix; the induction cocycle stays small-dimensional
/// (d×d) but its entries grow without bound, hence big integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    n: usize,
    rows: Vec<Vec<BigInt>>,
}

impl IntMatrix {
    pub fn identity(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            BigInt::one()
                        } else {
                            BigInt::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        IntMatrix { n, rows }
    }

    pub fn from_i8(rows: &[Vec<i8>]) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n));
        IntMatrix {
            n,
            rows: rows
                .iter()
                .map(|r| r.iter().map(|&e| BigInt::from(e)).collect())
                .collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> &BigInt {
        &self.rows[i][j]
    }

    /// row dst += row src
    pub fn row_add(&mut self, dst: usize, src: usize) {
        assert_ne!(dst, src);
        for j in 0..self.n {
            let v = self.rows[src][j].clone();
            self.rows[dst][j] += v;
        }
    }

    /// col dst += col src
    pub fn col_add(&mut self, dst: usize, src: usize) {
        assert_ne!(dst, src);
        for row in &mut self.rows {
            let v = row[src].clone();
            row[dst] += v;
        }
    }

    pub fn transpose(&self) -> Self {
        let rows = (0..self.n)
            .map(|i| (0..self.n).map(|j| self.rows[j][i].clone()).collect())
            .collect();
        IntMatrix { n: self.n, rows }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let rows = (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| {
                        (0..self.n)
                            .map(|k| &self.rows[i][k] * &other.rows[k][j])
                            .sum()
                    })
                    .collect()
            })
            .collect();
        IntMatrix { n: self.n, rows }
    }

    pub fn mul_symbolic(&self, v: &[SymbolicReal]) -> Vec<SymbolicReal> {
        assert_eq!(v.len(), self.n);
        self.rows
            .iter()
            .map(|row| {
                let mut out = SymbolicReal::zero();
                for (e, x) in row.iter().zip(v) {
                    if !e.is_zero() {
                        out += &x.scale(&Rational::from_integer(e.clone()));
                    }
                }
                out
            })
            .collect()
    }

    pub fn min_entry(&self) -> &BigInt {
        self.rows
            .iter()
            .flatten()
            .min()
            .expect("matrix is nonempty")
    }

    pub fn is_nonnegative(&self) -> bool {
        self.rows
            .iter()
            .flatten()
            .all(|e| e.sign() != num_bigint::Sign::Minus)
    }

    pub fn is_positive(&self) -> bool {
        self.rows
            .iter()
            .flatten()
            .all(|e| e.sign() == num_bigint::Sign::Plus)
    }

    /// Exact determinant by fraction elimination; fine at cocycle sizes.
    #[allow(clippy::needless_range_loop)] // row ops read one row while writing another
    pub fn det(&self) -> Rational {
        let n = self.n;
        let mut m: Vec<Vec<Rational>> = self
            .rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|e| Rational::from_integer(e.clone()))
                    .collect()
            })
            .collect();
        let mut det = Rational::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !m[r][col].is_zero()) else {
                return Rational::zero();
            };
            if p != col {
                m.swap(p, col);
                det = -det;
            }
            let pivot = m[col][col].clone();
            det *= &pivot;
            for r in col + 1..n {
                if m[r][col].is_zero() {
                    continue;
                }
                let f = &m[r][col] / &pivot;
                for c in col..n {
                    let sub = &f * &m[col][c];
                    m[r][c] = &m[r][c] - &sub;
                }
            }
        }
        det
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ForwardOutcome {
    Step {
        next: Surface,
        record: StepRecord,
    },
    /// The two candidate intervals tie exactly; the step is undefined.
    Tie,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BackwardOutcome {
    Step {
        next: Surface,
        record: StepRecord,
        /// Symbol whose length and τ the winner reabsorbed; it is the loser
        /// of the forward step that maps `next` back to the input.
        donor: Symbol,
    },
    /// Στ = 0 exactly: the surface has no predecessor.
    Stop,
}

/// One forward move: the longer of the two last intervals wins and loses the
/// other's length (and τ); the loser is re-inserted after the winner in the
/// other order.
pub fn forward_step_suspension(s: &Surface) -> Result<ForwardOutcome, InductionError> {
    let top_last = s.perm.top_last();
    let bottom_last = s.perm.bottom_last();
    let diff = &s.lengths[top_last.0] - &s.lengths[bottom_last.0];
    let (kind, winner, loser) = match diff.sign(&s.basis)? {
        Sign::Positive => (StepKind::Top, top_last, bottom_last),
        Sign::Negative => (StepKind::Bottom, bottom_last, top_last),
        Sign::Zero => return Ok(ForwardOutcome::Tie),
    };
    let perm = s.perm.forward_spliced(kind);
    let mut lengths = s.lengths.clone();
    let mut tau = s.tau.clone();
    lengths[winner.0] = &lengths[winner.0] - &s.lengths[loser.0];
    tau[winner.0] = &tau[winner.0] - &s.tau[loser.0];
    let next = Surface {
        alphabet: s.alphabet.clone(),
        basis: s.basis.clone(),
        perm,
        lengths,
        tau,
    };
    let record = StepRecord {
        direction: Direction::Forward,
        kind,
        winner,
        loser,
    };
    Ok(ForwardOutcome::Step { next, record })
}

/// The type of the backward move determined by the current surface alone:
/// Στ < 0 forces a top move, Στ > 0 a bottom move, Στ = 0 has none.
pub fn backward_type(s: &Surface) -> Result<Option<StepKind>, InductionError> {
    Ok(match s.total_tau().sign(&s.basis)? {
        Sign::Negative => Some(StepKind::Top),
        Sign::Positive => Some(StepKind::Bottom),
        Sign::Zero => None,
    })
}

/// One backward move: the inverse of the unique forward move that can end at
/// this surface. The winner (last of the order named by the type) absorbs
/// its successor in the other order; that donor is sent to the end of the
/// other order and is the forward loser on the way back.
pub fn backward_step(s: &Surface) -> Result<BackwardOutcome, InductionError> {
    let Some(kind) = backward_type(s)? else {
        return Ok(BackwardOutcome::Stop);
    };
    let (winner, loser) = match kind {
        StepKind::Top => (s.perm.top_last(), s.perm.bottom_last()),
        StepKind::Bottom => (s.perm.bottom_last(), s.perm.top_last()),
    };
    let (perm, donor) = s.perm.backward_spliced(kind);
    let mut lengths = s.lengths.clone();
    let mut tau = s.tau.clone();
    lengths[winner.0] = &lengths[winner.0] + &s.lengths[donor.0];
    tau[winner.0] = &tau[winner.0] + &s.tau[donor.0];
    let next = Surface {
        alphabet: s.alphabet.clone(),
        basis: s.basis.clone(),
        perm,
        lengths,
        tau,
    };
    let record = StepRecord {
        direction: Direction::Backward,
        kind,
        winner,
        loser,
    };
    Ok(BackwardOutcome::Step {
        next,
        record,
        donor,
    })
}

/// Why an orbit ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// Ran the requested number of steps.
    Completed,
    /// Backward orbit reached Στ = 0 when attempting this (1-based) step.
    SigmaTauZero { step: usize },
    /// Forward orbit hit an exact length tie when attempting this step.
    ForwardTie { step: usize },
}

/// Snapshot of the transport matrix and exact state along an orbit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Checkpoint {
    pub step: usize,
    pub matrix: IntMatrix,
    pub lengths: Vec<SymbolicReal>,
    pub tau: Vec<SymbolicReal>,
    /// Whether `matrix` reproduces the exact state from the initial data
    /// (or the initial data from the state, on forward orbits).
    pub identity_holds: bool,
    pub min_entry: BigInt,
}

/// Full record of an induction run: per-step records, per-state Στ signs and
/// max |τ|, win counts, checkpointed transport matrices, and the stop reason.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitLog {
    pub direction: Direction,
    pub initial: Surface,
    pub final_surface: Surface,
    pub steps: Vec<StepRecord>,
    /// Backward orbits: donor of each step, parallel to `steps`. Empty on
    /// forward orbits (the forward analogue is the record's loser).
    pub donors: Vec<Symbol>,
    pub win_counts: Vec<usize>,
    /// Sign of Στ for each state, index 0 = initial surface.
    pub sigma_signs: Vec<Sign>,
    /// max over α of |τ_α| for each state, index 0 = initial surface.
    pub max_abs_tau: Vec<SymbolicReal>,
    pub checkpoints: Vec<Checkpoint>,
    pub stop: StopReason,
}

impl OrbitLog {
    pub fn executed_steps(&self) -> usize {
        self.steps.len()
    }
}

fn max_abs_tau(s: &Surface) -> Result<SymbolicReal, NumericError> {
    let mut best: Option<SymbolicReal> = None;
    for t in &s.tau {
        let a = t.abs(&s.basis)?;
        best = Some(match best {
            None => a,
            Some(b) => {
                if (&a - &b).sign(&s.basis)? == Sign::Positive {
                    a
                } else {
                    b
                }
            }
        });
    }
    Ok(best.expect("surfaces have at least two symbols"))
}

fn push_checkpoint(
    log_dir: Direction,
    initial: &Surface,
    state: &Surface,
    matrix: &IntMatrix,
    step: usize,
    out: &mut Vec<Checkpoint>,
) {
    let identity_holds = match log_dir {
        Direction::Backward => {
            matrix.mul_symbolic(&initial.lengths) == state.lengths
                && matrix.mul_symbolic(&initial.tau) == state.tau
        }
        Direction::Forward => {
            matrix.mul_symbolic(&state.lengths) == initial.lengths
                && matrix.mul_symbolic(&state.tau) == initial.tau
        }
    };
    out.push(Checkpoint {
        step,
        matrix: matrix.clone(),
        lengths: state.lengths.clone(),
        tau: state.tau.clone(),
        identity_holds,
        min_entry: matrix.min_entry().clone(),
    });
}

/// Runs up to `max_steps` backward moves. `checkpoint_every` = 0 records
/// only the final checkpoint; otherwise every multiple of it, plus the final
/// state if it falls between multiples.
pub fn backward_orbit(
    s: &Surface,
    max_steps: usize,
    checkpoint_every: usize,
) -> Result<OrbitLog, InductionError> {
    orbit(s, max_steps, checkpoint_every, Direction::Backward)
}

/// Forward analogue of [`backward_orbit`]; stops on an exact tie.
pub fn forward_orbit(
    s: &Surface,
    max_steps: usize,
    checkpoint_every: usize,
) -> Result<OrbitLog, InductionError> {
    orbit(s, max_steps, checkpoint_every, Direction::Forward)
}

fn orbit(
    s: &Surface,
    max_steps: usize,
    checkpoint_every: usize,
    direction: Direction,
) -> Result<OrbitLog, InductionError> {
    let d = s.d();
    let mut state = s.clone();
    let mut matrix = IntMatrix::identity(d);
    let mut steps = Vec::new();
    let mut donors = Vec::new();
    let mut win_counts = vec![0usize; d];
    let mut sigma_signs = vec![s.total_tau().sign(&s.basis)?];
    let mut max_abs = vec![max_abs_tau(s)?];
    let mut checkpoints = Vec::new();
    let mut stop = StopReason::Completed;
    let mut last_checkpointed = 0usize;

    for n in 1..=max_steps {
        let record = match direction {
            Direction::Backward => match backward_step(&state)? {
                BackwardOutcome::Stop => {
                    stop = StopReason::SigmaTauZero { step: n };
                    break;
                }
                BackwardOutcome::Step {
                    next,
                    record,
                    donor,
                } => {
                    matrix.row_add(record.winner.0, donor.0);
                    donors.push(donor);
                    state = next;
                    record
                }
            },
            Direction::Forward => match forward_step_suspension(&state)? {
                ForwardOutcome::Tie => {
                    stop = StopReason::ForwardTie { step: n };
                    break;
                }
                ForwardOutcome::Step { next, record } => {
                    matrix.col_add(record.loser.0, record.winner.0);
                    state = next;
                    record
                }
            },
        };
        win_counts[record.winner.0] += 1;
        steps.push(record);
        sigma_signs.push(state.total_tau().sign(&state.basis)?);
        max_abs.push(max_abs_tau(&state)?);
        if checkpoint_every > 0 && n % checkpoint_every == 0 {
            push_checkpoint(direction, s, &state, &matrix, n, &mut checkpoints);
            last_checkpointed = n;
        }
    }

    let executed = steps.len();
    if executed > 0 && last_checkpointed < executed {
        push_checkpoint(direction, s, &state, &matrix, executed, &mut checkpoints);
    }

    Ok(OrbitLog {
        direction,
        initial: s.clone(),
        final_surface: state,
        steps,
        donors,
        win_counts,
        sigma_signs,
        max_abs_tau: max_abs,
        checkpoints,
        stop,
    })
}

/// Per-symbol win statistics over an orbit log.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolStats {
    pub symbol: Symbol,
    pub wins: usize,
    /// 1-based step indices.
    pub first_win: Option<usize>,
    pub last_win: Option<usize>,
    /// No win in the trailing half (⌈horizon/2⌉ steps) of the orbit.
    pub frozen: bool,
}

/// Win-based completeness certificate for an orbit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompletenessReport {
    pub horizon: usize,
    pub per_symbol: Vec<SymbolStats>,
    /// Earliest prefix length after which all but at most one symbol have
    /// won at least 2d−2 times.
    pub all_but_one_step: Option<usize>,
    /// Step of the first checkpoint at or after `all_but_one_step`, where
    /// entrywise positivity of the transport matrix was tested.
    pub positivity_step: Option<usize>,
    pub matrix_positive: Option<bool>,
    pub frozen_symbols: Vec<Symbol>,
}

pub fn completeness_report(log: &OrbitLog) -> CompletenessReport {
    let d = log.win_counts.len();
    let horizon = log.executed_steps();
    let mut first_win = vec![None; d];
    let mut last_win = vec![None; d];
    for (i, rec) in log.steps.iter().enumerate() {
        let n = i + 1;
        let w = rec.winner.0;
        first_win[w].get_or_insert(n);
        last_win[w] = Some(n);
    }

    let threshold = 2 * d - 2;
    let mut all_but_one_step = None;
    let mut counts = vec![0usize; d];
    for (i, rec) in log.steps.iter().enumerate() {
        counts[rec.winner.0] += 1;
        let reached = counts.iter().filter(|&&c| c >= threshold).count();
        if reached + 1 >= d {
            all_but_one_step = Some(i + 1);
            break;
        }
    }

    let (positivity_step, matrix_positive) = match all_but_one_step {
        None => (None, None),
        Some(n) => match log.checkpoints.iter().find(|c| c.step >= n) {
            None => (None, None),
            Some(c) => (Some(c.step), Some(c.matrix.is_positive())),
        },
    };

    let window_start = horizon - horizon.div_ceil(2);
    let per_symbol: Vec<SymbolStats> = (0..d)
        .map(|i| {
            let frozen = horizon > 0
                && match last_win[i] {
                    None => true,
                    Some(n) => n <= window_start,
                };
            SymbolStats {
                symbol: Symbol(i),
                wins: log.win_counts[i],
                first_win: first_win[i],
                last_win: last_win[i],
                frozen,
            }
        })
        .collect();
    let frozen_symbols = per_symbol
        .iter()
        .filter(|s| s.frozen)
        .map(|s| s.symbol)
        .collect();

    CompletenessReport {
        horizon,
        per_symbol,
        all_but_one_step,
        positivity_step,
        matrix_positive,
        frozen_symbols,
    }
}

/// The max |τ| series of an orbit with its running minimum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TauDecayReport {
    /// Copy of the per-state series from the log.
    pub max_abs: Vec<SymbolicReal>,
    pub running_min: Vec<SymbolicReal>,
    /// First state index whose value is strictly below the initial one.
    pub first_strict_drop: Option<usize>,
    /// First state index strictly below the threshold, when one was given.
    pub first_below: Option<usize>,
}

pub fn tau_decay_monitor(
    log: &OrbitLog,
    threshold: Option<&SymbolicReal>,
) -> Result<TauDecayReport, InductionError> {
    let basis = &log.initial.basis;
    let below = |a: &SymbolicReal, b: &SymbolicReal| -> Result<bool, NumericError> {
        Ok((a - b).sign(basis)? == Sign::Negative)
    };
    let mut running_min: Vec<SymbolicReal> = Vec::with_capacity(log.max_abs_tau.len());
    let mut first_strict_drop = None;
    let mut first_below = None;
    for (i, v) in log.max_abs_tau.iter().enumerate() {
        let min = match running_min.last() {
            None => v.clone(),
            Some(m) => {
                if below(v, m)? {
                    v.clone()
                } else {
                    m.clone()
                }
            }
        };
        running_min.push(min);
        if first_strict_drop.is_none() && i > 0 && below(v, &log.max_abs_tau[0])? {
            first_strict_drop = Some(i);
        }
        if let Some(t) = threshold {
            if first_below.is_none() && below(v, t)? {
                first_below = Some(i);
            }
        }
    }
    Ok(TauDecayReport {
        max_abs: log.max_abs_tau.clone(),
        running_min,
        first_strict_drop,
        first_below,
    })
}
