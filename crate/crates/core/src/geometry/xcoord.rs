//! Exact x-coordinates produced by horizontal trace crossings.
//!
//! The intersection of a horizontal line with a sloped side is
//! x₁ + Δy·λ/τ: products and quotients of basis-span values, which leave the
//! span. An [`XCoord`] keeps a span part plus residual terms c·(p·q)/r with
//! span-valued factors, cancels and folds what it can structurally
//! (rational factors, proportional numerator/denominator pairs, equal terms
//! across subtraction), and resolves remaining signs through interval
//! evaluation on the precision ladder. Exact zero is only decidable when the
//! residual cancels away; a residual expression pinned at zero surfaces as
//! `PrecisionExhausted`, consistent with the scalar model.

use crate::numeric::{
    decimal_approx, resolve_sign, Basis, Interval, NumericError, Rational, Sign, SymbolicReal,
};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

/// One residual factor triple (num1·num2)/den, each factor normalized to
/// leading coefficient one (the scalars live in the term's coefficient),
/// numerators sorted. A factor equal to one marks an absent slot.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct QuotTerm {
    num1: SymbolicReal,
    num2: SymbolicReal,
    den: SymbolicReal,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XCoord {
    base: SymbolicReal,
    residual: BTreeMap<QuotTerm, Rational>,
}

/// a = r·b for a rational r, structurally.
fn proportional(a: &SymbolicReal, b: &SymbolicReal) -> Option<Rational> {
    if a.term_count() != b.term_count() || a.is_zero() {
        return None;
    }
    let mut ratio: Option<Rational> = None;
    for ((na, ca), (nb, cb)) in a.terms().zip(b.terms()) {
        if na != nb {
            return None;
        }
        let r = ca / cb;
        match &ratio {
            None => ratio = Some(r),
            Some(prev) if *prev == r => {}
            _ => return None,
        }
    }
    ratio
}

/// Leading coefficient (of the first term in canonical order).
fn leading(s: &SymbolicReal) -> Rational {
    s.terms()
        .next()
        .map(|(_, c)| c.clone())
        .expect("nonzero value")
}

impl XCoord {
    pub fn from_symbolic(s: SymbolicReal) -> Self {
        XCoord {
            base: s,
            residual: BTreeMap::new(),
        }
    }

    pub fn zero() -> Self {
        Self::from_symbolic(SymbolicReal::zero())
    }

    /// x₁ + dy·lambda/tau: the crossing of the horizontal line at height
    /// y₁ + dy with the side rising by `tau` over `lambda` from x₁.
    pub fn crossing(
        x1: &SymbolicReal,
        dy: &SymbolicReal,
        lambda: &SymbolicReal,
        tau: &SymbolicReal,
    ) -> Self {
        let mut x = Self::from_symbolic(x1.clone());
        x.push_term(Rational::one(), dy.clone(), lambda.clone(), tau.clone());
        x
    }

    pub fn shift(&mut self, s: &SymbolicReal) {
        self.base += s;
    }

    pub fn sub_symbolic(&self, s: &SymbolicReal) -> XCoord {
        let mut out = self.clone();
        out.base -= s;
        out
    }

    pub fn sub(&self, other: &XCoord) -> XCoord {
        let mut out = self.clone();
        out.base -= &other.base;
        for (key, c) in &other.residual {
            let entry = out
                .residual
                .entry(key.clone())
                .or_insert_with(Rational::zero);
            *entry -= c;
            if entry.is_zero() {
                out.residual.remove(key);
            }
        }
        out
    }

    /// The exact span value, when no residual terms remain.
    pub fn as_symbolic(&self) -> Option<&SymbolicReal> {
        self.residual.is_empty().then_some(&self.base)
    }

    /// Adds c·(n1·n2)/den, folding structurally: zero numerators vanish,
    /// rational factors move into the coefficient, a numerator that is a
    /// rational multiple of the denominator cancels against it.
    fn push_term(&mut self, c: Rational, n1: SymbolicReal, n2: SymbolicReal, den: SymbolicReal) {
        assert!(
            !den.is_zero(),
            "crossing denominators are nonzero by construction"
        );
        if c.is_zero() || n1.is_zero() || n2.is_zero() {
            return;
        }
        let mut c = c;
        let mut nums = Vec::with_capacity(2);
        for n in [n1, n2] {
            match n.as_rational() {
                Some(r) => c *= r,
                None => nums.push(n),
            }
        }
        let mut den = match den.as_rational() {
            Some(r) => {
                c /= r;
                None
            }
            None => Some(den),
        };
        if let Some(d) = &den {
            if let Some(i) = nums.iter().position(|n| proportional(n, d).is_some()) {
                let n = nums.remove(i);
                c *= proportional(&n, d).expect("checked just above");
                den = None;
            }
        }

        // Fully folded: a span contribution.
        if den.is_none() && nums.len() <= 1 {
            match nums.pop() {
                None => self.base += &SymbolicReal::from_rational(c),
                Some(n) => self.base += &n.scale(&c),
            }
            return;
        }

        let one = SymbolicReal::from_integer(1);
        let mut normalize = |f: SymbolicReal, numerator: bool| -> SymbolicReal {
            let lead = leading(&f);
            if numerator {
                c *= &lead;
            } else {
                c /= &lead;
            }
            f.scale(&lead.recip())
        };
        let mut nums: Vec<SymbolicReal> = nums.into_iter().map(|f| normalize(f, true)).collect();
        nums.sort();
        let mut it = nums.into_iter();
        let num1 = it.next().unwrap_or_else(|| one.clone());
        let num2 = it.next().unwrap_or_else(|| one.clone());
        let den = match den {
            Some(d) => normalize(d, false),
            None => one,
        };
        let key = QuotTerm { num1, num2, den };
        let entry = self
            .residual
            .entry(key.clone())
            .or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.residual.remove(&key);
        }
    }

    /// Outward enclosure at the given precision; `None` when a denominator
    /// interval still straddles zero and the precision must escalate.
    pub fn enclosure(&self, basis: &Basis, bits: u32) -> Result<Option<Interval>, NumericError> {
        let mut acc = self.base.enclosure(basis, bits)?;
        for (key, c) in &self.residual {
            let num = key
                .num1
                .enclosure(basis, bits)?
                .mul(&key.num2.enclosure(basis, bits)?);
            let Some(q) = num.div(&key.den.enclosure(basis, bits)?) else {
                return Ok(None);
            };
            acc = acc.add(&q.scale(c));
        }
        Ok(Some(acc))
    }

    pub fn sign(&self, basis: &Basis) -> Result<Sign, NumericError> {
        match self.as_symbolic() {
            Some(s) => s.sign(basis),
            None => resolve_sign(|bits| self.enclosure(basis, bits)),
        }
    }

    /// Decimal rendering for layout purposes: refines the enclosure until it
    /// pins down `sig_digits` significant digits of the midpoint.
    pub fn approx_decimal(&self, basis: &Basis, sig_digits: usize) -> Result<String, NumericError> {
        if let Some(s) = self.as_symbolic() {
            return Ok(decimal_approx(&s.eval_witness(basis)?, sig_digits));
        }
        let mut bits = 128;
        loop {
            if let Some(iv) = self.enclosure(basis, bits)? {
                let mid = (iv.lo() + iv.hi()) / Rational::from_integer(2.into());
                let denom = Rational::from_integer(BigInt::from(10).pow(sig_digits as u32 + 2));
                let tol = if mid.is_zero() {
                    denom.recip()
                } else {
                    let abs_mid = if mid < Rational::zero() {
                        -mid.clone()
                    } else {
                        mid.clone()
                    };
                    abs_mid / denom
                };
                if iv.width() <= tol || bits >= 4096 {
                    return Ok(decimal_approx(&mid, sig_digits));
                }
            }
            if bits >= 4096 {
                return Err(NumericError::PrecisionExhausted { bits });
            }
            bits *= 2;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::parse_rational;
    use crate::samples;

    fn basis() -> Basis {
        Basis::from_witnesses([
            ("sqrt2", samples::SQRT2_WITNESS),
            ("sqrt3", samples::SQRT3_WITNESS),
        ])
        .unwrap()
    }

    fn val(text: &str) -> SymbolicReal {
        match text.split_once('*') {
            None => SymbolicReal::from_rational(parse_rational(text).unwrap()),
            Some((q, name)) => SymbolicReal::term(name, parse_rational(q).unwrap()),
        }
    }

    #[test]
    fn rational_slopes_fold_to_span_values() {
        // 1 + (√2−1)·2/(−1) = 3 − 2√2
        let dy = &val("1*sqrt2") - &val("1");
        let x = XCoord::crossing(&val("1"), &dy, &val("2"), &val("-1"));
        assert_eq!(x.as_symbolic(), Some(&(&val("3") + &val("-2*sqrt2"))));
    }

    #[test]
    fn proportional_numerator_cancels_denominator() {
        // (2√2)·3/√2 = 6
        let x = XCoord::crossing(&val("0"), &val("2*sqrt2"), &val("3"), &val("1*sqrt2"));
        assert_eq!(x.as_symbolic(), Some(&val("6")));
    }

    #[test]
    fn genuine_quotients_resolve_signs_by_intervals() {
        // 2 + 1/√2 ≈ 2.707
        let x = XCoord::crossing(&val("2"), &val("1"), &val("1"), &val("1*sqrt2"));
        assert!(x.as_symbolic().is_none());
        let b = basis();
        assert_eq!(x.sign(&b).unwrap(), Sign::Positive);
        assert_eq!(x.sub_symbolic(&val("3")).sign(&b).unwrap(), Sign::Negative);
        assert_eq!(
            x.sub_symbolic(&val("5/2")).sign(&b).unwrap(),
            Sign::Positive
        );
    }

    #[test]
    fn products_stay_residual_and_compare() {
        // √2·√3 = √6 ≈ 2.449
        let x = XCoord::crossing(&val("0"), &val("1*sqrt2"), &val("1*sqrt3"), &val("1"));
        assert!(x.as_symbolic().is_none());
        let b = basis();
        assert_eq!(
            x.sub_symbolic(&val("5/2")).sign(&b).unwrap(),
            Sign::Negative
        );
        assert_eq!(
            x.sub_symbolic(&val("12/5")).sign(&b).unwrap(),
            Sign::Positive
        );
    }

    #[test]
    fn equal_residuals_cancel_structurally() {
        let x = XCoord::crossing(&val("1"), &val("1"), &val("1"), &val("1*sqrt2"));
        let diff = x.sub(&x);
        assert_eq!(diff.as_symbolic(), Some(&SymbolicReal::zero()));
        assert_eq!(diff.sign(&basis()).unwrap(), Sign::Zero);

        // Same quotient reached through scaled factors merges to one term.
        let a = XCoord::crossing(&val("0"), &val("2"), &val("1"), &val("1*sqrt2"));
        let b = XCoord::crossing(&val("0"), &val("1"), &val("2"), &val("1*sqrt2"));
        assert_eq!(a.sub(&b).sign(&basis()).unwrap(), Sign::Zero);
    }

    #[test]
    fn decimal_rendering_of_residuals() {
        let x = XCoord::crossing(&val("2"), &val("1"), &val("1"), &val("1*sqrt2"));
        let d = x.approx_decimal(&basis(), 12).unwrap();
        assert_eq!(d, "2.70710678119"); // 2 + √2/2
    }
}
