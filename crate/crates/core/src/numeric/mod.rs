//! Exact scalars over a finite rational basis.
//!
//! A [`SymbolicReal`] is a rational linear combination of named basis
//! elements. The basis always contains the unit element `"1"`; every other
//! element carries a high-precision decimal witness. Arithmetic (addition,
//! subtraction, rational scaling) is exact and never consults the witnesses.
//! Witnesses enter only when a sign has to be decided: the value is enclosed
//! in an outward-rounded dyadic interval whose precision doubles until the
//! enclosure clears zero. A non-trivial combination whose enclosure pins to
//! an exact zero reveals a rational relation between witnesses that the
//! formal model forbids, and is reported as [`NumericError::PrecisionExhausted`].

mod interval;

pub use interval::Interval;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

pub type Rational = num_rational::BigRational;

/// Name of the implicit rational unit present in every basis.
pub const UNIT: &str = "1";

/// Starting precision for sign resolution, in bits after the binary point.
pub const MIN_SIGN_BITS: u32 = 64;
/// Precision ceiling; an undecided sign at this width is an error.
pub const MAX_SIGN_BITS: u32 = 4096;
/// Minimum number of significant digits a witness must supply.
pub const MIN_WITNESS_DIGITS: usize = 50;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NumericError {
    #[error("sign undecided at {bits} bits; the witnesses admit a hidden rational relation or the value is too close to zero")]
    PrecisionExhausted { bits: u32 },
    #[error("unknown basis element `{name}`")]
    UnknownBasisElement { name: String },
    #[error("invalid witness for `{name}`: {reason}")]
    InvalidWitness { name: String, reason: String },
    #[error("basis elements `{first}` and `{second}` have equal witness values")]
    DuplicateWitness { first: String, second: String },
    #[error("cannot parse `{text}` as a rational (expected `p` or `p/q`)")]
    InvalidRational { text: String },
    #[error("cannot parse `{text}` as a plain decimal")]
    InvalidDecimal { text: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of_rational(q: &Rational) -> Sign {
        if q.is_zero() {
            Sign::Zero
        } else if q.is_positive() {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Negative => -1,
            Sign::Zero => 0,
            Sign::Positive => 1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }

    pub fn is_positive(self) -> bool {
        self == Sign::Positive
    }

    pub fn is_negative(self) -> bool {
        self == Sign::Negative
    }

    pub fn is_zero(self) -> bool {
        self == Sign::Zero
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Negative => "-1",
            Sign::Zero => "0",
            Sign::Positive => "+1",
        })
    }
}

/// Parses `p` or `p/q` with optional sign; rejects zero denominators.
pub fn parse_rational(text: &str) -> Result<Rational, NumericError> {
    let err = || NumericError::InvalidRational {
        text: text.to_string(),
    };
    let mut parts = text.splitn(2, '/');
    let numer = BigInt::from_str(parts.next().unwrap_or("").trim()).map_err(|_| err())?;
    match parts.next() {
        None => Ok(Rational::from(numer)),
        Some(denom_text) => {
            let denom = BigInt::from_str(denom_text.trim()).map_err(|_| err())?;
            if denom.is_zero() {
                return Err(err());
            }
            Ok(Rational::new(numer, denom))
        }
    }
}

/// Parses a plain decimal (`-3`, `2.5`, `.25`) into an exact rational.
/// Exponent notation is rejected on purpose: witnesses are written out in
/// full so their significant digits can be counted.
pub fn parse_decimal(text: &str) -> Result<Rational, NumericError> {
    let err = || NumericError::InvalidDecimal {
        text: text.to_string(),
    };
    let s = text.trim();
    let (negative, digits) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return Err(err());
    }
    let mut numer = if int_part.is_empty() && frac_part.is_empty() {
        BigInt::zero()
    } else {
        BigInt::from_str(&format!("0{int_part}{frac_part}")).map_err(|_| err())?
    };
    if negative {
        numer = -numer;
    }
    let denom = BigInt::from(10u8).pow(frac_part.len() as u32);
    Ok(Rational::new(numer, denom))
}

/// Counts significant digits of a decimal string: all digits except leading
/// zeros. Trailing zeros count; `0.0500` has three.
pub fn significant_digits(text: &str) -> usize {
    text.chars()
        .filter(|c| c.is_ascii_digit())
        .skip_while(|&c| c == '0')
        .count()
}

/// A finite set of named basis elements with exact rational witnesses.
///
/// The unit `"1"` is always present with witness 1. Non-unit witnesses are
/// parsed from plain decimal strings, must be nonzero, pairwise distinct, and
/// carry at least [`MIN_WITNESS_DIGITS`] significant digits so that sign
/// resolution has real precision to work with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Basis {
    witnesses: BTreeMap<String, Rational>,
}

impl Basis {
    /// The basis containing only the rational unit.
    pub fn rational() -> Self {
        let mut witnesses = BTreeMap::new();
        witnesses.insert(UNIT.to_string(), Rational::one());
        Basis { witnesses }
    }

    pub fn from_witnesses<I, S, T>(entries: I) -> Result<Self, NumericError>
    where
        I: IntoIterator<Item = (S, T)>,
        S: Into<String>,
        T: AsRef<str>,
    {
        let mut witnesses = BTreeMap::new();
        witnesses.insert(UNIT.to_string(), Rational::one());
        for (name, text) in entries {
            let name = name.into();
            let text = text.as_ref();
            let invalid = |reason: &str| NumericError::InvalidWitness {
                name: name.clone(),
                reason: reason.to_string(),
            };
            if name == UNIT {
                let value = parse_decimal(text).or_else(|_| parse_rational(text))?;
                if !value.is_one() {
                    return Err(invalid("the unit element must have witness 1"));
                }
                continue;
            }
            if name.is_empty() {
                return Err(invalid("basis element names must be nonempty"));
            }
            let value = parse_decimal(text)?;
            if value.is_zero() {
                return Err(invalid("witness must be nonzero"));
            }
            let found = significant_digits(text);
            if found < MIN_WITNESS_DIGITS {
                return Err(invalid(&format!(
                    "witness needs at least {MIN_WITNESS_DIGITS} significant digits, found {found}"
                )));
            }
            if witnesses.insert(name.clone(), value).is_some() {
                return Err(invalid("duplicate basis element name"));
            }
        }
        let mut seen: BTreeMap<&Rational, &String> = BTreeMap::new();
        for (name, value) in &witnesses {
            if let Some(other) = seen.insert(value, name) {
                return Err(NumericError::DuplicateWitness {
                    first: other.clone(),
                    second: name.clone(),
                });
            }
        }
        Ok(Basis { witnesses })
    }

    pub fn witness(&self, name: &str) -> Result<&Rational, NumericError> {
        self.witnesses
            .get(name)
            .ok_or_else(|| NumericError::UnknownBasisElement {
                name: name.to_string(),
            })
    }

    pub fn contains(&self, name: &str) -> bool {
        self.witnesses.contains_key(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.witnesses.keys().map(|s| s.as_str())
    }

    pub fn len(&self) -> usize {
        self.witnesses.len()
    }

    pub fn is_empty(&self) -> bool {
        false // the unit is always present
    }
}

/// A rational linear combination of basis elements, kept in canonical form:
/// the term map never stores zero coefficients, so structural equality is
/// value equality within the formal model.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct SymbolicReal {
    terms: BTreeMap<String, Rational>,
}

impl SymbolicReal {
    pub fn zero() -> Self {
        SymbolicReal::default()
    }

    pub fn from_rational(q: Rational) -> Self {
        SymbolicReal::term(UNIT, q)
    }

    pub fn from_integer(n: i64) -> Self {
        SymbolicReal::from_rational(Rational::from(BigInt::from(n)))
    }

    pub fn term(name: &str, coeff: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(name.to_string(), coeff);
        }
        SymbolicReal { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `name`, zero when absent.
    pub fn coeff(&self, name: &str) -> Rational {
        self.terms.get(name).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&str, &Rational)> {
        self.terms.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// `Some(q)` when the value is the plain rational `q` (only the unit
    /// element appears), `None` otherwise.
    pub fn as_rational(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(UNIT).cloned(),
            _ => None,
        }
    }

    pub fn is_rational(&self) -> bool {
        self.as_rational().is_some()
    }

    pub fn add_term(&mut self, name: &str, coeff: &Rational) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.get_mut(name) {
            Some(existing) => {
                *existing += coeff;
                if existing.is_zero() {
                    self.terms.remove(name);
                }
            }
            None => {
                self.terms.insert(name.to_string(), coeff.clone());
            }
        }
    }

    pub fn scale(&self, k: &Rational) -> SymbolicReal {
        if k.is_zero() {
            return SymbolicReal::zero();
        }
        let terms = self
            .terms
            .iter()
            .map(|(name, coeff)| (name.clone(), coeff * k))
            .collect();
        SymbolicReal { terms }
    }

    pub fn sum<'a, I: IntoIterator<Item = &'a SymbolicReal>>(values: I) -> SymbolicReal {
        let mut acc = SymbolicReal::zero();
        for v in values {
            acc += v;
        }
        acc
    }

    /// Checks every basis element used here is known to `basis`.
    pub fn check_basis(&self, basis: &Basis) -> Result<(), NumericError> {
        for name in self.terms.keys() {
            basis.witness(name)?;
        }
        Ok(())
    }

    /// Exact value under the witness assignment.
    pub fn eval_witness(&self, basis: &Basis) -> Result<Rational, NumericError> {
        let mut total = Rational::zero();
        for (name, coeff) in &self.terms {
            total += coeff * basis.witness(name)?;
        }
        Ok(total)
    }

    /// Outward-rounded enclosure on the grid of multiples of 2^-bits.
    pub fn enclosure(&self, basis: &Basis, bits: u32) -> Result<Interval, NumericError> {
        let scale = BigInt::one() << bits as usize;
        let mut lo = BigInt::zero();
        let mut hi = BigInt::zero();
        for (name, coeff) in &self.terms {
            let value = coeff * basis.witness(name)?;
            let scaled = value.numer() * &scale;
            lo += scaled.div_floor(value.denom());
            hi += scaled.div_ceil(value.denom());
        }
        Ok(Interval::new(
            Rational::new(lo, scale.clone()),
            Rational::new(hi, scale),
        ))
    }

    /// Sign of the value. The empty combination is exactly zero; any other
    /// combination is nonzero in the formal model, and its sign is resolved
    /// against the witnesses through the precision ladder.
    pub fn sign(&self, basis: &Basis) -> Result<Sign, NumericError> {
        if self.terms.is_empty() {
            return Ok(Sign::Zero);
        }
        resolve_sign(|bits| self.enclosure(basis, bits).map(Some))
    }

    /// Absolute value, using a resolved sign.
    pub fn abs(&self, basis: &Basis) -> Result<SymbolicReal, NumericError> {
        match self.sign(basis)? {
            Sign::Negative => Ok(-self),
            _ => Ok(self.clone()),
        }
    }
}

/// Compares two values by resolving the sign of their difference.
/// `Ordering::Equal` is only returned for structurally equal values.
pub fn compare(
    a: &SymbolicReal,
    b: &SymbolicReal,
    basis: &Basis,
) -> Result<Ordering, NumericError> {
    Ok(match (a - b).sign(basis)? {
        Sign::Negative => Ordering::Less,
        Sign::Zero => Ordering::Equal,
        Sign::Positive => Ordering::Greater,
    })
}

/// Runs the doubling precision ladder over an interval evaluator.
///
/// The evaluator may return `Ok(None)` to signal that the expression cannot
/// be enclosed at the given precision (e.g. division by an interval that
/// still straddles zero); the ladder then escalates. An enclosure that pins
/// to exactly zero means the witnesses satisfy a relation the formal model
/// rules out, so it surfaces as `PrecisionExhausted` rather than `Zero`;
/// exact zeros must be recognised structurally before calling this.
pub fn resolve_sign<F>(mut eval: F) -> Result<Sign, NumericError>
where
    F: FnMut(u32) -> Result<Option<Interval>, NumericError>,
{
    let mut bits = MIN_SIGN_BITS;
    loop {
        if let Some(enclosure) = eval(bits)? {
            match enclosure.sign() {
                Some(Sign::Zero) => return Err(NumericError::PrecisionExhausted { bits }),
                Some(sign) => return Ok(sign),
                None => {}
            }
        }
        if bits >= MAX_SIGN_BITS {
            return Err(NumericError::PrecisionExhausted { bits });
        }
        bits *= 2;
    }
}

/// Renders an exact rational to `sig_digits` significant digits in plain
/// decimal notation (no exponent), trailing zeros trimmed.
pub fn decimal_approx(value: &Rational, sig_digits: usize) -> String {
    assert!(sig_digits > 0);
    if value.is_zero() {
        return "0".to_string();
    }
    let negative = value.is_negative();
    let p = value.numer().abs();
    let q = value.denom().clone();
    let ten = BigInt::from(10u8);
    // Decimal exponent e with 10^e <= p/q < 10^(e+1).
    let mut e: i64;
    if p >= q {
        e = p.div_floor(&q).to_string().len() as i64 - 1;
    } else {
        e = 0;
        let mut scaled = p.clone();
        while scaled < q {
            scaled *= &ten;
            e -= 1;
        }
    }
    let shift = sig_digits as i64 - 1 - e;
    let (num, den) = if shift >= 0 {
        (&p * ten.pow(shift as u32), q.clone())
    } else {
        (p.clone(), &q * ten.pow((-shift) as u32))
    };
    // Round to nearest, ties away from zero.
    let mut n = (BigInt::from(2u8) * num + &den).div_floor(&(BigInt::from(2u8) * den));
    let cap = ten.pow(sig_digits as u32);
    if n >= cap {
        n = n.div_floor(&ten);
        e += 1;
    }
    let digits = n.to_string();
    debug_assert_eq!(digits.len(), sig_digits);
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if e >= sig_digits as i64 - 1 {
        out.push_str(&digits);
        for _ in 0..(e - sig_digits as i64 + 1) {
            out.push('0');
        }
    } else if e >= 0 {
        let point = (e + 1) as usize;
        out.push_str(&digits[..point]);
        let frac = digits[point..].trim_end_matches('0');
        if !frac.is_empty() {
            out.push('.');
            out.push_str(frac);
        }
    } else {
        out.push_str("0.");
        for _ in 0..(-e - 1) {
            out.push('0');
        }
        out.push_str(digits.trim_end_matches('0'));
    }
    out
}

impl fmt::Display for SymbolicReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let piece = |name: &str, coeff: &Rational| -> String {
            if name == UNIT {
                coeff.to_string()
            } else if coeff.is_one() {
                name.to_string()
            } else if (-coeff).is_one() {
                format!("-{name}")
            } else {
                format!("{coeff}*{name}")
            }
        };
        for (i, (name, coeff)) in self.terms.iter().enumerate() {
            let s = piece(name, coeff);
            if i == 0 {
                f.write_str(&s)?;
            } else if let Some(rest) = s.strip_prefix('-') {
                write!(f, " - {rest}")?;
            } else {
                write!(f, " + {s}")?;
            }
        }
        Ok(())
    }
}

impl Serialize for SymbolicReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.terms.len()))?;
        for (name, coeff) in &self.terms {
            map.serialize_entry(name, &coeff.to_string())?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for SymbolicReal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = BTreeMap::<String, String>::deserialize(deserializer)?;
        let mut out = SymbolicReal::zero();
        for (name, text) in raw {
            let coeff = parse_rational(&text).map_err(serde::de::Error::custom)?;
            out.add_term(&name, &coeff);
        }
        Ok(out)
    }
}

impl Add for &SymbolicReal {
    type Output = SymbolicReal;
    fn add(self, rhs: &SymbolicReal) -> SymbolicReal {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &SymbolicReal {
    type Output = SymbolicReal;
    fn sub(self, rhs: &SymbolicReal) -> SymbolicReal {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Neg for &SymbolicReal {
    type Output = SymbolicReal;
    fn neg(self) -> SymbolicReal {
        let terms = self
            .terms
            .iter()
            .map(|(name, coeff)| (name.clone(), -coeff))
            .collect();
        SymbolicReal { terms }
    }
}

impl Mul<&Rational> for &SymbolicReal {
    type Output = SymbolicReal;
    fn mul(self, k: &Rational) -> SymbolicReal {
        self.scale(k)
    }
}

impl std::ops::AddAssign<&SymbolicReal> for SymbolicReal {
    fn add_assign(&mut self, rhs: &SymbolicReal) {
        for (name, coeff) in &rhs.terms {
            self.add_term(name, coeff);
        }
    }
}

impl std::ops::SubAssign<&SymbolicReal> for SymbolicReal {
    fn sub_assign(&mut self, rhs: &SymbolicReal) {
        for (name, coeff) in &rhs.terms {
            self.add_term(name, &-coeff);
        }
    }
}
