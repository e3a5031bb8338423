//! Named example surfaces and random generators used by tests, benches, and
//! the command line.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::iet::{Alphabet, PermutationPair, Symbol};
use crate::numeric::{Basis, Rational, SymbolicReal};
use crate::suspension::Surface;

/// Decimal witnesses for the square roots used by the named surfaces,
/// written out to 310 significant digits so long orbits keep resolving signs
/// against the genuine irrational values.
pub const SQRT2_WITNESS: &str = "1.414213562373095048801688724209698078569671875376948073176679737990732478462107038850387534327641572735013846230912297024924836055850737212644121497099935831413222665927505592755799950501152782060571470109559971605970274534596862014728517418640889198609552329230484308714321450839762603627995251407989687253397";

pub const SQRT3_WITNESS: &str = "1.732050807568877293527446341505872366942805253810380628055806979451933016908800037081146186757248575675626141415406703029969945094998952478811655512094373648528093231902305582067974820101084674923265015312343266903322886650672254668921837971227047131660367861588019049986537379859389467650347506576050756618348";

pub const SQRT5_WITNESS: &str = "2.236067977499789696409173668731276235440618359611525724270897245410520925637804899414414408378782274969508176150773783504253267724447073863586360121533452708866778173191879165811276645322639856580535761350417533785003423392414064442086432539097252592627228876299517402440681611775908909498492371390729728898482";

/// Basis holding √2, √3, √5 under the names `sqrt2`, `sqrt3`, `sqrt5`.
pub fn sqrt_basis() -> Basis {
    Basis::from_witnesses([
        ("sqrt2", SQRT2_WITNESS),
        ("sqrt3", SQRT3_WITNESS),
        ("sqrt5", SQRT5_WITNESS),
    ])
    .expect("frozen witnesses are valid")
}

/// `A`, `B`, ... one-letter names.
pub fn letter_alphabet(d: usize) -> Arc<Alphabet> {
    assert!(
        (1..=26).contains(&d),
        "letter alphabets go up to 26 symbols"
    );
    let names: Vec<String> = (0..d)
        .map(|i| ((b'A' + i as u8) as char).to_string())
        .collect();
    Arc::new(Alphabet::new(names).expect("letters are distinct"))
}

fn q(text: &str) -> SymbolicReal {
    SymbolicReal::from_rational(crate::numeric::parse_rational(text).expect("valid rational"))
}

fn root(name: &str, coeff: &str) -> SymbolicReal {
    SymbolicReal::term(
        name,
        crate::numeric::parse_rational(coeff).expect("valid rational"),
    )
}

fn build(top: &str, bottom: &str, lengths: Vec<SymbolicReal>, tau: Vec<SymbolicReal>) -> Surface {
    let d = top.len();
    let alphabet = letter_alphabet(d);
    let sym = |c: char| Symbol((c as u8 - b'A') as usize);
    let perm = PermutationPair::new(
        top.chars().map(sym).collect(),
        bottom.chars().map(sym).collect(),
    )
    .expect("frozen permutation data is irreducible");
    Surface::new(alphabet, Arc::new(sqrt_basis()), perm, lengths, tau)
        .expect("frozen suspension data satisfies the cone conditions")
}

/// Torus presentation with a rational shear: λ = (2, 1), τ = (1, −1).
pub fn torus_sheared() -> Surface {
    build("AB", "BA", vec![q("2"), q("1")], vec![q("1"), q("-1")])
}

/// Torus with lengths and shears in independent directions:
/// λ = (1, √2), τ = (1, −√3).
pub fn torus_mixed_irrationals() -> Surface {
    build(
        "AB",
        "BA",
        vec![q("1"), root("sqrt2", "1")],
        vec![q("1"), root("sqrt3", "-1")],
    )
}

/// Reversing permutation on four symbols, unit lengths,
/// τ = (2, 1/2, −1/2, −√2).
pub fn reversed4_sqrt2_last() -> Surface {
    build(
        "ABCD",
        "DCBA",
        vec![q("1"), q("1"), q("1"), q("1")],
        vec![q("2"), q("1/2"), q("-1/2"), root("sqrt2", "-1")],
    )
}

/// Rational relative of [`reversed4_sqrt2_last`]: τ = (2, 1/2, −1/2, −1),
/// whose backward orbit ends after three steps.
pub fn reversed4_rational() -> Surface {
    build(
        "ABCD",
        "DCBA",
        vec![q("1"), q("1"), q("1"), q("1")],
        vec![q("2"), q("1/2"), q("-1/2"), q("-1")],
    )
}

/// Reversing permutation with the irrational shear on the first symbol:
/// τ = (√2, 1/2, −1/2, −1). Two horizontal saddle connections of length 2
/// cross the cylinder of unit-height rectangles in the middle.
pub fn reversed4_sqrt2_first() -> Surface {
    build(
        "ABCD",
        "DCBA",
        vec![q("1"), q("1"), q("1"), q("1")],
        vec![root("sqrt2", "1"), q("1/2"), q("-1/2"), q("-1")],
    )
}

/// Reversing permutation with rationally independent shears
/// τ = (1, √2, −√3, −√5).
pub fn reversed4_independent() -> Surface {
    build(
        "ABCD",
        "DCBA",
        vec![q("1"), q("1"), q("1"), q("1")],
        vec![
            q("1"),
            root("sqrt2", "1"),
            root("sqrt3", "-1"),
            root("sqrt5", "-1"),
        ],
    )
}

/// Three-symbol reversing permutation with a horizontal middle side:
/// τ = (√2, 0, −1). The side B is itself a saddle connection.
pub fn reversed3_horizontal_side() -> Surface {
    build(
        "ABC",
        "CBA",
        vec![q("1"), q("1"), q("1")],
        vec![root("sqrt2", "1"), q("0"), q("-1")],
    )
}

pub const NAMED: &[&str] = &[
    "torus_sheared",
    "torus_mixed_irrationals",
    "reversed4_sqrt2_last",
    "reversed4_rational",
    "reversed4_sqrt2_first",
    "reversed4_independent",
    "reversed3_horizontal_side",
];

pub fn by_name(name: &str) -> Option<Surface> {
    match name {
        "torus_sheared" => Some(torus_sheared()),
        "torus_mixed_irrationals" => Some(torus_mixed_irrationals()),
        "reversed4_sqrt2_last" => Some(reversed4_sqrt2_last()),
        "reversed4_rational" => Some(reversed4_rational()),
        "reversed4_sqrt2_first" => Some(reversed4_sqrt2_first()),
        "reversed4_independent" => Some(reversed4_independent()),
        "reversed3_horizontal_side" => Some(reversed3_horizontal_side()),
        _ => None,
    }
}

/// Uniform irreducible pair with the top order fixed to A, B, C, ...;
/// resamples the bottom order until the pair is irreducible.
pub fn random_irreducible_pair<R: Rng>(rng: &mut R, d: usize) -> PermutationPair {
    let top: Vec<Symbol> = (0..d).map(Symbol).collect();
    loop {
        let mut bottom = top.clone();
        bottom.shuffle(rng);
        if let Ok(pair) = PermutationPair::new(top.clone(), bottom) {
            return pair;
        }
    }
}

fn small_positive_rational<R: Rng>(rng: &mut R) -> SymbolicReal {
    let numer = rng.gen_range(1..=12i64);
    let denom = rng.gen_range(1..=6i64);
    SymbolicReal::from_rational(Rational::new(numer.into(), denom.into()))
}

/// τ_α = (bottom position − top position), 1-based. Its top prefix sums are
/// positive integers and its bottom prefix sums negative integers for every
/// irreducible pair, so the cone conditions hold with margin 1.
fn canonical_tau(pair: &PermutationPair) -> Vec<Rational> {
    let d = pair.d();
    (0..d)
        .map(|i| {
            let a = Symbol(i);
            let diff = pair.bottom_pos(a) as i64 - pair.top_pos(a) as i64;
            Rational::from_integer(diff.into())
        })
        .collect()
}

/// Random surface over the rational basis: uniform irreducible pair, small
/// random rational lengths, and the canonical τ perturbed by rationals below
/// the cone margin. Resamples until Στ ≠ 0 so backward orbits do not stop
/// immediately.
pub fn random_surface<R: Rng>(rng: &mut R, d: usize) -> Surface {
    let alphabet = letter_alphabet(d);
    let basis = Arc::new(Basis::rational());
    loop {
        let pair = random_irreducible_pair(rng, d);
        let lengths: Vec<SymbolicReal> = (0..d).map(|_| small_positive_rational(rng)).collect();
        let tau: Vec<SymbolicReal> = canonical_tau(&pair)
            .into_iter()
            .map(|t| {
                let jitter = Rational::new(rng.gen_range(-3..=3i64).into(), (8 * d as i64).into());
                SymbolicReal::from_rational(t + jitter)
            })
            .collect();
        let total = tau.iter().fold(SymbolicReal::zero(), |acc, t| &acc + t);
        if total.is_zero() {
            continue;
        }
        match Surface::new(alphabet.clone(), basis.clone(), pair, lengths, tau) {
            Ok(s) => return s,
            Err(_) => continue,
        }
    }
}

/// Like [`random_surface`] but with τ pinned to exactly zero on one symbol
/// that is not first in either order. Resamples until the flattened data
/// still satisfies the cone conditions.
pub fn random_surface_with_horizontal_side<R: Rng>(rng: &mut R, d: usize) -> (Surface, Symbol) {
    assert!(
        d >= 3,
        "a horizontal side needs a symbol with two neighbours"
    );
    let alphabet = letter_alphabet(d);
    let basis = Arc::new(Basis::rational());
    loop {
        let pair = random_irreducible_pair(rng, d);
        let candidates: Vec<Symbol> = (0..d)
            .map(Symbol)
            .filter(|&a| pair.top_pos(a) > 0 && pair.bottom_pos(a) > 0)
            .collect();
        let Some(&flat) = candidates.as_slice().choose(rng) else {
            continue;
        };
        let lengths: Vec<SymbolicReal> = (0..d).map(|_| small_positive_rational(rng)).collect();
        let tau: Vec<SymbolicReal> = canonical_tau(&pair)
            .into_iter()
            .enumerate()
            .map(|(i, t)| {
                if Symbol(i) == flat {
                    return SymbolicReal::zero();
                }
                let jitter = Rational::new(rng.gen_range(-3..=3i64).into(), (8 * d as i64).into());
                SymbolicReal::from_rational(t + jitter)
            })
            .collect();
        if tau.iter().filter(|t| t.is_zero()).count() != 1 {
            continue;
        }
        let total = tau.iter().fold(SymbolicReal::zero(), |acc, t| &acc + t);
        if total.is_zero() {
            continue;
        }
        match Surface::new(alphabet.clone(), basis.clone(), pair, lengths, tau) {
            Ok(s) => return (s, flat),
            Err(_) => continue,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn named_surfaces_build_and_resolve() {
        for name in NAMED {
            let s = by_name(name).unwrap();
            assert!(s.d() >= 2);
            assert!(s.heights().is_ok(), "{name} has positive heights");
        }
        assert!(by_name("missing").is_none());
    }

    #[test]
    fn random_surfaces_are_valid_and_reproducible() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for d in 2..=6 {
            let s = random_surface(&mut rng, d);
            assert_eq!(s.d(), d);
            assert!(!s.total_tau().is_zero());
        }
        let one = random_surface(&mut ChaCha8Rng::seed_from_u64(42), 5);
        let two = random_surface(&mut ChaCha8Rng::seed_from_u64(42), 5);
        assert_eq!(one, two);
    }

    #[test]
    fn horizontal_side_generator_pins_exactly_one_tau() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let (s, flat) = random_surface_with_horizontal_side(&mut rng, 4);
            assert!(s.tau[flat.0].is_zero());
            assert!(s.perm.top_pos(flat) > 0 && s.perm.bottom_pos(flat) > 0);
            assert_eq!(
                s.tau.iter().filter(|t| t.is_zero()).count(),
                1,
                "jitter keeps the other entries off zero"
            );
        }
    }
}
