//! Structural invariants checked on streams of random surfaces.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rauzy_core::samples::{
    random_irreducible_pair, random_surface, random_surface_with_horizontal_side,
};
use rauzy_core::suspension::validate_suspension;
use rauzy_core::{
    backward_orbit, backward_step, forward_step_suspension, BackwardOutcome, ForwardOutcome,
    StepKind, SymbolicReal,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    #[allow(clippy::needless_range_loop)] // (a, b) are matrix indices
    fn pairing_matrix_is_antisymmetric(seed in any::<u64>(), d in 2usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pair = random_irreducible_pair(&mut rng, d);
        let m = pair.omega_matrix();
        for a in 0..d {
            prop_assert_eq!(m[a][a], 0);
            for b in 0..d {
                prop_assert_eq!(m[a][b], -m[b][a]);
            }
        }
    }

    #[test]
    fn displacements_move_intervals_to_their_new_slots(seed in any::<u64>(), d in 2usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_surface(&mut rng, d);
        let iet = s.iet();
        let delta = iet.displacements();
        let top = iet.left_endpoints(StepKind::Top);
        let bottom = iet.left_endpoints(StepKind::Bottom);
        for a in 0..d {
            let expected = &bottom[s.perm.bottom_pos(rauzy_core::Symbol(a))]
                - &top[s.perm.top_pos(rauzy_core::Symbol(a))];
            prop_assert_eq!(&delta[a], &expected);
        }
    }
}

#[test]
fn heights_are_positive_on_random_cone_data() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for i in 0..500 {
        let d = 2 + (i % 7);
        let s = random_surface(&mut rng, d);
        let h = s.heights().expect("cone data gives positive heights");
        assert_eq!(h.len(), d);
    }
}

#[test]
fn polygon_closes_and_classes_partition_the_vertices() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for i in 0..200 {
        let d = 2 + (i % 7);
        let s = random_surface(&mut rng, d);
        let p = s.polygon();
        assert_eq!(p.upper[d], p.lower[d], "broken lines meet at the far end");
        let classes = s.singularity_classes().unwrap();
        let mut seen = std::collections::BTreeSet::new();
        let mut total = 0;
        for class in &classes.classes {
            for v in &class.vertices {
                assert!(seen.insert(*v), "vertex listed twice");
                total += 1;
            }
        }
        // Both names of the two shared endpoints are listed, so the count is
        // the full 2(d+1) corner-name set.
        assert_eq!(total, 2 * (d + 1), "each vertex name appears exactly once");
    }
}

#[test]
fn angle_defects_account_for_the_euler_characteristic() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for i in 0..300 {
        let d = 2 + (i % 7);
        let s = random_surface(&mut rng, d);
        let classes = s.singularity_classes().unwrap();
        let defect: isize = classes
            .classes
            .iter()
            .map(|c| c.half_turns as isize - 2)
            .sum();
        assert_eq!(
            defect,
            2 * (d as isize - 1 - classes.classes.len() as isize)
        );
    }
}

#[test]
fn single_steps_invert_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(5150);
    let mut undone = 0;
    for i in 0..100 {
        let d = 2 + (i % 7);
        let s = random_surface(&mut rng, d);
        match backward_step(&s).unwrap() {
            BackwardOutcome::Stop => panic!("generator guarantees Στ ≠ 0"),
            BackwardOutcome::Step {
                next,
                record,
                donor,
            } => {
                let ForwardOutcome::Step {
                    next: redone,
                    record: fwd,
                } = forward_step_suspension(&next).unwrap()
                else {
                    panic!("predecessor has distinct last lengths by construction");
                };
                assert_eq!(redone, s);
                assert_eq!(fwd.kind, record.kind);
                assert_eq!(fwd.winner, record.winner);
                assert_eq!(fwd.loser, donor);
                undone += 1;
            }
        }
    }
    assert_eq!(undone, 100);
}

#[test]
fn orbits_keep_cone_validity_heights_and_area() {
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    for i in 0..40 {
        let d = 3 + (i % 5);
        let s = random_surface(&mut rng, d);
        let area = s.area().unwrap().expect("rational data has span area");
        let mut state = s.clone();
        for _ in 0..30 {
            match backward_step(&state).unwrap() {
                BackwardOutcome::Stop => break,
                BackwardOutcome::Step { next, .. } => state = next,
            }
            validate_suspension(&state.perm, &state.tau, &state.basis)
                .expect("steps preserve the cone conditions");
            state.heights().expect("steps keep heights positive");
            assert_eq!(state.area().unwrap().expect("area stays in the span"), area);
        }
    }
}

#[test]
fn transport_checkpoints_verify_and_grow() {
    let mut rng = ChaCha8Rng::seed_from_u64(616);
    for i in 0..25 {
        let d = 3 + (i % 5);
        let s = random_surface(&mut rng, d);
        let log = backward_orbit(&s, 40, 1).unwrap();
        let mut last_min: Option<num_bigint::BigInt> = None;
        for cp in &log.checkpoints {
            assert!(cp.identity_holds, "matrix transports the initial data");
            if let Some(prev) = &last_min {
                assert!(cp.min_entry >= *prev, "minimum entry never decreases");
            }
            last_min = Some(cp.min_entry.clone());
        }
    }
}

#[test]
fn connections_persist_wherever_the_polygon_stays_traceable() {
    // The two length-2 connections are geodesics of the surface, so every
    // re-polygonization along the backward orbit that remains embedded must
    // find both again (possibly crossing sides of the new polygon). States
    // whose chains overlap are reported as degenerate by the tracer; the
    // surface itself is unaffected.
    let mut state = rauzy_core::samples::reversed4_sqrt2_first();
    let two = rauzy_core::numeric::parse_rational("2").unwrap();
    let two = SymbolicReal::from_rational(two);
    let budget = {
        let three = rauzy_core::numeric::parse_rational("3").unwrap();
        SymbolicReal::from_rational(three)
    };
    let mut traced = 0;
    let mut degenerate = 0;
    for _ in 0..=20 {
        match rauzy_core::enumerate_saddle_connections(&state, &budget) {
            Ok(found) => {
                traced += 1;
                assert_eq!(found.len(), 2, "both connections reappear");
                assert!(found.iter().all(|c| c.length == two));
            }
            Err(rauzy_core::GeometryError::DegenerateEvent) => degenerate += 1,
            Err(other) => panic!("unexpected enumeration failure: {other:?}"),
        }
        let BackwardOutcome::Step { next, .. } = backward_step(&state).unwrap() else {
            panic!("this orbit does not stop");
        };
        state = next;
    }
    assert_eq!(traced, 16, "most re-polygonizations stay embedded");
    assert_eq!(
        degenerate, 5,
        "the overlapping ones are flagged, not traced"
    );
}

#[test]
fn origin_ray_survives_on_an_orbit_that_never_stops() {
    // Counterpart of the stopped-orbit case: when the backward orbit runs
    // forever, the origin separatrix meets no vertex however far it runs.
    let s = rauzy_core::samples::reversed4_sqrt2_last();
    let hundred = SymbolicReal::from_rational(rauzy_core::numeric::parse_rational("100").unwrap());
    let t = rauzy_core::trace_horizontal(&s, rauzy_core::TraceStart::Origin, &hundred).unwrap();
    assert_eq!(t.outcome, rauzy_core::TraceOutcome::Survived);
    assert_eq!(t.crossings.len(), 33);
}

#[test]
fn pinned_horizontal_symbol_never_wins() {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    for _ in 0..20 {
        let (s, flat) = random_surface_with_horizontal_side(&mut rng, 4);
        let log = backward_orbit(&s, 100, 0).unwrap();
        assert_eq!(log.win_counts[flat.0], 0, "a zero-shear symbol cannot win");
        let total: SymbolicReal = s.tau[flat.0].clone();
        assert!(total.is_zero());
    }
}
