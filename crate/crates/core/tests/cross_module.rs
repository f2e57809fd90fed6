//! Interactions between the generators, controllers, evader engine and the
//! game harness.

mod common;

use common::{grid_value, q, quarter_slope_evader_exists};
use lipctl::controller1d::{build_block, build_schedule};
use lipctl::feasibility::{
    check_measure_bound, compute_params, evade, evader_trace, feasible_control_check, ControlPair,
};
use lipctl::harness::{game_run, sample_lipschitz, write_gridfn, GridSpec, LipschitzFn};
use lipctl::scalar::{Rational, Scalar};
use lipctl::sequences::gen_pow2;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn pow2_schedule_blocks_are_controlling() {
    let seq = gen_pow2(1, 5, 100_000).unwrap();
    let schedule = build_schedule(&seq, 1, 2).unwrap();
    assert_eq!(schedule.blocks.len(), 2);
    for b in &schedule.blocks {
        assert!(feasible_control_check(&b.pairs, b.j, 1, b.n).unwrap().is_controlled(), "j = {}", b.j);
    }
}

#[test]
fn slow_expansion_empties_the_pow2_trace() {
    let seq = gen_pow2(1, 5, 100_000).unwrap();
    let pairs = build_schedule(&seq, 1, 2).unwrap().pairs();
    let params = compute_params(&pairs, 1).unwrap();
    let full = evader_trace(&pairs, 1, &params).unwrap();
    assert!(full.emptied_at.is_none());
    assert!(check_measure_bound(&full).holds());
    // expansion at the class rate instead of 2 alpha^(1/d)
    let slow = evader_trace(&pairs, 1, &params.with_beta(Rational::from_i128(2))).unwrap();
    assert!(slow.emptied_at.is_some());
}

#[test]
fn schedule_pairs_control_sampled_class_members() {
    let seq = gen_pow2(1, 5, 100_000).unwrap();
    let schedule = build_schedule(&seq, 1, 2).unwrap();
    for b in &schedule.blocks {
        let grid = GridSpec::cube(1, &Rational::from_i128(b.n as i128 + 1), &q(1, 4)).unwrap();
        let j = Rational::from_i128(b.j as i128);
        let fns: Vec<_> = (0..50).map(|s| sample_lipschitz(&grid, 1, &j, s).unwrap()).collect();
        let report = game_run(&b.pairs, &fns).unwrap();
        assert_eq!(report.controlled_fraction(), 1.0, "j = {}", b.j);
    }
}

#[test]
fn evader_is_never_controlled_in_the_game() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let d = rng.gen_range(1..=2usize);
        let pairs: Vec<ControlPair<Rational>> = (0..20)
            .map(|i| {
                let x = vec![grid_value(&mut rng, -6, 6, 4), grid_value(&mut rng, -6, 6, 4)];
                ControlPair::new(i, x, (0..d).map(|_| grid_value(&mut rng, -2, 2, 4)).collect())
            })
            .collect();
        let (_, g) = evade(&pairs, d).unwrap();
        let f = g.lift(2);
        let report = game_run(&pairs, &[f]).unwrap();
        let o = &report.outcomes[0];
        assert!(!o.controlled);
        assert!(o.margin.clone().unwrap() >= Rational::from_i128(1));
    }
}

#[test]
fn witness_from_deleted_block_pair_evades() {
    let xs = [q(0, 1), q(1, 2), q(1, 1)];
    let pairs = build_block(1, 1, 1, &xs).unwrap();
    let rest = &pairs[1..];
    match feasible_control_check(rest, 1, 1, 1).unwrap() {
        lipctl::feasibility::ControlVerdict::Witness(g) => {
            assert!(g.max_slope() <= Rational::from_i128(1));
            assert!(rest.iter().all(|p| !p.controls_value(&g.eval(&p.x))));
        }
        other => panic!("expected a witness, got {other:?}"),
    }
}

#[test]
fn sampled_function_regression_seed_42() {
    let grid = GridSpec::cube(1, &Rational::from_i128(2), &q(1, 2)).unwrap();
    let f = sample_lipschitz(&grid, 1, &Rational::from_i128(1), 42).unwrap();
    let table: Vec<String> = f.values.iter().map(|v| v[0].encode()).collect();
    assert_eq!(table, PINNED_42, "{}", write_gridfn(&f));
}

const PINNED_42: [&str; 9] = ["-5/4", "-17/16", "-19/32", "-21/32", "-27/32", "-9/16", "-5/16", "-21/32", "-7/16"];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn measure_bound_holds_on_random_traces(
        d in 1usize..=2,
        steps in proptest::collection::vec((1i64..=8, -24i64..=24, -24i64..=24), 1..25),
    ) {
        let mut t = Rational::from_i128(0);
        let pairs: Vec<ControlPair<Rational>> = steps
            .iter()
            .enumerate()
            .map(|(i, (dt, a, b))| {
                t = t.clone() + q(*dt, 8);
                let y = [q(*a, 8), q(*b, 8)][..d].to_vec();
                ControlPair::new(i, vec![t.clone()], y)
            })
            .collect();
        let (trace, g) = evade(&pairs, d).unwrap();
        prop_assert!(check_measure_bound(&trace).holds());
        prop_assert!(g.max_slope() <= trace.params.beta);
        prop_assert!(g.evades_radially(&pairs));
    }

    #[test]
    fn control_check_matches_search(
        n in 0i64..=2,
        raw in proptest::collection::vec((0i64..=2, -8i64..=8), 1..=4),
    ) {
        let pairs: Vec<ControlPair<Rational>> = raw
            .iter()
            .enumerate()
            .map(|(i, (x, y))| ControlPair::new(i, vec![q(*x.min(&n), 1)], vec![q(*y, 4)]))
            .collect();
        let fast = feasible_control_check(&pairs, 1, 1, n as u64).unwrap().is_controlled();
        prop_assert_eq!(fast, !quarter_slope_evader_exists(&pairs, n));
    }
}
