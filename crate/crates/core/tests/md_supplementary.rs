//! The m = d = 2, j = 1 construction on a grid fine enough to meet the
//! far-slab quota. Dyadic coordinates keep f64 exact throughout.

use lipctl::controllermd::{build_md_with, derive_params};
use lipctl::harness::{game_run, sample_lipschitz, GridSpec};
use lipctl::sequences::PointSeq;

fn square_grid(den: i32, radius: i32) -> PointSeq<f64> {
    let k = den * radius;
    let s = f64::from(den);
    let pts = (-k..=k).flat_map(|a| (-k..=k).map(move |b| vec![f64::from(a) / s, f64::from(b) / s])).collect();
    PointSeq::new(2, pts).unwrap()
}

#[test]
fn grid_128_is_controlled_by_the_assignment() {
    let seq = square_grid(128, 3);
    let params = derive_params(&seq, 1, 2).unwrap();
    assert_eq!((params.t0, params.t1, params.l), (2.25, 2.5, 4));
    let assignment = build_md_with(&seq, params.clone()).unwrap();
    assignment.check(&seq).unwrap();
    let quota = params.quota() as usize;
    assert!(assignment.records.iter().all(|r| r.half.len() <= quota));
    assert!(assignment.records.iter().any(|r| !r.fresh.is_empty()));

    let pairs = assignment.pairs();
    let grid = GridSpec::cube(2, &4.0, &0.25).unwrap();
    let fns: Vec<_> = (0..1000u64).map(|s| sample_lipschitz(&grid, 2, &1.0, s).unwrap()).collect();
    assert!(fns.iter().all(|f| f.max_norm_lipschitz() <= 1.0));
    let report = game_run(&pairs, &fns).unwrap();
    assert_eq!(report.controlled_fraction(), 1.0, "{}", report.to_text());
}
