//! Region operations against definitional oracles: a coordinate-compressed
//! sweep for measure and direct box tests for membership.

use lipctl::geometry::{Aab, Region};
use lipctl::scalar::{Rational, Scalar};
use num_traits::Signed;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn q(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

/// Measure of an arbitrary union of boxes (overlaps allowed).
fn sweep_measure(dim: usize, boxes: &[Aab<Rational>]) -> Rational {
    sweep_measure_filtered(dim, boxes, &[], |_| true)
}

/// Sweep over the grid induced by `boxes` and `extra` coordinates; a cell
/// counts when its center lies in some box and passes `keep`.
fn sweep_measure_filtered(
    dim: usize,
    boxes: &[Aab<Rational>],
    extra: &[Aab<Rational>],
    keep: impl Fn(&[Rational]) -> bool,
) -> Rational {
    let mut coords: Vec<Vec<Rational>> = vec![Vec::new(); dim];
    for b in boxes.iter().chain(extra) {
        for k in 0..dim {
            coords[k].push(b.lo()[k].clone());
            coords[k].push(b.hi()[k].clone());
        }
    }
    for c in &mut coords {
        c.sort();
        c.dedup();
    }
    if coords.iter().any(|c| c.len() < 2) {
        return q(0, 1);
    }
    let mut total = q(0, 1);
    let mut idx = vec![0usize; dim];
    loop {
        let center: Vec<Rational> = (0..dim)
            .map(|k| (coords[k][idx[k]].clone() + coords[k][idx[k] + 1].clone()) / q(2, 1))
            .collect();
        if boxes.iter().any(|b| b.contains(&center)) && keep(&center) {
            let vol = (0..dim).fold(q(1, 1), |acc, k| {
                acc * (coords[k][idx[k] + 1].clone() - coords[k][idx[k]].clone())
            });
            total += vol;
        }
        let mut k = 0;
        loop {
            if k == dim {
                return total;
            }
            idx[k] += 1;
            if idx[k] + 1 < coords[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

fn point_box_dist(p: &[Rational], b: &Aab<Rational>) -> Rational {
    let mut d = q(0, 1);
    for k in 0..p.len() {
        let gap = if p[k] < b.lo()[k] {
            b.lo()[k].clone() - p[k].clone()
        } else if p[k] > b.hi()[k] {
            p[k].clone() - b.hi()[k].clone()
        } else {
            q(0, 1)
        };
        if gap > d {
            d = gap;
        }
    }
    d
}

fn in_open_cube(p: &[Rational], c: &[Rational], rad: &Rational) -> bool {
    p.iter().zip(c).all(|(x, y)| (x.clone() - y.clone()).abs() < *rad)
}

fn random_box(rng: &mut ChaCha8Rng, dim: usize) -> Aab<Rational> {
    let mut lo = Vec::new();
    let mut hi = Vec::new();
    for _ in 0..dim {
        let a = rng.gen_range(-12..12);
        let w = rng.gen_range(0..8);
        lo.push(q(a, 2));
        hi.push(q(a + w, 2));
    }
    Aab::new(lo, hi).unwrap()
}

fn random_point(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Rational> {
    (0..dim)
        .map(|_| {
            // mostly on the half-grid, where boundaries live
            if rng.gen_bool(0.6) {
                q(rng.gen_range(-16..16), 2)
            } else {
                q(rng.gen_range(-64..64), 8)
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy)]
enum Op {
    Expand(i64),
    Subtract(bool),
    Intersect(i64),
}

fn check_ops(seed: u64, dim: usize, nboxes: usize, ops: &[Op]) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw: Vec<_> = (0..nboxes).map(|_| random_box(&mut rng, dim)).collect();
    let mut region = Region::from_boxes(dim, raw.clone()).unwrap();
    assert!(region.is_interior_disjoint());
    assert_eq!(region.measure(), sweep_measure(dim, &raw));
    for p in (0..200).map(|_| random_point(&mut rng, dim)) {
        assert_eq!(region.contains(&p), raw.iter().any(|b| b.contains(&p)));
    }

    for op in ops {
        let before = region.clone();
        let probes: Vec<_> = (0..1000).map(|_| random_point(&mut rng, dim)).collect();
        match *op {
            Op::Expand(r2) => {
                let r = q(r2, 2);
                region = before.minkowski_expand(&r).unwrap();
                let grown: Vec<_> = before.boxes().iter().map(|b| b.expanded(&r)).collect();
                assert_eq!(region.measure(), sweep_measure(dim, &grown));
                assert!(region.measure() >= before.measure());
                for p in &probes {
                    let expect = before.boxes().iter().any(|b| point_box_dist(p, b) <= r);
                    assert_eq!(region.contains(p), expect, "expand membership at {p:?}");
                }
            }
            Op::Subtract(open) => {
                let c = random_point(&mut rng, dim);
                let rad = q(rng.gen_range(1..5), 2);
                region = before.subtract_cube(&c, &rad, open).unwrap();
                let cube = Aab::cube(&c, &rad);
                let expect_measure = sweep_measure_filtered(dim, before.boxes(), std::slice::from_ref(&cube), |p| {
                    !in_open_cube(p, &c, &rad)
                });
                assert_eq!(region.measure(), expect_measure);
                let full = (0..dim).fold(q(1, 1), |acc, _| acc * (q(2, 1) * rad.clone()));
                assert!(region.measure() >= before.measure() - full);
                for p in &probes {
                    let inside = before.contains(p);
                    let removed = if open {
                        in_open_cube(p, &c, &rad)
                    } else {
                        cube.contains(p)
                    };
                    if open {
                        assert_eq!(region.contains(p), inside && !removed, "subtract at {p:?}");
                    } else if !cube.contains(p) {
                        assert_eq!(region.contains(p), inside, "closed subtract at {p:?}");
                    } else if in_open_cube(p, &c, &rad) {
                        assert!(!region.contains(p));
                    }
                }
                let again = region.subtract_cube(&c, &rad, open).unwrap();
                assert_eq!(again, region);
            }
            Op::Intersect(r2) => {
                let c = random_point(&mut rng, dim);
                let rad = q(r2, 2);
                region = before.intersect_cube(&c, &rad).unwrap();
                let cube = Aab::cube(&c, &rad);
                for p in &probes {
                    assert_eq!(region.contains(p), before.contains(p) && cube.contains(p));
                }
                assert!(before.contains_region(&region));
            }
        }
        assert!(region.is_interior_disjoint(), "disjointness after {op:?}");
        assert_eq!(region.measure(), sweep_measure(dim, region.boxes()));
        if region.is_empty() {
            break;
        }
    }
}

fn op_strategy() -> impl Strategy<Value = Op> {
    prop_oneof![
        (0i64..4).prop_map(Op::Expand),
        any::<bool>().prop_map(Op::Subtract),
        (2i64..12).prop_map(Op::Intersect),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_operation_sequences(
        seed in any::<u64>(),
        dim in 1usize..=3,
        nboxes in 1usize..=20,
        ops in prop::collection::vec(op_strategy(), 1..6),
    ) {
        check_ops(seed, dim, nboxes, &ops);
    }
}

#[test]
fn expansion_then_hole_punching_in_3d() {
    check_ops(
        7,
        3,
        20,
        &[Op::Expand(1), Op::Subtract(true), Op::Subtract(true), Op::Expand(1), Op::Subtract(true)],
    );
}

#[test]
fn rasterized_expansion_example() {
    // [0,1]x[0,1] and [3,4]x[0,1] grown by 1, counted on a 1/4 lattice.
    let r = Region::from_boxes(
        2,
        vec![
            Aab::new(vec![q(0, 1), q(0, 1)], vec![q(1, 1), q(1, 1)]).unwrap(),
            Aab::new(vec![q(3, 1), q(0, 1)], vec![q(4, 1), q(1, 1)]).unwrap(),
        ],
    )
    .unwrap();
    let e = r.minkowski_expand(&q(1, 1)).unwrap();
    let mut cells = 0;
    for a in -8..24 {
        for b in -8..12 {
            let center = [q(2 * a + 1, 8), q(2 * b + 1, 8)];
            if e.contains(&center) {
                cells += 1;
            }
        }
    }
    assert_eq!(cells, 18 * 16);
    assert_eq!(e.measure(), q(18, 1));
}
