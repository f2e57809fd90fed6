//! Shared generators and brute-force oracles for the integration targets.
#![allow(dead_code)]

use lipctl::feasibility::ControlPair;
use lipctl::scalar::{Rational, Scalar};
use rand::Rng;

pub fn q(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

/// Uniform multiple of `1/den` in `[lo, hi]`.
pub fn grid_value<R: Rng>(rng: &mut R, lo: i64, hi: i64, den: i64) -> Rational {
    q(rng.gen_range(lo * den..=hi * den), den)
}

/// Exhaustive search for a 1-Lipschitz evader with `|f(0)| <= 1` on
/// `[0, n]`, for pairs at integer `x` with values on the quarter grid: node
/// values on the quarter grid, unit-step slopes in `{-1, -3/4, ..., 1}`.
pub fn quarter_slope_evader_exists(pairs: &[ControlPair<Rational>], n: i64) -> bool {
    let at = |k: i64| -> Vec<&ControlPair<Rational>> {
        pairs.iter().filter(|p| p.x[0] == q(k, 1)).collect()
    };
    let by_pos: Vec<Vec<&ControlPair<Rational>>> = (0..=n).map(at).collect();
    let free = |k: usize, v: &Rational| by_pos[k].iter().all(|p| !p.controls_value(std::slice::from_ref(v)));
    fn dfs(k: usize, v: Rational, n: usize, free: &dyn Fn(usize, &Rational) -> bool) -> bool {
        if !free(k, &v) {
            return false;
        }
        if k == n {
            return true;
        }
        (-4..=4).any(|s| dfs(k + 1, v.clone() + q(s, 4), n, free))
    }
    (-4..=4).any(|v0| dfs(0, q(v0, 4), n as usize, &free))
}
