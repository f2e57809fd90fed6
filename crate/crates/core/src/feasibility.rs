//! Feasible value sets, the measure lower bound, and evader reconstruction.
//!
//! For a sorted list of radii `t_1 <= t_2 <= ...` with forbidden values
//! `y_i`, the set `D_i` of values `g(t_i)` reachable by a `beta`-Lipschitz
//! curve avoiding every earlier open unit cube is
//! `expand(D_{i-1}, beta (t_i - t_{i-1})) \ open_cube(y_i, 1)`.
//! Running the recursion forwards and picking points backwards yields an
//! explicit piecewise-linear evader.

use std::fmt::Write as _;


use crate::error::{Error, Result};
use crate::geometry::Region;
use crate::harness::LipschitzFn;
use crate::scalar::{cmp, dist, int, max_of, norm, powi, Scalar};

/// `(x, y)` controls `f` when `|f(x) - y| < 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct ControlPair<S> {
    pub index: usize,
    pub x: Vec<S>,
    pub y: Vec<S>,
}

impl<S: Scalar> ControlPair<S> {
    pub fn new(index: usize, x: Vec<S>, y: Vec<S>) -> Self {
        ControlPair { index, x, y }
    }

    pub fn radius(&self) -> S {
        norm(&self.x)
    }

    /// Whether a function taking `value` at `x` is controlled by this pair.
    pub fn controls_value(&self, value: &[S]) -> bool {
        dist(value, &self.y) < S::one()
    }
}

/// Stable sort by `|x|`.
pub fn sort_by_radius<S: Scalar>(pairs: &[ControlPair<S>]) -> Vec<ControlPair<S>> {
    let mut v = pairs.to_vec();
    v.sort_by(|a, b| cmp(&a.radius(), &b.radius()));
    v
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvaderParams<S> {
    /// `max_i i / t_i^d` over the positive radii.
    pub alpha: S,
    /// Expansion rate, at least `2 alpha^(1/d)`.
    pub beta: S,
    pub d: usize,
    /// Number of pairs at radius zero.
    pub k0: usize,
}

impl<S: Scalar> EvaderParams<S> {
    /// Same `alpha`, different expansion rate. A rate below `2 alpha^(1/d)`
    /// voids the measure bound and may empty the trace.
    pub fn with_beta(mut self, beta: S) -> Self {
        self.beta = beta;
        self
    }
}

pub fn compute_params<S: Scalar>(pairs: &[ControlPair<S>], d: usize) -> Result<EvaderParams<S>> {
    if d == 0 {
        return Err(Error::Precondition("d must be >= 1".into()));
    }
    let sorted = sort_by_radius(pairs);
    let k0 = sorted.iter().filter(|p| p.radius().is_zero()).count();
    let mut alpha: Option<S> = None;
    for (i, p) in sorted.iter().skip(k0).enumerate() {
        let ratio = int::<S>(i as i64 + 1) / powi(&p.radius(), d);
        alpha = Some(match alpha {
            Some(a) => max_of(&a, &ratio),
            None => ratio,
        });
    }
    let alpha = alpha.ok_or_else(|| {
        Error::DegenerateInput("every pair sits at the origin; no positive radius".into())
    })?;
    let beta = dyadic_rate(&alpha, d);
    Ok(EvaderParams { alpha, beta, d, k0 })
}

/// Smallest `q / 2^e` with `(q / 2^e)^d >= 2^d alpha`, using `e = 40` unless
/// that overshoots `2 alpha^(1/d)` by more than a relative `1e-9`.
fn dyadic_rate<S: Scalar>(alpha: &S, d: usize) -> S {
    let target = powi(&int::<S>(2), d) * alpha.clone();
    let estimate = 2.0 * alpha.to_f64().powf(1.0 / d as f64);
    let billion = int::<S>(1_000_000_000);
    let mut e = 40usize;
    loop {
        let den = powi(&int::<S>(2), e);
        let scaled_target = target.clone() * powi(&den, d);
        let mut q = (S::from_f64(estimate).unwrap_or_else(S::one) * den.clone()).ceil();
        while powi(&q, d) < scaled_target {
            q = q + S::one();
        }
        while q > S::zero() && powi(&(q.clone() - S::one()), d) >= scaled_target {
            q = q - S::one();
        }
        let beta = q / den;
        let tight = powi(&(beta.clone() * billion.clone()), d)
            <= target.clone() * powi(&(billion.clone() + S::one()), d);
        if tight || e >= 120 || !S::EXACT {
            return beta;
        }
        e += 8;
    }
}

/// A point at max distance greater than 1 from every `y` of the zero pairs:
/// first coordinate two past the largest first coordinate, the rest zero.
pub fn start_point<S: Scalar>(zero_pairs: &[ControlPair<S>], d: usize) -> Vec<S> {
    let mut p = vec![S::zero(); d];
    if let Some(top) = zero_pairs.iter().map(|z| z.y[0].clone()).max_by(cmp) {
        p[0] = top + int(2);
    }
    p
}

#[derive(Clone, Debug)]
pub struct FeasTrace<S> {
    pub params: EvaderParams<S>,
    pub start: Vec<S>,
    pub zero_pairs: Vec<ControlPair<S>>,
    /// Positive-radius pairs in processing order.
    pub pairs: Vec<ControlPair<S>>,
    /// `t_0 = 0` followed by one radius per processed pair.
    pub radii: Vec<S>,
    /// `D_0, D_1, ...`; shorter than `radii` when the set emptied.
    pub regions: Vec<Region<S>>,
    pub measures: Vec<S>,
    /// First step whose feasible set is empty.
    pub emptied_at: Option<usize>,
}

impl<S: Scalar> FeasTrace<S> {
    pub fn steps(&self) -> usize {
        self.pairs.len()
    }
}

struct Propagation<S> {
    radii: Vec<S>,
    regions: Vec<Region<S>>,
    emptied_at: Option<usize>,
}

fn propagate<S: Scalar>(
    initial: Region<S>,
    steps: &[(S, &[S])],
    rate: &S,
) -> Result<Propagation<S>> {
    let mut radii = vec![S::zero()];
    let mut regions = vec![initial];
    let one = S::one();
    for (k, (t, y)) in steps.iter().enumerate() {
        let prev = regions.last().expect("nonempty");
        let dt = t.clone() - radii.last().expect("nonempty").clone();
        let grown = if dt.is_zero() {
            prev.clone()
        } else {
            prev.minkowski_expand(&(rate.clone() * dt))?
        };
        let next = grown.subtract_cube(y, &one, true)?;
        radii.push(t.clone());
        let empty = next.is_empty();
        regions.push(next);
        if empty {
            return Ok(Propagation { radii, regions, emptied_at: Some(k + 1) });
        }
    }
    Ok(Propagation { radii, regions, emptied_at: None })
}

/// Picks values backwards through a nonempty propagation. Equal radii share
/// one breakpoint, taken from the last region at that radius.
fn backtrack<S: Scalar>(radii: &[S], regions: &[Region<S>], rate: &S) -> Result<RadialPl<S>> {
    let mut groups: Vec<usize> = Vec::new();
    for i in 0..regions.len() {
        if i + 1 == regions.len() || radii[i + 1] != radii[i] {
            groups.push(i);
        }
    }
    let last = *groups.last().expect("at least D_0");
    let mut p = regions[last]
        .pick_point()
        .ok_or_else(|| Error::Internal("final feasible set is empty".into()))?;
    let mut values = vec![p.clone()];
    let mut breakpoints = vec![radii[last].clone()];
    for w in groups.windows(2).rev() {
        let (here, next) = (w[0], w[1]);
        let reach = rate.clone() * (radii[next].clone() - radii[here].clone());
        p = regions[here].intersect_cube(&p, &reach)?.pick_point().ok_or_else(|| {
            Error::Internal(format!("no predecessor value at step {here}"))
        })?;
        values.push(p.clone());
        breakpoints.push(radii[here].clone());
    }
    values.reverse();
    breakpoints.reverse();
    Ok(RadialPl { breakpoints, values, lipschitz: rate.clone() })
}

/// Feasible sets for the radial evader of `pairs` (any `m`; only `|x|` is
/// used). Pairs are processed in order of radius; equal radii are
/// subtracted one after another without expansion.
pub fn evader_trace<S: Scalar>(
    pairs: &[ControlPair<S>],
    d: usize,
    params: &EvaderParams<S>,
) -> Result<FeasTrace<S>> {
    if let Some(p) = pairs.iter().find(|p| p.y.len() != d) {
        return Err(Error::DimensionMismatch { expected: d, found: p.y.len() });
    }
    let sorted = sort_by_radius(pairs);
    let k0 = sorted.iter().filter(|p| p.radius().is_zero()).count();
    let (zero_pairs, positive) = sorted.split_at(k0);
    let start = start_point(zero_pairs, d);
    let radii: Vec<S> = positive.iter().map(ControlPair::radius).collect();
    let steps: Vec<(S, &[S])> =
        radii.iter().cloned().zip(positive.iter().map(|p| p.y.as_slice())).collect();
    let prop = propagate(Region::point(&start), &steps, &params.beta)?;
    let measures = prop.regions.iter().map(Region::measure).collect();
    Ok(FeasTrace {
        params: params.clone(),
        start,
        zero_pairs: zero_pairs.to_vec(),
        pairs: positive.to_vec(),
        radii: prop.radii,
        regions: prop.regions,
        measures,
        emptied_at: prop.emptied_at,
    })
}

/// Per-step comparison of `mu(D_i)` with `2^(d+1) alpha t_i^d - 2^d i`.
#[derive(Clone, Debug)]
pub struct MeasureBoundReport<S> {
    pub bounds: Vec<S>,
    pub margins: Vec<S>,
    pub first_violation: Option<usize>,
}

impl<S: Scalar> MeasureBoundReport<S> {
    pub fn holds(&self) -> bool {
        self.first_violation.is_none()
    }

    pub fn min_margin(&self) -> Option<&S> {
        self.margins.iter().min_by(|a, b| cmp(*a, *b))
    }
}

pub fn measure_bound<S: Scalar>(alpha: &S, d: usize, t: &S, i: usize) -> S {
    let two_d = powi(&int::<S>(2), d);
    two_d.clone() * int(2) * alpha.clone() * powi(t, d) - two_d * int(i as i64)
}

pub fn check_measure_bound<S: Scalar>(trace: &FeasTrace<S>) -> MeasureBoundReport<S> {
    let d = trace.params.d;
    let mut bounds = Vec::with_capacity(trace.measures.len());
    let mut margins = Vec::with_capacity(trace.measures.len());
    let mut first_violation = None;
    for (i, (mu, t)) in trace.measures.iter().zip(&trace.radii).enumerate() {
        let bound = measure_bound(&trace.params.alpha, d, t, i);
        let margin = mu.clone() - bound.clone();
        if margin < S::zero() && first_violation.is_none() {
            first_violation = Some(i);
        }
        bounds.push(bound);
        margins.push(margin);
    }
    MeasureBoundReport { bounds, margins, first_violation }
}

/// First step `i` with `D_i` not inside `expand(D_{i-1}, beta dt)`.
pub fn check_containment<S: Scalar>(trace: &FeasTrace<S>) -> Result<Option<usize>> {
    for i in 1..trace.regions.len() {
        let dt = trace.radii[i].clone() - trace.radii[i - 1].clone();
        let grown = trace.regions[i - 1].minkowski_expand(&(trace.params.beta.clone() * dt))?;
        if !grown.contains_region(&trace.regions[i]) {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

/// Walks the trace backwards into an explicit evader `g`.
pub fn reconstruct_evader<S: Scalar>(trace: &FeasTrace<S>) -> Result<RadialPl<S>> {
    if let Some(step) = trace.emptied_at {
        return Err(Error::EmptyFeasibleSet { step });
    }
    backtrack(&trace.radii, &trace.regions, &trace.params.beta)
}

/// Parameters, trace, and evader in one call. Inputs without a positive
/// radius get the constant evader at the start point.
pub fn evade<S: Scalar>(pairs: &[ControlPair<S>], d: usize) -> Result<(FeasTrace<S>, RadialPl<S>)> {
    let params = match compute_params(pairs, d) {
        Ok(p) => p,
        Err(Error::DegenerateInput(_)) => EvaderParams {
            alpha: S::zero(),
            beta: S::zero(),
            d,
            k0: pairs.len(),
        },
        Err(e) => return Err(e),
    };
    let trace = evader_trace(pairs, d, &params)?;
    let g = reconstruct_evader(&trace)?;
    Ok((trace, g))
}

/// Piecewise-linear curve `R -> R^d`, constant outside its breakpoints.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialPl<S> {
    pub breakpoints: Vec<S>,
    pub values: Vec<Vec<S>>,
    pub lipschitz: S,
}

impl<S: Scalar> RadialPl<S> {
    pub fn constant(value: Vec<S>) -> Self {
        RadialPl { breakpoints: vec![S::zero()], values: vec![value], lipschitz: S::zero() }
    }

    pub fn dim(&self) -> usize {
        self.values[0].len()
    }

    pub fn eval_at(&self, t: &S) -> Vec<S> {
        let n = self.breakpoints.len();
        if *t <= self.breakpoints[0] {
            return self.values[0].clone();
        }
        if *t >= self.breakpoints[n - 1] {
            return self.values[n - 1].clone();
        }
        let k = self.breakpoints.partition_point(|b| b <= t) - 1;
        let (t0, t1) = (&self.breakpoints[k], &self.breakpoints[k + 1]);
        let w = (t.clone() - t0.clone()) / (t1.clone() - t0.clone());
        self.values[k]
            .iter()
            .zip(&self.values[k + 1])
            .map(|(a, b)| a.clone() + (b.clone() - a.clone()) * w.clone())
            .collect()
    }

    /// Largest per-segment, per-coordinate slope.
    pub fn max_slope(&self) -> S {
        let mut best = S::zero();
        for k in 1..self.breakpoints.len() {
            let dt = self.breakpoints[k].clone() - self.breakpoints[k - 1].clone();
            let dv = dist(&self.values[k], &self.values[k - 1]);
            best = max_of(&best, &(dv / dt));
        }
        best
    }

    /// Every pair has `|g(|x_i|) - y_i| >= 1`.
    pub fn evades_radially(&self, pairs: &[ControlPair<S>]) -> bool {
        pairs.iter().all(|p| !p.controls_value(&self.eval_at(&p.radius())))
    }

    pub fn lift(self, m: usize) -> RadialLift<S> {
        RadialLift { g: self, m }
    }
}

/// Curve on the line: evaluates at `x[0]` without taking absolute values.
impl<S: Scalar> LipschitzFn<S> for RadialPl<S> {
    fn dim_in(&self) -> usize {
        1
    }

    fn dim_out(&self) -> usize {
        self.dim()
    }

    fn lipschitz(&self) -> S {
        self.lipschitz.clone()
    }

    fn eval(&self, x: &[S]) -> Vec<S> {
        self.eval_at(&x[0])
    }
}

/// `f(x) = g(|x|)` on `R^m`; the max norm is 1-Lipschitz, so `f` keeps the
/// constant of `g`.
#[derive(Clone, Debug)]
pub struct RadialLift<S> {
    pub g: RadialPl<S>,
    pub m: usize,
}

impl<S: Scalar> LipschitzFn<S> for RadialLift<S> {
    fn dim_in(&self) -> usize {
        self.m
    }

    fn dim_out(&self) -> usize {
        self.g.dim()
    }

    fn lipschitz(&self) -> S {
        self.g.lipschitz.clone()
    }

    fn eval(&self, x: &[S]) -> Vec<S> {
        self.g.eval_at(&norm(x))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ControlVerdict<S> {
    /// The feasible set emptied after `step` sorted pairs; `index` is the
    /// label of the pair that closed it.
    Controlled { step: usize, index: usize },
    /// A `j`-Lipschitz curve with `|f(0)| <= j` missing every pair.
    Witness(RadialPl<S>),
}

impl<S> ControlVerdict<S> {
    pub fn is_controlled(&self) -> bool {
        matches!(self, ControlVerdict::Controlled { .. })
    }
}

/// Exact decision for `m = 1`: is every `j`-Lipschitz `f: R -> R^d` with
/// `|f(0)| <= j` controlled by some pair, all `x_i` lying in `[0, n]`?
pub fn feasible_control_check<S: Scalar>(
    pairs: &[ControlPair<S>],
    j: u64,
    d: usize,
    n: u64,
) -> Result<ControlVerdict<S>> {
    let n_s = int::<S>(n as i64);
    for p in pairs {
        if p.x.len() != 1 {
            return Err(Error::DimensionMismatch { expected: 1, found: p.x.len() });
        }
        if p.y.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: p.y.len() });
        }
        if p.x[0] < S::zero() || p.x[0] > n_s {
            return Err(Error::Precondition(format!(
                "pair {} has x = {} outside [0, {n}]",
                p.index, p.x[0]
            )));
        }
    }
    let mut sorted = pairs.to_vec();
    sorted.sort_by(|a, b| cmp(&a.x[0], &b.x[0]));
    let rate = int::<S>(j as i64);
    let steps: Vec<(S, &[S])> = sorted.iter().map(|p| (p.x[0].clone(), p.y.as_slice())).collect();
    let prop = propagate(Region::cube(&vec![S::zero(); d], &rate), &steps, &rate)?;
    if let Some(step) = prop.emptied_at {
        return Ok(ControlVerdict::Controlled { step, index: sorted[step - 1].index });
    }
    Ok(ControlVerdict::Witness(backtrack(&prop.radii, &prop.regions, &rate)?))
}

/// Plot-ready per-step table.
pub fn trace_to_csv<S: Scalar>(trace: &FeasTrace<S>) -> String {
    let report = check_measure_bound(trace);
    let mut out = String::from("# lipctl trace v1\n");
    let _ = writeln!(
        out,
        "# d={} alpha={} beta={} k0={}",
        trace.params.d,
        trace.params.alpha.encode(),
        trace.params.beta.encode(),
        trace.params.k0
    );
    out.push_str("i,t,boxes,measure,bound,margin\n");
    for i in 0..trace.regions.len() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            i,
            trace.radii[i].encode(),
            trace.regions[i].len(),
            trace.measures[i].encode(),
            report.bounds[i].encode(),
            report.margins[i].encode()
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use num_traits::{One, Signed};

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn pair1(i: usize, x: Rational, y: Rational) -> ControlPair<Rational> {
        ControlPair::new(i, vec![x], vec![y])
    }

    #[test]
    fn params_examples() {
        let pairs: Vec<_> = (1..=3).map(|i| pair1(i, q(i as i64, 1), q(0, 1))).collect();
        let p = compute_params(&pairs, 1).unwrap();
        assert_eq!((p.alpha, p.beta, p.k0), (q(1, 1), q(2, 1), 0));

        let pairs: Vec<_> = (1..=3).map(|i| pair1(i, q(1, 1), q(0, 1))).collect();
        let p = compute_params(&pairs, 1).unwrap();
        assert_eq!((p.alpha, p.beta), (q(3, 1), q(6, 1)));

        let p = compute_params(&[ControlPair::new(0, vec![q(2, 1)], vec![q(0, 1), q(0, 1)])], 2)
            .unwrap();
        assert_eq!((p.alpha, p.beta), (q(1, 4), q(1, 1)));

        assert!(matches!(
            compute_params(&[pair1(0, q(0, 1), q(0, 1))], 1),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn irrational_rate_is_tight_dyadic() {
        // alpha = 1/2 in d = 1 is exact; d = 2 gives 2 sqrt(1/2) = sqrt(2)
        let p = compute_params(&[ControlPair::new(0, vec![q(2, 1)], vec![q(0, 1), q(0, 1)])], 2)
            .unwrap();
        assert_eq!(p.alpha, q(1, 4));
        let pairs = vec![ControlPair::new(0, vec![q(1, 1)], vec![q(0, 1), q(0, 1)]),
                         ControlPair::new(1, vec![q(2, 1)], vec![q(0, 1), q(0, 1)])];
        let p = compute_params(&pairs, 2).unwrap();
        assert_eq!(p.alpha, q(1, 1));
        assert_eq!(p.beta, q(2, 1));
        let pairs = vec![ControlPair::new(0, vec![q(2, 1)], vec![q(0, 1), q(0, 1)]),
                         ControlPair::new(1, vec![q(2, 1)], vec![q(0, 1), q(0, 1)])];
        let p = compute_params(&pairs, 2).unwrap();
        assert_eq!(p.alpha, q(1, 2));
        let scale = Rational::from_integer(num_bigint::BigInt::one() << 40);
        assert!(p.beta.clone() * p.beta.clone() >= q(2, 1));
        let below = p.beta.clone() - scale.recip();
        assert!(below.clone() * below < q(2, 1));
        assert!((p.beta * scale.clone()).is_integer());
    }

    #[test]
    fn start_point_examples() {
        assert_eq!(start_point::<Rational>(&[], 2), vec![q(0, 1), q(0, 1)]);
        let zs = [pair1(0, q(0, 1), q(0, 1)), pair1(1, q(0, 1), q(3, 1))];
        assert_eq!(start_point(&zs, 1), vec![q(5, 1)]);
        let zs = [ControlPair::new(0, vec![q(0, 1)], vec![q(0, 1), q(0, 1)])];
        assert_eq!(start_point(&zs, 2), vec![q(2, 1), q(0, 1)]);
    }

    #[test]
    fn three_pair_trace_is_tight() {
        let pairs: Vec<_> = (1..=3).map(|i| pair1(i, q(i as i64, 1), q(0, 1))).collect();
        let params = compute_params(&pairs, 1).unwrap();
        let trace = evader_trace(&pairs, 1, &params).unwrap();
        assert_eq!(trace.measures[0], q(0, 1));
        assert_eq!(trace.measures[1], q(2, 1));
        let expected = Region::from_boxes(
            1,
            vec![
                crate::geometry::Aab::new(vec![q(-2, 1)], vec![q(-1, 1)]).unwrap(),
                crate::geometry::Aab::new(vec![q(1, 1)], vec![q(2, 1)]).unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(trace.regions[1], expected);
        let report = check_measure_bound(&trace);
        assert!(report.holds());
        assert_eq!(report.margins[0], q(0, 1));
        assert_eq!(report.margins[1], q(0, 1));
        assert_eq!(check_containment(&trace).unwrap(), None);

        let g = reconstruct_evader(&trace).unwrap();
        assert!(g.max_slope() <= params.beta);
        assert!(g.evades_radially(&pairs));
        for t in 1..=3 {
            let v = &g.eval_at(&q(t, 1))[0];
            assert!(*v >= q(1, 1) || *v <= q(-1, 1));
        }
    }

    #[test]
    fn single_pair_one_step_formula() {
        for y in [q(0, 1), q(7, 2), q(-40, 1)] {
            let pairs = vec![pair1(0, q(5, 1), y)];
            let params = compute_params(&pairs, 1).unwrap();
            let trace = evader_trace(&pairs, 1, &params).unwrap();
            let beta = params.beta.clone();
            let full = q(10, 1) * beta;
            let expected = if trace.pairs[0].y[0].clone().abs() >= full.clone() / q(2, 1) + q(1, 1) {
                full
            } else {
                full - q(2, 1)
            };
            assert_eq!(trace.measures[1], expected);
        }
    }

    #[test]
    fn empty_input_gives_constant_evader() {
        let (trace, g) = evade::<Rational>(&[], 2).unwrap();
        assert_eq!(trace.regions.len(), 1);
        assert_eq!(trace.measures[0], q(0, 1));
        assert_eq!(g.eval_at(&q(9, 1)), vec![q(0, 1), q(0, 1)]);
    }

    #[test]
    fn zero_pairs_are_avoided_by_the_start() {
        let pairs = vec![pair1(0, q(0, 1), q(3, 1)), pair1(1, q(0, 1), q(0, 1)), pair1(2, q(4, 1), q(5, 1))];
        let (trace, g) = evade(&pairs, 1).unwrap();
        assert_eq!(trace.params.k0, 2);
        assert_eq!(trace.start, vec![q(5, 1)]);
        assert!(g.evades_radially(&pairs));
    }

    #[test]
    fn slow_rate_can_empty_the_trace() {
        let ys = [q(5, 1), q(-1, 2), q(1, 1)];
        let pairs: Vec<_> = ys.iter().enumerate().map(|(i, y)| pair1(i, q(1, 1), y.clone())).collect();
        let params = compute_params(&pairs, 1).unwrap().with_beta(q(1, 1));
        let trace = evader_trace(&pairs, 1, &params).unwrap();
        assert_eq!(trace.emptied_at, Some(3));
        assert!(matches!(reconstruct_evader(&trace), Err(Error::EmptyFeasibleSet { step: 3 })));
    }

    #[test]
    fn control_check_examples() {
        // build_block(j=1, n=1, d=1) on x = (0, 1/2, 1)
        let pairs = vec![
            pair1(0, q(0, 1), q(1, 3)),
            pair1(1, q(1, 2), q(-1, 2)),
            pair1(2, q(1, 1), q(-4, 3)),
        ];
        assert!(feasible_control_check(&pairs, 1, 1, 1).unwrap().is_controlled());
        for skip in 0..3 {
            let fewer: Vec<_> =
                pairs.iter().enumerate().filter(|(k, _)| *k != skip).map(|(_, p)| p.clone()).collect();
            match feasible_control_check(&fewer, 1, 1, 1).unwrap() {
                ControlVerdict::Witness(w) => {
                    assert!(w.max_slope() <= q(1, 1));
                    assert!(norm(&w.eval_at(&q(0, 1))) <= q(1, 1));
                    assert!(fewer.iter().all(|p| !p.controls_value(&w.eval(&p.x))));
                }
                v => panic!("expected a witness, got {v:?}"),
            }
        }
        match feasible_control_check::<Rational>(&[], 1, 1, 1).unwrap() {
            ControlVerdict::Witness(w) => assert_eq!(w.eval_at(&q(1, 2)), vec![q(0, 1)]),
            v => panic!("{v:?}"),
        }
        assert!(feasible_control_check(&[pair1(0, q(2, 1), q(0, 1))], 1, 1, 1).is_err());
    }

    #[test]
    fn trace_csv_has_header_and_rows() {
        let pairs: Vec<_> = (1..=3).map(|i| pair1(i, q(i as i64, 1), q(0, 1))).collect();
        let (trace, _) = evade(&pairs, 1).unwrap();
        let csv = trace_to_csv(&trace);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "# lipctl trace v1");
        assert_eq!(lines[2], "i,t,boxes,measure,bound,margin");
        assert_eq!(lines[4], "1,1/1,2,2/1,2/1,0/1");
        assert_eq!(lines.len(), 3 + 4);
    }

    #[test]
    fn lift_keeps_the_constant() {
        let pairs: Vec<_> = (1..=3).map(|i| pair1(i, q(i as i64, 1), q(0, 1))).collect();
        let (_, g) = evade(&pairs, 1).unwrap();
        let f = g.clone().lift(2);
        assert_eq!(f.eval(&[q(-2, 1), q(1, 1)]), g.eval_at(&q(2, 1)));
        assert_eq!(f.lipschitz(), q(2, 1));
    }
}
