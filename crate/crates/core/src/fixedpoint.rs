//! Approximate boundary crossings of a moving map.
//!
//! Given `f: D x [t0, t1] -> R^d` that starts inside the cube `B` of radius
//! `l` and ends outside it, and a section `g: B -> D`, a point `(z, t)` with
//! `|f(z, t)| = l` and `g(f(z, t)) = z` is a fixed point of the retracted
//! map `(y, t) -> c(f(g(y), t), t - |f(g(y), t)| + l)`. The search minimises
//! the displacement of that map and certifies only approximate crossings.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::{max_of, min_of, norm, Scalar};

/// Coordinate-wise retraction of `R^d x R` onto `B x [t0, t1]`.
pub fn retract<S: Scalar>(y: &[S], t: &S, l: &S, t0: &S, t1: &S) -> (Vec<S>, S) {
    let size = norm(y);
    let y = if size > *l {
        let scale = l.clone() / size;
        y.iter().map(|v| v.clone() * scale.clone()).collect()
    } else {
        y.to_vec()
    };
    (y, min_of(t1, &max_of(t0, t)))
}

/// `f(z, t)` for `z` in the cube of radius `domain_radius` in `R^(m-1)`.
pub trait MovingMap: Sync {
    /// Dimension of `z`, possibly zero.
    fn z_dim(&self) -> usize;

    fn eval(&self, z: &[f64], t: f64) -> Vec<f64>;

    /// The section `g: B -> D`.
    fn section(&self, y: &[f64]) -> Vec<f64>;
}

/// `(t0 / 2l) (y_a - y_m)` for `a < m`, in floating point.
#[derive(Clone, Copy, Debug)]
pub struct LinearSection {
    pub m: usize,
    pub t0: f64,
    pub l: f64,
}

impl LinearSection {
    pub fn apply(&self, y: &[f64]) -> Vec<f64> {
        let ym = y[self.m - 1];
        y[..self.m - 1].iter().map(|ya| self.t0 / (2.0 * self.l) * (ya - ym)).collect()
    }
}

/// Moving map from closures.
pub struct FnMap<F, G> {
    pub z_dim: usize,
    pub f: F,
    pub g: G,
}

impl<F, G> MovingMap for FnMap<F, G>
where
    F: Fn(&[f64], f64) -> Vec<f64> + Sync,
    G: Fn(&[f64]) -> Vec<f64> + Sync,
{
    fn z_dim(&self) -> usize {
        self.z_dim
    }

    fn eval(&self, z: &[f64], t: f64) -> Vec<f64> {
        (self.f)(z, t)
    }

    fn section(&self, y: &[f64]) -> Vec<f64> {
        (self.g)(y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CrossingProblem {
    pub l: f64,
    pub t0: f64,
    pub t1: f64,
    pub domain_radius: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchOptions {
    pub grid_step: f64,
    pub tol: f64,
    /// Step halvings during refinement.
    pub max_levels: u32,
    /// Grid candidates refined.
    pub starts: usize,
}

impl SearchOptions {
    pub fn for_problem(p: &CrossingProblem) -> Self {
        SearchOptions { grid_step: (p.t1 - p.t0) / 64.0, tol: 1e-6 * p.l, max_levels: 12, starts: 8 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Crossing {
    pub z: Vec<f64>,
    pub t: f64,
    /// `f(z, t)`.
    pub y: Vec<f64>,
    /// `| |f(z,t)| - l |`.
    pub radial_residual: f64,
    /// `|g(f(z,t)) - z|`.
    pub section_residual: f64,
}

impl Crossing {
    pub fn within(&self, tol: f64) -> bool {
        self.radial_residual <= tol && self.section_residual <= tol
    }
}

fn sup_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Retracted map from the lemma, at `(y, t)`.
pub fn retracted_step<M: MovingMap + ?Sized>(map: &M, p: &CrossingProblem, y: &[f64], t: f64) -> (Vec<f64>, f64) {
    let image = map.eval(&map.section(y), t);
    let t_next = t - norm(&image) + p.l;
    retract(&image, &t_next, &p.l, &p.t0, &p.t1)
}

/// `|h(y, t) - (y, t)|` at the point `(c(f(z, t)), t)`.
fn displacement<M: MovingMap + ?Sized>(map: &M, p: &CrossingProblem, z: &[f64], t: f64) -> f64 {
    let (y, _) = retract(&map.eval(z, t), &t, &p.l, &p.t0, &p.t1);
    let (y2, t2) = retracted_step(map, p, &y, t);
    sup_dist(&y2, &y).max((t2 - t).abs())
}

fn evaluate<M: MovingMap + ?Sized>(map: &M, p: &CrossingProblem, z: Vec<f64>, t: f64) -> Crossing {
    let y = map.eval(&z, t);
    let radial_residual = (norm(&y) - p.l).abs();
    let section_residual = sup_dist(&map.section(&y), &z);
    Crossing { z, t, y, radial_residual, section_residual }
}

/// Displacement together with both crossing residuals; all three vanish
/// exactly at crossings with `t0 < t < t1`.
fn defect<M: MovingMap + ?Sized>(map: &M, p: &CrossingProblem, z: &[f64], t: f64) -> f64 {
    let c = evaluate(map, p, z.to_vec(), t);
    displacement(map, p, z, t).max(c.radial_residual).max(c.section_residual)
}

fn axis(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).ceil().max(1.0) as usize;
    (0..=n).map(|k| (lo + k as f64 * step).min(hi)).collect()
}

fn grid_points(dim: usize, values: &[f64]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = vec![Vec::new()];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|pre| {
                values.iter().map(move |v| {
                    let mut p = pre.clone();
                    p.push(*v);
                    p
                })
            })
            .collect();
    }
    out
}

/// Checks `|f(z, t0)| < l < |f(z, t1)|` on the `z` grid.
pub fn check_hypotheses<M: MovingMap + ?Sized>(map: &M, p: &CrossingProblem, grid_step: f64) -> Result<()> {
    if !(p.l > 0.0 && p.t1 > p.t0 && p.domain_radius >= 0.0) {
        return Err(Error::Precondition("need l > 0, t1 > t0 and a nonnegative domain radius".into()));
    }
    let zs = grid_points(map.z_dim(), &axis(-p.domain_radius, p.domain_radius, grid_step));
    zs.par_iter().try_for_each(|z| {
        let start = norm(&map.eval(z, p.t0));
        if start >= p.l {
            return Err(Error::Hypothesis(format!("|f(z, t0)| = {start} is not below l at z = {z:?}")));
        }
        let end = norm(&map.eval(z, p.t1));
        if end <= p.l {
            return Err(Error::Hypothesis(format!("|f(z, t1)| = {end} is not above l at z = {z:?}")));
        }
        Ok(())
    })
}

/// First `t` on the scan where `|f(z, t)| - l` turns nonnegative, polished by
/// bisection.
fn radial_root<M: MovingMap + ?Sized>(map: &M, p: &CrossingProblem, z: &[f64], ts: &[f64]) -> Option<f64> {
    let gap = |t: f64| norm(&map.eval(z, t)) - p.l;
    let mut prev = *ts.first()?;
    if gap(prev) >= 0.0 {
        return Some(prev);
    }
    for &t in &ts[1..] {
        if gap(t) >= 0.0 {
            let (mut lo, mut hi) = (prev, t);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if gap(mid) >= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Some(hi);
        }
        prev = t;
    }
    None
}

/// Window search over `z` alone with `t` slaved to the radial root, so only
/// the section residual is minimised.
fn follow_root<M: MovingMap + ?Sized>(
    map: &M,
    p: &CrossingProblem,
    ts: &[f64],
    z0: &[f64],
    opts: &SearchOptions,
) -> Option<Crossing> {
    let score = |z: &[f64]| -> Option<Crossing> {
        let t = radial_root(map, p, z, ts)?;
        Some(evaluate(map, p, z.to_vec(), t))
    };
    let offsets: Vec<f64> = (-WINDOW..=WINDOW).map(f64::from).collect();
    let moves = grid_points(z0.len(), &offsets);
    let mut best = score(z0)?;
    let mut step = opts.grid_step;
    for _ in 0..=opts.max_levels + 8 {
        for _ in 0..64 {
            let centre = best.z.clone();
            for mv in &moves {
                let cand: Vec<f64> = centre
                    .iter()
                    .zip(mv)
                    .map(|(a, b)| (a + b * step).clamp(-p.domain_radius, p.domain_radius))
                    .collect();
                if let Some(c) = score(&cand) {
                    if c.section_residual < best.section_residual {
                        best = c;
                    }
                }
            }
            if best.z == centre {
                break;
            }
        }
        if best.within(opts.tol / 4.0) {
            break;
        }
        step /= 2.0;
    }
    Some(best)
}

/// Half-width, in steps, of the local window scanned at each refinement
/// level.
const WINDOW: i32 = 4;

/// Grid scan over `D x [t0, t1]`, then local window scans with step halving
/// from the best few grid points; a second pass slaves `t` to the first
/// radial root and searches `z` alone.
pub fn find_crossing<M: MovingMap + ?Sized>(map: &M, p: &CrossingProblem, opts: &SearchOptions) -> Result<Crossing> {
    check_hypotheses(map, p, opts.grid_step)?;
    let k = map.z_dim();
    let zs = grid_points(k, &axis(-p.domain_radius, p.domain_radius, opts.grid_step));
    let ts = axis(p.t0, p.t1, opts.grid_step);
    let mut scored: Vec<(f64, Vec<f64>)> = zs
        .par_iter()
        .flat_map_iter(|z| {
            ts.iter().map(move |&t| {
                let mut x = z.clone();
                x.push(t);
                (defect(map, p, z, t), x)
            })
        })
        .collect();
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));

    let clamp = |x: &mut Vec<f64>| {
        for v in x[..k].iter_mut() {
            *v = v.clamp(-p.domain_radius, p.domain_radius);
        }
        x[k] = x[k].clamp(p.t0, p.t1);
    };
    let score = |x: &[f64]| defect(map, p, &x[..k], x[k]);
    let offsets: Vec<f64> = (-WINDOW..=WINDOW).map(f64::from).collect();
    let moves = grid_points(k + 1, &offsets);

    let refined: Vec<Crossing> = scored
        .iter()
        .take(opts.starts.max(1))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(s, x)| {
            let (mut best, mut x) = (*s, x.clone());
            let mut step = opts.grid_step;
            for _ in 0..=opts.max_levels {
                for _ in 0..64 {
                    let centre = x.clone();
                    for mv in &moves {
                        let mut cand: Vec<f64> = centre.iter().zip(mv).map(|(a, b)| a + b * step).collect();
                        clamp(&mut cand);
                        let c = score(&cand);
                        if c < best {
                            best = c;
                            x = cand;
                        }
                    }
                    if x == centre {
                        break;
                    }
                }
                if best <= opts.tol / 4.0 {
                    break;
                }
                step /= 2.0;
            }
            let (y, _) = retract(&map.eval(&x[..k], x[k]), &x[k], &p.l, &p.t0, &p.t1);
            evaluate(map, p, map.section(&y), x[k])
        })
        .collect();

    let mut ranked: Vec<(f64, Vec<f64>, f64)> = zs
        .par_iter()
        .filter_map(|z| radial_root(map, p, z, &ts).map(|t| (evaluate(map, p, z.clone(), t).section_residual, z.clone(), t)))
        .collect();
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0));
    let along: Vec<Crossing> = ranked
        .iter()
        .take(opts.starts.max(1))
        .collect::<Vec<_>>()
        .into_par_iter()
        .filter_map(|(_, z, _)| follow_root(map, p, &ts, z, opts))
        .collect();

    let worst = |c: &Crossing| c.radial_residual.max(c.section_residual);
    let best = refined
        .into_iter()
        .chain(along)
        .min_by(|a, b| worst(a).total_cmp(&worst(b)))
        .expect("at least one start");
    if best.within(opts.tol) {
        Ok(best)
    } else {
        Err(Error::CrossingNotFound { best: worst(&best) })
    }
}
