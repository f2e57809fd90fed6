//! Lipschitz test subjects, the lattice counterexample, and game runs.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::feasibility::ControlPair;
use crate::fixedpoint::{LinearSection, MovingMap};
use crate::scalar::{cmp, dist, int, max_of, min_of, Scalar};

/// A Lipschitz map `R^m -> R^d` in the max norm.
pub trait LipschitzFn<S: Scalar>: Send + Sync {
    fn dim_in(&self) -> usize;

    fn dim_out(&self) -> usize;

    /// Declared Lipschitz constant.
    fn lipschitz(&self) -> S;

    fn eval(&self, x: &[S]) -> Vec<S>;
}

impl<S: Scalar, F: LipschitzFn<S> + ?Sized> LipschitzFn<S> for Box<F> {
    fn dim_in(&self) -> usize {
        (**self).dim_in()
    }

    fn dim_out(&self) -> usize {
        (**self).dim_out()
    }

    fn lipschitz(&self) -> S {
        (**self).lipschitz()
    }

    fn eval(&self, x: &[S]) -> Vec<S> {
        (**self).eval(x)
    }
}

/// Regular lattice `lo + h k`, `0 <= k_a < shape[a]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec<S> {
    pub lo: Vec<S>,
    pub h: S,
    pub shape: Vec<usize>,
}

impl<S: Scalar> GridSpec<S> {
    /// Nodes covering `[-radius, radius]^m`; the far side may overhang.
    pub fn cube(m: usize, radius: &S, h: &S) -> Result<Self> {
        Self::boxed(&vec![-radius.clone(); m], &vec![radius.clone(); m], h)
    }

    pub fn boxed(lo: &[S], hi: &[S], h: &S) -> Result<Self> {
        if *h <= S::zero() {
            return Err(Error::Precondition("grid step must be positive".into()));
        }
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::DimensionMismatch { expected: lo.len(), found: hi.len() });
        }
        let shape = lo
            .iter()
            .zip(hi)
            .map(|(a, b)| {
                let cells = ((b.clone() - a.clone()) / h.clone()).ceil();
                cells.to_i64().filter(|&c| c >= 0).map(|c| c as usize + 1).ok_or_else(|| {
                    Error::Precondition("grid bounds inverted or too large".into())
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(GridSpec { lo: lo.to_vec(), h: h.clone(), shape })
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn node_count(&self) -> usize {
        self.shape.iter().product()
    }

    fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.dim()];
        for a in (0..self.dim().saturating_sub(1)).rev() {
            s[a] = s[a + 1] * self.shape[a + 1];
        }
        s
    }

    pub fn node(&self, multi: &[usize]) -> Vec<S> {
        multi.iter().zip(&self.lo).map(|(&k, lo)| lo.clone() + self.h.clone() * int::<S>(k as i64)).collect()
    }

    /// Multi-indices in lexicographic order.
    pub fn indices(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = vec![Vec::new()];
        for &n in &self.shape {
            out = out
                .into_iter()
                .flat_map(|pre| {
                    (0..n).map(move |k| {
                        let mut p = pre.clone();
                        p.push(k);
                        p
                    })
                })
                .collect();
        }
        out
    }
}

/// Multilinear interpolation of node values, constant beyond the grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledLipschitz<S> {
    pub grid: GridSpec<S>,
    pub d: usize,
    /// Declared constant.
    pub j: S,
    /// Node values, lexicographic.
    pub values: Vec<Vec<S>>,
}

impl<S: Scalar> SampledLipschitz<S> {
    pub fn new(grid: GridSpec<S>, d: usize, j: S, values: Vec<Vec<S>>) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(Error::DimensionMismatch { expected: grid.node_count(), found: values.len() });
        }
        if let Some(v) = values.iter().find(|v| v.len() != d) {
            return Err(Error::DimensionMismatch { expected: d, found: v.len() });
        }
        Ok(SampledLipschitz { grid, d, j, values })
    }

    pub fn m(&self) -> usize {
        self.grid.dim()
    }

    pub fn eval_at(&self, x: &[S]) -> Vec<S> {
        let g = &self.grid;
        let strides = g.strides();
        let mut base = 0usize;
        let mut cell_axes = Vec::new();
        let mut weights = Vec::new();
        for a in 0..g.dim() {
            let n = g.shape[a];
            let top = g.h.clone() * int::<S>(n as i64 - 1);
            let u = min_of(&max_of(&(x[a].clone() - g.lo[a].clone()), &S::zero()), &top) / g.h.clone();
            if n == 1 {
                continue;
            }
            let k = (u.floor().to_i64().unwrap_or(0).max(0) as usize).min(n - 2);
            base += k * strides[a];
            cell_axes.push(a);
            weights.push(u - int::<S>(k as i64));
        }
        let mut out = vec![S::zero(); self.d];
        for corner in 0..(1usize << cell_axes.len()) {
            let mut w = S::one();
            let mut idx = base;
            for (bit, (&a, t)) in cell_axes.iter().zip(&weights).enumerate() {
                if corner >> bit & 1 == 1 {
                    w = w * t.clone();
                    idx += strides[a];
                } else {
                    w = w * (S::one() - t.clone());
                }
            }
            if w.is_zero() {
                continue;
            }
            for (o, v) in out.iter_mut().zip(&self.values[idx]) {
                *o = o.clone() + w.clone() * v.clone();
            }
        }
        out
    }

    /// Largest `|v(p + h e_a) - v(p)| / h` over grid edges and coordinates.
    pub fn max_edge_slope(&self) -> S {
        let g = &self.grid;
        let strides = g.strides();
        let mut best = S::zero();
        for (i, multi) in g.indices().iter().enumerate() {
            for a in 0..g.dim() {
                if multi[a] + 1 < g.shape[a] {
                    let diff = dist(&self.values[i], &self.values[i + strides[a]]) / g.h.clone();
                    best = max_of(&best, &diff);
                }
            }
        }
        best
    }

    /// Exact max-norm Lipschitz constant of the interpolant: the largest
    /// `sum_a |edge difference along a| / h` over cell corners and outputs.
    pub fn max_norm_lipschitz(&self) -> S {
        let g = &self.grid;
        let strides = g.strides();
        let axes: Vec<usize> = (0..g.dim()).filter(|&a| g.shape[a] > 1).collect();
        let mut best = S::zero();
        for (i, multi) in g.indices().iter().enumerate() {
            // corner i of every cell it touches, edge to the neighbour inside
            for dirs in 0..(1usize << axes.len()) {
                let mut inside = true;
                let mut sums = vec![S::zero(); self.d];
                for (bit, &a) in axes.iter().enumerate() {
                    let up = dirs >> bit & 1 == 1;
                    let other = if up {
                        if multi[a] + 1 >= g.shape[a] {
                            inside = false;
                            break;
                        }
                        i + strides[a]
                    } else {
                        if multi[a] == 0 {
                            inside = false;
                            break;
                        }
                        i - strides[a]
                    };
                    for (s, (v, w)) in sums.iter_mut().zip(self.values[i].iter().zip(&self.values[other])) {
                        *s = s.clone() + (v.clone() - w.clone()).abs();
                    }
                }
                if inside {
                    for s in sums {
                        best = max_of(&best, &(s / g.h.clone()));
                    }
                }
            }
        }
        best
    }

    /// Multiplies every value by `factor`, and the declared constant by its
    /// absolute value.
    pub fn scaled(mut self, factor: &S) -> Self {
        for v in &mut self.values {
            for c in v.iter_mut() {
                *c = c.clone() * factor.clone();
            }
        }
        self.j = self.j * factor.abs();
        self
    }

    pub fn sup_value(&self) -> S {
        self.values.iter().flatten().fold(S::zero(), |acc, v| max_of(&acc, &v.abs()))
    }

    pub fn to_f64(&self) -> SampledLipschitz<f64> {
        let conv = |v: &[S]| v.iter().map(Scalar::to_f64).collect::<Vec<f64>>();
        SampledLipschitz {
            grid: GridSpec { lo: conv(&self.grid.lo), h: self.grid.h.to_f64(), shape: self.grid.shape.clone() },
            d: self.d,
            j: self.j.to_f64(),
            values: self.values.iter().map(|v| conv(v)).collect(),
        }
    }
}

impl<S: Scalar> LipschitzFn<S> for SampledLipschitz<S> {
    fn dim_in(&self) -> usize {
        self.m()
    }

    fn dim_out(&self) -> usize {
        self.d
    }

    fn lipschitz(&self) -> S {
        self.j.clone()
    }

    fn eval(&self, x: &[S]) -> Vec<S> {
        self.eval_at(x)
    }
}

/// Resolution of the value lattice: node differences are multiples of
/// `edge_bound / VALUE_STEPS`.
const VALUE_STEPS: i64 = 16;

/// Random `j`-Lipschitz interpolant on `grid` with `|f(0)| <= j`.
///
/// Nodes are visited in lexicographic order; each coordinate is drawn
/// uniformly from the values within `j h / m` of every visited axis
/// neighbour, so the interpolant is `j`-Lipschitz in the max norm. The whole
/// table is then shifted so that `f(0)` is uniform in the cube of radius `j`.
pub fn sample_lipschitz<S: Scalar>(grid: &GridSpec<S>, d: usize, j: &S, seed: u64) -> Result<SampledLipschitz<S>> {
    if *j < S::zero() {
        return Err(Error::Precondition("Lipschitz bound must be nonnegative".into()));
    }
    let m = grid.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let strides = grid.strides();
    let edge = j.clone() * grid.h.clone() / int::<S>(m as i64);
    let unit = edge / int::<S>(VALUE_STEPS);
    let mut ticks: Vec<Vec<i64>> = Vec::with_capacity(grid.node_count());
    for (i, multi) in grid.indices().iter().enumerate() {
        let mut node = Vec::with_capacity(d);
        for k in 0..d {
            let (mut lo, mut hi) = (i64::MIN, i64::MAX);
            for a in 0..m {
                if multi[a] > 0 {
                    let v = ticks[i - strides[a]][k];
                    lo = lo.max(v - VALUE_STEPS);
                    hi = hi.min(v + VALUE_STEPS);
                }
            }
            node.push(if lo == i64::MIN { 0 } else { rng.gen_range(lo..=hi) });
        }
        ticks.push(node);
    }
    let to_values = |ticks: &[Vec<i64>], shift: &[S]| -> Vec<Vec<S>> {
        ticks
            .iter()
            .map(|t| t.iter().zip(shift).map(|(&k, s)| unit.clone() * int::<S>(k) + s.clone()).collect())
            .collect()
    };
    let raw = SampledLipschitz::new(grid.clone(), d, j.clone(), to_values(&ticks, &vec![S::zero(); d]))?;
    let at_origin = raw.eval_at(&vec![S::zero(); m]);
    let span = if unit.is_zero() { 0 } else { (j.clone() / unit.clone()).floor().to_i64().unwrap_or(0) };
    let shift: Vec<S> = at_origin
        .iter()
        .map(|o| unit.clone() * int::<S>(rng.gen_range(-span..=span)) - o.clone())
        .collect();
    SampledLipschitz::new(grid.clone(), d, j.clone(), to_values(&ticks, &shift))
}

/// Value forced at a lattice point: `+1` when `y <= 0`, else `-1`.
pub fn lattice_sign<S: Scalar>(y: &S) -> S {
    if *y <= S::zero() {
        S::one()
    } else {
        -S::one()
    }
}

fn lattice_table<S: Scalar>(pairs: &[ControlPair<S>]) -> Result<Vec<(Vec<i64>, S)>> {
    let mut table: Vec<(Vec<i64>, S)> = Vec::with_capacity(pairs.len());
    for p in pairs {
        if p.y.len() != 1 {
            return Err(Error::DimensionMismatch { expected: 1, found: p.y.len() });
        }
        let key = p
            .x
            .iter()
            .map(|c| c.to_i64())
            .collect::<Option<Vec<i64>>>()
            .ok_or_else(|| Error::Precondition(format!("pair {} is not at a lattice point", p.index)))?;
        if table.iter().any(|(k, _)| *k == key) {
            return Err(Error::Precondition(format!("two pairs share the lattice point {key:?}")));
        }
        table.push((key, lattice_sign(&p.y[0])));
    }
    table.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(table)
}

/// Half-integer grid interpolant of the lattice signs over the window of the
/// pairs plus one. Edge slopes are at most 2; as a multilinear interpolant
/// its max-norm constant is `2m`, which is what it declares.
pub fn lattice_counterexample<S: Scalar>(pairs: &[ControlPair<S>]) -> Result<SampledLipschitz<S>> {
    let table = lattice_table(pairs)?;
    let m = pairs.first().map_or(1, |p| p.x.len());
    let mut lo = vec![-1i64; m];
    let mut hi = vec![1i64; m];
    for (k, _) in &table {
        for a in 0..m {
            lo[a] = lo[a].min(k[a] - 1);
            hi[a] = hi[a].max(k[a] + 1);
        }
    }
    let to_s = |v: &[i64]| v.iter().map(|&c| int::<S>(c)).collect::<Vec<S>>();
    let grid = GridSpec::boxed(&to_s(&lo), &to_s(&hi), &S::from_ratio(1, 2))?;
    let values = grid
        .indices()
        .iter()
        .map(|multi| {
            if multi.iter().any(|k| k % 2 == 1) {
                return vec![S::zero()];
            }
            let key: Vec<i64> = multi.iter().zip(&lo).map(|(&k, l)| l + k as i64 / 2).collect();
            let v = table.binary_search_by(|(k, _)| k.cmp(&key)).map_or(S::zero(), |i| table[i].1.clone());
            vec![v]
        })
        .collect();
    SampledLipschitz::new(grid, 1, int(2 * m as i64), values)
}

/// `f(x) = s(round(x)) max(0, 1 - 2 |x - round(x)|)` with the lattice signs
/// `s`, zero at lattice points without a pair. Exactly 2-Lipschitz.
#[derive(Clone, Debug)]
pub struct LatticeBump<S> {
    m: usize,
    table: Vec<(Vec<i64>, S)>,
}

impl<S: Scalar> LatticeBump<S> {
    pub fn new(pairs: &[ControlPair<S>]) -> Result<Self> {
        let m = pairs.first().map_or(1, |p| p.x.len());
        Ok(LatticeBump { m, table: lattice_table(pairs)? })
    }

    /// Every lattice value lies in `{-1, 0, 1}`, which bounds the constant
    /// by 2.
    pub fn signs_are_unit(&self) -> bool {
        self.table.iter().all(|(_, s)| s.abs() == S::one())
    }
}

impl<S: Scalar> LipschitzFn<S> for LatticeBump<S> {
    fn dim_in(&self) -> usize {
        self.m
    }

    fn dim_out(&self) -> usize {
        1
    }

    fn lipschitz(&self) -> S {
        int(2)
    }

    fn eval(&self, x: &[S]) -> Vec<S> {
        let half = S::from_ratio(1, 2);
        let nearest: Vec<S> = x.iter().map(|c| (c.clone() + half.clone()).floor()).collect();
        let key: Vec<i64> = nearest.iter().map(|c| c.to_i64().unwrap_or(i64::MAX)).collect();
        let sign = self
            .table
            .binary_search_by(|(k, _)| k.cmp(&key))
            .map_or(S::zero(), |i| self.table[i].1.clone());
        let tent = max_of(&S::zero(), &(S::one() - int::<S>(2) * dist(x, &nearest)));
        vec![sign * tent]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome<S> {
    pub controlled: bool,
    /// Label of the pair attaining the margin.
    pub closest: Option<usize>,
    /// `min_i |f(x_i) - y_i|`; `None` stands for infinity.
    pub margin: Option<S>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GameReport<S> {
    pub outcomes: Vec<Outcome<S>>,
}

impl<S: Scalar> GameReport<S> {
    pub fn controlled_fraction(&self) -> f64 {
        if self.outcomes.is_empty() {
            return 1.0;
        }
        self.outcomes.iter().filter(|o| o.controlled).count() as f64 / self.outcomes.len() as f64
    }

    pub fn all_controlled(&self) -> bool {
        self.outcomes.iter().all(|o| o.controlled)
    }

    /// Largest margin over functions; `Some(None)` means some function has
    /// infinite margin.
    pub fn worst_margin(&self) -> Option<Option<S>> {
        let mut worst: Option<Option<S>> = None;
        for o in &self.outcomes {
            worst = Some(match (worst, &o.margin) {
                (_, None) | (Some(None), _) => None,
                (None, Some(m)) => Some(m.clone()),
                (Some(Some(w)), Some(m)) => Some(max_of(&w, m)),
            });
        }
        worst
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("# lipctl game v1\n");
        let _ = writeln!(out, "# functions={} controlled_fraction={}", self.outcomes.len(), self.controlled_fraction());
        out.push_str("function,controlled,closest,margin\n");
        for (k, o) in self.outcomes.iter().enumerate() {
            let closest = o.closest.map_or(String::from("-"), |c| c.to_string());
            let margin = o.margin.as_ref().map_or(String::from("inf"), Scalar::encode);
            let _ = writeln!(out, "{k},{},{closest},{margin}", u8::from(o.controlled));
        }
        out
    }
}

pub fn outcome<S: Scalar, F: LipschitzFn<S> + ?Sized>(pairs: &[ControlPair<S>], f: &F) -> Outcome<S> {
    let mut best: Option<(S, usize)> = None;
    for p in pairs {
        let gap = dist(&f.eval(&p.x), &p.y);
        if best.as_ref().is_none_or(|(b, _)| cmp(&gap, b).is_lt()) {
            best = Some((gap, p.index));
        }
    }
    match best {
        Some((margin, index)) => Outcome { controlled: margin < S::one(), closest: Some(index), margin: Some(margin) },
        None => Outcome { controlled: false, closest: None, margin: None },
    }
}

/// Exact margins of every function against every pair.
pub fn game_run<S: Scalar, F: LipschitzFn<S>>(pairs: &[ControlPair<S>], functions: &[F]) -> Result<GameReport<S>> {
    for f in functions {
        if let Some(p) = pairs.iter().find(|p| p.x.len() != f.dim_in() || p.y.len() != f.dim_out()) {
            return Err(Error::DimensionMismatch { expected: f.dim_in(), found: p.x.len() });
        }
    }
    let outcomes = functions.par_iter().map(|f| outcome(pairs, f)).collect();
    Ok(GameReport { outcomes })
}

/// `f(z, t) = base(z, t) + ((t - t0)/(t1 - t0)) 2l (1, ..., 1)` with the
/// linear section; leaves the cube of radius `l` when `|base| < l`.
pub struct DriftMap<F> {
    pub base: F,
    pub section: LinearSection,
    pub t0: f64,
    pub t1: f64,
    pub drift: bool,
}

impl<F: LipschitzFn<f64>> MovingMap for DriftMap<F> {
    fn z_dim(&self) -> usize {
        self.base.dim_in() - 1
    }

    fn eval(&self, z: &[f64], t: f64) -> Vec<f64> {
        let mut x = z.to_vec();
        x.push(t);
        let mut y = self.base.eval(&x);
        if self.drift {
            let push = (t - self.t0) / (self.t1 - self.t0) * 2.0 * self.section.l;
            for v in &mut y {
                *v += push;
            }
        }
        y
    }

    fn section(&self, y: &[f64]) -> Vec<f64> {
        self.section.apply(y)
    }
}

pub fn write_gridfn<S: Scalar>(f: &SampledLipschitz<S>) -> String {
    let g = &f.grid;
    let join = |v: &[S]| v.iter().map(Scalar::encode).collect::<Vec<_>>().join(" ");
    let mut out = String::from("# lipctl gridfn v1\n");
    let _ = writeln!(out, "m {} d {} lipschitz {}", g.dim(), f.d, f.j.encode());
    let _ = writeln!(out, "h {}", g.h.encode());
    let _ = writeln!(out, "lo {}", join(&g.lo));
    let shape: Vec<String> = g.shape.iter().map(usize::to_string).collect();
    let _ = writeln!(out, "shape {}", shape.join(" "));
    for v in &f.values {
        out.push_str(&join(v));
        out.push('\n');
    }
    out
}

pub fn parse_gridfn<S: Scalar>(text: &str) -> Result<SampledLipschitz<S>> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(n, l)| (n + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let mut field = |name: &str| -> Result<(usize, Vec<String>)> {
        let (n, line) = lines.next().ok_or_else(|| Error::parse(0, format!("missing `{name}` line")))?;
        let toks: Vec<String> = line.split_whitespace().map(String::from).collect();
        if toks.first().map(String::as_str) != Some(name) {
            return Err(Error::parse(n, format!("expected `{name}`")));
        }
        Ok((n, toks))
    };
    let num = |n: usize, t: &str| S::decode(t).ok_or_else(|| Error::parse(n, format!("bad number {t:?}")));
    let (n, head) = field("m")?;
    if head.len() != 6 || head[2] != "d" || head[4] != "lipschitz" {
        return Err(Error::parse(n, "expected `m <m> d <d> lipschitz <j>`"));
    }
    let m: usize = head[1].parse().map_err(|_| Error::parse(n, "bad m"))?;
    let d: usize = head[3].parse().map_err(|_| Error::parse(n, "bad d"))?;
    let j = num(n, &head[5])?;
    let (n, h) = field("h")?;
    let h = num(n, h.get(1).ok_or_else(|| Error::parse(n, "missing step"))?)?;
    let (n, lo) = field("lo")?;
    let lo = lo[1..].iter().map(|t| num(n, t)).collect::<Result<Vec<S>>>()?;
    let (n, shape) = field("shape")?;
    let shape = shape[1..]
        .iter()
        .map(|t| t.parse::<usize>().map_err(|_| Error::parse(n, "bad shape")))
        .collect::<Result<Vec<usize>>>()?;
    if lo.len() != m || shape.len() != m {
        return Err(Error::parse(n, "lo and shape must have m entries"));
    }
    let values = lines
        .map(|(n, l)| l.split_whitespace().map(|t| num(n, t)).collect::<Result<Vec<S>>>())
        .collect::<Result<Vec<_>>>()?;
    SampledLipschitz::new(GridSpec { lo, h, shape }, d, j, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use num_traits::Signed;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn interpolation_reproduces_nodes_and_is_affine_on_edges() {
        let grid = GridSpec::cube(2, &q(1, 1), &q(1, 1)).unwrap();
        let values: Vec<Vec<Rational>> = grid.indices().iter().map(|k| vec![q(k[0] as i64 * 3 + k[1] as i64, 1)]).collect();
        let f = SampledLipschitz::new(grid.clone(), 1, q(3, 1), values).unwrap();
        for k in grid.indices() {
            assert_eq!(f.eval_at(&grid.node(&k)), vec![q(k[0] as i64 * 3 + k[1] as i64, 1)]);
        }
        // affine data is reproduced everywhere, clamped outside
        assert_eq!(f.eval_at(&[q(-1, 2), q(1, 4)]), vec![q(3, 2) + q(5, 4)]);
        assert_eq!(f.eval_at(&[q(9, 1), q(-9, 1)]), vec![q(6, 1)]);
        assert_eq!(f.max_edge_slope(), q(3, 1));
        assert_eq!(f.max_norm_lipschitz(), q(4, 1));
    }

    #[test]
    fn zero_bound_gives_constant() {
        let grid = GridSpec::cube(2, &q(2, 1), &q(1, 2)).unwrap();
        let f = sample_lipschitz(&grid, 3, &q(0, 1), 5).unwrap();
        assert!(f.values.iter().all(|v| *v == vec![q(0, 1); 3]));
    }

    #[test]
    fn samples_are_j_lipschitz_and_anchored() {
        for (m, seed) in [(1usize, 1u64), (2, 2), (3, 3)] {
            let grid = GridSpec::cube(m, &q(2, 1), &q(1, 2)).unwrap();
            let f = sample_lipschitz(&grid, 2, &q(1, 1), seed).unwrap();
            assert!(f.max_norm_lipschitz() <= q(1, 1));
            assert!(f.max_edge_slope() <= q(1, m as i64));
            let origin = f.eval_at(&vec![q(0, 1); m]);
            assert!(origin.iter().all(|v| v.abs() <= q(1, 1)));
        }
        let grid = GridSpec::cube(2, &q(1, 1), &q(1, 4)).unwrap();
        assert_eq!(sample_lipschitz(&grid, 1, &q(2, 1), 9).unwrap(), sample_lipschitz(&grid, 1, &q(2, 1), 9).unwrap());
    }

    #[test]
    fn lattice_examples() {
        let pairs = vec![
            ControlPair::new(0, vec![q(0, 1), q(0, 1)], vec![q(0, 1)]),
            ControlPair::new(1, vec![q(1, 1), q(-2, 1)], vec![q(5, 1)]),
        ];
        let f = lattice_counterexample(&pairs).unwrap();
        assert_eq!(f.eval_at(&[q(0, 1), q(0, 1)]), vec![q(1, 1)]);
        assert_eq!(f.eval_at(&[q(1, 1), q(-2, 1)]), vec![q(-1, 1)]);
        assert_eq!(f.max_edge_slope(), q(2, 1));
        let report = game_run(&pairs, &[f]).unwrap();
        assert!(!report.outcomes[0].controlled);
        assert_eq!(report.outcomes[0].margin, Some(q(1, 1)));

        let bump = LatticeBump::new(&pairs).unwrap();
        assert!(bump.signs_are_unit());
        assert_eq!(bump.eval(&[q(1, 1), q(-2, 1)]), vec![q(-1, 1)]);
        assert_eq!(bump.eval(&[q(1, 4), q(0, 1)]), vec![q(1, 2)]);
        assert_eq!(bump.eval(&[q(1, 2), q(0, 1)]), vec![q(0, 1)]);
        assert!(!outcome(&pairs, &bump).controlled);
    }

    #[test]
    fn empty_pairs_leave_everything_free() {
        let grid = GridSpec::cube(1, &q(1, 1), &q(1, 2)).unwrap();
        let f = sample_lipschitz(&grid, 1, &q(1, 1), 0).unwrap();
        let report = game_run(&[], &[f]).unwrap();
        assert_eq!(report.outcomes[0], Outcome { controlled: false, closest: None, margin: None });
        assert_eq!(report.worst_margin(), Some(None));
        assert!(report.to_text().contains("0,0,-,inf"));
    }

    #[test]
    fn gridfn_roundtrip() {
        let grid = GridSpec::cube(2, &q(1, 1), &q(1, 2)).unwrap();
        let f = sample_lipschitz(&grid, 2, &q(1, 1), 3).unwrap();
        let back: SampledLipschitz<Rational> = parse_gridfn(&write_gridfn(&f)).unwrap();
        assert_eq!(back, f);
        assert!(parse_gridfn::<Rational>("m 1 d 1 lipschitz 1\nh 1\nlo 0\nshape 2\n0\n").is_err());
    }
}
