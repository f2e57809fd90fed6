//! Controlling pairs for Lipschitz maps `R^m -> R^d` with `m <= d`.
//!
//! Points of `R^m` are read as `(z, t)` with `z` in `R^(m-1)` and time `t`
//! last. The slab `D x [t0, t1]`, `D` the cube of radius `t0`, is tiled by
//! cubes of radius `eps`. Each tile receives one sequence point per
//! half-unit cube covering the part of the sphere `|y| = l` that the section
//! map sends into the tile's `z`-range; tiles touching `t = t1` also receive
//! one point per half-unit cube covering the whole ball `|y| <= l`.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::feasibility::ControlPair;
use crate::geometry::Aab;
use crate::scalar::{int, int_root_floor, max_of, min_of, Scalar};
use crate::sequences::{product, PointSeq};

#[derive(Clone, Debug, PartialEq)]
pub struct MdParams<S> {
    pub j: u64,
    pub m: usize,
    pub d: usize,
    /// Tile radius `1/(8j+8)`.
    pub eps: S,
    /// Least integer with `c^m > 4d (8j+8)^(d-m)`.
    pub c: u64,
    /// `eps / c`.
    pub alpha: S,
    pub t0: S,
    pub t1: S,
    /// Sphere radius `floor(j t0 + j) + 1`.
    pub l: u64,
}

impl<S: Scalar> MdParams<S> {
    pub fn new(j: u64, m: usize, d: usize, t0: S, t1: S) -> Result<Self> {
        if j == 0 || m == 0 || m > d {
            return Err(Error::Precondition(format!("need j >= 1 and 1 <= m <= d, got j={j} m={m} d={d}")));
        }
        if t0 <= int::<S>(j as i64 + 1) {
            return Err(Error::Precondition(format!("t0 = {t0} must exceed j + 1")));
        }
        if t1 <= t0 {
            return Err(Error::Precondition("t1 must exceed t0".into()));
        }
        let eps = S::from_ratio(1, 8 * j as i64 + 8);
        let c = min_c(j, m, d)?;
        let alpha = eps.clone() / int::<S>(c as i64);
        let jj = int::<S>(j as i64);
        let l = (jj.clone() * t0.clone() + jj).floor().to_i64().ok_or_else(|| {
            Error::Precondition("t0 too large".into())
        })? as u64
            + 1;
        let p = MdParams { j, m, d, eps, c, alpha, t0, t1, l };
        p.check_inequalities()?;
        Ok(p)
    }

    pub fn l_scalar(&self) -> S {
        int(self.l as i64)
    }

    /// Points needed per tile: `4d (2l)^(d-m)`.
    pub fn quota(&self) -> u128 {
        4 * self.d as u128 * (2 * self.l as u128).pow((self.d - self.m) as u32)
    }

    /// Points needed per tile touching `t = t1`.
    pub fn far_quota(&self) -> u128 {
        self.quota() + self.fresh_count()
    }

    /// `(2l)^d` half-unit cubes tile the ball of radius `l`.
    pub fn fresh_count(&self) -> u128 {
        (2 * self.l as u128).pow(self.d as u32)
    }

    pub fn check_inequalities(&self) -> Result<()> {
        let j = self.j as i64;
        let fail = |what: &str| Err(Error::Internal(format!("parameter inequality failed: {what}")));
        if self.eps != S::from_ratio(1, 8 * j + 8) {
            return fail("eps = 1/(8j+8)");
        }
        let target = 4 * BigInt::from(self.d) * num_traits::pow(BigInt::from(8 * j + 8), self.d - self.m);
        if num_traits::pow(BigInt::from(self.c), self.m) <= target {
            return fail("c^m > 4d/eps^(d-m)");
        }
        let l = self.l_scalar();
        let jj = int::<S>(j);
        if l > jj.clone() * self.t0.clone() + jj.clone() + S::one() {
            return fail("l <= j t0 + j + 1");
        }
        if l >= (jj + S::one()) * self.t0.clone() {
            return fail("l < (j+1) t0");
        }
        if int::<S>(8) * l * self.eps.clone() > self.t0 {
            return fail("8 l eps <= t0");
        }
        Ok(())
    }
}

fn min_c(j: u64, m: usize, d: usize) -> Result<u64> {
    let target = 4 * BigInt::from(d) * num_traits::pow(BigInt::from(8 * j + 8), d - m);
    let c = int_root_floor(&target, m as u32) + BigInt::from(1);
    c.to_u64().ok_or_else(|| Error::Precondition("tile subdivision count overflows".into()))
}

/// Section map `B -> D`: `(t0 / 2l) (y_a - y_m)` for `a < m`.
pub fn linear_map_g<S: Scalar>(y: &[S], p: &MdParams<S>) -> Vec<S> {
    let scale = p.t0.clone() / (int::<S>(2) * p.l_scalar());
    let ym = y[p.m - 1].clone();
    y[..p.m - 1].iter().map(|ya| scale.clone() * (ya.clone() - ym.clone())).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpsBall<S> {
    pub index: usize,
    /// Cell coordinates relative to the corner `(-t0, ..., -t0, t0)`.
    pub cell: Vec<i64>,
    pub center: Vec<S>,
    /// Touches the slab `t = t1`.
    pub far: bool,
}

impl<S: Scalar> EpsBall<S> {
    pub fn as_box(&self, eps: &S) -> Aab<S> {
        Aab::cube(&self.center, eps)
    }

    /// Strict interior membership.
    pub fn holds_strictly(&self, x: &[S], eps: &S) -> bool {
        x.iter().zip(&self.center).all(|(a, c)| (a.clone() - c.clone()).abs() < *eps)
    }
}

fn layer_counts<S: Scalar>(p: &MdParams<S>) -> (i64, i64) {
    let side = int::<S>(2) * p.eps.clone();
    let nz = (int::<S>(2) * p.t0.clone() / side.clone()).ceil().to_i64().unwrap_or(0);
    let nt = ((p.t1.clone() - p.t0.clone()) / side).ceil().to_i64().unwrap_or(0);
    (nz, nt)
}

/// Tiles of `D x [t0, t1]` anchored at `(-t0, ..., -t0, t0)`, lexicographic
/// in the cell coordinates; the last row and column may overhang.
pub fn epsilon_cover<S: Scalar>(p: &MdParams<S>) -> Vec<EpsBall<S>> {
    let (nz, nt) = layer_counts(p);
    let mut axes: Vec<Vec<i64>> = vec![(0..nz).collect(); p.m - 1];
    axes.push((0..nt).collect());
    let mut cells: Vec<Vec<i64>> = vec![Vec::new()];
    for axis in &axes {
        cells = cells
            .into_iter()
            .flat_map(|prefix| {
                axis.iter().map(move |&v| {
                    let mut c = prefix.clone();
                    c.push(v);
                    c
                })
            })
            .collect();
    }
    cells
        .into_iter()
        .enumerate()
        .map(|(index, cell)| {
            let center = cell
                .iter()
                .enumerate()
                .map(|(k, &a)| {
                    let base = if k + 1 == p.m { p.t0.clone() } else { -p.t0.clone() };
                    base + p.eps.clone() * int::<S>(2 * a + 1)
                })
                .collect();
            let far = *cell.last().expect("m >= 1") == nt - 1;
            EpsBall { index, cell, center, far }
        })
        .collect()
}

fn clip<S: Scalar>(lo: S, hi: S, l: &S) -> Option<(S, S)> {
    let lo = max_of(&lo, &-l.clone());
    let hi = min_of(&hi, l);
    (lo <= hi).then_some((lo, hi))
}

fn mid<S: Scalar>(iv: &(S, S)) -> S {
    (iv.0.clone() + iv.1.clone()) / int::<S>(2)
}

/// Centers of the half-unit cubes covering every sphere point `y` with
/// `g(y)` in the tile's `z`-range. At most `4d (2l)^(d-m)` of them.
pub fn half_balls_for<S: Scalar>(z: &EpsBall<S>, p: &MdParams<S>) -> Result<Vec<Vec<S>>> {
    let (m, d) = (p.m, p.d);
    let l = p.l_scalar();
    let one = S::one();
    let half = S::from_ratio(1, 2);
    let stretch = int::<S>(2) * l.clone() / p.t0.clone();
    // y_a - y_m lies in diffs[a] for a < m - 1
    let diffs: Vec<(S, S)> = z.center[..m - 1]
        .iter()
        .map(|c| {
            (stretch.clone() * (c.clone() - p.eps.clone()), stretch.clone() * (c.clone() + p.eps.clone()))
        })
        .collect();
    let tile: Vec<S> = (0..2 * p.l as i64).map(|e| half.clone() - l.clone() + int::<S>(e)).collect();
    let wide = |iv: &(S, S)| iv.1.clone() - iv.0.clone() > one;

    let mut out = Vec::new();
    for fixed in 0..d {
        for sign in [-1i64, 1] {
            let pinned = int::<S>(sign) * l.clone();
            // candidate intervals for y_m, each paired with one center value
            let m_ranges: Vec<(S, S)> = if fixed == m - 1 {
                vec![(pinned.clone(), pinned.clone())]
            } else if fixed < m - 1 {
                let (lo, hi) = &diffs[fixed];
                clip(pinned.clone() - hi.clone(), pinned.clone() - lo.clone(), &l).into_iter().collect()
            } else {
                (0..4 * p.l as i64)
                    .map(|s| {
                        let lo = -l.clone() + half.clone() * int::<S>(s);
                        (lo.clone(), lo + half.clone())
                    })
                    .collect()
            };
            for ym in m_ranges {
                let mut axes: Vec<Vec<S>> = Vec::with_capacity(d);
                let mut empty = false;
                for a in 0..d {
                    if a == fixed {
                        axes.push(vec![pinned.clone()]);
                    } else if a == m - 1 {
                        axes.push(vec![mid(&ym)]);
                    } else if a < m - 1 {
                        let (lo, hi) = &diffs[a];
                        match clip(ym.0.clone() + lo.clone(), ym.1.clone() + hi.clone(), &l) {
                            Some(iv) => {
                                if wide(&iv) {
                                    return Err(Error::Internal(format!(
                                        "confined coordinate range wider than 1 on tile {}",
                                        z.index
                                    )));
                                }
                                axes.push(vec![mid(&iv)]);
                            }
                            None => {
                                empty = true;
                                break;
                            }
                        }
                    } else {
                        axes.push(tile.clone());
                    }
                }
                if empty {
                    continue;
                }
                let mut centers: Vec<Vec<S>> = vec![Vec::new()];
                for axis in &axes {
                    centers = centers
                        .into_iter()
                        .flat_map(|prefix| {
                            axis.iter().map(move |v| {
                                let mut c = prefix.clone();
                                c.push(v.clone());
                                c
                            })
                        })
                        .collect();
                }
                out.extend(centers);
            }
        }
    }
    if out.len() as u128 > p.quota() {
        return Err(Error::Internal(format!(
            "tile {} needs {} half-unit cubes, above the bound {}",
            z.index,
            out.len(),
            p.quota()
        )));
    }
    Ok(out)
}

/// Half-unit cubes tiling `|y| <= l`.
pub fn fresh_centers<S: Scalar>(p: &MdParams<S>) -> Vec<Vec<S>> {
    let l = p.l_scalar();
    let half = S::from_ratio(1, 2);
    let axis: Vec<S> = (0..2 * p.l as i64).map(|e| half.clone() - l.clone() + int::<S>(e)).collect();
    product(p.d, &axis)
}

/// Sequence indices grouped by the open grid cell of side `side` holding
/// them; points on a cell face are dropped. Lists keep sequence order.
fn bucket<S: Scalar>(seq: &PointSeq<S>, anchor: &[S], side: &S) -> HashMap<Vec<i64>, Vec<usize>> {
    let mut map: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    'points: for (i, x) in seq.points().iter().enumerate() {
        let mut cell = Vec::with_capacity(x.len());
        for (c, a) in x.iter().zip(anchor) {
            let u = (c.clone() - a.clone()) / side.clone();
            if u.is_integer() {
                continue 'points;
            }
            match u.floor().to_i64() {
                Some(k) => cell.push(k),
                None => continue 'points,
            }
        }
        map.entry(cell).or_default().push(i);
    }
    map
}

/// Smallest `t0` then `t1`, both on the grid `j + 1 + k/4`, for which every
/// tile meets its quota of strictly interior points.
pub fn derive_params<S: Scalar>(seq: &PointSeq<S>, j: u64, d: usize) -> Result<MdParams<S>> {
    let m = seq.m();
    if j == 0 || m > d {
        return Err(Error::Precondition(format!("need j >= 1 and m <= d, got j={j} m={m} d={d}")));
    }
    let horizon = seq.horizon().ok_or_else(|| Error::NotDenseEnough("empty sequence".into()))?;
    let quarter = S::from_ratio(1, 4);
    let base = int::<S>(j as i64 + 1) + quarter.clone();
    let side = S::from_ratio(1, 4 * j as i64 + 4);
    // a quarter step is exactly j + 1 cells, so one bucketing serves all t0
    let step_cells = j as i64 + 1;
    let mut anchor = vec![-base.clone(); m];
    anchor[m - 1] = base.clone();
    let buckets = bucket(seq, &anchor, &side);
    let count = |cell: &[i64]| buckets.get(cell).map_or(0, Vec::len) as u128;

    let mut first_deficit: Option<String> = None;
    let mut note = |msg: String| {
        if first_deficit.is_none() {
            first_deficit = Some(msg);
        }
    };
    for s in 0i64.. {
        let t0 = base.clone() + quarter.clone() * int::<S>(s);
        if t0.clone() - side.clone() > horizon {
            break;
        }
        let probe = MdParams::new(j, m, d, t0.clone(), t0.clone() + quarter.clone())?;
        let (nz, _) = layer_counts(&probe);
        let shift = s * step_cells;
        let layer_min = |b: i64| -> (u128, Vec<i64>) {
            let mut zaxes: Vec<Vec<i64>> = vec![Vec::new()];
            for _ in 0..m - 1 {
                zaxes = zaxes
                    .into_iter()
                    .flat_map(|pre| {
                        (0..nz).map(move |a| {
                            let mut c = pre.clone();
                            c.push(a - shift);
                            c
                        })
                    })
                    .collect();
            }
            let mut worst = (u128::MAX, Vec::new());
            for mut cell in zaxes {
                cell.push(b + shift);
                let n = count(&cell);
                if n < worst.0 {
                    worst = (n, cell);
                }
            }
            worst
        };
        let describe = |cell: &[i64], have: u128, need: u128| {
            let center: Vec<String> = cell
                .iter()
                .zip(&anchor)
                .map(|(&k, a)| (a.clone() + side.clone() * (int::<S>(2 * k + 1)) / int::<S>(2)).to_string())
                .collect();
            format!(
                "t0 = {t0}: tile centered at ({}) holds {have} interior points, needs {need}",
                center.join(", ")
            )
        };
        let mut checked_layers = 0i64;
        for u in 1i64.. {
            let t1 = t0.clone() + quarter.clone() * int::<S>(u);
            if t1.clone() - side.clone() > horizon {
                note(format!("t0 = {t0}: no admissible t1 below the sequence horizon"));
                break;
            }
            let last = u * step_cells - 1;
            let mut ok = true;
            while checked_layers < last {
                let (n, cell) = layer_min(checked_layers);
                if n < probe.quota() {
                    note(describe(&cell, n, probe.quota()));
                    ok = false;
                    break;
                }
                checked_layers += 1;
            }
            if !ok {
                break;
            }
            let (n, cell) = layer_min(last);
            if n >= probe.far_quota() {
                return MdParams::new(j, m, d, t0, t1);
            }
            note(describe(&cell, n, probe.far_quota()));
        }
    }
    Err(Error::NotDenseEnough(
        first_deficit.unwrap_or_else(|| "no admissible t0 below the sequence horizon".into()),
    ))
}

#[derive(Clone, Debug, PartialEq)]
pub struct BallRecord<S> {
    pub ball: EpsBall<S>,
    /// Pairs whose values are centers of the sphere-covering cubes.
    pub half: Vec<ControlPair<S>>,
    /// Pairs whose values tile the whole ball; empty unless `ball.far`.
    pub fresh: Vec<ControlPair<S>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BallAssignment<S> {
    pub params: MdParams<S>,
    pub records: Vec<BallRecord<S>>,
}

impl<S: Scalar> BallAssignment<S> {
    pub fn pairs(&self) -> Vec<ControlPair<S>> {
        self.records.iter().flat_map(|r| r.half.iter().chain(&r.fresh).cloned()).collect()
    }

    pub fn len(&self) -> usize {
        self.records.iter().map(|r| r.half.len() + r.fresh.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Record holding the tile that contains `x` (closed, first match).
    pub fn record_for(&self, x: &[S]) -> Option<&BallRecord<S>> {
        self.records.iter().find(|r| r.ball.as_box(&self.params.eps).contains(x))
    }

    /// Index uniqueness, strict interiority, per-tile bounds, and that each
    /// pair's `x` is the sequence entry it names.
    pub fn check(&self, seq: &PointSeq<S>) -> Result<()> {
        let p = &self.params;
        let mut seen = vec![false; seq.len()];
        for r in &self.records {
            if r.half.len() as u128 > p.quota() {
                return Err(Error::Internal(format!("tile {} exceeds the half-cube bound", r.ball.index)));
            }
            if r.ball.far != (r.fresh.len() as u128 == p.fresh_count()) || (!r.ball.far && !r.fresh.is_empty()) {
                return Err(Error::Internal(format!("tile {} has a wrong fresh set", r.ball.index)));
            }
            for pair in r.half.iter().chain(&r.fresh) {
                let slot = seen.get_mut(pair.index).ok_or_else(|| {
                    Error::Internal(format!("index {} outside the sequence", pair.index))
                })?;
                if std::mem::replace(slot, true) {
                    return Err(Error::Internal(format!("index {} consumed twice", pair.index)));
                }
                if seq.points()[pair.index] != pair.x {
                    return Err(Error::Internal(format!("pair {} does not match its entry", pair.index)));
                }
                if !r.ball.holds_strictly(&pair.x, &p.eps) {
                    return Err(Error::Internal(format!(
                        "entry {} is not interior to tile {}",
                        pair.index, r.ball.index
                    )));
                }
            }
        }
        Ok(())
    }
}

pub fn build_md<S: Scalar>(seq: &PointSeq<S>, j: u64, d: usize) -> Result<BallAssignment<S>> {
    let params = derive_params(seq, j, d)?;
    build_md_with(seq, params)
}

/// Assignment for explicit parameters. Each tile consumes its interior
/// points in sequence order.
pub fn build_md_with<S: Scalar>(seq: &PointSeq<S>, params: MdParams<S>) -> Result<BallAssignment<S>> {
    if seq.m() != params.m {
        return Err(Error::DimensionMismatch { expected: params.m, found: seq.m() });
    }
    let m = params.m;
    let mut anchor = vec![-params.t0.clone(); m];
    anchor[m - 1] = params.t0.clone();
    let side = int::<S>(2) * params.eps.clone();
    let buckets = bucket(seq, &anchor, &side);
    let fresh = fresh_centers(&params);
    let mut records = Vec::new();
    for ball in epsilon_cover(&params) {
        let half = half_balls_for(&ball, &params)?;
        let want = half.len() + if ball.far { fresh.len() } else { 0 };
        let pool: &[usize] = buckets.get(&ball.cell).map_or(&[], Vec::as_slice);
        if pool.len() < want {
            return Err(Error::InsufficientPoints { j: params.j, deficit: (want - pool.len()) as u64 });
        }
        let mut take = pool.iter();
        let mut assign = |ys: &[Vec<S>]| -> Vec<ControlPair<S>> {
            ys.iter()
                .map(|y| {
                    let i = *take.next().expect("pool size checked");
                    ControlPair::new(i, seq.points()[i].clone(), y.clone())
                })
                .collect()
        };
        let half_pairs = assign(&half);
        let fresh_pairs = if ball.far { assign(&fresh) } else { Vec::new() };
        records.push(BallRecord { ball, half: half_pairs, fresh: fresh_pairs });
    }
    Ok(BallAssignment { params, records })
}

pub fn write_assignment<S: Scalar>(a: &BallAssignment<S>) -> String {
    let p = &a.params;
    let mut out = String::from("# lipctl assignment v1\n");
    let _ = writeln!(
        out,
        "params j {} m {} d {} eps {} c {} alpha {} t0 {} t1 {} l {}",
        p.j,
        p.m,
        p.d,
        p.eps.encode(),
        p.c,
        p.alpha.encode(),
        p.t0.encode(),
        p.t1.encode(),
        p.l
    );
    for r in &a.records {
        let center: Vec<String> = r.ball.center.iter().map(Scalar::encode).collect();
        let _ = writeln!(
            out,
            "tile {} center {} far {} half {} fresh {}",
            r.ball.index,
            center.join(" "),
            u8::from(r.ball.far),
            r.half.len(),
            r.fresh.len()
        );
        for (kind, pairs) in [("h", &r.half), ("f", &r.fresh)] {
            for pair in pairs {
                let _ = write!(out, "{kind} {}", pair.index);
                for c in pair.x.iter().chain(&pair.y) {
                    let _ = write!(out, " {}", c.encode());
                }
                out.push('\n');
            }
        }
    }
    out
}
