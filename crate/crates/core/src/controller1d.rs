//! Controlling pairs for Lipschitz curves `R -> R^d`.
//!
//! A block for `(j, n)` tiles the cube of radius `r = j(n+1)` by
//! `(r+1)^d` cubes of radius `r/(r+1)` and shifts their centers down the
//! diagonal by `j(n - x)`. Blocks for `j = 1, 2, ...` built on disjoint
//! indices give a schedule.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::feasibility::ControlPair;
use crate::scalar::{cmp, int, Scalar};
use crate::sequences::{product, PointSeq};

/// `k(j, n) = (j(n+1) + 1)^d`, saturating.
pub fn block_size(j: u64, n: u64, d: usize) -> u128 {
    let side = (j as u128).saturating_mul(n as u128 + 1).saturating_add(1);
    side.checked_pow(d as u32).unwrap_or(u128::MAX)
}

/// Tile centers of the cube of radius `r = j(n+1)`, lexicographically
/// decreasing.
pub fn tile_centers<S: Scalar>(j: u64, n: u64, d: usize) -> Vec<Vec<S>> {
    let r = j as i64 * (n as i64 + 1);
    let rp = S::from_ratio(r, r + 1);
    let axis: Vec<S> = (0..=r)
        .rev()
        .map(|a| rp.clone() * int::<S>(2 * a + 1) - int::<S>(r))
        .collect();
    product(d, &axis)
}

/// One block on the first `k(j, n)` entries of `xs` (sorted, in `[0, n]`).
/// Pair indices are positions in `xs`.
pub fn build_block<S: Scalar>(j: u64, n: u64, d: usize, xs: &[S]) -> Result<Vec<ControlPair<S>>> {
    if d == 0 || j == 0 {
        return Err(Error::Precondition("build_block needs j >= 1 and d >= 1".into()));
    }
    let k = block_size(j, n, d);
    if (xs.len() as u128) < k {
        return Err(Error::InsufficientPoints { j, deficit: (k - xs.len() as u128) as u64 });
    }
    let k = k as usize;
    let n_s = int::<S>(n as i64);
    if xs[..k].iter().any(|x| *x < S::zero() || *x > n_s) {
        return Err(Error::Precondition(format!("block points must lie in [0, {n}]")));
    }
    if xs[..k].windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Precondition("block points must be sorted".into()));
    }
    let jj = int::<S>(j as i64);
    let pairs = tile_centers::<S>(j, n, d)
        .into_iter()
        .zip(&xs[..k])
        .enumerate()
        .map(|(i, (z, x))| {
            let drift = jj.clone() * (n_s.clone() - x.clone());
            let y = z.into_iter().map(|c| c - drift.clone()).collect();
            ControlPair::new(i, vec![x.clone()], y)
        })
        .collect();
    Ok(pairs)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Block<S> {
    pub j: u64,
    pub n: u64,
    /// Pairs labelled with sequence indices.
    pub pairs: Vec<ControlPair<S>>,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Schedule<S> {
    pub blocks: Vec<Block<S>>,
}

impl<S: Scalar> Schedule<S> {
    pub fn pairs(&self) -> Vec<ControlPair<S>> {
        self.blocks.iter().flat_map(|b| b.pairs.iter().cloned()).collect()
    }
}

/// Blocks for `j = 1..=big_j` on disjoint indices of a nonnegative sequence.
/// Each `n(j)` is the least `n` with enough unused points in `[0, n]`; the
/// smallest unused points are consumed first.
pub fn build_schedule<S: Scalar>(seq: &PointSeq<S>, d: usize, big_j: u64) -> Result<Schedule<S>> {
    if seq.m() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: seq.m() });
    }
    if let Some((i, _)) = seq.points().iter().enumerate().find(|(_, p)| p[0] < S::zero()) {
        return Err(Error::Precondition(format!(
            "entry {i} is negative; split the sequence by sign first"
        )));
    }
    let mut order: Vec<(usize, S)> =
        seq.points().iter().enumerate().map(|(i, p)| (i, p[0].clone())).collect();
    order.sort_by(|a, b| cmp(&a.1, &b.1).then(a.0.cmp(&b.0)));
    let top = order.last().map(|(_, x)| x.ceil().to_i64().unwrap_or(i64::MAX)).unwrap_or(0).max(0) as u64;

    let mut cursor = 0usize;
    let mut blocks = Vec::new();
    for j in 1..=big_j {
        let unused = &order[cursor..];
        let mut chosen = None;
        let mut deficit = u128::MAX;
        for n in 0..=top {
            let n_s = int::<S>(n as i64);
            let available = unused.partition_point(|(_, x)| *x <= n_s) as u128;
            let k = block_size(j, n, d);
            if available >= k {
                chosen = Some((n, k as usize));
                break;
            }
            deficit = deficit.min(k - available);
        }
        let Some((n, k)) = chosen else {
            if top == 0 && unused.is_empty() {
                deficit = block_size(j, 0, d);
            }
            return Err(Error::InsufficientPoints { j, deficit: deficit.min(u64::MAX as u128) as u64 });
        };
        let xs: Vec<S> = unused[..k].iter().map(|(_, x)| x.clone()).collect();
        let mut pairs = build_block(j, n, d, &xs)?;
        for p in &mut pairs {
            p.index = unused[p.index].0;
        }
        cursor += k;
        blocks.push(Block { j, n, pairs });
    }
    Ok(Schedule { blocks })
}

/// `count` pairs at `x_star` whose values run through the dyadic cell
/// centers of the cube of radius `side`, coarsest level first, each level in
/// lexicographic order.
pub fn dense_cluster_pairs<S: Scalar>(x_star: &S, count: usize, d: usize, side: &S) -> Vec<ControlPair<S>> {
    let mut out = Vec::with_capacity(count);
    let mut level = 0u32;
    while out.len() < count {
        let cells = 1i64 << level;
        let width = side.clone() / int::<S>(cells);
        let axis: Vec<S> = (0..cells)
            .map(|a| width.clone() * int::<S>(2 * a + 1) - side.clone())
            .collect();
        for y in product(d, &axis).into_iter().take(count - out.len()) {
            out.push(ControlPair::new(out.len(), vec![x_star.clone()], y));
        }
        level += 1;
    }
    out
}

pub fn write_pairs<S: Scalar>(pairs: &[ControlPair<S>], m: usize, d: usize) -> String {
    let mut out = String::from("# lipctl pairs v1\n");
    let _ = writeln!(out, "m {m} d {d} count {}", pairs.len());
    for p in pairs {
        let _ = write!(out, "{}", p.index);
        for c in p.x.iter().chain(&p.y) {
            let _ = write!(out, " {}", c.encode());
        }
        out.push('\n');
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairFile<S> {
    pub m: usize,
    pub d: usize,
    pub pairs: Vec<ControlPair<S>>,
}

pub fn parse_pairs<S: Scalar>(text: &str) -> Result<PairFile<S>> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut pairs = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line_no = no + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let Some((m, d, _)) = header else {
            if toks.len() != 6 || toks[0] != "m" || toks[2] != "d" || toks[4] != "count" {
                return Err(Error::parse(line_no, "expected header `m <m> d <d> count <n>`"));
            }
            let num = |t: &str| t.parse::<usize>().map_err(|_| Error::parse(line_no, format!("bad integer {t:?}")));
            header = Some((num(toks[1])?, num(toks[3])?, num(toks[5])?));
            continue;
        };
        if toks.len() != 1 + m + d {
            return Err(Error::parse(line_no, format!("expected {} fields, found {}", 1 + m + d, toks.len())));
        }
        let index = toks[0].parse().map_err(|_| Error::parse(line_no, "bad pair index"))?;
        let vals = toks[1..]
            .iter()
            .map(|t| S::decode(t).ok_or_else(|| Error::parse(line_no, format!("bad number {t:?}"))))
            .collect::<Result<Vec<S>>>()?;
        pairs.push(ControlPair::new(index, vals[..m].to_vec(), vals[m..].to_vec()));
    }
    let (m, d, count) = header.ok_or_else(|| Error::parse(0, "missing header"))?;
    if pairs.len() != count {
        return Err(Error::parse(0, format!("header says {count} pairs, found {}", pairs.len())));
    }
    Ok(PairFile { m, d, pairs })
}
