//! Point sequences, density statistics, and the example sequences.
//!
//! Sequences are finite truncations; every "for all n" statement becomes a
//! statement up to the truncation horizon.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::scalar::{cmp, dist, norm, powi, Rational, Scalar};

/// Default cap on generated sequence length.
pub const DEFAULT_CAP: usize = 10_000_000;

/// Indexed multiset of points in `R^m`.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSeq<S> {
    m: usize,
    points: Vec<Vec<S>>,
    /// Set when some coordinates are rounded irrationals.
    approximate: bool,
}

impl<S: Scalar> PointSeq<S> {
    pub fn new(m: usize, points: Vec<Vec<S>>) -> Result<Self> {
        if m == 0 {
            return Err(Error::Precondition("sequence dimension must be >= 1".into()));
        }
        if let Some(p) = points.iter().find(|p| p.len() != m) {
            return Err(Error::DimensionMismatch { expected: m, found: p.len() });
        }
        Ok(PointSeq { m, points, approximate: false })
    }

    pub fn empty(m: usize) -> Self {
        PointSeq { m, points: Vec::new(), approximate: false }
    }

    pub fn mark_approximate(mut self) -> Self {
        self.approximate = true;
        self
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn points(&self) -> &[Vec<S>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_approximate(&self) -> bool {
        self.approximate
    }

    /// `(original index, point)` pairs sorted by max norm; ties keep the
    /// original order.
    pub fn sorted_by_norm(&self) -> Vec<(usize, &[S])> {
        let mut v: Vec<(usize, &[S], S)> =
            self.points.iter().enumerate().map(|(i, p)| (i, p.as_slice(), norm(p))).collect();
        v.sort_by(|a, b| cmp(&a.2, &b.2).then(a.0.cmp(&b.0)));
        v.into_iter().map(|(i, p, _)| (i, p)).collect()
    }

    /// Largest max norm in the sequence.
    pub fn horizon(&self) -> Option<S> {
        self.points.iter().map(|p| norm(p)).max_by(|a, b| cmp(a, b))
    }
}

/// `N(n) = |{i : |x_i| <= n}|` and `N(n)/n^d` for `n = 1..=n_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityReport {
    pub d: usize,
    pub n_max: u64,
    pub counts: Vec<u64>,
    pub ratios: Vec<Rational>,
    /// Running supremum of `ratios`.
    pub sup: Vec<Rational>,
    pub approximate: bool,
}

impl DensityReport {
    pub fn sup_ratio(&self) -> Option<&Rational> {
        self.sup.last()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("# lipctl density v1\n");
        let _ = writeln!(out, "# d={} n_max={} approximate={}", self.d, self.n_max, self.approximate);
        out.push_str("n,count,ratio,sup\n");
        for (k, ((c, r), s)) in self.counts.iter().zip(&self.ratios).zip(&self.sup).enumerate() {
            let _ = writeln!(out, "{},{},{},{}", k + 1, c, r.encode(), s.encode());
        }
        out
    }
}

pub fn counting_function<S: Scalar>(seq: &PointSeq<S>, d: usize, n_max: u64) -> Result<DensityReport> {
    if n_max == 0 || d == 0 {
        return Err(Error::Precondition("counting_function needs n_max >= 1 and d >= 1".into()));
    }
    let mut norms: Vec<S> = seq.points.iter().map(|p| norm(p)).collect();
    norms.sort_by(cmp);
    let mut counts = Vec::with_capacity(n_max as usize);
    let mut ratios = Vec::with_capacity(n_max as usize);
    let mut sup: Vec<Rational> = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        let bound = S::from_i128(n as i128);
        let count = norms.partition_point(|v| *v <= bound) as u64;
        let ratio = Rational::new(BigInt::from(count), num_traits::pow(BigInt::from(n), d));
        let running = match sup.last() {
            Some(s) if *s >= ratio => s.clone(),
            _ => ratio.clone(),
        };
        counts.push(count);
        ratios.push(ratio);
        sup.push(running);
    }
    Ok(DensityReport { d, n_max, counts, ratios, sup, approximate: seq.approximate })
}

/// Number of entries at max-distance strictly less than `alpha` from `x`.
pub fn local_count<S: Scalar>(seq: &PointSeq<S>, x: &[S], alpha: &S) -> usize {
    seq.points.iter().filter(|p| dist(p, x) < *alpha).count()
}

/// All points of `Z^m` with `|x| <= r`, in lexicographic order.
pub fn gen_lattice(m: usize, r: u64) -> Result<PointSeq<Rational>> {
    gen_lattice_capped(m, r, DEFAULT_CAP)
}

pub fn gen_lattice_capped(m: usize, r: u64, cap: usize) -> Result<PointSeq<Rational>> {
    if m == 0 {
        return Err(Error::Precondition("m must be >= 1".into()));
    }
    let side = 2 * r as u128 + 1;
    if side.checked_pow(m as u32).is_none_or(|n| n > cap as u128) {
        return Err(Error::CapExceeded { cap });
    }
    let r = r as i64;
    let axis: Vec<i64> = (-r..=r).collect();
    let points = product(m, &axis)
        .into_iter()
        .map(|p| p.into_iter().map(|v| Rational::from_integer(v.into())).collect())
        .collect();
    PointSeq::new(m, points)
}

/// `k * 2^(k d)` copies of `2^k` for `k = 1..=big_k`.
pub fn gen_pow2(d: usize, big_k: u32, cap: usize) -> Result<PointSeq<Rational>> {
    if d == 0 || big_k == 0 {
        return Err(Error::Precondition("gen_pow2 needs d >= 1 and K >= 1".into()));
    }
    let mut total: u128 = 0;
    for k in 1..=big_k {
        let copies = (k as u128).checked_mul(1u128.checked_shl(k * d as u32).unwrap_or(u128::MAX));
        total = total.saturating_add(copies.unwrap_or(u128::MAX));
    }
    if total > cap as u128 {
        return Err(Error::CapExceeded { cap });
    }
    let mut points = Vec::with_capacity(total as usize);
    for k in 1..=big_k {
        let value = Rational::from_integer(BigInt::one() << k);
        let copies = k as usize * (1usize << (k as usize * d));
        points.extend(std::iter::repeat_n(vec![value], copies));
    }
    PointSeq::new(1, points)
}

/// Points `(n_1^c, ..., n_m^c)` with `n_k >= 1` and max norm at most `r`.
///
/// Irrational powers are stored as `floor(v * 2^60) / 2^60` and the sequence
/// is flagged approximate; the error is below `1e-18`.
pub fn gen_power_grid(m: usize, c: &Rational, r: &Rational, cap: usize) -> Result<PointSeq<Rational>> {
    if m == 0 {
        return Err(Error::Precondition("m must be >= 1".into()));
    }
    if !c.is_positive() {
        return Err(Error::Precondition("exponent c must be positive".into()));
    }
    let p = c.numer().to_u32().ok_or_else(|| Error::Precondition("exponent too large".into()))?;
    let q = c.denom().to_u32().ok_or_else(|| Error::Precondition("exponent too large".into()))?;
    let mut axis = Vec::new();
    let mut approx = false;
    if !r.is_negative() {
        let r_pow_q = powi(r, q as usize);
        let mut n: u64 = 1;
        loop {
            let np = num_traits::pow(BigInt::from(n), p as usize);
            if Rational::from_integer(np.clone()) > r_pow_q {
                break;
            }
            let root = np.nth_root(q);
            if num_traits::pow(root.clone(), q as usize) == np {
                axis.push(Rational::from_integer(root));
            } else {
                let scaled = np << (60 * q as usize);
                axis.push(Rational::new(scaled.nth_root(q), BigInt::one() << 60));
                approx = true;
            }
            if axis.len() > cap {
                return Err(Error::CapExceeded { cap });
            }
            n += 1;
        }
    }
    if (axis.len() as u128).checked_pow(m as u32).is_none_or(|t| t > cap as u128) {
        return Err(Error::CapExceeded { cap });
    }
    let seq = PointSeq::new(m, product(m, &axis))?;
    Ok(if approx { seq.mark_approximate() } else { seq })
}

/// Output of [`gen_remark_a`].
#[derive(Clone, Debug)]
pub struct RemarkSet {
    pub seq: PointSeq<Rational>,
    /// Level thresholds `c_1 < c_2 < ... < c_{levels+1}`.
    pub thresholds: Vec<Rational>,
    /// Level and grid anchor of every emitted point, parallel to `seq`.
    pub anchors: Vec<(u32, Vec<Rational>)>,
}

/// Explicit sparse-but-controlling set: for each level `i`, every
/// `x in 2^-i Z^m` with `c_i <= |x| < c_{i+1}` receives `ceil(|x|^(d-m))`
/// points inside the cube of radius `2^-i` about `x`, spread evenly along the
/// first coordinate.
///
/// `c_i` is the smallest power of two that exceeds 4 and `c_{i-1}` and has
/// `growth(c_i - 2) > 2^(m(i+2)+d)`; `growth` must be nondecreasing.
pub fn gen_remark_a(
    m: usize,
    d: usize,
    growth: &dyn Fn(u64) -> u128,
    levels: u32,
    cap: usize,
) -> Result<RemarkSet> {
    if m == 0 || m > d {
        return Err(Error::Precondition("remark set needs 1 <= m <= d".into()));
    }
    if levels == 0 {
        return Err(Error::Precondition("levels must be >= 1".into()));
    }
    let mut thresholds: Vec<u64> = Vec::new();
    let mut c: u64 = 8;
    for i in 1..=levels as u64 + 1 {
        let exp = m as u64 * (i + 2) + d as u64;
        let target = if exp >= 128 { u128::MAX } else { 1u128 << exp };
        if let Some(&prev) = thresholds.last() {
            while c <= prev {
                c *= 2;
            }
        }
        while growth(c - 2) <= target {
            c = c.checked_mul(2).filter(|&v| v < 1 << 40).ok_or_else(|| {
                Error::DegenerateInput("growth function too slow for the requested levels".into())
            })?;
        }
        thresholds.push(c);
    }

    let mut points = Vec::new();
    let mut anchors = Vec::new();
    let e = d - m;
    for i in 1..=levels {
        let lo = thresholds[i as usize - 1] as i64;
        let hi = thresholds[i as usize] as i64;
        let scale = 1i64 << i;
        let grid_side = (2 * hi * scale) as u128;
        if grid_side.checked_pow(m as u32).is_none_or(|n| n > cap as u128) {
            return Err(Error::CapExceeded { cap });
        }
        let step = Rational::new(BigInt::one(), BigInt::from(scale));
        let axis: Vec<i64> = (-(hi * scale) + 1..hi * scale).collect();
        for cell in product(m, &axis) {
            let max_abs = cell.iter().map(|v| v.abs()).max().unwrap_or(0);
            if max_abs < lo * scale {
                continue;
            }
            let x: Vec<Rational> =
                cell.iter().map(|&v| Rational::new(BigInt::from(v), BigInt::from(scale))).collect();
            let mag = norm(&x);
            let copies = powi(&mag, e).ceil().to_integer().to_usize().unwrap_or(usize::MAX);
            if points.len().saturating_add(copies) > cap {
                return Err(Error::CapExceeded { cap });
            }
            let k = BigInt::from(copies);
            for s in 0..copies {
                let offset = (Rational::new(BigInt::from(2 * s + 1), k.clone()) - Rational::one())
                    * step.clone();
                let mut p = x.clone();
                p[0] += offset;
                points.push(p);
                anchors.push((i, x.clone()));
            }
        }
    }
    let thresholds = thresholds.into_iter().map(|v| Rational::from_integer(v.into())).collect();
    Ok(RemarkSet { seq: PointSeq::new(m, points)?, thresholds, anchors })
}

/// Cartesian power of `axis`, first coordinate most significant.
pub(crate) fn product<T: Clone>(m: usize, axis: &[T]) -> Vec<Vec<T>> {
    let mut out: Vec<Vec<T>> = vec![Vec::new()];
    for _ in 0..m {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                axis.iter().map(move |v| {
                    let mut p = prefix.clone();
                    p.push(v.clone());
                    p
                })
            })
            .collect();
    }
    if axis.is_empty() && m > 0 {
        out.clear();
    }
    out
}

pub fn write_seq<S: Scalar>(seq: &PointSeq<S>) -> String {
    let mut out = String::from("# lipctl seq v1\n");
    let _ = write!(out, "m {} count {}", seq.m, seq.len());
    if seq.approximate {
        out.push_str(" approx");
    }
    out.push('\n');
    for p in &seq.points {
        let line: Vec<String> = p.iter().map(Scalar::encode).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_seq<S: Scalar>(text: &str) -> Result<PointSeq<S>> {
    let mut header: Option<(usize, usize, bool)> = None;
    let mut points = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line_no = no + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if header.is_none() {
            if toks.len() < 4 || toks[0] != "m" || toks[2] != "count" {
                return Err(Error::parse(line_no, "expected header `m <m> count <n>`"));
            }
            let m = toks[1].parse().map_err(|_| Error::parse(line_no, "bad m"))?;
            let n = toks[3].parse().map_err(|_| Error::parse(line_no, "bad count"))?;
            header = Some((m, n, toks.get(4) == Some(&"approx")));
            continue;
        }
        let p = toks
            .iter()
            .map(|t| S::decode(t).ok_or_else(|| Error::parse(line_no, format!("bad number {t:?}"))))
            .collect::<Result<Vec<S>>>()?;
        points.push(p);
    }
    let (m, n, approx) = header.ok_or_else(|| Error::parse(0, "missing header"))?;
    if points.len() != n {
        return Err(Error::parse(0, format!("header says {n} points, found {}", points.len())));
    }
    let seq = PointSeq::new(m, points)?;
    Ok(if approx { seq.mark_approximate() } else { seq })
}

/// Exact `sum_{k=1}^{K} k 2^(k d)`, the pow2 count at `n = 2^K`.
pub fn pow2_count(d: usize, big_k: u32) -> BigInt {
    (1..=big_k).fold(BigInt::zero(), |acc, k| acc + BigInt::from(k) * (BigInt::one() << (k as usize * d)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn lattice_examples() {
        let s = gen_lattice(1, 1).unwrap();
        assert_eq!(s.points(), &[vec![q(-1, 1)], vec![q(0, 1)], vec![q(1, 1)]]);
        assert_eq!(gen_lattice(2, 1).unwrap().len(), 9);
        assert_eq!(gen_lattice(2, 0).unwrap().points(), &[vec![q(0, 1), q(0, 1)]]);
        assert!(matches!(gen_lattice_capped(3, 10, 100), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn lattice_counts_match_closed_form() {
        for m in 1..=3usize {
            let s = gen_lattice(m, 6).unwrap();
            let rep = counting_function(&s, 2, 6).unwrap();
            for n in 1..=6u64 {
                let expected = (2 * n + 1).pow(m as u32);
                assert_eq!(rep.counts[n as usize - 1], expected);
                assert_eq!(rep.ratios[n as usize - 1], q(expected as i64, (n * n) as i64));
            }
        }
    }

    #[test]
    fn empty_sequence_counts_zero() {
        let rep = counting_function(&PointSeq::<Rational>::empty(2), 1, 5).unwrap();
        assert!(rep.counts.iter().all(|&c| c == 0));
        assert!(counting_function(&PointSeq::<Rational>::empty(2), 1, 0).is_err());
    }

    #[test]
    fn pow2_examples() {
        let s = gen_pow2(1, 2, DEFAULT_CAP).unwrap();
        let vals: Vec<Rational> = s.points().iter().map(|p| p[0].clone()).collect();
        let mut expected = vec![q(2, 1); 2];
        expected.extend(vec![q(4, 1); 8]);
        assert_eq!(vals, expected);
        assert_eq!(gen_pow2(1, 1, DEFAULT_CAP).unwrap().len(), 2);
        let s = gen_pow2(2, 1, DEFAULT_CAP).unwrap();
        assert_eq!(s.len(), 4);
        assert!(s.points().iter().all(|p| p[0] == q(2, 1)));
        assert!(matches!(gen_pow2(3, 6, 1000), Err(Error::CapExceeded { cap: 1000 })));
    }

    #[test]
    fn pow2_count_at_top_power() {
        for d in 1..=2usize {
            let k = 5u32;
            let s = gen_pow2(d, k, DEFAULT_CAP).unwrap();
            let rep = counting_function(&s, d, 1 << k).unwrap();
            let top = rep.counts[(1usize << k) - 1];
            assert_eq!(BigInt::from(top), pow2_count(d, k));
            assert!(*rep.sup_ratio().unwrap() >= q(k as i64, 2));
        }
    }

    #[test]
    fn power_grid_examples() {
        let s = gen_power_grid(1, &q(2, 1), &q(10, 1), DEFAULT_CAP).unwrap();
        assert_eq!(s.points(), &[vec![q(1, 1)], vec![q(4, 1)], vec![q(9, 1)]]);
        assert!(!s.is_approximate());

        let s = gen_power_grid(2, &q(1, 1), &q(2, 1), DEFAULT_CAP).unwrap();
        let pts: Vec<Vec<Rational>> =
            [(1, 1), (1, 2), (2, 1), (2, 2)].iter().map(|&(a, b)| vec![q(a, 1), q(b, 1)]).collect();
        assert_eq!(s.points(), pts.as_slice());

        let s = gen_power_grid(1, &q(1, 2), &q(2, 1), DEFAULT_CAP).unwrap();
        assert!(s.is_approximate());
        assert_eq!(s.len(), 4);
        for (n, p) in s.points().iter().enumerate() {
            let err = (p[0].clone() * p[0].clone() - q(n as i64 + 1, 1)).abs();
            assert!(err < q(1, 1_000_000));
            assert!((Scalar::to_f64(&p[0]) - ((n + 1) as f64).sqrt()).abs() < 1e-12);
        }
        assert_eq!(s.points()[3][0], q(2, 1));
    }

    #[test]
    fn local_count_examples() {
        let s = gen_lattice(2, 3).unwrap();
        assert_eq!(local_count(&s, &[q(0, 1), q(0, 1)], &q(3, 2)), 9);
        assert_eq!(local_count(&s, &[q(1, 2), q(1, 2)], &q(1, 4)), 0);
        // strict inequality: distance exactly alpha does not count
        assert_eq!(local_count(&s, &[q(0, 1), q(0, 1)], &q(1, 1)), 1);
    }

    #[test]
    fn remark_points_stay_near_anchors() {
        let growth = |x: u64| if x >= 127 { u128::MAX } else { 1u128 << x };
        let set = gen_remark_a(1, 2, &growth, 2, DEFAULT_CAP).unwrap();
        assert_eq!(set.thresholds, vec![q(8, 1), q(16, 1), q(32, 1)]);
        assert_eq!(set.seq.len(), set.anchors.len());
        for (p, (level, anchor)) in set.seq.points().iter().zip(&set.anchors) {
            assert!(dist(p, anchor) < q(1, 1 << level));
        }
    }

    #[test]
    fn seq_text_roundtrip() {
        let s = gen_power_grid(2, &q(1, 2), &q(2, 1), DEFAULT_CAP).unwrap();
        let back: PointSeq<Rational> = parse_seq(&write_seq(&s)).unwrap();
        assert_eq!(back, s);
        assert!(parse_seq::<Rational>("m 1 count 2\n1/1\n").is_err());
    }
}
