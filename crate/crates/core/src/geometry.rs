//! Max-norm box-union algebra.
//!
//! A [`Region`] is a finite union of closed axis-aligned boxes with pairwise
//! disjoint interiors. Max-norm balls are cubes, so every set the feasibility
//! recursion produces (expansions, cube removals, cube intersections) stays in
//! this class and its Lebesgue measure is an exact sum of box volumes.
//!
//! Zero-thickness boxes are legal members of a region. They carry no measure
//! but they are points of the set: removing the open unit cube around `y`
//! keeps the cube's boundary, and a value at max-distance exactly 1 from `y`
//! still evades the pair.

use std::cmp::Ordering;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::scalar::{cmp, cmp_lex, max_of, min_of, Scalar};

/// Default upper bound on the number of boxes a region may hold.
pub const DEFAULT_MAX_BOXES: usize = 1_000_000;

/// Closed axis-aligned box `[lo_0, hi_0] x ... x [lo_{d-1}, hi_{d-1}]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Aab<S> {
    lo: Vec<S>,
    hi: Vec<S>,
}

impl<S: Scalar> Aab<S> {
    pub fn new(lo: Vec<S>, hi: Vec<S>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch { expected: lo.len(), found: hi.len() });
        }
        if lo.is_empty() {
            return Err(Error::Precondition("boxes need dimension >= 1".into()));
        }
        if let Some(axis) = lo.iter().zip(&hi).position(|(a, b)| a > b) {
            return Err(Error::InvertedBox { axis });
        }
        Ok(Aab { lo, hi })
    }

    /// Closed max-norm ball of radius `rad` about `center`.
    pub fn cube(center: &[S], rad: &S) -> Self {
        debug_assert!(*rad >= S::zero());
        Aab {
            lo: center.iter().map(|c| c.clone() - rad.clone()).collect(),
            hi: center.iter().map(|c| c.clone() + rad.clone()).collect(),
        }
    }

    pub fn point(p: &[S]) -> Self {
        Aab { lo: p.to_vec(), hi: p.to_vec() }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[S] {
        &self.lo
    }

    pub fn hi(&self) -> &[S] {
        &self.hi
    }

    pub fn volume(&self) -> S {
        self.lo
            .iter()
            .zip(&self.hi)
            .fold(S::one(), |acc, (a, b)| acc * (b.clone() - a.clone()))
    }

    /// Zero thickness along at least one axis.
    pub fn is_degenerate(&self) -> bool {
        self.lo.iter().zip(&self.hi).any(|(a, b)| a == b)
    }

    pub fn center(&self) -> Vec<S> {
        let two = S::one() + S::one();
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| (a.clone() + b.clone()) / two.clone())
            .collect()
    }

    pub fn contains(&self, p: &[S]) -> bool {
        p.len() == self.dim()
            && self.lo.iter().zip(&self.hi).zip(p).all(|((a, b), x)| a <= x && x <= b)
    }

    pub fn contains_box(&self, other: &Aab<S>) -> bool {
        (0..self.dim()).all(|k| self.lo[k] <= other.lo[k] && other.hi[k] <= self.hi[k])
    }

    pub fn intersects(&self, other: &Aab<S>) -> bool {
        (0..self.dim()).all(|k| self.lo[k] <= other.hi[k] && other.lo[k] <= self.hi[k])
    }

    /// Closed intersection; may be degenerate.
    pub fn intersection(&self, other: &Aab<S>) -> Option<Aab<S>> {
        if !self.intersects(other) {
            return None;
        }
        Some(Aab {
            lo: self.lo.iter().zip(&other.lo).map(|(a, b)| max_of(a, b)).collect(),
            hi: self.hi.iter().zip(&other.hi).map(|(a, b)| min_of(a, b)).collect(),
        })
    }

    pub fn interiors_overlap(&self, other: &Aab<S>) -> bool {
        (0..self.dim()).all(|k| self.lo[k] < other.hi[k] && other.lo[k] < self.hi[k])
            && !self.is_degenerate()
            && !other.is_degenerate()
    }

    pub fn expanded(&self, r: &S) -> Aab<S> {
        Aab {
            lo: self.lo.iter().map(|a| a.clone() - r.clone()).collect(),
            hi: self.hi.iter().map(|b| b.clone() + r.clone()).collect(),
        }
    }

    /// Closed pieces covering `self \ other`, each interior-disjoint from
    /// `other`. Faces shared with `other` are not reproduced as separate
    /// slabs: `other` already contains them.
    fn cover_minus(&self, other: &Aab<S>) -> Vec<Aab<S>> {
        if !self.intersects(other) {
            return vec![self.clone()];
        }
        let mut pieces = Vec::new();
        let mut rest = self.clone();
        for k in 0..self.dim() {
            if rest.lo[k] < other.lo[k] {
                let mut left = rest.clone();
                left.hi[k] = other.lo[k].clone();
                pieces.push(left);
                rest.lo[k] = other.lo[k].clone();
            }
            if rest.hi[k] > other.hi[k] {
                let mut right = rest.clone();
                right.lo[k] = other.hi[k].clone();
                pieces.push(right);
                rest.hi[k] = other.hi[k].clone();
            }
        }
        pieces
    }

    /// `self` minus the open interior of `cube`, as closed pieces. Points on
    /// the boundary of `cube` are kept, as zero-thickness slabs if necessary.
    fn minus_open(&self, cube: &Aab<S>) -> Vec<Aab<S>> {
        let misses = (0..self.dim()).any(|k| self.hi[k] <= cube.lo[k] || self.lo[k] >= cube.hi[k]);
        if misses {
            return vec![self.clone()];
        }
        let mut pieces = Vec::new();
        let mut rest = self.clone();
        for k in 0..self.dim() {
            if rest.lo[k] <= cube.lo[k] {
                let mut left = rest.clone();
                left.hi[k] = cube.lo[k].clone();
                pieces.push(left);
                rest.lo[k] = cube.lo[k].clone();
            }
            if rest.hi[k] >= cube.hi[k] {
                let mut right = rest.clone();
                right.lo[k] = cube.hi[k].clone();
                pieces.push(right);
                rest.hi[k] = cube.hi[k].clone();
            }
        }
        pieces
    }
}

/// Finite union of closed boxes with pairwise disjoint interiors.
#[derive(Clone, Debug)]
pub struct Region<S> {
    dim: usize,
    boxes: Vec<Aab<S>>,
    max_boxes: usize,
}

impl<S: Scalar> Region<S> {
    pub fn empty(dim: usize) -> Self {
        Region { dim, boxes: Vec::new(), max_boxes: DEFAULT_MAX_BOXES }
    }

    pub fn from_box(b: Aab<S>) -> Self {
        Region { dim: b.dim(), boxes: vec![b], max_boxes: DEFAULT_MAX_BOXES }
    }

    pub fn point(p: &[S]) -> Self {
        Self::from_box(Aab::point(p))
    }

    pub fn cube(center: &[S], rad: &S) -> Self {
        Self::from_box(Aab::cube(center, rad))
    }

    /// Union of arbitrary (possibly overlapping) boxes.
    pub fn from_boxes(dim: usize, boxes: Vec<Aab<S>>) -> Result<Self> {
        Self::from_boxes_with_limit(dim, boxes, DEFAULT_MAX_BOXES)
    }

    pub fn from_boxes_with_limit(dim: usize, boxes: Vec<Aab<S>>, max_boxes: usize) -> Result<Self> {
        for b in &boxes {
            if b.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: b.dim() });
            }
        }
        let boxes = disjoint_union(boxes, max_boxes)?;
        Region { dim, boxes, max_boxes }.finish()
    }

    pub fn with_max_boxes(mut self, max_boxes: usize) -> Self {
        self.max_boxes = max_boxes;
        self
    }

    pub fn max_boxes(&self) -> usize {
        self.max_boxes
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn boxes(&self) -> &[Aab<S>] {
        &self.boxes
    }

    pub fn len(&self) -> usize {
        self.boxes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    pub fn measure(&self) -> S {
        self.boxes.iter().fold(S::zero(), |acc, b| acc + b.volume())
    }

    pub fn contains(&self, p: &[S]) -> bool {
        self.boxes.iter().any(|b| b.contains(p))
    }

    /// `other ⊆ self`, decided exactly.
    pub fn contains_region(&self, other: &Region<S>) -> bool {
        other.boxes.iter().all(|b| {
            let mut pieces = vec![b.clone()];
            for a in &self.boxes {
                pieces = pieces
                    .into_iter()
                    .flat_map(|p| if p.intersects(a) { p.cover_minus(a) } else { vec![p] })
                    .collect();
                if pieces.is_empty() {
                    return true;
                }
            }
            pieces.is_empty()
        })
    }

    /// Checks the interior-disjointness invariant by brute force.
    pub fn is_interior_disjoint(&self) -> bool {
        self.boxes.iter().enumerate().all(|(i, a)| {
            self.boxes[i + 1..].iter().all(|b| !a.interiors_overlap(b))
        })
    }

    /// `{p : |p - q| <= r for some q in self}`.
    pub fn minkowski_expand(&self, r: &S) -> Result<Self> {
        if *r < S::zero() {
            return Err(Error::Precondition("expansion radius must be nonnegative".into()));
        }
        if r.is_zero() || self.is_empty() {
            return Ok(self.clone());
        }
        let grown = self.boxes.iter().map(|b| b.expanded(r)).collect();
        let boxes = disjoint_union(grown, self.max_boxes)?;
        Region { dim: self.dim, boxes, max_boxes: self.max_boxes }.finish()
    }

    /// Removes the cube of radius `rad` about `center`.
    ///
    /// With `open = true` the open cube is removed and the result is exact.
    /// With `open = false` the closed cube is removed; the result is then not
    /// closed and is stored as its closure (same measure, same interior).
    pub fn subtract_cube(&self, center: &[S], rad: &S, open: bool) -> Result<Self> {
        self.check_dim(center.len())?;
        if *rad <= S::zero() {
            return Err(Error::Precondition("cube radius must be positive".into()));
        }
        let cube = Aab::cube(center, rad);
        let mut out = Vec::with_capacity(self.boxes.len() + 4);
        for b in &self.boxes {
            if open {
                out.extend(b.minus_open(&cube));
            } else if b.interiors_overlap(&cube) || (b.is_degenerate() && b.intersects(&cube)) {
                out.extend(closure_minus_closed(b, &cube));
            } else {
                out.push(b.clone());
            }
            if out.len() > self.max_boxes {
                return Err(Error::TooManyBoxes { limit: self.max_boxes });
            }
        }
        Region { dim: self.dim, boxes: out, max_boxes: self.max_boxes }.finish()
    }

    /// Exact intersection with the closed cube of radius `rad` about `center`.
    pub fn intersect_cube(&self, center: &[S], rad: &S) -> Result<Self> {
        self.check_dim(center.len())?;
        if *rad < S::zero() {
            return Err(Error::Precondition("cube radius must be nonnegative".into()));
        }
        let cube = Aab::cube(center, rad);
        let boxes = self.boxes.iter().filter_map(|b| b.intersection(&cube)).collect();
        Region { dim: self.dim, boxes, max_boxes: self.max_boxes }.finish()
    }

    /// Center of the largest-volume box; ties go to the lexicographically
    /// smallest lower corner.
    pub fn pick_point(&self) -> Option<Vec<S>> {
        let mut best: Option<(&Aab<S>, S)> = None;
        for b in &self.boxes {
            let v = b.volume();
            let better = match &best {
                None => true,
                Some((cur, cv)) => match cmp(&v, cv) {
                    Ordering::Greater => true,
                    Ordering::Less => false,
                    Ordering::Equal => cmp_lex(b.lo(), cur.lo()) == Ordering::Less,
                },
            };
            if better {
                best = Some((b, v));
            }
        }
        best.map(|(b, _)| b.center())
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found });
        }
        Ok(())
    }

    fn finish(mut self) -> Result<Self> {
        self.boxes = normalize(std::mem::take(&mut self.boxes));
        if self.boxes.len() > self.max_boxes {
            return Err(Error::TooManyBoxes { limit: self.max_boxes });
        }
        Ok(self)
    }
}

impl<S: Scalar> PartialEq for Region<S> {
    /// Set equality.
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.contains_region(other) && other.contains_region(self)
    }
}

/// Closure of `b` minus the closed cube: the open-subtraction pieces minus
/// the zero-thickness slabs lying on the cube's boundary.
fn closure_minus_closed<S: Scalar>(b: &Aab<S>, cube: &Aab<S>) -> Vec<Aab<S>> {
    if b.is_degenerate() {
        // A flat box contributes no measure; keep only its parts off the cube.
        return b.cover_minus(cube);
    }
    b.minus_open(cube).into_iter().filter(|p| !p.is_degenerate()).collect()
}

/// Rewrites a list of closed boxes as an interior-disjoint list with the
/// same union.
fn disjoint_union<S: Scalar>(mut boxes: Vec<Aab<S>>, max_boxes: usize) -> Result<Vec<Aab<S>>> {
    // Full boxes first so flat boxes are clipped against them.
    boxes.sort_by(|a, b| cmp(&b.volume(), &a.volume()));
    let mut accepted: Vec<Aab<S>> = Vec::with_capacity(boxes.len());
    for b in boxes {
        let mut pieces = vec![b];
        for a in &accepted {
            if pieces.is_empty() {
                break;
            }
            let mut next = Vec::with_capacity(pieces.len());
            for p in pieces {
                let split = p.intersects(a) && (p.interiors_overlap(a) || p.is_degenerate());
                if split {
                    next.extend(p.cover_minus(a));
                } else {
                    next.push(p);
                }
            }
            pieces = next;
        }
        accepted.extend(pieces);
        if accepted.len() > max_boxes {
            return Err(Error::TooManyBoxes { limit: max_boxes });
        }
    }
    Ok(accepted)
}

/// Merges boxes that share a full facet and drops flat boxes already
/// covered by a single other box. Repeats until stable.
fn normalize<S: Scalar>(mut boxes: Vec<Aab<S>>) -> Vec<Aab<S>> {
    if boxes.len() < 2 {
        return boxes;
    }
    let dim = boxes[0].dim();
    loop {
        let before = boxes.len();
        for k in 0..dim {
            boxes = merge_along(boxes, k);
        }
        boxes = drop_covered_flat(boxes);
        if boxes.len() == before {
            break;
        }
    }
    boxes
}

fn merge_along<S: Scalar>(mut boxes: Vec<Aab<S>>, k: usize) -> Vec<Aab<S>> {
    let dim = boxes[0].dim();
    let key_cmp = |a: &Aab<S>, b: &Aab<S>| -> Ordering {
        for ax in (0..dim).filter(|&ax| ax != k) {
            let o = cmp(&a.lo[ax], &b.lo[ax]).then_with(|| cmp(&a.hi[ax], &b.hi[ax]));
            if o != Ordering::Equal {
                return o;
            }
        }
        Ordering::Equal
    };
    boxes.sort_by(|a, b| key_cmp(a, b).then_with(|| cmp(&a.lo[k], &b.lo[k])));
    let mut out: Vec<Aab<S>> = Vec::with_capacity(boxes.len());
    for b in boxes {
        if let Some(last) = out.last_mut() {
            if key_cmp(last, &b) == Ordering::Equal && b.lo[k] <= last.hi[k] {
                if b.hi[k] > last.hi[k] {
                    last.hi[k] = b.hi[k].clone();
                }
                continue;
            }
        }
        out.push(b);
    }
    out
}

fn drop_covered_flat<S: Scalar>(boxes: Vec<Aab<S>>) -> Vec<Aab<S>> {
    if !boxes.iter().any(Aab::is_degenerate) {
        return boxes;
    }
    let mut keep = vec![true; boxes.len()];
    for i in 0..boxes.len() {
        if !boxes[i].is_degenerate() {
            continue;
        }
        keep[i] = !boxes
            .iter()
            .enumerate()
            .any(|(j, other)| j != i && keep[j] && other.contains_box(&boxes[i]));
    }
    boxes.into_iter().zip(keep).filter_map(|(b, k)| k.then_some(b)).collect()
}

/// Line-delimited text encoding: a header, `dim <d>`, then one
/// `box lo_1 .. lo_d hi_1 .. hi_d` record per box.
pub fn write_region<S: Scalar>(r: &Region<S>) -> String {
    let mut out = String::from("# lipctl region v1\n");
    let _ = writeln!(out, "dim {}", r.dim());
    for b in r.boxes() {
        out.push_str("box");
        for v in b.lo().iter().chain(b.hi()) {
            out.push(' ');
            out.push_str(&v.encode());
        }
        out.push('\n');
    }
    out
}

pub fn parse_region<S: Scalar>(text: &str) -> Result<Region<S>> {
    let mut dim = None;
    let mut boxes = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line_no = no + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut toks = line.split_whitespace();
        match toks.next() {
            Some("dim") => {
                let d: usize = toks
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| Error::parse(line_no, "bad dim record"))?;
                dim = Some(d);
            }
            Some("box") => {
                let d = dim.ok_or_else(|| Error::parse(line_no, "box before dim"))?;
                let vals = toks
                    .map(|t| S::decode(t).ok_or_else(|| Error::parse(line_no, format!("bad number {t:?}"))))
                    .collect::<Result<Vec<S>>>()?;
                if vals.len() != 2 * d {
                    return Err(Error::parse(line_no, format!("expected {} numbers", 2 * d)));
                }
                let hi = vals[d..].to_vec();
                let lo = vals[..d].to_vec();
                boxes.push(Aab::new(lo, hi).map_err(|e| Error::parse(line_no, e.to_string()))?);
            }
            Some(other) => return Err(Error::parse(line_no, format!("unknown record {other:?}"))),
            None => {}
        }
    }
    let dim = dim.ok_or_else(|| Error::parse(0, "missing dim record"))?;
    let region = Region { dim, boxes, max_boxes: DEFAULT_MAX_BOXES };
    if !region.is_interior_disjoint() {
        return Err(Error::parse(0, "boxes overlap"));
    }
    Ok(region)
}
