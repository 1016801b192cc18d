//! Rectangle coverings of the pairs `(i, j)` whose sum lands in a range.

use std::fmt;
use std::sync::OnceLock;

use crate::engine::{self, Ctx, EngineConfig};
use crate::error::Result;
use crate::model::{Instance, SparseSet, SparseVec};

/// A pair of 1-based inclusive index intervals `I × J` into sorted `A`, `B`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexRect {
    pub i_lo: usize,
    pub i_hi: usize,
    pub j_lo: usize,
    pub j_hi: usize,
}

impl IndexRect {
    pub fn new(i_lo: usize, i_hi: usize, j_lo: usize, j_hi: usize) -> Self {
        debug_assert!(i_lo >= 1 && i_lo <= i_hi && j_lo >= 1 && j_lo <= j_hi);
        Self { i_lo, i_hi, j_lo, j_hi }
    }

    /// `None` when either side is empty.
    pub fn try_new(i_lo: usize, i_hi: usize, j_lo: usize, j_hi: usize) -> Option<Self> {
        (i_lo >= 1 && j_lo >= 1 && i_lo <= i_hi && j_lo <= j_hi)
            .then_some(Self { i_lo, i_hi, j_lo, j_hi })
    }

    pub fn whole(n: usize, m: usize) -> Self {
        Self::new(1, n, 1, m)
    }

    pub fn rows(&self) -> usize {
        self.i_hi - self.i_lo + 1
    }

    pub fn cols(&self) -> usize {
        self.j_hi - self.j_lo + 1
    }

    pub fn area(&self) -> u64 {
        self.rows() as u64 * self.cols() as u64
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        (self.i_lo..=self.i_hi).contains(&i) && (self.j_lo..=self.j_hi).contains(&j)
    }

    pub fn intersects(&self, other: &IndexRect) -> bool {
        self.i_lo <= other.i_hi
            && other.i_lo <= self.i_hi
            && self.j_lo <= other.j_hi
            && other.j_lo <= self.j_hi
    }

    pub fn fits(&self, n: usize, m: usize) -> bool {
        self.i_lo >= 1 && self.i_lo <= self.i_hi && self.i_hi <= n
            && self.j_lo >= 1 && self.j_lo <= self.j_hi && self.j_hi <= m
    }

    pub fn a_part<'a>(&self, a: &'a SparseSet) -> &'a [i64] {
        a.index_range(self.i_lo, self.i_hi)
    }

    pub fn b_part<'a>(&self, b: &'a SparseSet) -> &'a [i64] {
        b.index_range(self.j_lo, self.j_hi)
    }

    /// Smallest sum inside the rectangle.
    pub fn min_sum(&self, a: &SparseSet, b: &SparseSet) -> i64 {
        a.as_slice()[self.i_lo - 1] + b.as_slice()[self.j_lo - 1]
    }

    pub fn max_sum(&self, a: &SparseSet, b: &SparseSet) -> i64 {
        a.as_slice()[self.i_hi - 1] + b.as_slice()[self.j_hi - 1]
    }
}

impl fmt::Display for IndexRect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} {}", self.i_lo, self.i_hi, self.j_lo, self.j_hi)
    }
}

/// An ordered family of rectangles built for one particular instance.
#[derive(Clone, Debug, Default)]
pub struct Covering {
    pub rects: Vec<IndexRect>,
    pub is_unique: bool,
    pub is_rectangle: bool,
    cost: OnceLock<u64>,
}

impl PartialEq for Covering {
    fn eq(&self, other: &Self) -> bool {
        self.rects == other.rects
            && self.is_unique == other.is_unique
            && self.is_rectangle == other.is_rectangle
    }
}

impl Eq for Covering {}

impl Covering {
    /// A covering the constructing algorithm claims to be unique.
    pub fn unique(rects: Vec<IndexRect>) -> Self {
        Self { rects, is_unique: true, is_rectangle: true, cost: OnceLock::new() }
    }

    pub fn whole(n: usize, m: usize) -> Self {
        Self::unique(vec![IndexRect::whole(n, m)])
    }

    pub fn len(&self) -> usize {
        self.rects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rects.is_empty()
    }

    /// `Σ |A_I + B_J|`, computed on first use for the instance the
    /// covering was built for.
    pub fn cost(&self, a: &SparseSet, b: &SparseSet) -> u64 {
        *self.cost.get_or_init(|| covering_cost(&self.rects, a, b))
    }

    pub(crate) fn set_cost(&self, cost: u64) {
        let _ = self.cost.set(cost);
    }

    /// One `I_lo I_hi J_lo J_hi` line per rectangle.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for r in &self.rects {
            s.push_str(&r.to_string());
            s.push('\n');
        }
        s
    }

    pub fn parse_dump(text: &str) -> Option<Self> {
        let mut rects = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let v: Vec<usize> = line
                .split_whitespace()
                .map(|t| t.parse().ok())
                .collect::<Option<_>>()?;
            if v.len() != 4 {
                return None;
            }
            rects.push(IndexRect::try_new(v[0], v[1], v[2], v[3])?);
        }
        Some(Self::unique(rects))
    }

    /// True when no two rectangles share an index pair.
    pub fn is_disjoint(&self) -> bool {
        let mut rects = self.rects.clone();
        rects.sort_by_key(|r| (r.i_lo, r.j_lo));
        for (k, r) in rects.iter().enumerate() {
            for s in &rects[k + 1..] {
                if s.i_lo > r.i_hi {
                    break;
                }
                if r.intersects(s) {
                    return false;
                }
            }
        }
        true
    }
}

fn covering_cost(rects: &[IndexRect], a: &SparseSet, b: &SparseSet) -> u64 {
    let cfg = EngineConfig::default();
    rects
        .iter()
        .map(|r| {
            let (x, y) = (r.a_part(a), r.b_part(b));
            engine::sumset_slices(x, y, &cfg).len() as u64
        })
        .sum()
}

/// `⋃ (A_I + B_J) ∩ [lo, hi]` over the rectangles, plus the covering cost.
pub fn materialize_sumset(inst: &Instance, cov: &Covering, ctx: &mut Ctx) -> Result<(SparseSet, u64)> {
    let mut out = Vec::new();
    let mut cost = 0;
    for r in &cov.rects {
        let sums = engine::sumset_metered(r.a_part(&inst.a), r.b_part(&inst.b), &ctx.cfg, &mut ctx.meter)?;
        cost += sums.len() as u64;
        out.extend(sums.into_iter().filter(|&s| s >= inst.lo && s <= inst.hi));
    }
    cov.set_cost(cost);
    out.sort_unstable();
    out.dedup();
    Ok((SparseSet::from_sorted_any(out), cost))
}

/// `(f ⋆ g)` on `[lo, hi]` as a sum of per-rectangle convolutions. Rectangle
/// indices are ranks into the entries of `f` and `g`; the covering must be
/// unique or values are double counted.
pub fn materialize_convolution(
    f: &SparseVec,
    g: &SparseVec,
    lo: i64,
    hi: i64,
    cov: &Covering,
    ctx: &mut Ctx,
) -> Result<SparseVec> {
    let bound = ctx.cfg.value_bound;
    let mut acc: Vec<(i64, u128)> = Vec::new();
    for r in &cov.rects {
        let fs = &f.entries()[r.i_lo - 1..r.i_hi];
        let gs = &g.entries()[r.j_lo - 1..r.j_hi];
        let part = engine::run_raw(fs, gs, &ctx.cfg, &mut ctx.meter)?;
        acc.extend(part.into_iter().filter(|&(s, _)| s >= lo && s <= hi));
    }
    acc.sort_unstable_by_key(|&(s, _)| s);
    let mut merged: Vec<(i64, u128)> = Vec::new();
    for (s, v) in acc {
        match merged.last_mut() {
            Some(last) if last.0 == s => last.1 += v,
            _ => merged.push((s, v)),
        }
    }
    let entries = engine::check_bound(merged, bound)?;
    Ok(SparseVec::from_sorted_unchecked(entries, bound))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub covering: bool,
    pub unique: bool,
    pub rectangle: bool,
    pub cost: u64,
    /// In-range pairs that no rectangle contains.
    pub uncovered: u64,
    /// In-range pairs contained in two or more rectangles.
    pub multiply_covered: u64,
}

impl ValidationReport {
    pub fn is_unique_rectangle_covering(&self) -> bool {
        self.covering && self.unique && self.rectangle
    }
}

/// Exhaustive check over every index pair. Quadratic; meant for tests.
pub fn validate_covering(inst: &Instance, cov: &Covering) -> ValidationReport {
    let (n, m) = (inst.a.len(), inst.b.len());
    let rectangle = cov.rects.iter().all(|r| r.fits(n, m));
    let mut counts = vec![0u32; n * m];
    let mut cost = 0u64;
    let mut sums = Vec::new();
    for r in cov.rects.iter().filter(|r| r.fits(n, m)) {
        sums.clear();
        for i in r.i_lo..=r.i_hi {
            let ai = inst.a.as_slice()[i - 1];
            let row = &mut counts[(i - 1) * m..i * m];
            for j in r.j_lo..=r.j_hi {
                row[j - 1] += 1;
                sums.push(ai + inst.b.as_slice()[j - 1]);
            }
        }
        sums.sort_unstable();
        sums.dedup();
        cost += sums.len() as u64;
    }
    let (mut uncovered, mut multiply_covered) = (0, 0);
    for (i, &ai) in inst.a.as_slice().iter().enumerate() {
        for (j, &bj) in inst.b.as_slice().iter().enumerate() {
            let s = ai + bj;
            if s < inst.lo || s > inst.hi {
                continue;
            }
            match counts[i * m + j] {
                0 => uncovered += 1,
                1 => {}
                _ => multiply_covered += 1,
            }
        }
    }
    ValidationReport {
        covering: uncovered == 0,
        unique: uncovered == 0 && multiply_covered == 0,
        rectangle,
        cost,
        uncovered,
        multiply_covered,
    }
}
