//! Interval-restricted sumsets through a `q × q` block grid.
//!
//! Cutting `A` and `B` into `q` consecutive blocks each, the rectangles on
//! one block diagonal have pairwise disjoint sumsets, so the interior ones
//! cost at most `out` per diagonal, and only two per diagonal can straddle
//! the interval ends. Choosing `q ≈ √(nm/õut)` balances the two terms.

use crate::covering::{materialize_convolution, Covering, IndexRect};
use crate::engine::Ctx;
use crate::error::Result;
use crate::model::{Instance, SparseSet, SparseVec};
use crate::output_size::{solve_with_covering, CoveredRun};

/// Smallest `q ≥ 1` with `q²·est ≥ nm`.
pub fn grid_size(n: usize, m: usize, est: u64) -> usize {
    let nm = n as u128 * m as u128;
    let est = est.max(1) as u128;
    let mut q = ((nm as f64 / est as f64).sqrt().floor() as u128).max(1);
    while q * q * est < nm {
        q += 1;
    }
    while q > 1 && (q - 1) * (q - 1) * est >= nm {
        q -= 1;
    }
    q as usize
}

/// Consecutive index blocks `[lo, hi]` (1-based) of size `⌈len/parts⌉`.
pub(crate) fn blocks(len: usize, parts: usize) -> Vec<(usize, usize)> {
    let size = len.div_ceil(parts.max(1));
    (0..len.div_ceil(size)).map(|k| (k * size + 1, ((k + 1) * size).min(len))).collect()
}

/// A unique rectangle covering of `(A, B, [lo, hi])` of cost at most
/// `20·√(nm·est)` whenever `est ≥ out`.
pub fn find_interval_covering(a: &SparseSet, b: &SparseSet, lo: i64, hi: i64, est: u64) -> Covering {
    let (n, m) = (a.len(), b.len());
    if n == 0 || m == 0 {
        return Covering::unique(Vec::new());
    }
    let q = grid_size(n, m, est);
    let (av, bv) = (a.as_slice(), b.as_slice());
    let a_blocks = blocks(n, q.min(n));
    let b_blocks = blocks(m, q.min(m));
    let mut rects = Vec::new();
    for &(i_lo, i_hi) in &a_blocks {
        for &(j_lo, j_hi) in &b_blocks {
            if av[i_lo - 1] + bv[j_lo - 1] <= hi && av[i_hi - 1] + bv[j_hi - 1] >= lo {
                rects.push(IndexRect::new(i_lo, i_hi, j_lo, j_hi));
            }
        }
    }
    Covering::unique(rects)
}

/// Exact `(A + B) ∩ [lo, hi]`.
pub fn solve_interval(a: &SparseSet, b: &SparseSet, lo: i64, hi: i64) -> SparseSet {
    solve_interval_with(a, b, lo, hi, &mut Ctx::default())
        .expect("unbudgeted sumsets cannot fail")
        .result
}

pub fn solve_interval_with(a: &SparseSet, b: &SparseSet, lo: i64, hi: i64, ctx: &mut Ctx) -> Result<CoveredRun> {
    if a.is_empty() || b.is_empty() || lo > hi {
        let inst = Instance { a: a.clone(), b: b.clone(), lo, hi, out_estimate: None };
        return Ok(empty_run(inst));
    }
    let inst = Instance::new(a.clone(), b.clone(), lo, hi)?;
    solve_with_covering(&inst, ctx, |i, est, _| Ok(find_interval_covering(&i.a, &i.b, i.lo, i.hi, est)))
}

pub(crate) fn empty_run(instance: Instance) -> CoveredRun {
    CoveredRun {
        result: SparseSet::empty(),
        covering: Covering::unique(Vec::new()),
        out_estimate: 0,
        cost: 0,
        trace: Vec::new(),
        instance,
    }
}

/// Trims `f` to the entries that survive normalization of its support.
pub(crate) fn trim_to(f: &SparseVec, len: usize) -> SparseVec {
    SparseVec::from_sorted_unchecked(f.entries()[..len].to_vec(), f.value_bound())
}

/// Exact `(f ⋆ g)` on `[lo, hi]`, values included.
pub fn convolve_interval(f: &SparseVec, g: &SparseVec, lo: i64, hi: i64) -> Result<SparseVec> {
    convolve_interval_with(f, g, lo, hi, &mut Ctx::default())
}

pub fn convolve_interval_with(f: &SparseVec, g: &SparseVec, lo: i64, hi: i64, ctx: &mut Ctx) -> Result<SparseVec> {
    let run = solve_interval_with(&f.support(), &g.support(), lo, hi, ctx)?;
    if run.covering.is_empty() {
        return Ok(SparseVec::from_sorted_unchecked(Vec::new(), ctx.cfg.value_bound));
    }
    let (f, g) = (trim_to(f, run.instance.a.len()), trim_to(g, run.instance.b.len()));
    materialize_convolution(&f, &g, lo, hi, &run.covering, ctx)
}
