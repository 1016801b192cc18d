//! Prefix-restricted sumsets through a recursive staircase covering.
//!
//! Subproblems are index rectangles grouped by type `(⌈log|I|⌉, ⌈log|J|⌉)`
//! and processed largest type first. Small types go straight to the output.
//! For a large type, if there are many subproblems, their sumsets are
//! computed side by side until all but `q = ⌈õut^{1/3}⌉` have finished; the
//! finished ones are output and the stragglers are split at the middle row
//! `i`, using the largest `j` with `A_i + B_j ≤ u`. The quadrant below-right
//! of `(i, j)` has no sum `≤ u` and is dropped.

use std::collections::BTreeMap;

use crate::covering::{materialize_convolution, validate_covering, Covering, IndexRect};
use crate::engine::{CallStatus, Ctx, SteppableCall};
use crate::error::Result;
use crate::interval::{empty_run, trim_to};
use crate::model::{Instance, SparseSet, SparseVec};
use crate::output_size::{solve_with_covering, CoveredRun};

/// `⌈log₂ x⌉` with `⌈log₂ 1⌉ = 0`.
pub fn ceil_log2(x: usize) -> u32 {
    debug_assert!(x >= 1);
    usize::BITS - (x - 1).leading_zeros()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Subproblem {
    pub rect: IndexRect,
    pub x: u32,
    pub y: u32,
}

impl Subproblem {
    pub fn new(rect: IndexRect) -> Self {
        Self { rect, x: ceil_log2(rect.rows()), y: ceil_log2(rect.cols()) }
    }

    /// Sort key realizing the type order: by `x + y`, then by `x`, then position.
    fn key(&self) -> (u32, u32, usize, usize) {
        (self.x + self.y, self.x, self.rect.i_lo, self.rect.j_lo)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CoveringOptions {
    /// Validate that output plus pending subproblems form a unique covering
    /// at every batch boundary. Quadratic; for tests.
    pub check_invariants: bool,
    /// Estimates below this get the whole-grid covering.
    pub floor: u64,
}

impl Default for CoveringOptions {
    fn default() -> Self {
        Self { check_invariants: false, floor: 64 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConstructionStats {
    pub q: u64,
    pub batches: u64,
    pub splits: u64,
    pub calls_started: u64,
    pub calls_finished: u64,
    pub max_batch: usize,
}

/// Smallest `q` with `q³ ≥ est`.
pub fn cube_root_ceil(est: u64) -> u64 {
    let mut q = (est as f64).cbrt().floor() as u64;
    while (q as u128).pow(3) < est as u128 {
        q += 1;
    }
    while q > 0 && ((q - 1) as u128).pow(3) >= est as u128 {
        q -= 1;
    }
    q
}

/// Splits one subproblem. Returns the rectangle sent to the output (if
/// non-empty) and up to two children, each of strictly smaller type.
pub fn split_subproblem(rect: IndexRect, a: &SparseSet, b: &SparseSet, u: i64) -> (Option<IndexRect>, Vec<IndexRect>) {
    let (av, bv) = (a.as_slice(), b.as_slice());
    let i = (rect.i_lo + rect.i_hi) / 2;
    let col = &bv[rect.j_lo - 1..rect.j_hi];
    let j = rect.j_lo - 1 + col.partition_point(|&y| av[i - 1] + y <= u);
    let out = IndexRect::try_new(rect.i_lo, i, rect.j_lo, j);
    let below_u = |r: &IndexRect| r.min_sum(a, b) <= u;
    let children: Vec<IndexRect> = [
        IndexRect::try_new(rect.i_lo, i, j + 1, rect.j_hi),
        IndexRect::try_new(i + 1, rect.i_hi, rect.j_lo, j),
    ]
    .into_iter()
    .flatten()
    .filter(below_u)
    .collect();
    if let Some(dropped) = IndexRect::try_new(i + 1, rect.i_hi, j + 1, rect.j_hi) {
        debug_assert!(dropped.min_sum(a, b) > u);
    }
    if let Some(o) = out {
        debug_assert!(o.max_sum(a, b) <= u);
    }
    let parent = Subproblem::new(rect);
    for c in &children {
        let s = Subproblem::new(*c);
        assert!(s.x + s.y < parent.x + parent.y, "split did not shrink the type");
    }
    (out, children)
}

fn assert_staircase(batch: &[Subproblem]) {
    let mut rects: Vec<IndexRect> = batch.iter().map(|s| s.rect).collect();
    rects.sort_by_key(|r| r.i_lo);
    for w in rects.windows(2) {
        assert!(
            w[0].i_hi < w[1].i_lo && w[0].j_lo > w[1].j_hi,
            "same-type subproblems {} and {} are not a staircase",
            w[0],
            w[1]
        );
    }
}

/// A unique rectangle covering of `(A, B, [u])` for a normalized prefix
/// instance, given `out ≤ est ≤ 6·out + 9`.
pub fn covering_construction(
    a: &SparseSet,
    b: &SparseSet,
    u: i64,
    est: u64,
    ctx: &mut Ctx,
    opts: CoveringOptions,
) -> Result<(Covering, ConstructionStats)> {
    let (n, m) = (a.len(), b.len());
    let mut stats = ConstructionStats::default();
    if n == 0 || m == 0 {
        return Ok((Covering::unique(Vec::new()), stats));
    }
    if est < opts.floor || (n as u128 * m as u128) <= est as u128 {
        return Ok((Covering::whole(n, m), stats));
    }
    let q = cube_root_ceil(est);
    stats.q = q;
    let cap = 2 * q * ceil_log2(n).max(1) as u64 * ceil_log2(m).max(1) as u64;
    let inst = opts.check_invariants.then(|| Instance { a: a.clone(), b: b.clone(), lo: 0, hi: u, out_estimate: None });

    let mut queue: BTreeMap<(u32, u32, usize, usize), Subproblem> = BTreeMap::new();
    let root = Subproblem::new(IndexRect::whole(n, m));
    queue.insert(root.key(), root);
    let mut output: Vec<IndexRect> = Vec::new();

    while let Some((&(s, x, _, _), _)) = queue.last_key_value() {
        if let Some(inst) = &inst {
            let mut all = output.clone();
            all.extend(queue.values().map(|p| p.rect));
            let rep = validate_covering(inst, &Covering::unique(all));
            assert!(rep.is_unique_rectangle_covering(), "output plus pending is not a unique covering");
        }
        let batch: Vec<Subproblem> = {
            let keys: Vec<_> = queue.range((s, x, 0, 0)..=(s, x, usize::MAX, usize::MAX)).map(|(k, _)| *k).collect();
            keys.iter().map(|k| queue.remove(k).unwrap()).collect()
        };
        stats.batches += 1;
        stats.max_batch = stats.max_batch.max(batch.len());
        assert!(batch.len() as u64 <= cap, "{} subproblems of one type exceed {cap}", batch.len());
        assert_staircase(&batch);

        if s >= 64 || (1u64 << s) > est {
            let mut remaining = batch;
            if remaining.len() as u64 > q {
                remaining = race(remaining, a, b, q, ctx, &mut output, &mut stats)?;
            }
            for sub in remaining {
                stats.splits += 1;
                let (out, children) = split_subproblem(sub.rect, a, b, u);
                output.extend(out);
                for c in children {
                    let c = Subproblem::new(c);
                    queue.insert(c.key(), c);
                }
            }
        } else {
            output.extend(batch.iter().map(|p| p.rect));
        }
    }
    Ok((Covering::unique(output), stats))
}

/// Runs the batch's sumsets with doubling budgets until at most `q` are
/// unfinished. Finished rectangles are output; the rest are returned.
fn race(
    batch: Vec<Subproblem>,
    a: &SparseSet,
    b: &SparseSet,
    q: u64,
    ctx: &mut Ctx,
    output: &mut Vec<IndexRect>,
    stats: &mut ConstructionStats,
) -> Result<Vec<Subproblem>> {
    let mut calls: Vec<(Subproblem, SteppableCall<SparseSet>)> = Vec::with_capacity(batch.len());
    for sub in batch {
        let call = SteppableCall::sumset(sub.rect.a_part(a), sub.rect.b_part(b), &ctx.cfg)?;
        calls.push((sub, call));
    }
    stats.calls_started += calls.len() as u64;
    let mut budget = 1u64;
    loop {
        let mut unfinished = 0u64;
        for (_, call) in calls.iter_mut() {
            if call.status() == CallStatus::InProgress
                && call.step_metered(budget, &mut ctx.meter)? == CallStatus::InProgress
            {
                unfinished += 1;
            }
        }
        if unfinished <= q {
            break;
        }
        budget = budget.saturating_mul(2);
    }
    let mut remaining = Vec::new();
    for (sub, mut call) in calls {
        if call.status() == CallStatus::Finished {
            stats.calls_finished += 1;
            output.push(sub.rect);
        } else {
            call.cancel();
            remaining.push(sub);
        }
    }
    Ok(remaining)
}

/// Exact `(A + B) ∩ [u]`.
pub fn solve_prefix(a: &SparseSet, b: &SparseSet, u: i64) -> SparseSet {
    solve_prefix_with(a, b, u, &mut Ctx::default(), CoveringOptions::default())
        .expect("unbudgeted sumsets cannot fail")
        .result
}

pub fn solve_prefix_with(a: &SparseSet, b: &SparseSet, u: i64, ctx: &mut Ctx, opts: CoveringOptions) -> Result<CoveredRun> {
    let inst = Instance { a: a.clone(), b: b.clone(), lo: 0, hi: u, out_estimate: None };
    if a.is_empty() || b.is_empty() || u < 0 {
        return Ok(empty_run(inst));
    }
    solve_with_covering(&inst, ctx, |i, est, ctx| {
        Ok(covering_construction(&i.a, &i.b, i.hi, est, ctx, opts)?.0)
    })
}

/// Exact `(f ⋆ g)` on `[u]`, summing per-rectangle convolutions.
pub fn convolve_prefix(f: &SparseVec, g: &SparseVec, u: i64) -> Result<SparseVec> {
    convolve_prefix_with(f, g, u, &mut Ctx::default())
}

pub fn convolve_prefix_with(f: &SparseVec, g: &SparseVec, u: i64, ctx: &mut Ctx) -> Result<SparseVec> {
    let run = solve_prefix_with(&f.support(), &g.support(), u, ctx, CoveringOptions::default())?;
    if run.covering.is_empty() {
        return Ok(SparseVec::from_sorted_unchecked(Vec::new(), ctx.cfg.value_bound));
    }
    let (f, g) = (trim_to(f, run.instance.a.len()), trim_to(g, run.instance.b.len()));
    materialize_convolution(&f, &g, 0, u, &run.covering, ctx)
}
