//! The `k` lowest-index non-zeros of `f ⋆ g` by binary search over a prefix bound.
//!
//! A probe at `u` runs the prefix solver under a work budget. If the result
//! has at least `k` entries, its first `k` are the answer and the search
//! stops there instead of narrowing to the smallest such `u`. A probe that
//! runs out of budget is treated like a `u` that is too large. If no probe
//! succeeds, every budget doubles and the search restarts.

use crate::engine::{Ctx, EngineConfig};
use crate::error::{Error, Result};
use crate::model::{SparseSet, SparseVec};
use crate::prefix::{convolve_prefix_with, solve_prefix_with, CoveringOptions};

#[derive(Clone, Debug, PartialEq)]
pub struct TopKConfig {
    pub budget_constant: f64,
    pub budget_log_exp: i32,
    pub engine: EngineConfig,
}

impl Default for TopKConfig {
    fn default() -> Self {
        Self { budget_constant: 64.0, budget_log_exp: 3, engine: EngineConfig::default() }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TopKStats {
    pub probes: u32,
    pub aborted: u32,
    pub restarts: u32,
    pub work: u64,
}

fn probe_budget(cfg: &TopKConfig, k: usize, d: i64) -> u64 {
    let log = ((2 * d + 2) as f64).log2();
    let b = cfg.budget_constant * (k as f64).powf(4.0 / 3.0) * log.powi(cfg.budget_log_exp);
    b.ceil().clamp(1.0, u64::MAX as f64 / 4.0) as u64
}

/// Shared search. `probe(u, ctx)` returns the sorted prefix result and its size.
fn search<T, P>(lo: i64, hi: i64, k: usize, cfg: &TopKConfig, mut probe: P) -> Result<(T, TopKStats)>
where
    P: FnMut(i64, &mut Ctx) -> Result<(T, usize)>,
{
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let mut stats = TopKStats::default();
    let mut budget = probe_budget(cfg, k, hi.max(0));
    loop {
        let (mut l, mut h) = (lo, hi);
        let mut last_small: Option<(i64, T)> = None;
        let mut aborted = false;
        while l <= h {
            let mid = l + (h - l) / 2;
            let mut ctx = Ctx::with_budget(cfg.engine.clone(), budget);
            stats.probes += 1;
            let res = probe(mid, &mut ctx);
            stats.work += ctx.meter.used();
            match res {
                Err(Error::BudgetExceeded) => {
                    stats.aborted += 1;
                    aborted = true;
                    h = mid - 1;
                }
                Err(e) => return Err(e),
                Ok((r, count)) if count >= k => return Ok((r, stats)),
                Ok((r, _)) => {
                    last_small = Some((mid, r));
                    l = mid + 1;
                }
            }
        }
        if let Some((u, r)) = last_small {
            if u == hi {
                return Ok((r, stats));
            }
        }
        debug_assert!(aborted);
        stats.restarts += 1;
        budget = budget.saturating_mul(2);
    }
}

fn check_non_negative(min: Option<i64>) -> Result<()> {
    match min {
        Some(x) if x < 0 => Err(Error::NegativeElement(x)),
        _ => Ok(()),
    }
}

pub fn top_k_convolution(f: &SparseVec, g: &SparseVec, k: usize) -> Result<SparseVec> {
    Ok(top_k_convolution_with(f, g, k, &TopKConfig::default())?.0)
}

pub fn top_k_convolution_with(f: &SparseVec, g: &SparseVec, k: usize, cfg: &TopKConfig) -> Result<(SparseVec, TopKStats)> {
    let (fs, gs) = (f.support(), g.support());
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if f.is_empty() || g.is_empty() {
        return Ok((SparseVec::from_sorted_unchecked(Vec::new(), cfg.engine.value_bound), TopKStats::default()));
    }
    let lo = fs.min().unwrap() + gs.min().unwrap();
    let hi = fs.max().unwrap() + gs.max().unwrap();
    let (v, stats) = search(lo, hi, k, cfg, |u, ctx| {
        let v = convolve_prefix_with(f, g, u, ctx)?;
        let len = v.len();
        Ok((v, len))
    })?;
    let mut entries = v.into_entries();
    entries.truncate(k);
    Ok((SparseVec::from_sorted_unchecked(entries, cfg.engine.value_bound), stats))
}

/// The `k` smallest elements of `A + B`.
pub fn top_k_sumset(a: &SparseSet, b: &SparseSet, k: usize) -> Result<SparseSet> {
    Ok(top_k_sumset_with(a, b, k, &TopKConfig::default())?.0)
}

pub fn top_k_sumset_with(a: &SparseSet, b: &SparseSet, k: usize, cfg: &TopKConfig) -> Result<(SparseSet, TopKStats)> {
    check_non_negative(a.min())?;
    check_non_negative(b.min())?;
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if a.is_empty() || b.is_empty() {
        return Ok((SparseSet::empty(), TopKStats::default()));
    }
    let lo = a.min().unwrap() + b.min().unwrap();
    let hi = a.max().unwrap() + b.max().unwrap();
    let (s, stats) = search(lo, hi, k, cfg, |u, ctx| {
        let s = solve_prefix_with(a, b, u, ctx, CoveringOptions::default())?.result;
        let len = s.len();
        Ok((s, len))
    })?;
    let mut v = s.into_vec();
    v.truncate(k);
    Ok((SparseSet::from_sorted_unchecked(v), stats))
}

/// `(f ⋆ g)` on `[u]` through top-k queries with `k = 1, 2, 4, …`.
pub fn prefix_via_topk(f: &SparseVec, g: &SparseVec, u: i64) -> Result<SparseVec> {
    prefix_via_topk_with(f, g, u, &TopKConfig::default())
}

pub fn prefix_via_topk_with(f: &SparseVec, g: &SparseVec, u: i64, cfg: &TopKConfig) -> Result<SparseVec> {
    if f.is_empty() || g.is_empty() {
        return Ok(SparseVec::from_sorted_unchecked(Vec::new(), cfg.engine.value_bound));
    }
    let mut k = 1;
    loop {
        let (v, _) = top_k_convolution_with(f, g, k, cfg)?;
        if v.len() < k || v.entries()[k - 1].0 > u {
            return Ok(v.restrict(i64::MIN, u));
        }
        k *= 2;
    }
}
