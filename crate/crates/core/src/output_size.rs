//! Learning the output size by halving every element.
//!
//! At level `i` the instance is `(A÷2^i, B÷2^i, lo÷2^i, hi÷2^i)`. The answer
//! at level `i+1` pins the answer at level `i` inside
//! `2·S^(i+1) + {0,1,2}` plus three boundary points, so every level is
//! solved with a promised superset `T` no more than a constant factor larger
//! than its output. The size of the last promise set is the estimate `õut`.

use crate::covering::{materialize_sumset, Covering};
use crate::engine::Ctx;
use crate::error::{Error, Result};
use crate::model::{normalize, Instance, SparseSet};

/// One level of the chain: solve `(A+B) ∩ [lo, hi]` knowing it lies in `t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PromiseInstance {
    pub a: SparseSet,
    pub b: SparseSet,
    pub lo: i64,
    pub hi: i64,
    pub t: SparseSet,
    pub level: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LevelTrace {
    pub level: u32,
    pub s_len: usize,
    pub t_len: usize,
}

#[derive(Clone, Debug)]
pub struct ChainOutcome {
    pub result: SparseSet,
    /// Levels from coarsest to finest.
    pub trace: Vec<LevelTrace>,
    /// `|T^(0)|`.
    pub out_estimate: u64,
}

/// Number of halvings `r = ⌈log₂(hi − lo)⌉`, with `r = 0` for intervals of
/// one or two points.
pub fn levels(lo: i64, hi: i64) -> u32 {
    let width = (hi as i128 - lo as i128).max(0) as u128;
    if width <= 1 {
        0
    } else {
        128 - (width - 1).leading_zeros()
    }
}

fn div_pow2(x: i64, i: u32) -> i64 {
    if i >= 63 {
        if x < 0 { -1 } else { 0 }
    } else {
        x.div_euclid(1 << i)
    }
}

fn halve_set(s: &SparseSet, i: u32) -> SparseSet {
    if i == 0 {
        s.clone()
    } else if i >= 63 {
        SparseSet::from_sorted_any(if s.is_empty() { vec![] } else { vec![0] })
    } else {
        s.div_floor(1 << i)
    }
}

/// Drives the chain from the coarsest level down, calling `oracle` once per
/// level. The promise-size and level-size bounds are asserted.
pub fn solve_via_promise<F>(a: &SparseSet, b: &SparseSet, lo: i64, hi: i64, mut oracle: F) -> Result<ChainOutcome>
where
    F: FnMut(&PromiseInstance) -> Result<SparseSet>,
{
    if lo > hi {
        return Err(Error::InvalidParameter(format!("lo {lo} > hi {hi}")));
    }
    let r = levels(lo, hi);
    let mut trace = Vec::with_capacity(r as usize + 1);
    let mut prev: Option<SparseSet> = None;
    let mut t_len = 0;
    for level in (0..=r).rev() {
        let (lo_i, hi_i) = (div_pow2(lo, level), div_pow2(hi, level));
        let t = match &prev {
            None => SparseSet::from_sorted_any((lo_i..=hi_i).collect()),
            Some(s) => {
                let mut t: Vec<i64> = s.iter().flat_map(|x| [2 * x, 2 * x + 1, 2 * x + 2]).collect();
                t.extend([lo_i, lo_i + 1, hi_i]);
                t.retain(|&x| x >= lo_i && x <= hi_i);
                t.sort_unstable();
                t.dedup();
                SparseSet::from_sorted_any(t)
            }
        };
        let inst = PromiseInstance {
            a: halve_set(a, level),
            b: halve_set(b, level),
            lo: lo_i,
            hi: hi_i,
            t,
            level,
        };
        let s = oracle(&inst)?;
        if !s.is_subset_of(&inst.t) {
            return Err(Error::PromiseViolated { level, reason: "oracle output escapes the promise set".into() });
        }
        assert!(
            inst.t.len() <= 6 * s.len() + 9,
            "promise set of size {} at level {level} exceeds 6·{}+9",
            inst.t.len(),
            s.len()
        );
        t_len = inst.t.len();
        trace.push(LevelTrace { level, s_len: s.len(), t_len });
        prev = Some(s);
    }
    let result = prev.expect("chain has at least one level");
    let out = result.len();
    for lt in &trace {
        assert!(lt.s_len <= 2 * out + 2, "level {} holds {} sums, output is {out}", lt.level, lt.s_len);
    }
    Ok(ChainOutcome { result, trace, out_estimate: t_len as u64 })
}

/// A covering-based solve together with the covering used at full resolution.
/// When normalization leaves nothing, the covering is empty and `instance`
/// is the input unchanged.
#[derive(Clone, Debug)]
pub struct CoveredRun {
    pub result: SparseSet,
    pub covering: Covering,
    pub out_estimate: u64,
    pub cost: u64,
    pub trace: Vec<LevelTrace>,
    /// Normalized instance the covering indexes into.
    pub instance: Instance,
}

/// Runs the chain with a covering construction as the per-level oracle:
/// each level builds a covering from `(A, B, lo, hi, |T|)` and unions the
/// per-rectangle sumsets.
pub(crate) fn solve_with_covering<B>(inst: &Instance, ctx: &mut Ctx, mut build: B) -> Result<CoveredRun>
where
    B: FnMut(&Instance, u64, &mut Ctx) -> Result<Covering>,
{
    let norm = match normalize(inst) {
        Ok(n) => n,
        Err(Error::EmptyAfterNormalize) => {
            return Ok(CoveredRun {
                result: SparseSet::empty(),
                covering: Covering::unique(Vec::new()),
                out_estimate: 0,
                cost: 0,
                trace: Vec::new(),
                instance: inst.clone(),
            })
        }
        Err(e) => return Err(e),
    };
    let mut last: Option<(Covering, u64)> = None;
    let chain = solve_via_promise(&norm.a, &norm.b, norm.lo, norm.hi, |p| {
        let level_inst = Instance { a: p.a.clone(), b: p.b.clone(), lo: p.lo, hi: p.hi, out_estimate: None };
        let est = p.t.len() as u64;
        let cov = build(&level_inst, est, ctx)?;
        let (s, cost) = materialize_sumset(&level_inst, &cov, ctx)?;
        if p.level == 0 {
            last = Some((cov, cost));
        }
        Ok(s)
    })?;
    let (covering, cost) = last.expect("level zero always runs");
    Ok(CoveredRun {
        result: chain.result,
        covering,
        out_estimate: chain.out_estimate,
        cost,
        trace: chain.trace,
        instance: Instance { out_estimate: Some(chain.out_estimate), ..norm },
    })
}

/// `õut` with `out ≤ õut ≤ 6·out + 9`, using the interval covering at every level.
pub fn approx_out(a: &SparseSet, b: &SparseSet, lo: i64, hi: i64) -> Result<u64> {
    approx_out_with(a, b, lo, hi, &mut Ctx::default())
}

pub fn approx_out_with(a: &SparseSet, b: &SparseSet, lo: i64, hi: i64, ctx: &mut Ctx) -> Result<u64> {
    if a.is_empty() || b.is_empty() {
        return Ok(0);
    }
    let inst = Instance::new(a.clone(), b.clone(), lo, hi)?;
    let run = solve_with_covering(&inst, ctx, |i, est, _| {
        Ok(crate::interval::find_interval_covering(&i.a, &i.b, i.lo, i.hi, est))
    })?;
    Ok(run.out_estimate)
}
