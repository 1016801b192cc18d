//! Output-sensitive subset sums `S(X, t)` built from prefix-restricted sumsets.
//!
//! Heavy elements (above `u / (β·L³)`, or `u / (β·L)` in the practical
//! profile, with `L = ⌈log₂ t⌉`) are few in any subset with sum at most `u`,
//! so random color classes separate them and folding `{0} ∪ class` over the
//! classes finds every such sum. Light elements are split at random into two
//! halves, each solved for target `⌊(1+ε)u/2⌋`, and the three partial
//! answers are combined. Every step intersects genuine partial subset sums,
//! so the output never contains a non-sum; randomness only risks missing one.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::engine::{Ctx, EngineConfig};
use crate::error::{Error, Result};
use crate::model::SparseSet;
use crate::oracle::brute_subset_sums;
use crate::prefix::{ceil_log2, solve_prefix_with, CoveringOptions};
use crate::relaxed::{round_zeta, solve_prefix_relaxed_with};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Profile {
    /// Heavy threshold `u/(βL³)` and `2β²L⁶` colors.
    Theoretical,
    /// Heavy threshold `u/(βL)` and `2κ²` colors for `κ = ⌈u/threshold⌉`.
    Practical,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SSParams {
    pub beta: u32,
    pub profile: Profile,
    pub fail_prob: f64,
    pub rng_seed: u64,
    pub zeta: Option<f64>,
    pub base_cutoff: usize,
    pub engine: EngineConfig,
}

impl Default for SSParams {
    fn default() -> Self {
        Self {
            beta: 2,
            profile: Profile::Practical,
            fail_prob: 0.01,
            rng_seed: 0x5eed_5eed,
            zeta: None,
            base_cutoff: 8,
            engine: EngineConfig::default(),
        }
    }
}

impl SSParams {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    pub fn with_profile(mut self, profile: Profile) -> Self {
        self.profile = profile;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.beta == 0 {
            return Err(Error::InvalidParameter("beta must be at least 1".into()));
        }
        if !(self.fail_prob > 0.0 && self.fail_prob < 1.0) {
            return Err(Error::InvalidParameter(format!("fail_prob must lie in (0, 1), got {}", self.fail_prob)));
        }
        if let Some(z) = self.zeta {
            round_zeta(z)?;
        }
        self.engine.validate()
    }
}

/// `⌈log₂ t⌉`, at least 1.
pub fn log_t(t: i64) -> u32 {
    ceil_log2(t.max(2) as usize)
}

/// Derived constants for one target `t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Schedule {
    pub log_t: u32,
    pub epsilon: f64,
    pub repeats: u32,
    profile: Profile,
    beta: u32,
}

impl Schedule {
    pub fn new(t: i64, params: &SSParams) -> Self {
        let l = log_t(t);
        let repeats = (3.0 * (t.max(2) as f64 / params.fail_prob).log2()).ceil() as u32;
        Self { log_t: l, epsilon: 1.0 / l as f64, repeats, profile: params.profile, beta: params.beta }
    }

    /// Elements strictly above this are heavy.
    pub fn heavy_threshold(&self, u: i64) -> f64 {
        let l = self.log_t as f64;
        match self.profile {
            Profile::Theoretical => u as f64 / (self.beta as f64 * l.powi(3)),
            Profile::Practical => u as f64 / (self.beta as f64 * l),
        }
    }

    pub fn colors(&self, u: i64) -> u64 {
        let l = self.log_t as f64;
        let b = self.beta as f64;
        let c = match self.profile {
            Profile::Theoretical => 2.0 * b * b * l.powi(6),
            Profile::Practical => {
                let kappa = (u as f64 / self.heavy_threshold(u).max(f64::MIN_POSITIVE)).ceil();
                2.0 * kappa * kappa
            }
        };
        c.ceil().clamp(1.0, u64::MAX as f64 / 2.0) as u64
    }

    /// `⌊(1+ε)u/2⌋` in exact integer arithmetic.
    pub fn child_target(&self, u: i64) -> i64 {
        let l = self.log_t as i128;
        ((u as i128 * (l + 1)) / (2 * l)) as i64
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SubsetSumStats {
    pub prefix_calls: u64,
    pub large_calls: u64,
    pub base_cases: u64,
    pub max_depth: u32,
    pub cost: u64,
}

struct Runner<'p> {
    params: &'p SSParams,
    sched: Schedule,
    rng: ChaCha8Rng,
    ctx: Ctx,
    stats: SubsetSumStats,
}

impl Runner<'_> {
    fn prefix(&mut self, a: &SparseSet, b: &SparseSet, u: i64) -> Result<SparseSet> {
        self.stats.prefix_calls += 1;
        let run = match self.params.zeta {
            None => solve_prefix_with(a, b, u, &mut self.ctx, CoveringOptions::default())?,
            Some(z) => solve_prefix_relaxed_with(a, b, u, z, &mut self.ctx)?,
        };
        self.stats.cost += run.cost;
        Ok(run.result)
    }

    fn large(&mut self, x: &[i64], u: i64) -> Result<SparseSet> {
        self.stats.large_calls += 1;
        let colors = self.sched.colors(u);
        let mut out = SparseSet::singleton(0)?;
        for _ in 0..self.sched.repeats {
            let mut classes: BTreeMap<u64, Vec<i64>> = BTreeMap::new();
            for &v in x {
                classes.entry(self.rng.gen_range(0..colors)).or_default().push(v);
            }
            let mut round = SparseSet::singleton(0)?;
            for class in classes.into_values() {
                let class = SparseSet::from_unsorted(std::iter::once(0).chain(class))?;
                round = self.prefix(&round, &class, u)?;
            }
            out = out.union(&round);
        }
        Ok(out)
    }

    fn reduce(&mut self, x: Vec<i64>, u: i64, depth: u32) -> Result<SparseSet> {
        assert!(
            depth <= self.sched.log_t + 3,
            "recursion depth {depth} exceeds log t + 3 = {}",
            self.sched.log_t + 3
        );
        self.stats.max_depth = self.stats.max_depth.max(depth);
        let x: Vec<i64> = x.into_iter().filter(|&v| v <= u).collect();
        if x.is_empty() || u <= 0 {
            return SparseSet::singleton(0);
        }
        let thr = self.sched.heavy_threshold(u);
        let (heavy, light): (Vec<i64>, Vec<i64>) = x.into_iter().partition(|&v| v as f64 > thr);
        let big = if heavy.is_empty() { SparseSet::singleton(0)? } else { self.large(&heavy, u)? };
        if light.len() <= self.params.base_cutoff {
            self.stats.base_cases += 1;
            let small = brute_subset_sums(&SparseSet::from_unsorted(light)?, u);
            return if heavy.is_empty() { Ok(small) } else { self.prefix(&big, &small, u) };
        }
        let (mut x1, mut x2) = (Vec::new(), Vec::new());
        for v in light {
            if self.rng.gen_bool(0.5) { x1.push(v) } else { x2.push(v) }
        }
        let child = self.sched.child_target(u);
        let o1 = self.reduce(x1, child, depth + 1)?;
        let o2 = self.reduce(x2, child, depth + 1)?;
        let both = self.prefix(&o1, &o2, u)?;
        if heavy.is_empty() {
            Ok(both)
        } else {
            self.prefix(&both, &big, u)
        }
    }
}

fn check_elements(x: &SparseSet) -> Result<()> {
    match x.min() {
        Some(v) if v <= 0 => Err(Error::InvalidParameter(format!("subset-sum elements must be positive, got {v}"))),
        _ => Ok(()),
    }
}

/// `S(X, u)` for elements that are all heavy with respect to `u` and `t`.
/// Always a subset of the true answer; equal to it with probability `1 − δ`.
pub fn subset_sums_large(x: &SparseSet, u: i64, t: i64, params: &SSParams) -> Result<SparseSet> {
    params.validate()?;
    check_elements(x)?;
    if u > t {
        return Err(Error::InvalidParameter(format!("u = {u} exceeds t = {t}")));
    }
    let sched = Schedule::new(t, params);
    let thr = sched.heavy_threshold(u);
    if let Some(v) = x.iter().find(|&v| (v as f64) < thr || v > u) {
        return Err(Error::InvalidParameter(format!("element {v} is not heavy for u = {u}")));
    }
    if u < 0 {
        return Ok(SparseSet::empty());
    }
    let mut r = Runner {
        params,
        sched,
        rng: ChaCha8Rng::seed_from_u64(params.rng_seed),
        ctx: Ctx::new(params.engine.clone()),
        stats: SubsetSumStats::default(),
    };
    r.large(x.as_slice(), u)
}

/// `S(X, t)`: every subset sum of `X` that is at most `t`.
pub fn subset_sums(x: &SparseSet, t: i64, params: &SSParams) -> Result<SparseSet> {
    Ok(subset_sums_with(x, t, params)?.0)
}

/// As [`subset_sums`], with every prefix sumset computed through the relaxed covering.
pub fn subset_sums_relaxed(x: &SparseSet, t: i64, zeta: f64, params: &SSParams) -> Result<SparseSet> {
    let params = SSParams { zeta: Some(zeta), ..params.clone() };
    Ok(subset_sums_with(x, t, &params)?.0)
}

pub fn subset_sums_with(x: &SparseSet, t: i64, params: &SSParams) -> Result<(SparseSet, SubsetSumStats)> {
    params.validate()?;
    check_elements(x)?;
    if t < 0 {
        return Ok((SparseSet::empty(), SubsetSumStats::default()));
    }
    let mut r = Runner {
        params,
        sched: Schedule::new(t, params),
        rng: ChaCha8Rng::seed_from_u64(params.rng_seed),
        ctx: Ctx::new(params.engine.clone()),
        stats: SubsetSumStats::default(),
    };
    let out = r.reduce(x.as_slice().to_vec(), t, 0)?;
    Ok((out, r.stats))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SurvivalReport {
    pub mu: f64,
    pub epsilon: f64,
    /// Random witnesses `I ⊆ Z` with `Σ(I) ≤ u` that were split.
    pub witnesses: u64,
    /// Splits where both halves of the witness stayed within `(1+ε)u/2`.
    pub survived: u64,
    pub partitions: u64,
    pub max_ratio: f64,
    pub bound: f64,
    pub violations: u64,
}

impl SurvivalReport {
    pub fn survival_rate(&self) -> f64 {
        if self.witnesses == 0 { 1.0 } else { self.survived as f64 / self.witnesses as f64 }
    }
}

/// Empirical check of the halving behaviour of subset sums on `Z`.
///
/// Partitions are enumerated exhaustively for `|Z| ≤ 12` and sampled
/// `trials` times otherwise. Needs `max(Z) ≤ u/16` and `0 ≤ ε ≤ 1/4`.
pub fn split_survival_check(z: &SparseSet, u: i64, epsilon: f64, trials: u64, seed: u64) -> Result<SurvivalReport> {
    check_elements(z)?;
    if u <= 0 {
        return Err(Error::InvalidParameter(format!("u must be positive, got {u}")));
    }
    let mu = z.max().unwrap_or(0) as f64 / u as f64;
    if mu > 1.0 / 16.0 {
        return Err(Error::InvalidParameter(format!("max(Z)/u = {mu} exceeds 1/16")));
    }
    if !(0.0..=0.25).contains(&epsilon) {
        return Err(Error::InvalidParameter(format!("epsilon must lie in [0, 1/4], got {epsilon}")));
    }
    let half = ((1.0 + epsilon) * u as f64 / 2.0).floor() as i64;
    let bound = 1.0 / (1.0 - 2.0 * epsilon - 4.0 * mu);
    let whole = brute_subset_sums(z, u).len() as f64 + 1.0;
    let zs = z.as_slice();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = SurvivalReport {
        mu,
        epsilon,
        witnesses: 0,
        survived: 0,
        partitions: 0,
        max_ratio: 0.0,
        bound,
        violations: 0,
    };

    let check_partition = |mask: &[bool], rep: &mut SurvivalReport| -> Result<()> {
        let (p1, p2): (Vec<(i64, bool)>, Vec<(i64, bool)>) = zs.iter().copied().zip(mask.iter().copied()).partition(|p| p.1);
        let s1 = brute_subset_sums(&SparseSet::new(p1.into_iter().map(|p| p.0).collect())?, half).len();
        let s2 = brute_subset_sums(&SparseSet::new(p2.into_iter().map(|p| p.0).collect())?, half).len();
        let ratio = (s1 + s2) as f64 / whole;
        rep.partitions += 1;
        rep.max_ratio = rep.max_ratio.max(ratio);
        if ratio > bound {
            rep.violations += 1;
        }
        Ok(())
    };
    if zs.len() <= 12 {
        for bits in 0u32..(1 << zs.len()) {
            let mask: Vec<bool> = (0..zs.len()).map(|k| bits >> k & 1 == 1).collect();
            check_partition(&mask, &mut rep)?;
        }
    } else {
        for _ in 0..trials {
            let mask: Vec<bool> = (0..zs.len()).map(|_| rng.gen_bool(0.5)).collect();
            check_partition(&mask, &mut rep)?;
        }
    }

    for _ in 0..trials {
        let mut witness: Vec<i64> = zs.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
        while witness.iter().sum::<i64>() > u {
            witness.swap_remove(rng.gen_range(0..witness.len()));
        }
        let (mut h1, mut h2) = (0, 0);
        for v in witness {
            if rng.gen_bool(0.5) { h1 += v } else { h2 += v }
        }
        rep.witnesses += 1;
        if h1 <= half && h2 <= half {
            rep.survived += 1;
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[i64]) -> SparseSet {
        SparseSet::new(v.to_vec()).unwrap()
    }

    #[test]
    fn schedule_constants() {
        let p = SSParams::default();
        let s = Schedule::new(1024, &p);
        assert_eq!(s.log_t, 10);
        assert_eq!(s.child_target(1000), 550);
        assert_eq!(s.colors(1000), 2 * 20 * 20);
        let s = Schedule::new(1024, &p.clone().with_profile(Profile::Theoretical));
        assert_eq!(s.colors(1000), 8_000_000);
        assert_eq!(log_t(1), 1);
        assert_eq!(log_t(2), 1);
        assert_eq!(log_t(3), 2);
    }

    #[test]
    fn examples() {
        let p = SSParams::default();
        assert_eq!(subset_sums(&set(&[1, 2, 3]), 4, &p).unwrap(), set(&[0, 1, 2, 3, 4]));
        assert_eq!(subset_sums(&set(&[]), 17, &p).unwrap(), set(&[0]));
        assert_eq!(subset_sums_large(&set(&[10]), 10, 10, &p).unwrap(), set(&[0, 10]));
        for seed in 0..20 {
            let got = subset_sums_large(&set(&[4, 5]), 9, 9, &p.clone().with_seed(seed)).unwrap();
            assert!(got.is_subset_of(&set(&[0, 4, 5, 9])));
        }
        assert_eq!(subset_sums_relaxed(&set(&[1, 2, 3]), 4, 0.5, &p).unwrap(), set(&[0, 1, 2, 3, 4]));
    }

    #[test]
    fn rejects_bad_input() {
        let p = SSParams::default();
        assert!(subset_sums(&set(&[0, 3]), 4, &p).is_err());
        assert!(subset_sums_large(&set(&[1]), 100, 100, &p).is_err());
        let bad = SSParams { fail_prob: 0.0, ..SSParams::default() };
        assert!(subset_sums(&set(&[1]), 4, &bad).is_err());
    }

    #[test]
    fn many_small_elements_recurse() {
        let x: Vec<i64> = (1..=30).collect();
        let x = set(&x);
        for profile in [Profile::Practical, Profile::Theoretical] {
            let p = SSParams::default().with_profile(profile);
            let (got, stats) = subset_sums_with(&x, 300, &p).unwrap();
            assert!(got.is_subset_of(&brute_subset_sums(&x, 300)));
            assert!(stats.max_depth <= log_t(300) + 3);
        }
    }

    #[test]
    fn survival_preconditions() {
        let z: Vec<i64> = (1..=8).collect();
        assert!(split_survival_check(&set(&z), 64, 0.1, 10, 1).is_err());
        assert!(split_survival_check(&set(&[1, 2]), 64, 0.3, 10, 1).is_err());
    }

    #[test]
    fn exhaustive_partitions_of_small_set() {
        let rep = split_survival_check(&set(&[1, 2, 3, 4]), 64, 0.0, 50, 1).unwrap();
        assert_eq!(rep.partitions, 16);
        assert_eq!(rep.violations, 0);
        assert!(rep.max_ratio <= rep.bound);
    }
}
