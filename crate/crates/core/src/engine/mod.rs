//! Exact unrestricted sumsets and non-negative sparse convolutions.
//!
//! Three interchangeable backends: pairwise enumeration, one dense
//! transform over the full index span, and an output-sensitive sparse
//! recovery that hashes indices modulo random primes. All of them run as
//! resumable jobs so callers can interleave many computations and cancel
//! the slow ones.

mod call;
pub mod ntt;
mod sparse;

pub use call::{CallStatus, SteppableCall};

use crate::error::{Error, Result};
use crate::model::{SparseSet, SparseVec, DEFAULT_VALUE_BOUND};

use call::{BruteJob, DenseJob, Job};
use sparse::SparseJob;

/// Butterflies per work unit.
pub const BLOCK: u64 = 1024;

/// Dense transforms longer than this are refused.
pub const MAX_DENSE_LEN: usize = 1 << 27;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Backend {
    Auto,
    Brute,
    DenseTransform,
    SparseRecovery,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EngineConfig {
    pub backend: Backend,
    pub rng_seed: u64,
    /// Peeling rounds per output-size guess before the guess doubles.
    pub recovery_rounds_cap: u32,
    /// Multiplier `C` in the hashing prime range `[C·k·log(u+2), 2C·k·log(u+2)]`.
    pub bucket_constant: f64,
    pub value_bound: u64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            backend: Backend::Auto,
            rng_seed: 0x5eed_5eed,
            recovery_rounds_cap: 8,
            bucket_constant: 2.0,
            value_bound: DEFAULT_VALUE_BOUND,
        }
    }
}

impl EngineConfig {
    pub fn with_backend(backend: Backend) -> Self {
        Self { backend, ..Self::default() }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.recovery_rounds_cap < 1 {
            return Err(Error::InvalidParameter("recovery_rounds_cap must be at least 1".into()));
        }
        if !(self.bucket_constant >= 2.0) || !self.bucket_constant.is_finite() {
            return Err(Error::InvalidParameter("bucket_constant must be at least 2".into()));
        }
        Ok(())
    }
}

/// Running total of work units with an optional hard cap.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WorkMeter {
    used: u64,
    limit: Option<u64>,
}

impl WorkMeter {
    pub fn unlimited() -> Self {
        Self::default()
    }

    pub fn with_limit(limit: u64) -> Self {
        Self { used: 0, limit: Some(limit) }
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn limit(&self) -> Option<u64> {
        self.limit
    }

    pub fn charge(&mut self, units: u64) -> Result<()> {
        self.used = self.used.saturating_add(units);
        match self.limit {
            Some(l) if self.used > l => Err(Error::BudgetExceeded),
            _ => Ok(()),
        }
    }
}

/// Shared context threaded through the solvers: engine settings plus meter.
#[derive(Clone, Debug)]
pub struct Ctx {
    pub cfg: EngineConfig,
    pub meter: WorkMeter,
}

impl Ctx {
    pub fn new(cfg: EngineConfig) -> Self {
        Self { cfg, meter: WorkMeter::unlimited() }
    }

    pub fn with_budget(cfg: EngineConfig, limit: u64) -> Self {
        Self { cfg, meter: WorkMeter::with_limit(limit) }
    }
}

impl Default for Ctx {
    fn default() -> Self {
        Self::new(EngineConfig::default())
    }
}

pub(crate) fn units(raw: u64) -> u64 {
    raw.div_ceil(BLOCK).max(1)
}

fn span(v: &[(i64, u64)]) -> u64 {
    (v[v.len() - 1].0 - v[0].0) as u64
}

fn mass(v: &[(i64, u64)]) -> u128 {
    v.iter().map(|&(_, x)| x as u128).sum()
}

fn mass_u(v: &[(u64, u64)]) -> u128 {
    v.iter().map(|&(_, x)| x as u128).sum()
}

/// Rough raw-operation counts for each backend.
fn estimates(f: &[(i64, u64)], g: &[(i64, u64)], cfg: &EngineConfig) -> (u64, Option<u64>, Option<u64>) {
    let (n, m) = (f.len() as u64, g.len() as u64);
    let total_span = span(f) + span(g);
    let total_mass = mass(f).saturating_mul(mass(g));
    let brute = n * m * (1 + (n * m).max(2).ilog2() as u64);
    let dense = ntt::moduli_for(total_mass).and_then(|mods| {
        let len = (total_span as usize + 1).checked_next_power_of_two()?;
        (len <= MAX_DENSE_LEN).then(|| mods as u64 * (3 * ntt::butterflies(len) + len as u64) + len as u64)
    });
    let sparse = ntt::moduli_for(total_mass.saturating_mul(total_span as u128 + 1)).map(|mods| {
        let k = 4 * n.max(m).next_power_of_two();
        let p = cfg.bucket_constant * 1.5 * k as f64 * ((total_span + 2) as f64).log2();
        let len = ((2.0 * p) as u64).next_power_of_two() as usize;
        2 * mods as u64 * (6 * ntt::butterflies(len) + 3 * len as u64)
    });
    (brute, dense, sparse)
}

fn choose_backend(f: &[(i64, u64)], g: &[(i64, u64)], cfg: &EngineConfig) -> Backend {
    if cfg.backend != Backend::Auto {
        return cfg.backend;
    }
    if f.len() * g.len() <= 1024 {
        return Backend::Brute;
    }
    let (brute, dense, sparse) = estimates(f, g, cfg);
    let mut best = (brute, Backend::Brute);
    for (cost, b) in [(dense, Backend::DenseTransform), (sparse, Backend::SparseRecovery)] {
        if let Some(c) = cost {
            if c < best.0 {
                best = (c, b);
            }
        }
    }
    best.1
}

pub(crate) fn make_job(f: &[(i64, u64)], g: &[(i64, u64)], cfg: &EngineConfig) -> Result<Box<dyn Job>> {
    debug_assert!(!f.is_empty() && !g.is_empty());
    Ok(match choose_backend(f, g, cfg) {
        Backend::Brute | Backend::Auto => Box::new(BruteJob::new(f, g)),
        Backend::DenseTransform => Box::new(DenseJob::new(f, g)?),
        Backend::SparseRecovery => Box::new(SparseJob::new(f, g, cfg)?),
    })
}

fn indicator(s: &[i64]) -> Vec<(i64, u64)> {
    s.iter().map(|&x| (x, 1)).collect()
}

/// Runs a job to completion, charging `meter`.
pub(crate) fn run_raw(
    f: &[(i64, u64)],
    g: &[(i64, u64)],
    cfg: &EngineConfig,
    meter: &mut WorkMeter,
) -> Result<Vec<(i64, u128)>> {
    if f.is_empty() || g.is_empty() {
        return Ok(Vec::new());
    }
    let mut job = make_job(f, g, cfg)?;
    loop {
        if job.is_done() {
            return Ok(job.take_output());
        }
        let spent = job.advance()?;
        meter.charge(spent)?;
    }
}

pub(crate) fn sumset_metered(a: &[i64], b: &[i64], cfg: &EngineConfig, meter: &mut WorkMeter) -> Result<Vec<i64>> {
    let raw = run_raw(&indicator(a), &indicator(b), cfg, meter)?;
    Ok(raw.into_iter().map(|(s, _)| s).collect())
}

pub(crate) fn convolve_metered(
    f: &[(i64, u64)],
    g: &[(i64, u64)],
    cfg: &EngineConfig,
    meter: &mut WorkMeter,
) -> Result<Vec<(i64, u64)>> {
    let raw = run_raw(f, g, cfg, meter)?;
    check_bound(raw, cfg.value_bound)
}

pub(crate) fn check_bound(raw: Vec<(i64, u128)>, bound: u64) -> Result<Vec<(i64, u64)>> {
    raw.into_iter()
        .map(|(s, v)| {
            if v > bound as u128 {
                Err(Error::ValueOverflow { value: v, bound })
            } else {
                Ok((s, v as u64))
            }
        })
        .collect()
}

/// `A + B` of two sorted slices. Panics only on internal invariant failures.
pub fn sumset_slices(a: &[i64], b: &[i64], cfg: &EngineConfig) -> Vec<i64> {
    sumset_metered(a, b, cfg, &mut WorkMeter::unlimited()).expect("indicator sumsets cannot overflow")
}

/// Exact `A + B`.
pub fn sumset(a: &SparseSet, b: &SparseSet, cfg: &EngineConfig) -> SparseSet {
    SparseSet::from_sorted_any(sumset_slices(a.as_slice(), b.as_slice(), cfg))
}

/// Exact `f ⋆ g`; fails if any coefficient exceeds `cfg.value_bound`.
pub fn convolve(f: &SparseVec, g: &SparseVec, cfg: &EngineConfig) -> Result<SparseVec> {
    let entries = convolve_metered(f.entries(), g.entries(), cfg, &mut WorkMeter::unlimited())?;
    Ok(SparseVec::from_sorted_unchecked(entries, cfg.value_bound))
}

pub fn start_sumset(a: &SparseSet, b: &SparseSet, cfg: &EngineConfig) -> Result<SteppableCall<SparseSet>> {
    cfg.validate()?;
    SteppableCall::sumset(a.as_slice(), b.as_slice(), cfg)
}

pub fn start_convolve(f: &SparseVec, g: &SparseVec, cfg: &EngineConfig) -> Result<SteppableCall<SparseVec>> {
    cfg.validate()?;
    SteppableCall::convolve(f.entries(), g.entries(), cfg)
}
