use crate::error::{Error, Result};
use crate::model::{SparseSet, SparseVec};

use super::{check_bound, make_job, ntt, units, EngineConfig, WorkMeter, MAX_DENSE_LEN};

/// A computation broken into atomic actions with known cost ceilings.
pub(crate) trait Job: Send {
    fn is_done(&self) -> bool;
    /// Upper bound on the units the next [`Job::advance`] will charge.
    fn next_cost(&self) -> u64;
    /// Performs one action and returns the units it actually used.
    fn advance(&mut self) -> Result<u64>;
    /// Sorted `(index, value)` output; valid once done.
    fn take_output(&mut self) -> Vec<(i64, u128)>;
}

/// Pairwise enumeration, a few rows per action.
pub(crate) struct BruteJob {
    f: Vec<(i64, u64)>,
    g: Vec<(i64, u64)>,
    row: usize,
    rows_per_action: usize,
    acc: Vec<(i64, u128)>,
    out: Option<Vec<(i64, u128)>>,
}

impl BruteJob {
    pub(crate) fn new(f: &[(i64, u64)], g: &[(i64, u64)]) -> Self {
        Self {
            f: f.to_vec(),
            g: g.to_vec(),
            row: 0,
            rows_per_action: (super::BLOCK as usize / g.len()).max(1),
            acc: Vec::new(),
            out: None,
        }
    }

    fn rows_left(&self) -> usize {
        (self.f.len() - self.row).min(self.rows_per_action)
    }
}

impl Job for BruteJob {
    fn is_done(&self) -> bool {
        self.out.is_some()
    }

    fn next_cost(&self) -> u64 {
        if self.row < self.f.len() {
            units((self.rows_left() * self.g.len()) as u64)
        } else {
            units(self.acc.len() as u64) + self.acc.len() as u64
        }
    }

    fn advance(&mut self) -> Result<u64> {
        if self.row < self.f.len() {
            let rows = self.rows_left();
            for &(i, x) in &self.f[self.row..self.row + rows] {
                for &(j, y) in &self.g {
                    self.acc.push((i + j, x as u128 * y as u128));
                }
            }
            self.row += rows;
            return Ok(units((rows * self.g.len()) as u64));
        }
        let scanned = self.acc.len() as u64;
        self.acc.sort_unstable_by_key(|&(s, _)| s);
        let mut out: Vec<(i64, u128)> = Vec::new();
        for &(s, v) in &self.acc {
            match out.last_mut() {
                Some(last) if last.0 == s => last.1 += v,
                _ => out.push((s, v)),
            }
        }
        self.acc = Vec::new();
        let emitted = out.len() as u64;
        self.out = Some(out);
        Ok(units(scanned) + emitted)
    }

    fn take_output(&mut self) -> Vec<(i64, u128)> {
        self.out.take().unwrap_or_default()
    }
}

/// One linear convolution over the whole index span per modulus.
pub(crate) struct DenseJob {
    f: Vec<(i64, u64)>,
    g: Vec<(i64, u64)>,
    f_min: i64,
    g_min: i64,
    out_len: usize,
    pairs: u64,
    moduli: usize,
    residues: Vec<Vec<u64>>,
    out: Option<Vec<(i64, u128)>>,
}

impl DenseJob {
    pub(crate) fn new(f: &[(i64, u64)], g: &[(i64, u64)]) -> Result<Self> {
        let f_min = f[0].0;
        let g_min = g[0].0;
        let span = (f[f.len() - 1].0 - f_min) as u64 + (g[g.len() - 1].0 - g_min) as u64;
        let out_len = usize::try_from(span + 1).unwrap_or(usize::MAX);
        if out_len > MAX_DENSE_LEN {
            return Err(Error::InvalidParameter(format!("dense transform over span {span} is too long")));
        }
        let total: u128 = super::mass(f).saturating_mul(super::mass(g));
        let moduli = ntt::moduli_for(total).ok_or(Error::Overflow("convolution mass exceeds transform range"))?;
        Ok(Self {
            f: f.to_vec(),
            g: g.to_vec(),
            f_min,
            g_min,
            out_len,
            pairs: f.len() as u64 * g.len() as u64,
            moduli,
            residues: Vec::new(),
            out: None,
        })
    }

    fn dense(v: &[(i64, u64)], min: i64, len: usize, p: u64) -> Vec<u64> {
        let mut d = vec![0u64; len];
        for &(i, x) in v {
            d[(i - min) as usize] = x % p;
        }
        d
    }
}

impl Job for DenseJob {
    fn is_done(&self) -> bool {
        self.out.is_some()
    }

    fn next_cost(&self) -> u64 {
        let len = self.out_len.next_power_of_two();
        if self.residues.len() < self.moduli {
            units(3 * ntt::butterflies(len) + 3 * len as u64)
        } else {
            units(self.out_len as u64) + self.pairs.min(self.out_len as u64)
        }
    }

    fn advance(&mut self) -> Result<u64> {
        if self.residues.len() < self.moduli {
            let cost = self.next_cost();
            let idx = self.residues.len();
            let p = ntt::field(idx).p;
            let fl = (self.f[self.f.len() - 1].0 - self.f_min) as usize + 1;
            let gl = (self.g[self.g.len() - 1].0 - self.g_min) as usize + 1;
            let a = Self::dense(&self.f, self.f_min, fl, p);
            let b = Self::dense(&self.g, self.g_min, gl, p);
            self.residues.push(ntt::convolve_mod(&a, &b, idx));
            return Ok(cost);
        }
        let offset = self.f_min + self.g_min;
        let mut out = Vec::new();
        for s in 0..self.out_len {
            let v = if self.moduli == 1 {
                self.residues[0][s] as u128
            } else {
                ntt::crt(self.residues[0][s], self.residues[1][s])
            };
            if v != 0 {
                out.push((offset + s as i64, v));
            }
        }
        self.residues = Vec::new();
        let emitted = out.len() as u64;
        self.out = Some(out);
        Ok(units(self.out_len as u64) + emitted)
    }

    fn take_output(&mut self) -> Vec<(i64, u128)> {
        self.out.take().unwrap_or_default()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CallStatus {
    InProgress,
    Finished,
    Cancelled,
}

/// An in-progress engine computation advanced in bounded increments.
///
/// Budgets accumulate as credit: a step runs atomic actions while their
/// cost ceiling fits the credit, so the total work never exceeds the total
/// budget handed out.
pub struct SteppableCall<T> {
    job: Option<Box<dyn Job>>,
    finish: fn(Vec<(i64, u128)>, u64) -> Result<T>,
    value_bound: u64,
    status: CallStatus,
    result: Option<T>,
    work_done: u64,
    credit: u64,
}

fn finish_set(raw: Vec<(i64, u128)>, _: u64) -> Result<SparseSet> {
    Ok(SparseSet::from_sorted_any(raw.into_iter().map(|(s, _)| s).collect()))
}

fn finish_vec(raw: Vec<(i64, u128)>, bound: u64) -> Result<SparseVec> {
    Ok(SparseVec::from_sorted_unchecked(check_bound(raw, bound)?, bound))
}

impl SteppableCall<SparseSet> {
    pub(crate) fn sumset(a: &[i64], b: &[i64], cfg: &EngineConfig) -> Result<Self> {
        let f: Vec<_> = a.iter().map(|&x| (x, 1)).collect();
        let g: Vec<_> = b.iter().map(|&x| (x, 1)).collect();
        Self::build(&f, &g, cfg, finish_set)
    }
}

impl SteppableCall<SparseVec> {
    pub(crate) fn convolve(f: &[(i64, u64)], g: &[(i64, u64)], cfg: &EngineConfig) -> Result<Self> {
        Self::build(f, g, cfg, finish_vec)
    }
}

impl<T> SteppableCall<T> {
    fn build(
        f: &[(i64, u64)],
        g: &[(i64, u64)],
        cfg: &EngineConfig,
        finish: fn(Vec<(i64, u128)>, u64) -> Result<T>,
    ) -> Result<Self> {
        let job = if f.is_empty() || g.is_empty() { None } else { Some(make_job(f, g, cfg)?) };
        let mut call = Self {
            job,
            finish,
            value_bound: cfg.value_bound,
            status: CallStatus::InProgress,
            result: None,
            work_done: 0,
            credit: 0,
        };
        if call.job.is_none() {
            call.result = Some(finish(Vec::new(), cfg.value_bound)?);
            call.status = CallStatus::Finished;
        }
        Ok(call)
    }

    pub fn status(&self) -> CallStatus {
        self.status
    }

    pub fn work_done(&self) -> u64 {
        self.work_done
    }

    pub fn result(&self) -> Option<&T> {
        self.result.as_ref()
    }

    pub fn into_result(self) -> Option<T> {
        self.result
    }

    pub fn step(&mut self, budget: u64) -> Result<CallStatus> {
        self.step_metered(budget, &mut WorkMeter::unlimited())
    }

    pub(crate) fn step_metered(&mut self, budget: u64, meter: &mut WorkMeter) -> Result<CallStatus> {
        match self.status {
            CallStatus::Finished => return Err(Error::CallNotRunning("finished")),
            CallStatus::Cancelled => return Err(Error::CallNotRunning("cancelled")),
            CallStatus::InProgress => {}
        }
        if budget == 0 {
            return Err(Error::InvalidParameter("step budget must be at least 1".into()));
        }
        self.credit = self.credit.saturating_add(budget);
        let job = self.job.as_mut().expect("running call owns a job");
        while !job.is_done() {
            let est = job.next_cost();
            if est > self.credit {
                return Ok(CallStatus::InProgress);
            }
            let spent = job.advance()?;
            debug_assert!(spent <= est, "action charged {spent} over its ceiling {est}");
            self.credit -= spent;
            self.work_done += spent;
            meter.charge(spent)?;
        }
        let raw = job.take_output();
        self.job = None;
        self.result = Some((self.finish)(raw, self.value_bound)?);
        self.status = CallStatus::Finished;
        Ok(self.status)
    }

    /// Drops all partial work. Cancelling twice is harmless.
    pub fn cancel(&mut self) {
        if self.status == CallStatus::InProgress {
            self.job = None;
            self.status = CallStatus::Cancelled;
        }
    }
}
