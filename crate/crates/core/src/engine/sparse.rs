//! Output-sensitive convolution by hashing indices modulo random primes.
//!
//! Each round wraps both inputs modulo a prime `p`, computes the cyclic
//! convolution `U` and its index-weighted twin `W` (using
//! `Σ_{i+j=s} (i+j) f_i g_j = s·(f⋆g)_s`), subtracts everything recovered so
//! far, and reads off buckets whose residual holds a single index: there
//! `W/U` is that index. A round whose fresh prime leaves no residual at all
//! ends the computation. Coefficients are non-negative, so residual mass is
//! exactly the mass still missing.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

use super::call::Job;
use super::{ntt, units, EngineConfig};

enum Phase {
    Pick,
    Hash { p: u64, residues: Vec<(Vec<u64>, Vec<u64>)> },
    Scan { p: u64, residues: Vec<(Vec<u64>, Vec<u64>)> },
    Commit { candidates: Vec<(u64, u128)> },
    Emit,
    Done,
}

pub(crate) struct SparseJob {
    f: Vec<(u64, u64)>,
    g: Vec<(u64, u64)>,
    offset: i64,
    span: u64,
    total_mass: u128,
    moduli: usize,
    bucket_constant: f64,
    rounds_cap: u32,
    rng: ChaCha8Rng,
    k: u64,
    rounds_at_k: u32,
    recovered: BTreeMap<u64, u128>,
    recovered_mass: u128,
    phase: Phase,
    out: Option<Vec<(i64, u128)>>,
}

impl SparseJob {
    pub(crate) fn new(f: &[(i64, u64)], g: &[(i64, u64)], cfg: &EngineConfig) -> Result<Self> {
        let (f_min, g_min) = (f[0].0, g[0].0);
        let f: Vec<(u64, u64)> = f.iter().map(|&(i, x)| ((i - f_min) as u64, x)).collect();
        let g: Vec<(u64, u64)> = g.iter().map(|&(i, x)| ((i - g_min) as u64, x)).collect();
        let span = f[f.len() - 1].0 + g[g.len() - 1].0;
        let total_mass = super::mass_u(&f) * super::mass_u(&g);
        let weighted_bound = total_mass
            .checked_mul(span as u128 + 1)
            .ok_or(Error::Overflow("weighted convolution mass"))?;
        let moduli =
            ntt::moduli_for(weighted_bound).ok_or(Error::Overflow("weighted convolution mass exceeds transform range"))?;
        let k = (f.len().max(g.len()) as u64).next_power_of_two();
        Ok(Self {
            f,
            g,
            offset: f_min + g_min,
            span,
            total_mass,
            moduli,
            bucket_constant: cfg.bucket_constant,
            rounds_cap: cfg.recovery_rounds_cap,
            rng: ChaCha8Rng::seed_from_u64(cfg.rng_seed),
            k,
            rounds_at_k: 0,
            recovered: BTreeMap::new(),
            recovered_mass: 0,
            phase: Phase::Pick,
            out: None,
        })
    }

    fn transform_len(p: u64) -> usize {
        (2 * p as usize - 1).next_power_of_two()
    }

    fn hash_cost(&self, p: u64) -> u64 {
        let len = Self::transform_len(p) as u64;
        units(6 * ntt::butterflies(len as usize) + 6 * len + 2 * (self.f.len() + self.g.len()) as u64)
    }

    fn pick_prime(&mut self) -> u64 {
        let lo = (self.bucket_constant * self.k as f64 * ((self.span + 2) as f64).log2()).ceil() as u64;
        let lo = lo.max(3);
        loop {
            let x = self.rng.gen_range(lo..=2 * lo);
            if is_prime(x) {
                return x;
            }
        }
    }

    fn end_round(&mut self) {
        self.rounds_at_k += 1;
        if self.rounds_at_k >= self.rounds_cap {
            self.rounds_at_k = 0;
            self.k = self.k.saturating_mul(2);
        }
        self.phase = Phase::Pick;
    }

    /// Cyclic `U` and `W` modulo `p`, reduced modulo field `idx`.
    fn hash_once(&self, p: u64, idx: usize) -> (Vec<u64>, Vec<u64>) {
        let fld = ntt::field(idx);
        let len = Self::transform_len(p);
        let wrap = |v: &[(u64, u64)]| {
            let mut plain = vec![0u64; len];
            let mut weighted = vec![0u64; len];
            for &(i, x) in v {
                let r = (i % p) as usize;
                plain[r] = fld.add(plain[r], fld.enter(x));
                weighted[r] = fld.add(weighted[r], fld.enter_wide(i as u128 * x as u128));
            }
            (plain, weighted)
        };
        let (mut fa, mut fw) = wrap(&self.f);
        let (mut ga, mut gw) = wrap(&self.g);
        for v in [&mut fa, &mut fw, &mut ga, &mut gw] {
            fld.transform(v, false);
        }
        for k in 0..len {
            fw[k] = fld.add(fld.mul(fw[k], ga[k]), fld.mul(fa[k], gw[k]));
            ga[k] = fld.mul(fa[k], ga[k]);
        }
        drop((fa, gw));
        let fold = |mut v: Vec<u64>| {
            fld.transform(&mut v, true);
            let p = p as usize;
            let mut out = Vec::with_capacity(p);
            for r in 0..p {
                let hi = if r + p < len { v[r + p] } else { 0 };
                out.push(fld.leave(fld.add(v[r], hi)));
            }
            out
        };
        (fold(ga), fold(fw))
    }

    fn exact(&self, residues: &[(Vec<u64>, Vec<u64>)], r: usize) -> (u128, u128) {
        if self.moduli == 1 {
            (residues[0].0[r] as u128, residues[0].1[r] as u128)
        } else {
            (
                ntt::crt(residues[0].0[r], residues[1].0[r]),
                ntt::crt(residues[0].1[r], residues[1].1[r]),
            )
        }
    }

    /// Residual buckets after removing what has been recovered; `None` if
    /// some bucket went negative.
    fn residual(&self, p: u64, residues: &[(Vec<u64>, Vec<u64>)]) -> Option<(Vec<u128>, Vec<u128>)> {
        let mut u = Vec::with_capacity(p as usize);
        let mut w = Vec::with_capacity(p as usize);
        for r in 0..p as usize {
            let (a, b) = self.exact(residues, r);
            u.push(a);
            w.push(b);
        }
        for (&s, &v) in &self.recovered {
            let r = (s % p) as usize;
            u[r] = u[r].checked_sub(v)?;
            w[r] = w[r].checked_sub(s as u128 * v)?;
        }
        Some((u, w))
    }
}

impl Job for SparseJob {
    fn is_done(&self) -> bool {
        matches!(self.phase, Phase::Done)
    }

    fn next_cost(&self) -> u64 {
        match &self.phase {
            Phase::Pick => 1,
            Phase::Hash { p, .. } => self.hash_cost(*p),
            Phase::Scan { p, .. } => units(*p * self.moduli as u64 + self.recovered.len() as u64),
            Phase::Commit { candidates } => candidates.len().max(1) as u64,
            Phase::Emit => self.recovered.len().max(1) as u64,
            Phase::Done => 0,
        }
    }

    fn advance(&mut self) -> Result<u64> {
        let cost = self.next_cost();
        match std::mem::replace(&mut self.phase, Phase::Done) {
            Phase::Pick => {
                let p = self.pick_prime();
                self.phase = Phase::Hash { p, residues: Vec::with_capacity(self.moduli) };
            }
            Phase::Hash { p, mut residues } => {
                residues.push(self.hash_once(p, residues.len()));
                self.phase = if residues.len() == self.moduli {
                    Phase::Scan { p, residues }
                } else {
                    Phase::Hash { p, residues }
                };
            }
            Phase::Scan { p, residues } => match self.residual(p, &residues) {
                None => {
                    self.recovered.clear();
                    self.recovered_mass = 0;
                    self.end_round();
                }
                Some((u, w)) if u.iter().all(|&x| x == 0) => {
                    if w.iter().all(|&x| x == 0) {
                        assert_eq!(self.recovered_mass, self.total_mass, "mass certificate failed");
                        self.phase = Phase::Emit;
                    } else {
                        self.recovered.clear();
                        self.recovered_mass = 0;
                        self.end_round();
                    }
                }
                Some((u, w)) => {
                    let mut candidates = Vec::new();
                    for (r, (&ur, &wr)) in u.iter().zip(&w).enumerate() {
                        if ur == 0 || wr % ur != 0 {
                            continue;
                        }
                        let s = wr / ur;
                        if s <= self.span as u128 && s % p as u128 == r as u128 {
                            candidates.push((s as u64, ur));
                        }
                    }
                    self.phase = Phase::Commit { candidates };
                }
            },
            Phase::Commit { candidates } => {
                for (s, v) in candidates {
                    *self.recovered.entry(s).or_default() += v;
                    self.recovered_mass += v;
                }
                self.end_round();
            }
            Phase::Emit => {
                let offset = self.offset;
                self.out = Some(
                    std::mem::take(&mut self.recovered)
                        .into_iter()
                        .map(|(s, v)| (offset + s as i64, v))
                        .collect(),
                );
                self.phase = Phase::Done;
            }
            Phase::Done => unreachable!("advance on a finished job"),
        }
        Ok(cost)
    }

    fn take_output(&mut self) -> Vec<(i64, u128)> {
        self.out.take().unwrap_or_default()
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    (a as u128 * b as u128 % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin for 64-bit integers.
pub(crate) fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &w in &WITNESSES {
        if n % w == 0 {
            return n == w;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}
