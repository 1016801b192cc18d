//! Instance generators, seeded run grids, reports and exponent fitting.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adversarial::{build_hard_instance, build_xy_family, greedy_code, lower_bound_exponent};
use crate::engine::Ctx;
use crate::error::{Error, Result};
use crate::interval::solve_interval_with;
use crate::model::{Instance, SparseSet};
use crate::oracle::{brute_subset_sums, brute_sumset};
use crate::prefix::{solve_prefix_with, CoveringOptions};
use crate::relaxed::solve_prefix_relaxed_with;
use crate::subset_sum::{subset_sums_with, SSParams};
use crate::topk::{top_k_sumset_with, TopKConfig};

pub const REPORT_HEADER: &str = "# sumset-kit report v1";

macro_rules! named_enum {
    ($name:ident { $($variant:ident => $text:literal),* $(,)? }) => {
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
        pub enum $name { $($variant),* }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),*];

            pub fn name(self) -> &'static str {
                match self { $($name::$variant => $text),* }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }

        impl FromStr for $name {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($text => Ok($name::$variant),)*
                    _ => {
                        let names: Vec<&str> = $name::ALL.iter().map(|v| v.name()).collect();
                        Err(Error::InvalidParameter(format!("unknown {} {s:?}, expected one of {}", stringify!($name).to_lowercase(), names.join(", "))))
                    }
                }
            }
        }
    };
}

named_enum!(Generator {
    Uniform => "uniform",
    Clustered => "clustered",
    Progression => "progression",
    Hard => "hard",
    TwoShift => "twoshift",
});

named_enum!(Algorithm {
    Prefix43 => "prefix43",
    Interval => "interval",
    Relaxed => "relaxed",
    TopK => "topk",
    SubsetSum => "subsetsum",
    SubsetSumRelaxed => "subsetsum_relaxed",
    Exponent => "exponent",
});

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Jsonl,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "jsonl" => Ok(Format::Jsonl),
            _ => Err(Error::InvalidParameter(format!("unknown format {s:?}, expected csv or jsonl"))),
        }
    }
}

/// Generator and algorithm knobs. Unset optional values get per-algorithm defaults.
#[derive(Clone, Debug, PartialEq)]
pub struct RunSpec {
    pub generator: Generator,
    pub algorithm: Algorithm,
    pub n: usize,
    pub m: usize,
    pub u: i64,
    pub lo: Option<i64>,
    pub k: usize,
    pub t: Option<i64>,
    pub zeta: f64,
    pub base: i64,
    pub code_len: u32,
    pub delta: f64,
    pub trials: u64,
    pub seed: u64,
    pub oracle: bool,
    pub timing: bool,
}

impl Default for RunSpec {
    fn default() -> Self {
        Self {
            generator: Generator::Uniform,
            algorithm: Algorithm::Prefix43,
            n: 64,
            m: 64,
            u: 4096,
            lo: None,
            k: 16,
            t: None,
            zeta: 0.5,
            base: 2,
            code_len: 4,
            delta: 0.3,
            trials: 1,
            seed: 0,
            oracle: false,
            timing: false,
        }
    }
}

impl RunSpec {
    fn descriptor(&self) -> String {
        match self.generator {
            Generator::Hard => format!("base={};codelen={};delta={}", self.base, self.code_len, self.delta),
            _ => format!("n={};m={};u={}", self.n, self.m, self.u),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub generator: String,
    pub params: String,
    pub seed: u64,
    pub trial: u64,
    pub algorithm: String,
    pub n: usize,
    pub m: usize,
    pub out: u64,
    pub out_estimate: u64,
    pub cost: u64,
    pub work: u64,
    pub wall_ms: Option<f64>,
    pub correct: Option<bool>,
    /// Covering-cost lower bound, for hard instances.
    pub lower_bound: Option<f64>,
    /// Scalar result, for the exponent formula.
    pub value: Option<f64>,
}

/// Seed for trial `k` of a run seeded with `seed`.
pub fn trial_seed(seed: u64, trial: u64) -> u64 {
    seed ^ trial.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

fn draw(rng: &mut ChaCha8Rng, count: usize, lo: i64, hi: i64) -> Result<SparseSet> {
    SparseSet::from_unsorted((0..count).map(|_| rng.gen_range(lo..=hi)))
}

/// A generated instance. Hard instances also carry their cost lower bound.
pub fn generate(spec: &RunSpec, seed: u64) -> Result<(Instance, Option<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (n, m, u) = (spec.n.max(1), spec.m.max(1), spec.u);
    if u < 0 {
        return Err(Error::InvalidParameter(format!("u must be non-negative, got {u}")));
    }
    let (a, b, u) = match spec.generator {
        Generator::Uniform => (draw(&mut rng, n, 0, u)?, draw(&mut rng, m, 0, u)?, u),
        Generator::Clustered => {
            let mut cluster = |count: usize| -> Result<SparseSet> {
                let k = 3;
                let width = ((2 * count / k) as i64).clamp(1, u.max(1));
                let centers: Vec<i64> = (0..k).map(|_| rng.gen_range(0..=(u - width).max(0))).collect();
                SparseSet::from_unsorted((0..count).map(|_| {
                    let c = centers[rng.gen_range(0..k)];
                    c + rng.gen_range(0..width)
                }))
            };
            (cluster(n)?, cluster(m)?, u)
        }
        Generator::Progression => {
            let d = rng.gen_range(1..=(u / (n + m) as i64).max(1));
            let (a0, b0) = (rng.gen_range(0..d), rng.gen_range(0..d));
            let a = SparseSet::from_unsorted((0..n as i64).map(|i| a0 + d * i))?;
            let b = SparseSet::from_unsorted((0..m as i64).map(|j| b0 + d * j))?;
            (a, b, u)
        }
        Generator::TwoShift => {
            let k = n as i64;
            let u = 2 * k * k + 2;
            let a = SparseSet::from_unsorted(std::iter::once(0).chain((0..=k).map(|x| u / 2 + x)))?;
            let b = SparseSet::from_unsorted(std::iter::once(0).chain((0..=k).map(|y| u / 2 + k * y)))?;
            (a, b, u)
        }
        Generator::Hard => {
            let fam = build_xy_family(spec.base, &greedy_code(spec.code_len, spec.delta)?)?;
            let hard = build_hard_instance(&fam)?;
            let lb = hard.cost_lower_bound();
            let i = hard.instance;
            return Ok((i, Some(lb)));
        }
    };
    let lo = spec.lo.unwrap_or(0).min(u);
    Ok((Instance::new(a, b, lo, u)?, None))
}

/// Runs one trial.
pub fn run_trial(spec: &RunSpec, trial: u64) -> Result<RunReport> {
    let seed = trial_seed(spec.seed, trial);
    let start = Instant::now();
    let mut report = RunReport {
        generator: spec.generator.to_string(),
        params: spec.descriptor(),
        seed,
        trial,
        algorithm: spec.algorithm.to_string(),
        n: 0,
        m: 0,
        out: 0,
        out_estimate: 0,
        cost: 0,
        work: 0,
        wall_ms: None,
        correct: None,
        lower_bound: None,
        value: None,
    };
    if spec.algorithm == Algorithm::Exponent {
        report.params = format!("base={};delta={}", spec.base, spec.delta);
        report.value = Some(lower_bound_exponent(spec.delta, spec.base)?);
    } else {
        let (inst, lb) = generate(spec, seed)?;
        report.lower_bound = lb;
        report.n = inst.n();
        report.m = inst.m();
        run_algorithm(spec, &inst, seed, &mut report)?;
    }
    if spec.timing {
        report.wall_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    Ok(report)
}

fn run_algorithm(spec: &RunSpec, inst: &Instance, seed: u64, report: &mut RunReport) -> Result<()> {
    let (a, b, u) = (&inst.a, &inst.b, inst.hi);
    let mut ctx = Ctx::default();
    let check = |got: &SparseSet, want: &dyn Fn() -> SparseSet| spec.oracle.then(|| *got == want());
    match spec.algorithm {
        Algorithm::Prefix43 | Algorithm::Interval | Algorithm::Relaxed => {
            let lo = if spec.algorithm == Algorithm::Interval { inst.lo } else { 0 };
            let run = match spec.algorithm {
                Algorithm::Prefix43 => solve_prefix_with(a, b, u, &mut ctx, CoveringOptions::default())?,
                Algorithm::Interval => solve_interval_with(a, b, lo, u, &mut ctx)?,
                _ => solve_prefix_relaxed_with(a, b, u, spec.zeta, &mut ctx)?,
            };
            report.out = run.result.len() as u64;
            report.out_estimate = run.out_estimate;
            report.cost = run.cost;
            report.correct = check(&run.result, &|| brute_sumset(a, b, lo, u));
        }
        Algorithm::TopK => {
            let cfg = TopKConfig { engine: ctx.cfg.clone().with_seed(seed), ..Default::default() };
            let (s, stats) = top_k_sumset_with(a, b, spec.k.max(1), &cfg)?;
            report.out = s.len() as u64;
            report.work = stats.work;
            report.correct = check(&s, &|| {
                SparseSet::from_sorted_any(brute_sumset(a, b, 0, i64::MAX).iter().take(spec.k.max(1)).collect())
            });
            return Ok(());
        }
        Algorithm::SubsetSum | Algorithm::SubsetSumRelaxed => {
            let x = a.shifted(1)?;
            let t = spec.t.unwrap_or(u);
            let mut params = SSParams::default().with_seed(seed);
            if spec.algorithm == Algorithm::SubsetSumRelaxed {
                params.zeta = Some(spec.zeta);
            }
            let (s, stats) = subset_sums_with(&x, t, &params)?;
            report.n = x.len();
            report.m = 0;
            report.out = s.len() as u64;
            report.cost = stats.cost;
            report.correct = check(&s, &|| brute_subset_sums(&x, t));
        }
        Algorithm::Exponent => unreachable!("handled without an instance"),
    }
    report.work = ctx.meter.used();
    Ok(())
}

/// Runs every trial, in parallel, reporting in trial order.
pub fn run_grid(spec: &RunSpec) -> Result<Vec<RunReport>> {
    (0..spec.trials).into_par_iter().map(|k| run_trial(spec, k)).collect()
}

pub fn write_reports<W: Write>(reports: &[RunReport], format: Format, out: W) -> Result<()> {
    let io = |e: std::io::Error| Error::InvalidParameter(format!("write failed: {e}"));
    match format {
        Format::Csv => {
            let mut out = out;
            writeln!(out, "{REPORT_HEADER}").map_err(io)?;
            let mut w = csv::Writer::from_writer(out);
            for r in reports {
                w.serialize(r).map_err(|e| Error::InvalidParameter(format!("csv: {e}")))?;
            }
            w.flush().map_err(io)?;
        }
        Format::Jsonl => {
            let mut out = out;
            for r in reports {
                let line = serde_json::to_string(r).map_err(|e| Error::InvalidParameter(format!("json: {e}")))?;
                writeln!(out, "{line}").map_err(io)?;
            }
        }
    }
    Ok(())
}

/// Parses reports written by [`write_reports`] in CSV form.
pub fn read_csv_reports(text: &str) -> Result<Vec<RunReport>> {
    let body = text
        .strip_prefix(REPORT_HEADER)
        .ok_or_else(|| Error::Parse { line: 1, msg: format!("expected {REPORT_HEADER:?}") })?;
    let mut r = csv::Reader::from_reader(body.trim_start().as_bytes());
    r.deserialize()
        .enumerate()
        .map(|(k, row)| row.map_err(|e| Error::Parse { line: k + 3, msg: e.to_string() }))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    pub points: usize,
}

/// Least-squares slope of `log cost` against `log out`.
pub fn fit_exponent(reports: &[RunReport]) -> Result<ExponentFit> {
    let pts: Vec<(f64, f64)> = reports
        .iter()
        .filter(|r| r.out > 0 && r.cost > 0)
        .map(|r| ((r.out as f64).ln(), (r.cost as f64).ln()))
        .collect();
    if pts.len() < 5 {
        return Err(Error::InvalidParameter(format!("need at least 5 usable reports, got {}", pts.len())));
    }
    let (lo, hi) = pts.iter().fold((f64::MAX, f64::MIN), |(l, h), p| (l.min(p.0), h.max(p.0)));
    if hi - lo < 100f64.ln() - 1e-9 {
        return Err(Error::InvalidParameter("outputs must span at least two decades".into()));
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let stderr = (ssr / (k - 2.0) / sxx).sqrt();
    Ok(ExponentFit { slope, intercept, stderr, points: pts.len() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(f: impl Fn(f64) -> f64) -> Vec<RunReport> {
        (0..8)
            .map(|k| {
                let out = 10f64.powf(1.0 + 0.5 * k as f64).round();
                RunReport {
                    generator: "uniform".into(),
                    params: String::new(),
                    seed: 0,
                    trial: k,
                    algorithm: "prefix43".into(),
                    n: 1,
                    m: 1,
                    out: out as u64,
                    out_estimate: out as u64,
                    cost: f(out).round() as u64,
                    work: 0,
                    wall_ms: None,
                    correct: None,
                    lower_bound: None,
                    value: None,
                }
            })
            .collect()
    }

    #[test]
    fn fit_synthetic_slopes() {
        let fit = fit_exponent(&synthetic(|x| x)).unwrap();
        assert!((fit.slope - 1.0).abs() < 1e-3);
        let fit = fit_exponent(&synthetic(|x| x * x)).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-3);
    }

    #[test]
    fn fit_refuses_narrow_spread() {
        let mut r = synthetic(|x| x);
        r.truncate(4);
        assert!(fit_exponent(&r).is_err());
        let narrow: Vec<RunReport> = synthetic(|x| x).into_iter().map(|mut r| { r.out = 50 + r.trial; r }).collect();
        assert!(fit_exponent(&narrow).is_err());
    }

    #[test]
    fn names_round_trip() {
        for g in Generator::ALL {
            assert_eq!(g.name().parse::<Generator>().unwrap(), *g);
        }
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), *a);
        }
        assert!("nope".parse::<Algorithm>().is_err());
    }

    #[test]
    fn generators_produce_instances() {
        for &g in Generator::ALL {
            let spec = RunSpec { generator: g, n: 40, m: 30, u: 3000, ..Default::default() };
            let (inst, lb) = generate(&spec, 3).unwrap();
            assert!(!inst.a.is_empty() && !inst.b.is_empty());
            assert_eq!(lb.is_some(), g == Generator::Hard);
        }
    }

    #[test]
    fn grid_is_reproducible_and_correct() {
        for &algo in Algorithm::ALL {
            let spec = RunSpec { algorithm: algo, n: 30, m: 30, u: 1500, trials: 3, seed: 7, oracle: true, ..Default::default() };
            let first = run_grid(&spec).unwrap();
            assert_eq!(first, run_grid(&spec).unwrap());
            assert!(first.iter().all(|r| r.correct != Some(false)), "{algo}");
            let mut csv = Vec::new();
            write_reports(&first, Format::Csv, &mut csv).unwrap();
            let text = String::from_utf8(csv).unwrap();
            assert!(text.starts_with(REPORT_HEADER));
            assert_eq!(read_csv_reports(&text).unwrap(), first);
        }
    }
}
