//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sumset_kit::adversarial::{
    build_hard_instance, build_xy_family, greedy_code, lower_bound_exponent, naive_bmm, BoolMatrix,
};
use sumset_kit::bench::{fit_exponent, generate, Generator, RunReport, RunSpec};
use sumset_kit::covering::{materialize_sumset, validate_covering};
use sumset_kit::interval::{convolve_interval, find_interval_covering, solve_interval_with};
use sumset_kit::output_size::solve_via_promise;
use sumset_kit::prefix::{convolve_prefix, solve_prefix_with, CoveringOptions};
use sumset_kit::relaxed::solve_prefix_relaxed_with;
use sumset_kit::subset_sum::{split_survival_check, subset_sums, SSParams};
use sumset_kit::topk::{prefix_via_topk, top_k_convolution, top_k_sumset};
use sumset_kit::{Ctx, Instance, SparseSet};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond { Ok(()) } else { Err(msg()) }
}

fn timed<T>(acc: &mut Duration, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let out = f();
    *acc += start.elapsed();
    out
}

fn frozen_k() -> f64 {
    include_str!("fixtures/prefix_cost_k.txt")
        .lines()
        .find(|l| !l.starts_with('#') && !l.trim().is_empty())
        .and_then(|l| l.trim().parse().ok())
        .expect("fixture holds a number")
}

fn exponent_formula() -> Outcome {
    let start = Instant::now();
    let c = lower_bound_exponent(0.2709, 10).map_err(|e| e.to_string())?;
    let took = start.elapsed();
    check((1.047..=1.05).contains(&c), || format!("c = {c}"))?;
    check(took < Duration::from_millis(1), || format!("took {took:?}"))?;
    Ok(format!("c(0.2709, 10) = {c:.5} in {took:?}"))
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let trials = 500;
    let mut coverings = 0;
    let mut spent = [Duration::ZERO; 7];
    for trial in 0..trials {
        let a = common::random_set(&mut rng, 128, 4096);
        let b = common::random_set(&mut rng, 128, 4096);
        let u = rng.gen_range(0..=8192);
        let lo = rng.gen_range(0..=u);
        let k = rng.gen_range(1..=64);
        let f = common::weighted(&mut rng, &a, 1000);
        let g = common::weighted(&mut rng, &b, 1000);
        let ctx = &mut Ctx::default();
        let ctx_msg = |what: &str| format!("trial {trial}: {what} mismatch (u={u}, lo={lo}, k={k})");

        let run = timed(&mut spent[0], || solve_prefix_with(&a, &b, u, ctx, CoveringOptions::default())).map_err(|e| e.to_string())?;
        check(run.result.as_slice() == common::sums(a.as_slice(), b.as_slice(), 0, u), || ctx_msg("solve_prefix"))?;
        let run = timed(&mut spent[1], || solve_interval_with(&a, &b, lo, u, ctx)).map_err(|e| e.to_string())?;
        check(run.result.as_slice() == common::sums(a.as_slice(), b.as_slice(), lo, u), || ctx_msg("solve_interval"))?;
        coverings += 2;

        let got = timed(&mut spent[2], || convolve_prefix(&f, &g, u)).map_err(|e| e.to_string())?;
        check(got.entries() == common::products(f.entries(), g.entries(), 0, u), || ctx_msg("convolve_prefix"))?;
        let got = timed(&mut spent[3], || convolve_interval(&f, &g, lo, u)).map_err(|e| e.to_string())?;
        check(got.entries() == common::products(f.entries(), g.entries(), lo, u), || ctx_msg("convolve_interval"))?;

        let full = common::products(f.entries(), g.entries(), i64::MIN, i64::MAX);
        let got = timed(&mut spent[4], || top_k_convolution(&f, &g, k)).map_err(|e| e.to_string())?;
        check(got.entries() == &full[..k.min(full.len())], || ctx_msg("top_k_convolution"))?;
        let all = common::sums(a.as_slice(), b.as_slice(), i64::MIN, i64::MAX);
        let got = timed(&mut spent[5], || top_k_sumset(&a, &b, k)).map_err(|e| e.to_string())?;
        check(got.as_slice() == &all[..k.min(all.len())], || ctx_msg("top_k_sumset"))?;
        let got = timed(&mut spent[6], || prefix_via_topk(&f, &g, u)).map_err(|e| e.to_string())?;
        check(got.entries() == common::products(f.entries(), g.entries(), 0, u), || ctx_msg("prefix_via_topk"))?;
    }
    let took = start.elapsed();
    check(took < Duration::from_secs(60), || format!("took {took:?}"))?;
    let per: Vec<String> = spent.iter().map(|d| format!("{:.1}", d.as_secs_f64())).collect();
    Ok(format!("{trials} instances x 7 operations, 0 mismatches, {coverings} solver runs, {took:.1?} (seconds per operation: {})", per.join("/")))
}

fn grid_instances() -> Vec<(String, Instance)> {
    let mut out = Vec::new();
    for g in [Generator::Uniform, Generator::Clustered, Generator::Progression] {
        for (n, m, u) in [(16, 16, 500), (64, 64, 4096), (128, 100, 8192), (300, 300, 100_000), (1000, 50, 50_000)] {
            for seed in 0..3 {
                let spec = RunSpec { generator: g, n, m, u, ..Default::default() };
                let (inst, _) = generate(&spec, seed).unwrap();
                out.push((format!("{g} n={n} m={m} u={u} seed={seed}"), inst));
            }
        }
    }
    for n in [4, 8, 16, 32, 64] {
        let spec = RunSpec { generator: Generator::TwoShift, n, ..Default::default() };
        out.push((format!("twoshift n={n}"), generate(&spec, 0).unwrap().0));
    }
    for base in [2, 3, 4] {
        for code_len in [4, 6] {
            let spec = RunSpec { generator: Generator::Hard, base, code_len, ..Default::default() };
            out.push((format!("hard base={base} len={code_len}"), generate(&spec, 0).unwrap().0));
        }
    }
    out
}

fn covering_validity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut checked = 0;
    let mut cases: Vec<(String, Instance)> = grid_instances();
    for k in 0..200 {
        let a = common::random_set(&mut rng, 128, 4096);
        let b = common::random_set(&mut rng, 128, 4096);
        let u = rng.gen_range(0..=8192);
        let lo = rng.gen_range(0..=u);
        cases.push((format!("random {k}"), Instance::new(a, b, lo, u).unwrap()));
    }
    for (name, inst) in &cases {
        let (a, b, lo, u) = (&inst.a, &inst.b, inst.lo, inst.hi);
        let ctx = &mut Ctx::default();
        let runs = [
            ("interval", solve_interval_with(a, b, lo, u, ctx).unwrap()),
            ("prefix", solve_prefix_with(a, b, u, ctx, CoveringOptions::default()).unwrap()),
            ("relaxed", solve_prefix_relaxed_with(a, b, u, 0.5, ctx).unwrap()),
        ];
        for (what, run) in runs {
            if run.covering.is_empty() {
                continue;
            }
            let rep = validate_covering(&run.instance, &run.covering);
            check(rep.covering && rep.unique && rep.rectangle, || format!("{what} covering invalid on {name}: {rep:?}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} coverings valid, unique and rectangular over {} instances", cases.len()))
}

fn cost_bounds() -> Outcome {
    let k = frozen_k();
    let mut worst = [0f64; 3];
    let cases = grid_instances();
    for (name, inst) in &cases {
        let (a, b, u) = (&inst.a, &inst.b, inst.hi);
        let ctx = &mut Ctx::default();
        for lo in [0, u / 3, u / 2] {
            let run = solve_interval_with(a, b, lo, u, ctx).unwrap();
            if run.covering.is_empty() {
                continue;
            }
            let (n, m) = (run.instance.a.len() as f64, run.instance.b.len() as f64);
            let bound = 20.0 * (n * m * run.out_estimate as f64).sqrt();
            worst[0] = worst[0].max(run.cost as f64 / bound);
            check(run.cost as f64 <= bound, || format!("interval cost {} > {bound:.0} on {name}, lo={lo}", run.cost))?;
        }
        for zeta in [1.0, 0.5, 0.25, 0.125] {
            let run = solve_prefix_relaxed_with(a, b, u, zeta, ctx).unwrap();
            let wide = common::sums(a.as_slice(), b.as_slice(), 0, u + (zeta * u as f64).floor() as i64).len();
            let bound = 16.0 / zeta * wide as f64;
            worst[1] = worst[1].max(run.cost as f64 / bound.max(1.0));
            check(run.cost as f64 <= bound, || format!("relaxed cost {} > {bound:.0} on {name}, zeta={zeta}", run.cost))?;
        }
        let run = solve_prefix_with(a, b, u, ctx, CoveringOptions::default()).unwrap();
        let (n, m) = (run.instance.a.len(), run.instance.b.len());
        let bound = k * (run.out_estimate as f64).powf(4.0 / 3.0) * (1.0 + common::log2(n) * common::log2(m)).powi(2);
        worst[2] = worst[2].max(run.cost as f64 / bound.max(1.0));
        check(run.cost as f64 <= bound, || format!("prefix cost {} > {bound:.0} on {name}", run.cost))?;
    }
    Ok(format!(
        "{} grid instances; worst cost/bound: interval {:.3}, relaxed {:.3}, prefix {:.5} (K = {k})",
        cases.len(),
        worst[0],
        worst[1],
        worst[2]
    ))
}

fn empirical_exponent() -> Outcome {
    let start = Instant::now();
    let mut reports: Vec<RunReport> = Vec::new();
    for g in [Generator::Uniform, Generator::Clustered] {
        for step in 0..14 {
            let n = (14.0 * 1.35f64.powi(step)) as usize;
            for seed in 0..2 {
                let u = 1_000_000;
                let spec = RunSpec { generator: g, n, m: n, u, ..Default::default() };
                let (inst, _) = generate(&spec, 100 + seed).unwrap();
                let run = solve_prefix_with(&inst.a, &inst.b, u, &mut Ctx::default(), CoveringOptions::default()).unwrap();
                let out = run.result.len() as u64;
                if (100..=100_000).contains(&out) {
                    reports.push(RunReport {
                        generator: g.to_string(),
                        params: format!("n={n}"),
                        seed,
                        trial: 0,
                        algorithm: "prefix43".into(),
                        n,
                        m: n,
                        out,
                        out_estimate: run.out_estimate,
                        cost: run.cost,
                        work: 0,
                        wall_ms: None,
                        correct: None,
                        lower_bound: None,
                        value: None,
                    });
                }
            }
        }
    }
    let fit = fit_exponent(&reports).map_err(|e| e.to_string())?;
    let lo = reports.iter().map(|r| r.out).min().unwrap();
    let hi = reports.iter().map(|r| r.out).max().unwrap();
    let took = start.elapsed();
    check(fit.slope <= 1.34 + 3.0 * fit.stderr, || format!("slope {:.4} ± {:.4}", fit.slope, fit.stderr))?;
    check(took < Duration::from_secs(600), || format!("took {took:?}"))?;
    Ok(format!("slope {:.4} ± {:.4} over {} runs, out in [{lo}, {hi}], {took:.1?}", fit.slope, fit.stderr, fit.points))
}

fn lower_bound_witness() -> Outcome {
    let mut lines = Vec::new();
    for base in [2, 3, 4] {
        for code_len in [4, 6] {
            let fam = build_xy_family(base, &greedy_code(code_len, 0.3).unwrap()).unwrap();
            let g = fam.g();
            let sigma = fam.sigma;
            for i in 0..g {
                let diag = common::sums(fam.x_sets[i].as_slice(), fam.y_sets[i].as_slice(), i64::MIN, i64::MAX).len();
                check(diag as i64 == sigma, || format!("|X_{i}+Y_{i}| = {diag} != {sigma}"))?;
                for j in 0..g {
                    if i != j {
                        let cross = common::sums(fam.x_sets[i].as_slice(), fam.y_sets[j].as_slice(), i64::MIN, i64::MAX).len();
                        check(cross as u64 <= fam.alpha, || format!("|X_{i}+Y_{j}| = {cross} > {}", fam.alpha))?;
                    }
                }
            }
            let hard = build_hard_instance(&fam).unwrap();
            let inst = &hard.instance;
            let out = common::sums(inst.a.as_slice(), inst.b.as_slice(), 0, inst.hi).len() as u128;
            let out_bound = (g as u128).pow(2) * fam.alpha as u128 + 2 * sigma as u128 + 1;
            check(out <= out_bound, || format!("out {out} > {out_bound}"))?;
            let run = solve_prefix_with(&inst.a, &inst.b, inst.hi, &mut Ctx::default(), CoveringOptions::default()).unwrap();
            let lb = g as f64 * sigma as f64 / 4.0;
            check(run.cost as f64 >= lb, || format!("base {base} len {code_len}: cost {} < g·σ/4 = {lb}", run.cost))?;
            check(validate_covering(&run.instance, &run.covering).is_unique_rectangle_covering(), || "invalid covering".into())?;
            lines.push(format!("b{base}/t{code_len}: g={g} cost={} >= {lb}", run.cost));
        }
    }
    Ok(lines.join("; "))
}

fn promise_chain() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut levels = 0;
    for trial in 0..200 {
        let a = common::random_set(&mut rng, 100, 20_000);
        let b = common::random_set(&mut rng, 100, 20_000);
        let lo = rng.gen_range(0..30_000);
        let hi = lo + rng.gen_range(0..20_000);
        let mut seen: Vec<(u32, i64, i64, Vec<i64>, Vec<i64>)> = Vec::new();
        let chain = solve_via_promise(&a, &b, lo, hi, |p| {
            let inst = Instance::new(p.a.clone(), p.b.clone(), p.lo, p.hi)?;
            let cov = find_interval_covering(&p.a, &p.b, p.lo, p.hi, p.t.len() as u64);
            let (s, _) = materialize_sumset(&inst, &cov, &mut Ctx::default())?;
            seen.push((p.level, p.lo, p.hi, s.as_slice().to_vec(), p.t.as_slice().to_vec()));
            Ok(s)
        })
        .map_err(|e| format!("trial {trial}: {e}"))?;
        let want = common::sums(a.as_slice(), b.as_slice(), lo, hi);
        check(chain.result.as_slice() == want, || format!("trial {trial}: final answer differs"))?;
        let out = want.len();
        let mut prev: Option<&Vec<i64>> = None;
        for (level, lo_i, hi_i, s, t) in &seen {
            let expect_t: Vec<i64> = match prev {
                None => (*lo_i..=*hi_i).collect(),
                Some(p) => {
                    let mut v: Vec<i64> = p.iter().flat_map(|x| [2 * x, 2 * x + 1, 2 * x + 2]).collect();
                    v.extend([*lo_i, lo_i + 1, *hi_i]);
                    v.retain(|x| (*lo_i..=*hi_i).contains(x));
                    v.sort_unstable();
                    v.dedup();
                    v
                }
            };
            check(*t == expect_t, || format!("trial {trial} level {level}: promise set differs"))?;
            check(s.iter().all(|x| t.binary_search(x).is_ok()), || format!("trial {trial} level {level}: S not in T"))?;
            check(t.len() <= 6 * s.len() + 9, || format!("trial {trial} level {level}: |T| = {} > 6|S|+9", t.len()))?;
            check(s.len() <= 2 * out + 2, || format!("trial {trial} level {level}: |S| = {} > 2out+2", s.len()))?;
            let d = 1i64 << level;
            let exact = common::sums(
                &a.iter().map(|x| x.div_euclid(d)).collect::<Vec<_>>(),
                &b.iter().map(|x| x.div_euclid(d)).collect::<Vec<_>>(),
                *lo_i,
                *hi_i,
            );
            check(*s == exact, || format!("trial {trial} level {level}: level answer differs"))?;
            prev = Some(s);
            levels += 1;
        }
    }
    Ok(format!("200 instances, {levels} levels checked"))
}

fn subset_sum_quality() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let trials = 400u32;
    let (mut sound, mut equal) = (0, 0);
    for trial in 0..trials {
        let n = rng.gen_range(1..=40);
        let t = rng.gen_range(1..=2000);
        let max_v = if trial % 2 == 0 { rng.gen_range(1..=t) } else { rng.gen_range(1..=t.min(100)) };
        let x = SparseSet::from_unsorted((0..n).map(|_| rng.gen_range(1..=max_v))).unwrap();
        let params = SSParams { fail_prob: 0.05, rng_seed: trial as u64, ..Default::default() };
        let got = subset_sums(&x, t, &params).map_err(|e| e.to_string())?;
        let want = common::subset_sums(x.as_slice(), t);
        if got.iter().all(|s| want.binary_search(&s).is_ok()) {
            sound += 1;
        }
        if got.as_slice() == want {
            equal += 1;
        }
    }
    check(sound == trials, || format!("only {sound}/{trials} outputs were subsets of the truth"))?;
    let p = 0.95;
    let floor = p - 3.0 * (p * (1.0 - p) / trials as f64).sqrt();
    let rate = equal as f64 / trials as f64;
    check(rate >= floor, || format!("equality rate {rate:.4} below {floor:.4}"))?;

    let mut max_ratio = 0f64;
    let mut partitions = 0;
    let rep = split_survival_check(&SparseSet::new(vec![1, 2, 3, 4]).unwrap(), 64, 0.0, 0, 1).map_err(|e| e.to_string())?;
    check(rep.violations == 0, || format!("ratio {} exceeds {}", rep.max_ratio, rep.bound))?;
    partitions += rep.partitions;
    for case in 0..100u64 {
        let len = rng.gen_range(2..=10);
        let z = SparseSet::from_unsorted((0..len).map(|_| rng.gen_range(1..=30))).unwrap();
        let u = 16 * z.max().unwrap() + rng.gen_range(0..200);
        let eps = rng.gen_range(0.0..=0.25);
        let rep = split_survival_check(&z, u, eps, 50, case).map_err(|e| e.to_string())?;
        check(rep.violations == 0, || format!("case {case}: ratio {} exceeds {}", rep.max_ratio, rep.bound))?;
        max_ratio = max_ratio.max(rep.max_ratio / rep.bound);
        partitions += rep.partitions;
    }
    Ok(format!(
        "sound {sound}/{trials}, equal {equal}/{trials} (floor {floor:.4}); {partitions} partitions, max ratio/bound {max_ratio:.3}; {:.1?}",
        start.elapsed()
    ))
}

fn reduction_demos() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for trial in 0..100 {
        let mut mat = || -> BoolMatrix { (0..8).map(|_| (0..8).map(|_| rng.gen_bool(0.25)).collect()).collect() };
        let (x, y) = (mat(), mat());
        let want: BoolMatrix = (0..8).map(|i| (0..8).map(|j| (0..8).any(|r| x[i][r] && y[r][j])).collect()).collect();
        check(naive_bmm(&x, &y) == want, || "library naive product disagrees".into())?;
        let got = sumset_kit::adversarial::bmm_via_sumset(&x, &y).map_err(|e| e.to_string())?;
        check(got == want, || format!("bmm trial {trial} differs"))?;
    }
    for trial in 0..100 {
        let n = rng.gen_range(1..=64);
        let sigma = rng.gen_range(1..=16);
        let text: Vec<u32> = (0..2 * n).map(|_| rng.gen_range(0..sigma)).collect();
        let pat: Vec<u32> = (0..n).map(|_| rng.gen_range(0..sigma)).collect();
        let want: Vec<usize> = (1..=n).map(|i| (0..n).filter(|&j| text[i + j] != pat[j]).count()).collect();
        let got = sumset_kit::adversarial::swhd_via_convolution(&text, &pat).map_err(|e| e.to_string())?;
        check(got == want, || format!("swhd trial {trial} differs"))?;
    }
    Ok("100 boolean products and 100 hamming-distance profiles match".into())
}

fn ruzsa_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let size = |p: &[i64], q: &[i64]| common::sums(p, q, i64::MIN, i64::MAX).len() as u128;
    for trial in 0..1000 {
        let mut pick = || -> Vec<i64> {
            let p = rng.gen_range(0.05..0.9);
            let v: Vec<i64> = (0..=32).filter(|_| rng.gen_bool(p)).collect();
            if v.is_empty() { vec![rng.gen_range(0..=32)] } else { v }
        };
        let (x, y, z, w) = (pick(), pick(), pick(), pick());
        let lhs = size(&x, &y) * z.len() as u128 * w.len() as u128;
        let rhs = size(&x, &z) * size(&z, &w) * size(&w, &y);
        check(lhs <= rhs, || format!("trial {trial}: {lhs} > {rhs}"))?;
        let lib = sumset_kit::oracle::ruzsa_check(
            &SparseSet::new(x).unwrap(),
            &SparseSet::new(y).unwrap(),
            &SparseSet::new(z).unwrap(),
            &SparseSet::new(w).unwrap(),
        );
        check(lib, || format!("trial {trial}: library check disagrees"))?;
    }
    Ok("1000 random 4-tuples of subsets of [32] satisfy the inequality".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("exponent formula", exponent_formula),
        ("oracle equivalence", oracle_equivalence),
        ("covering validity", covering_validity),
        ("cost bounds", cost_bounds),
        ("empirical exponent", empirical_exponent),
        ("lower-bound witness", lower_bound_witness),
        ("promise chain", promise_chain),
        ("subset sum soundness and completeness", subset_sum_quality),
        ("reduction demos", reduction_demos),
        ("ruzsa property suite", ruzsa_suite),
    ];
    let only: Option<usize> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        if only.is_some_and(|o| o != k + 1) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let took = start.elapsed();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS {name} [{took:.1?}]: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name} [{took:.1?}]: {detail}", k + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
