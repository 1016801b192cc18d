//! Prints the worst observed `cost / (est^{4/3}·(1 + log n·log m)^2)` for the
//! prefix solver on random instances. `tests/fixtures/prefix_cost_k.txt`
//! holds a rounded-up value from this run.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sumset_kit::prefix::{solve_prefix_with, CoveringOptions};
use sumset_kit::{Ctx, SparseSet};

fn main() {
    let trials: u32 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(300);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for trial in 0..trials {
        let n = rng.gen_range(2..2000);
        let m = rng.gen_range(2..2000);
        let span: i64 = rng.gen_range(100..200_000);
        let a = SparseSet::from_unsorted((0..n).map(|_| rng.gen_range(0..span))).unwrap();
        let b = SparseSet::from_unsorted((0..m).map(|_| rng.gen_range(0..span))).unwrap();
        let u = rng.gen_range(0..span);
        let run = solve_prefix_with(&a, &b, u, &mut Ctx::default(), CoveringOptions::default()).unwrap();
        let (n, m) = (run.instance.a.len().max(1) as f64, run.instance.b.len().max(1) as f64);
        let est = run.out_estimate as f64;
        let logs = 1.0 + n.log2() * m.log2();
        let k = run.cost as f64 / (est.powf(4.0 / 3.0) * logs * logs).max(1.0);
        worst = worst.max(k);
        if trial % 20 == 0 {
            println!("trial {trial}: n={n} m={m} out={} cost={} K={k:.5}", run.result.len(), run.cost);
        }
    }
    println!("worst K {worst:.5}");
}
