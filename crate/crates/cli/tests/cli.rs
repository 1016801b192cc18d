use std::process::{Command, Output};

use sumset_kit::bench::{read_csv_reports, RunReport, REPORT_HEADER};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sumset-kit"))
        .args(args)
        .env_remove("SUMSETKIT_SEED")
        .output()
        .expect("binary runs")
}

fn reports(out: &Output) -> Vec<RunReport> {
    read_csv_reports(&String::from_utf8_lossy(&out.stdout)).unwrap()
}

#[test]
fn uniform_prefix_grid_matches_oracle() {
    let out = run(&["gen=uniform", "n=64", "m=64", "u=4096", "algo=prefix43", "oracle=on", "trials=50", "seed=7"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with(REPORT_HEADER));
    let rows = reports(&out);
    assert_eq!(rows.len(), 50);
    assert!(rows.iter().all(|r| r.correct == Some(true)));
    assert_eq!(rows.iter().map(|r| r.trial).collect::<Vec<_>>(), (0..50).collect::<Vec<_>>());
}

#[test]
fn hard_instance_cost_reaches_lower_bound() {
    let out = run(&["gen=hard", "base=2", "codelen=6", "delta=0.3", "algo=prefix43"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &reports(&out)[0];
    assert!(r.cost as f64 >= r.lower_bound.unwrap(), "{r:?}");
}

#[test]
fn exponent_value() {
    let out = run(&["algo=exponent", "delta=0.2709", "base=10"]);
    assert_eq!(out.status.code(), Some(0));
    let c = reports(&out)[0].value.unwrap();
    assert!((1.047..=1.05).contains(&c), "{c}");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["bogus=1"]).status.code(), Some(2));
    assert_eq!(run(&["gen=nope"]).status.code(), Some(2));
    assert_eq!(run(&["n=abc"]).status.code(), Some(2));
    assert_eq!(run(&["gen=hard", "codelen=5"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn reports_are_reproducible() {
    let args = ["gen=clustered", "algo=interval", "lo=500", "u=3000", "trials=4", "seed=11", "oracle=on"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn seed_from_environment() {
    let flagged = run(&["trials=2", "seed=99", "n=20", "m=20"]);
    let from_env = Command::new(env!("CARGO_BIN_EXE_sumset-kit"))
        .args(["trials=2", "n=20", "m=20"])
        .env("SUMSETKIT_SEED", "99")
        .output()
        .unwrap();
    assert_eq!(flagged.stdout, from_env.stdout);
    let overridden = Command::new(env!("CARGO_BIN_EXE_sumset-kit"))
        .args(["trials=2", "n=20", "m=20", "seed=99"])
        .env("SUMSETKIT_SEED", "5")
        .output()
        .unwrap();
    assert_eq!(flagged.stdout, overridden.stdout);
}

#[test]
fn jsonl_and_out_file() {
    let dir = std::env::temp_dir().join(format!("sumset-kit-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("r.jsonl");
    let out = run(&["algo=subsetsum", "n=20", "u=500", "trials=3", "oracle=on", "format=jsonl", &format!("out_file={}", path.display())]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    let rows: Vec<RunReport> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.correct == Some(true)));
    std::fs::remove_dir_all(&dir).unwrap();
}
