//! `sumset-kit key=value ...`: generate instances, run an algorithm over seeded
//! trials and print one report row per trial.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use sumset_kit::bench::{run_grid, write_reports, Algorithm, Format, Generator, RunSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Parser, Debug)]
#[command(
    name = "sumset-kit",
    version,
    about = "Run restricted-sumset algorithms on generated instances",
    after_help = "Flags may also be written as key=value, e.g. `sumset-kit gen=uniform n=64 algo=prefix43 oracle=on`."
)]
struct Args {
    /// uniform, clustered, progression, hard or twoshift
    #[arg(long, default_value = "uniform")]
    gen: Generator,
    /// prefix43, interval, relaxed, topk, subsetsum, subsetsum_relaxed or exponent
    #[arg(long, default_value = "prefix43")]
    algo: Algorithm,
    #[arg(long, default_value_t = 64)]
    n: usize,
    #[arg(long, default_value_t = 64)]
    m: usize,
    #[arg(long, default_value_t = 4096)]
    u: i64,
    /// Lower end of the interval (interval algorithm only)
    #[arg(long)]
    lo: Option<i64>,
    #[arg(long, default_value_t = 16)]
    k: usize,
    /// Subset-sum target, defaults to u
    #[arg(long)]
    t: Option<i64>,
    #[arg(long, default_value_t = 0.5)]
    zeta: f64,
    #[arg(long, default_value_t = 2)]
    base: i64,
    #[arg(long, default_value_t = 4)]
    codelen: u32,
    #[arg(long, default_value_t = 0.3)]
    delta: f64,
    #[arg(long, default_value_t = 1)]
    trials: u64,
    #[arg(long, env = "SUMSETKIT_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "off")]
    oracle: Switch,
    /// Wall-clock timing makes reports differ between runs
    #[arg(long, value_enum, default_value = "off")]
    timing: Switch,
    /// csv or jsonl
    #[arg(long, default_value = "csv")]
    format: Format,
    #[arg(long = "out_file")]
    out_file: Option<PathBuf>,
}

/// Rewrites `key=value` tokens to `--key=value`.
fn normalize_args(args: impl IntoIterator<Item = String>) -> Vec<String> {
    let mut it = args.into_iter();
    let mut out: Vec<String> = it.next().into_iter().collect();
    out.extend(it.map(|a| if !a.starts_with('-') && a.contains('=') { format!("--{a}") } else { a }));
    out
}

fn main() -> ExitCode {
    let args = match Args::try_parse_from(normalize_args(std::env::args())) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let spec = RunSpec {
        generator: args.gen,
        algorithm: args.algo,
        n: args.n,
        m: args.m,
        u: args.u,
        lo: args.lo,
        k: args.k,
        t: args.t,
        zeta: args.zeta,
        base: args.base,
        code_len: args.codelen,
        delta: args.delta,
        trials: args.trials,
        seed: args.seed,
        oracle: args.oracle == Switch::On,
        timing: args.timing == Switch::On,
    };
    let reports = match run_grid(&spec) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let sink: Box<dyn Write> = match &args.out_file {
        Some(p) => match File::create(p) {
            Ok(f) => Box::new(BufWriter::new(f)),
            Err(e) => {
                eprintln!("error: cannot create {}: {e}", p.display());
                return ExitCode::from(2);
            }
        },
        None => Box::new(io::stdout().lock()),
    };
    if let Err(e) = write_reports(&reports, args.format, sink) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let failed = reports.iter().filter(|r| r.correct == Some(false)).count();
    if failed > 0 {
        eprintln!("{failed} of {} trials disagree with the oracle", reports.len());
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rewrites_key_value_tokens() {
        let got = normalize_args(["bin", "n=4", "--m=3", "-h", "plain"].map(String::from));
        assert_eq!(got, ["bin", "--n=4", "--m=3", "-h", "plain"]);
    }
}
