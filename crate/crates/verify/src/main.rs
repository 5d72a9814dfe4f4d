use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qshelf::partitions::{witnesses, ConditionSet};
use qshelf_verify::{run_suite, Config, ConfigError, Fault, Format};

#[derive(Parser)]
#[command(name = "verify", about = "Exact verification suites for the BGG shelf series")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Triple product, product vs sum sides, shelf-0 forms
    Identities(RunArgs),
    /// Shelf recursion against closed forms, edge matching
    Shelves(RunArgs),
    /// Valuation bounds on every shelf
    Empirical(RunArgs),
    /// Transfer matrices and h polynomials
    Matrices(RunArgs),
    /// Partition oracles against h, G and ghost series
    Combinatorics(RunArgs),
    /// Trivariate functional equations, dictionary, overpartitions
    Axq(RunArgs),
    /// Every suite
    All(RunArgs),
    /// List the partitions admitted by a condition set
    Witness(WitnessArgs),
}

#[derive(Args)]
struct RunArgs {
    /// k range, `A..B` or `A`
    #[arg(long)]
    k: Option<String>,
    /// truncation degree N
    #[arg(long)]
    degree: Option<String>,
    /// shelf range `J..Jmax`, or `Jmax` for `0..Jmax`
    #[arg(long)]
    shelves: Option<String>,
    /// starting shelves J of the h polynomials
    #[arg(long = "start-shelf")]
    start_shelf: Option<String>,
    /// weight bound of the partition oracles
    #[arg(long)]
    nmax: Option<String>,
    /// weight bound of the overpartition oracle
    #[arg(long = "nmax-over")]
    nmax_over: Option<String>,
    /// q truncation of trivariate series (default 2N+1)
    #[arg(long = "q-prec")]
    q_prec: Option<String>,
    #[arg(long)]
    format: Option<String>,
    /// record wall time per check (reports are then no longer byte-stable)
    #[arg(long)]
    timings: bool,
    /// write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// flat `key = value` file; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
    /// corrupt one coefficient of a check, `CHECK[@EXP]`
    #[arg(long = "inject-fault", hide = true)]
    inject_fault: Option<String>,
}

#[derive(Args)]
struct WitnessArgs {
    #[arg(long)]
    k: i64,
    #[arg(long)]
    i: i64,
    /// weight
    #[arg(long)]
    n: i64,
    #[arg(long = "start-shelf", default_value_t = 0)]
    start_shelf: i64,
    /// ghost conditions instead of the official ones
    #[arg(long)]
    ghost: bool,
}

fn config_from(args: &RunArgs) -> Result<Config, ConfigError> {
    let mut c = Config::default();
    if let Some(p) = &args.config {
        c.load_file(p)?;
    }
    let flags = [
        ("k", &args.k),
        ("degree", &args.degree),
        ("shelves", &args.shelves),
        ("start-shelf", &args.start_shelf),
        ("nmax", &args.nmax),
        ("nmax-over", &args.nmax_over),
        ("q-prec", &args.q_prec),
        ("format", &args.format),
    ];
    for (key, v) in flags {
        if let Some(v) = v {
            c.set(key, v)?;
        }
    }
    if args.timings {
        c.timings = true;
    }
    Ok(c)
}

fn init_pool() {
    if let Some(n) = std::env::var("QSHELF_THREADS").ok().and_then(|v| v.parse::<usize>().ok()).filter(|&n| n > 0) {
        // Only fails if a pool already exists, which is harmless here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn run(suite: &str, args: &RunArgs) -> ExitCode {
    let config = match config_from(args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(2);
        }
    };
    let fault = match args.inject_fault.as_deref().map(Fault::parse).transpose() {
        Ok(f) => f,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(2);
        }
    };
    init_pool();
    let report = match run_suite(suite, &config, fault.as_ref()) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(2);
        }
    };
    let text = match config.format {
        Format::Json => report.to_json(),
        Format::Text => report.to_text(),
    };
    match &args.out {
        Some(path) => {
            if let Err(e) = fs::write(path, &text) {
                eprintln!("{}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(report.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (suite, args) = match &cli.cmd {
        Cmd::Identities(a) => ("identities", a),
        Cmd::Shelves(a) => ("shelves", a),
        Cmd::Empirical(a) => ("empirical", a),
        Cmd::Matrices(a) => ("matrices", a),
        Cmd::Combinatorics(a) => ("combinatorics", a),
        Cmd::Axq(a) => ("axq", a),
        Cmd::All(a) => ("all", a),
        Cmd::Witness(w) => {
            if w.k < 2 || !(1..=w.k).contains(&w.i) || w.start_shelf < 0 {
                eprintln!("config error: need k ≥ 2, 1 ≤ i ≤ k, start shelf ≥ 0");
                return ExitCode::from(2);
            }
            let cond = if w.ghost {
                ConditionSet::Ghost { k: w.k, i: w.i, start: w.start_shelf }
            } else {
                ConditionSet::G { k: w.k, i: w.i, start: w.start_shelf }
            };
            let found = witnesses(cond, w.n);
            for p in &found {
                println!("{p}");
            }
            println!("{} partitions of {}", found.len(), w.n);
            return ExitCode::SUCCESS;
        }
    };
    run(suite, args)
}
