//! Command-line front end: seeded benchmark grids and the statistical
//! verification battery.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use max1c::bench::{read_results, render_table, run_bench, write_outputs, BenchConfig};
use max1c::verify::{render_checks, run_all_checks};

#[derive(Parser)]
#[command(
    name = "max1c",
    version,
    about = "Multi-cut stochastic approximation toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Benchmark harness
    #[command(subcommand)]
    Bench(BenchCommand),
    /// Statistical verification of the method's bounds
    #[command(subcommand)]
    Verify(VerifyCommand),
}

#[derive(Subcommand)]
enum BenchCommand {
    /// Run a benchmark grid from a config file
    Run(BenchRunArgs),
    /// Re-render tables from a results directory
    Table(BenchTableArgs),
}

#[derive(Args)]
struct BenchRunArgs {
    /// Path to the key = value config file
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `out` in the config)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (overrides the config)
    #[arg(long)]
    workers: Option<usize>,
    /// Master seed (overrides the config)
    #[arg(long)]
    master_seed: Option<u64>,
}

#[derive(Args)]
struct BenchTableArgs {
    /// Results directory containing per_run.csv (and timings.csv)
    #[arg(long = "in")]
    input: PathBuf,
}

#[derive(Subcommand)]
enum VerifyCommand {
    /// Run every check and emit a pass/fail table
    All(VerifyAllArgs),
}

#[derive(Args)]
struct VerifyAllArgs {
    /// Directory for the report file (also printed to stdout)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed for the Monte Carlo checks
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Bench(BenchCommand::Run(args)) => bench_run(args),
        Command::Bench(BenchCommand::Table(args)) => bench_table(args),
        Command::Verify(VerifyCommand::All(args)) => verify_all(args),
    }
}

fn bench_run(args: BenchRunArgs) -> ExitCode {
    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.config.display());
            return ExitCode::from(2);
        }
    };
    let mut config = match BenchConfig::parse(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(workers) = args.workers {
        config.workers = workers;
    }
    if let Some(seed) = args.master_seed {
        config.master_seed = seed;
    }
    let out_dir = args
        .out
        .clone()
        .or_else(|| config.out_dir.as_ref().map(PathBuf::from));
    let out_dir = match out_dir {
        Some(d) => d,
        None => {
            eprintln!("error: no output directory (pass --out or set `out` in the config)");
            return ExitCode::from(2);
        }
    };
    let rows = match run_bench(&config) {
        Ok(rows) => rows,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = write_outputs(&rows, &config, &out_dir) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let failures = rows.iter().filter(|r| r.error.is_some()).count();
    println!(
        "{} runs, {} failed; results in {}",
        rows.len(),
        failures,
        out_dir.display()
    );
    for row in rows.iter().filter(|r| r.error.is_some()) {
        eprintln!(
            "failed: {} {} N={} replicate={}: {}",
            row.instance,
            row.algorithm,
            row.iterations,
            row.replicate,
            row.error.as_deref().unwrap_or("")
        );
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn bench_table(args: BenchTableArgs) -> ExitCode {
    match read_results(&args.input) {
        Ok(rows) => {
            print!("{}", render_table(&rows));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn verify_all(args: VerifyAllArgs) -> ExitCode {
    let reports = run_all_checks(args.seed);
    let rendered = render_checks(&reports);
    print!("{rendered}");
    if let Some(dir) = &args.out {
        if let Err(e) = std::fs::create_dir_all(dir)
            .and_then(|_| std::fs::write(dir.join("verify_report.txt"), &rendered))
        {
            eprintln!("error: cannot write report: {e}");
            return ExitCode::from(2);
        }
    }
    if reports.iter().all(|r| r.pass) {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
