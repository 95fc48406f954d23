//! `magicbench`: ground-state benchmark sweeps for the transverse-field
//! Ising chain, with exact-diagonalization references and stabilizer-entropy
//! scoring of standalone statevector files.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use magicbench_core::sweep::{self, read_state_file, BenchmarkRecord, SweepConfig};
use magicbench_core::{aggregate, emit_report, m2_fast, run_sweep};

#[derive(Parser)]
#[command(name = "magicbench", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run (or resume) a benchmark sweep described by a TOML config.
    Sweep(SweepArgs),
    /// Rebuild aggregates and plots from an existing record set.
    Report(ReportArgs),
    /// Exact diagonalization of one (n, h) point.
    Ed(EdArgs),
    /// 2-Rényi stabilizer entropy of a statevector file.
    Magic(MagicArgs),
}

#[derive(Args)]
struct SweepArgs {
    /// TOML file mirroring the sweep configuration.
    #[arg(long)]
    config: PathBuf,
    /// Override the configured worker count.
    #[arg(long)]
    workers: Option<usize>,
    /// Override the configured base seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the configured output directory.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// records.jsonl journal (or a records.json written by an earlier run).
    #[arg(long)]
    records: PathBuf,
    /// Where to write the report files (defaults to the records' directory).
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct EdArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    h: f64,
    /// Ising coupling.
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    j: f64,
}

#[derive(Args)]
struct MagicArgs {
    /// "magicbench-state v1" file.
    #[arg(long)]
    state: PathBuf,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Sweep(args) => {
            let text = std::fs::read_to_string(&args.config)
                .with_context(|| format!("reading {}", args.config.display()))?;
            let mut config: SweepConfig =
                toml::from_str(&text).context("parsing sweep config")?;
            if let Some(workers) = args.workers {
                config.workers = workers;
            }
            if let Some(seed) = args.seed {
                config.seed_base = seed;
            }
            if let Some(output) = args.output {
                config.output_dir = output;
            }
            let records = run_sweep(&config)?;
            let failed = records.iter().filter(|r| r.is_failed()).count();
            println!(
                "{} records ({} failed) -> {}",
                records.len(),
                failed,
                config.output_dir.display()
            );
            if failed > 0 {
                for r in records.iter().filter(|r| r.is_failed()) {
                    eprintln!(
                        "failed: {} h={} repeat={}: {}",
                        r.method.as_str(),
                        r.h,
                        r.repeat,
                        r.error.as_deref().unwrap_or("unknown")
                    );
                }
                return Ok(ExitCode::from(2));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Report(args) => {
            let records = load_records(&args.records)?;
            if records.is_empty() {
                bail!("no records found in {}", args.records.display());
            }
            let output = match args.output {
                Some(dir) => dir,
                None => args
                    .records
                    .parent()
                    .map(PathBuf::from)
                    .unwrap_or_else(|| PathBuf::from(".")),
            };
            std::fs::create_dir_all(&output)?;
            let rows = aggregate(&records);
            emit_report(&rows, &records, &output)?;
            println!(
                "report for {} records -> {}",
                records.len(),
                output.display()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Ed(args) => {
            let (ground, m2) = sweep::ed_point(args.n, args.j, args.h)?;
            println!("n = {}, J = {}, h = {}", args.n, args.j, args.h);
            println!("energy = {:.15}", ground.energy);
            println!("m2 = {:.12}", m2);
            println!("gap = {:.6e}", ground.gap);
            if ground.parity_projected {
                println!("note: degenerate ground space; even-parity representative reported");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Magic(args) => {
            let mut psi = read_state_file(&args.state)?;
            psi.normalize();
            let result = m2_fast(&psi)?;
            println!("n = {}", psi.n());
            println!("m2 = {:.12}", result.m2);
            println!("pauli_fourth_moment = {:.15}", result.pauli_fourth_moment);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn load_records(path: &PathBuf) -> anyhow::Result<Vec<BenchmarkRecord>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    if text.trim_start().starts_with('[') {
        Ok(serde_json::from_str(&text).context("parsing records.json")?)
    } else {
        let mut out = Vec::new();
        for line in text.lines() {
            if line.trim().is_empty() {
                continue;
            }
            out.push(serde_json::from_str(line).context("parsing journal line")?);
        }
        Ok(out)
    }
}
