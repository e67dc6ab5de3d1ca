use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use osgp_cli::aggregate::{aggregate, read_matching, write_aggregate, Quantity};
use osgp_cli::batch::run_batch;
use osgp_cli::config::{parse_batch, parse_config};
use osgp_cli::logs::{emit_logs, emit_summary};
use osgp_core::problems::{self, MackeyGlassParams};
use osgp_core::{CrossoverKind, Dataset, ProblemKind};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(name = "osgp", version, about = "Offspring-selection genetic programming")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration and write its per-generation CSV.
    Run {
        config: PathBuf,
        /// Override the configured seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the configured crossover.
        #[arg(long)]
        crossover: Option<CrossoverKind>,
        /// Override the configured output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every crossover of a batch file repeatedly.
    Batch {
        spec: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the worker count (0 = all CPUs).
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Write a benchmark dataset to CSV.
    GenData {
        problem: ProblemKind,
        out: PathBuf,
        /// Row count (Poly-10 and classification default 100 and 400; the
        /// Mackey-Glass default is the 928-row training window).
        #[arg(long)]
        rows: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Mackey-Glass only: write the raw series instead of the lag table.
        #[arg(long)]
        series: bool,
    },
    /// Min/median/max of one logged quantity across runs.
    Aggregate {
        quantity: Quantity,
        /// Glob matching per-run CSV files (quote it).
        pattern: String,
        out: PathBuf,
        /// Grid spacing in evaluations.
        #[arg(long)]
        step: Option<u64>,
    },
}

fn main() -> ExitCode {
    match execute(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Run { config, seed, crossover, out } => {
            let mut c = parse_config(&config)?;
            if let Some(k) = crossover {
                c.crossover = k;
            }
            let seed = seed.unwrap_or(c.seed);
            let dir = out.unwrap_or_else(|| c.output_dir.clone());
            let started = Instant::now();
            let log = osgp_core::run(&c, seed)?;
            let csv = emit_logs(&log, &dir)?;
            emit_summary(&log, &dir, started.elapsed())?;
            print!("{}", log.summary(started.elapsed()));
            println!("log: {}", csv.display());
        }
        Command::Batch { spec, out, workers } => {
            let mut spec = parse_batch(&spec)?;
            if let Some(w) = workers {
                spec.workers = w;
            }
            let dir = out.unwrap_or_else(|| spec.base.output_dir.clone());
            let report = run_batch(&spec, &dir)?;
            for run in report.runs.iter().filter(|r| r.outcome.is_err()) {
                eprintln!(
                    "run {} {} seed {} failed: {}",
                    run.kind,
                    run.run_index,
                    run.seed,
                    run.outcome.as_ref().unwrap_err()
                );
            }
            println!("crossover,runs,failed,best,median,worst,median_size,median_pressure");
            for s in &report.summary {
                println!(
                    "{},{},{},{},{},{},{:.2},{:.2}",
                    s.crossover,
                    s.runs,
                    s.failed,
                    s.best_quality,
                    s.median_quality,
                    s.worst_quality,
                    s.median_tree_size,
                    s.median_selection_pressure
                );
            }
            println!("summary: {}", dir.join("summary.csv").display());
        }
        Command::GenData { problem, out, rows, seed, series } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let ds = match problem {
                ProblemKind::Poly10 => problems::gen_poly10(&mut rng, rows.unwrap_or(100)),
                ProblemKind::MackeyGlass => {
                    let max_lag = problems::MACKEY_GLASS_LAGS[0];
                    let params = MackeyGlassParams::default();
                    if series {
                        let n = rows.unwrap_or(problems::MACKEY_GLASS_ROWS + max_lag);
                        let xs = problems::gen_mackey_glass(n, &params);
                        Dataset::from_columns(vec!["x".into()], vec![xs], 0)?
                    } else {
                        let n = rows.unwrap_or(problems::MACKEY_GLASS_ROWS);
                        let xs = problems::gen_mackey_glass(n + max_lag, &params);
                        problems::lag_embed(&xs, &problems::MACKEY_GLASS_LAGS, n)?
                    }
                }
                ProblemKind::Classification => problems::synthetic_classification(&mut rng, rows.unwrap_or(400)),
            };
            problems::write_dataset_csv(&ds, &out)?;
            println!("wrote {} rows to {}", ds.rows(), out.display());
        }
        Command::Aggregate { quantity, pattern, out, step } => {
            let (paths, logs) = read_matching(&pattern)?;
            let rows = aggregate(&logs, quantity, step)?;
            write_aggregate(&rows, &out).with_context(|| format!("writing {}", out.display()))?;
            println!("aggregated {} runs into {} ({} grid points)", paths.len(), out.display(), rows.len());
        }
    }
    Ok(())
}
