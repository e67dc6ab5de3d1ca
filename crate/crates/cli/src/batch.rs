//! Repeated runs of several crossover operators.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use osgp_core::{CrossoverKind, RunLog};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::BatchSpec;
use crate::logs::{emit_logs, emit_summary};

/// One scheduled run and what came of it.
#[derive(Debug)]
pub struct BatchRun {
    pub kind: CrossoverKind,
    pub run_index: usize,
    pub seed: u64,
    pub outcome: Result<RunLog, String>,
    pub csv: Option<PathBuf>,
}

/// Per-operator statistics over final generations.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KindSummary {
    pub crossover: String,
    pub runs: usize,
    pub failed: usize,
    pub best_quality: f64,
    pub median_quality: f64,
    pub worst_quality: f64,
    pub median_tree_size: f64,
    pub median_selection_pressure: f64,
}

#[derive(Debug)]
pub struct BatchReport {
    pub runs: Vec<BatchRun>,
    pub summary: Vec<KindSummary>,
}

pub fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Summarizes one operator's runs; failed runs are only counted.
pub fn summarize(kind: CrossoverKind, runs: &[&RunLog], failed: usize) -> KindSummary {
    let mut q: Vec<f64> = runs.iter().map(|r| r.last().best_quality).collect();
    let mut size: Vec<f64> = runs.iter().map(|r| r.last().avg_tree_size).collect();
    let mut sp: Vec<f64> = runs.iter().map(|r| r.last().selection_pressure).collect();
    let best = q.iter().copied().fold(f64::INFINITY, f64::min);
    let worst = q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    KindSummary {
        crossover: kind.name().to_string(),
        runs: runs.len() + failed,
        failed,
        best_quality: if runs.is_empty() { f64::NAN } else { best },
        median_quality: median(&mut q),
        worst_quality: if runs.is_empty() { f64::NAN } else { worst },
        median_tree_size: median(&mut size),
        median_selection_pressure: median(&mut sp),
    }
}

/// Runs every (operator, repetition) pair, writes per-run CSVs and
/// `summary.csv` into `out_dir`, and reports results in schedule order
/// regardless of completion order. A failing run is recorded and the rest
/// continue.
pub fn run_batch(spec: &BatchSpec, out_dir: &Path) -> Result<BatchReport> {
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let jobs: Vec<(CrossoverKind, usize)> = spec
        .kinds
        .iter()
        .flat_map(|&k| (0..spec.repetitions).map(move |i| (k, i)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.workers)
        .build()
        .context("starting worker pool")?;
    let runs: Vec<BatchRun> = pool.install(|| {
        jobs.par_iter()
            .map(|&(kind, run_index)| {
                let seed = spec.seed_for(run_index);
                let mut config = spec.base.clone();
                config.crossover = kind;
                let started = Instant::now();
                let outcome = osgp_core::run(&config, seed).map_err(|e| e.to_string());
                let csv = match &outcome {
                    Ok(log) => {
                        let written = emit_logs(log, out_dir)
                            .and_then(|p| emit_summary(log, out_dir, started.elapsed()).map(|_| p));
                        match written {
                            Ok(p) => Some(p),
                            Err(e) => {
                                return BatchRun { kind, run_index, seed, outcome: Err(format!("{e:#}")), csv: None }
                            }
                        }
                    }
                    Err(_) => None,
                };
                BatchRun { kind, run_index, seed, outcome, csv }
            })
            .collect()
    });

    let summary: Vec<KindSummary> = spec
        .kinds
        .iter()
        .map(|&kind| {
            let mine = runs.iter().filter(|r| r.kind == kind);
            let ok: Vec<&RunLog> = mine.clone().filter_map(|r| r.outcome.as_ref().ok()).collect();
            let failed = mine.filter(|r| r.outcome.is_err()).count();
            summarize(kind, &ok, failed)
        })
        .collect();
    write_summary(&summary, &out_dir.join("summary.csv"))?;
    Ok(BatchReport { runs, summary })
}

pub fn write_summary(rows: &[KindSummary], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
