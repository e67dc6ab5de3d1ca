//! Cross-run statistics on a common evaluations grid.
//!
//! Each run's per-generation series is linearly interpolated in the
//! cumulative evaluation count. The grid starts at the latest first record
//! among the runs and ends at the largest final evaluation count; a run that
//! finished earlier contributes its last value from then on.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use osgp_core::runlog::read_generations_file;
use osgp_core::GenerationLog;
use serde::Serialize;

use crate::batch::median;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantity {
    BestQuality,
    AvgTreeSize,
    SelectionPressure,
}

impl Quantity {
    pub const ALL: [Quantity; 3] = [Quantity::BestQuality, Quantity::AvgTreeSize, Quantity::SelectionPressure];

    pub fn name(self) -> &'static str {
        match self {
            Quantity::BestQuality => "best_quality",
            Quantity::AvgTreeSize => "avg_tree_size",
            Quantity::SelectionPressure => "selection_pressure",
        }
    }

    pub fn of(self, row: &GenerationLog) -> f64 {
        match self {
            Quantity::BestQuality => row.best_quality,
            Quantity::AvgTreeSize => row.avg_tree_size,
            Quantity::SelectionPressure => row.selection_pressure,
        }
    }
}

impl FromStr for Quantity {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Quantity::ALL
            .into_iter()
            .find(|q| q.name() == s)
            .ok_or_else(|| format!("unknown quantity `{s}` (expected best_quality, avg_tree_size or selection_pressure)"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AggregateRow {
    pub evaluations: u64,
    pub min: f64,
    pub median: f64,
    pub max: f64,
    pub runs: usize,
}

/// Value of a run at `x` evaluations; `points` are sorted by evaluations.
pub fn interpolate(points: &[(u64, f64)], x: u64) -> f64 {
    let first = points[0];
    if x <= first.0 {
        return first.1;
    }
    let last = points[points.len() - 1];
    if x >= last.0 {
        return last.1;
    }
    // first index with evaluations >= x
    let hi = points.partition_point(|p| p.0 < x);
    let (x1, y1) = points[hi];
    let (x0, y0) = points[hi - 1];
    if x1 == x || x0 == x1 {
        return y1;
    }
    let t = (x - x0) as f64 / (x1 - x0) as f64;
    y0 + t * (y1 - y0)
}

/// Grid spacing used when none is given: about 200 points.
pub fn default_step(start: u64, end: u64) -> u64 {
    ((end - start) / 200).max(1)
}

pub fn aggregate(runs: &[Vec<GenerationLog>], quantity: Quantity, step: Option<u64>) -> Result<Vec<AggregateRow>> {
    if runs.is_empty() {
        bail!("no runs to aggregate");
    }
    let mut series = Vec::with_capacity(runs.len());
    for run in runs {
        if run.is_empty() {
            bail!("a run log has no generations");
        }
        let mut pts: Vec<(u64, f64)> = run.iter().map(|r| (r.evaluations, quantity.of(r))).collect();
        pts.sort_by_key(|p| p.0);
        series.push(pts);
    }
    let start = series.iter().map(|s| s[0].0).max().unwrap();
    let end = series.iter().map(|s| s[s.len() - 1].0).max().unwrap();
    let step = match step {
        Some(0) => bail!("step must be positive"),
        Some(s) => s,
        None => default_step(start, end),
    };
    let mut rows = Vec::new();
    let mut x = start;
    loop {
        let mut values: Vec<f64> = series.iter().map(|s| interpolate(s, x)).collect();
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        rows.push(AggregateRow { evaluations: x, min, median: median(&mut values), max, runs: series.len() });
        if x >= end {
            break;
        }
        x = (x + step).min(end);
    }
    Ok(rows)
}

/// Expands `pattern` and reads every matching CSV, sorted by path.
pub fn read_matching(pattern: &str) -> Result<(Vec<PathBuf>, Vec<Vec<GenerationLog>>)> {
    let mut paths: Vec<PathBuf> = glob::glob(pattern)
        .with_context(|| format!("bad glob `{pattern}`"))?
        .collect::<Result<_, _>>()?;
    paths.sort();
    if paths.is_empty() {
        bail!("no files match `{pattern}`");
    }
    let logs = paths
        .iter()
        .map(|p| read_generations_file(p).map_err(anyhow::Error::from))
        .collect::<Result<Vec<_>>>()?;
    Ok((paths, logs))
}

pub fn write_aggregate(rows: &[AggregateRow], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
