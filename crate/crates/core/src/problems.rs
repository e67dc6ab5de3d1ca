//! Benchmark problems: Poly-10, Mackey-Glass and CSV classification data.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interp::Dataset;
use crate::trees::{ConstantSampler, Function, PrimitiveSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    Poly10,
    MackeyGlass,
    Classification,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 3] = [
        ProblemKind::Poly10,
        ProblemKind::MackeyGlass,
        ProblemKind::Classification,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::Poly10 => "poly10",
            ProblemKind::MackeyGlass => "mackey_glass",
            ProblemKind::Classification => "classification",
        }
    }

    pub fn default_max_evaluations(self) -> u64 {
        match self {
            ProblemKind::Poly10 => 1_000_000,
            ProblemKind::MackeyGlass => 5_000_000,
            ProblemKind::Classification => 2_000_000,
        }
    }

    pub fn functions(self) -> Vec<Function> {
        match self {
            ProblemKind::Poly10 | ProblemKind::MackeyGlass => Function::ARITHMETIC.to_vec(),
            ProblemKind::Classification => Function::ALL.to_vec(),
        }
    }

    pub fn constants(self) -> Option<ConstantSampler> {
        match self {
            ProblemKind::Poly10 => None,
            ProblemKind::MackeyGlass => Some(ConstantSampler::Integer { lo: 1, hi: 127 }),
            ProblemKind::Classification => Some(ConstantSampler::Real { lo: -20.0, hi: 20.0 }),
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.to_ascii_lowercase().replace('-', "_");
        let norm = match norm.as_str() {
            "poly_10" => "poly10",
            "mackeyglass" => "mackey_glass",
            "wisconsin" => "classification",
            other => other,
        }
        .to_string();
        ProblemKind::ALL
            .into_iter()
            .find(|k| k.name() == norm)
            .ok_or_else(|| {
                Error::config(
                    "problem",
                    format!("unknown problem `{s}`, expected poly10, mackey_glass or classification"),
                )
            })
    }
}

/// A dataset together with the primitive set evolved against it.
#[derive(Clone, Debug)]
pub struct Problem {
    pub kind: ProblemKind,
    pub dataset: Dataset,
    pub prims: PrimitiveSet,
}

impl Problem {
    /// Uses every non-target column as a variable and the function and
    /// constant sets of `kind`.
    pub fn new(kind: ProblemKind, dataset: Dataset) -> Result<Self> {
        let variables = dataset
            .input_indices()
            .into_iter()
            .map(|c| (c, dataset.names()[c].clone()))
            .collect();
        let prims = PrimitiveSet::new(kind.functions(), variables, kind.constants())?;
        Ok(Problem {
            kind,
            dataset,
            prims,
        })
    }
}

/// Target of the Poly-10 benchmark.
pub fn poly10_target(x: &[f64]) -> f64 {
    x[0] * x[1] + x[2] * x[3] + x[4] * x[5] + x[0] * x[6] * x[8] + x[2] * x[5] * x[9]
}

/// `n` rows of ten inputs uniform in `[-1, 1)` plus the Poly-10 target.
pub fn gen_poly10<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Dataset {
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let mut row: Vec<f64> = (0..10).map(|_| rng.random_range(-1.0..1.0)).collect();
            row.push(poly10_target(&row));
            row
        })
        .collect();
    let mut names: Vec<String> = (1..=10).map(|i| format!("x{i}")).collect();
    names.push("y".into());
    Dataset::from_rows(names, &rows, 10).expect("generated rows are rectangular and finite")
}

/// Mackey-Glass integration settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MackeyGlassParams {
    pub tau: f64,
    pub a: f64,
    pub b: f64,
    pub exponent: f64,
    /// Constant history for `t <= 0`.
    pub initial: f64,
    pub step: f64,
    pub sample_interval: f64,
    /// Leading samples dropped before output.
    pub transient: usize,
}

impl Default for MackeyGlassParams {
    fn default() -> Self {
        MackeyGlassParams {
            tau: 17.0,
            a: 0.2,
            b: 0.1,
            exponent: 10.0,
            initial: 1.2,
            step: 0.1,
            sample_interval: 1.0,
            transient: 100,
        }
    }
}

/// Integrates `dx/dt = a x(t-tau) / (1 + x(t-tau)^n) - b x(t)` with classic
/// fixed-step RK4 and returns `count` samples taken every
/// `sample_interval` time units after the transient.
///
/// The delayed value at half steps is the mean of the two neighbouring grid
/// values. With `tau = 0` the equation is an ordinary ODE and the delayed
/// argument is the stage value itself.
pub fn gen_mackey_glass(count: usize, params: &MackeyGlassParams) -> Vec<f64> {
    let MackeyGlassParams {
        tau,
        a,
        b,
        exponent,
        initial,
        step,
        sample_interval,
        transient,
    } = *params;
    let delay = (tau / step).round() as usize;
    let per_sample = ((sample_interval / step).round() as usize).max(1);
    let total_samples = transient + count;
    let steps = (total_samples.saturating_sub(1)) * per_sample;

    let rhs = |x: f64, xd: f64| a * xd / (1.0 + xd.powf(exponent)) - b * x;

    // grid[k] = x(k*step); the history before t = 0 is the constant `initial`.
    let mut grid = Vec::with_capacity(steps + 1);
    grid.push(initial);
    let past = |grid: &[f64], k: isize| -> f64 {
        if k < 0 {
            initial
        } else {
            grid[k as usize]
        }
    };
    for k in 0..steps {
        let x = grid[k];
        let k = k as isize;
        let (k1, k2, k3, k4) = if delay == 0 {
            let k1 = rhs(x, x);
            let x2 = x + 0.5 * step * k1;
            let k2 = rhs(x2, x2);
            let x3 = x + 0.5 * step * k2;
            let k3 = rhs(x3, x3);
            let x4 = x + step * k3;
            (k1, k2, k3, rhs(x4, x4))
        } else {
            let d = delay as isize;
            let lag0 = past(&grid, k - d);
            let lag1 = past(&grid, k - d + 1);
            let lag_mid = 0.5 * (lag0 + lag1);
            let k1 = rhs(x, lag0);
            let k2 = rhs(x + 0.5 * step * k1, lag_mid);
            let k3 = rhs(x + 0.5 * step * k2, lag_mid);
            let k4 = rhs(x + step * k3, lag1);
            (k1, k2, k3, k4)
        };
        grid.push(x + step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    }
    grid.into_iter()
        .step_by(per_sample)
        .skip(transient)
        .take(count)
        .collect()
}

/// Lags used for the Mackey-Glass benchmark, largest first.
pub const MACKEY_GLASS_LAGS: [usize; 8] = [128, 64, 32, 16, 8, 4, 2, 1];
/// Training rows used for the Mackey-Glass benchmark.
pub const MACKEY_GLASS_ROWS: usize = 928;

/// Time-delay embedding. Row `i` predicts `series[t]`, `t = max_lag + i`,
/// from the inputs `series[t - lag]`, one column per lag named `x{lag}`.
pub fn lag_embed(series: &[f64], lags: &[usize], count: usize) -> Result<Dataset> {
    if lags.is_empty() || lags.contains(&0) {
        return Err(Error::InvalidDataset("lags must be positive and non-empty".into()));
    }
    let max_lag = *lags.iter().max().expect("non-empty");
    if count + max_lag > series.len() {
        return Err(Error::SeriesTooShort {
            len: series.len(),
            rows: count,
            max_lag,
        });
    }
    let mut columns: Vec<Vec<f64>> = lags
        .iter()
        .map(|&lag| (max_lag..max_lag + count).map(|t| series[t - lag]).collect())
        .collect();
    columns.push(series[max_lag..max_lag + count].to_vec());
    let mut names: Vec<String> = lags.iter().map(|l| format!("x{l}")).collect();
    names.push("x".into());
    Dataset::from_columns(names, columns, lags.len())
}

/// Reads a one-column numeric series from a CSV file with a header row.
/// `column` selects a column by name; the first column is used otherwise.
pub fn load_series_csv(path: &Path, column: Option<&str>) -> Result<Vec<f64>> {
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut reader = csv::Reader::from_path(path).map_err(csv_err)?;
    let headers = reader.headers().map_err(csv_err)?.clone();
    let index = match column {
        Some(name) => headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::MissingTargetColumn(name.to_string()))?,
        None => 0,
    };
    let mut out = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(csv_err)?;
        let cell = record.get(index).unwrap_or("").trim();
        let v: f64 = cell.parse().ok().filter(|v: &f64| v.is_finite()).ok_or_else(|| {
            Error::InvalidDataset(format!("{}: data row {}: bad value `{cell}`", path.display(), line + 1))
        })?;
        out.push(v);
    }
    Ok(out)
}

/// Options for reading a labelled classification table.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassificationOptions {
    pub target_column: String,
    /// Label to numeric target. Empty means the target cells are numeric.
    #[serde(default)]
    pub target_map: BTreeMap<String, f64>,
    /// Columns dropped entirely, e.g. a sample id.
    #[serde(default)]
    pub exclude_columns: Vec<String>,
    /// Keep only this many of the retained rows.
    #[serde(default)]
    pub sample_count: Option<usize>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LoadReport {
    pub retained: usize,
    pub skipped: usize,
}

/// Loads a CSV with a header row. Every column except the target and the
/// excluded ones becomes an input, renamed `x1..xm` in file order; the
/// target is the last column. Rows with an unparseable cell (such as `?`)
/// or an unmapped label are skipped and counted.
pub fn load_classification_csv(
    path: &Path,
    opts: &ClassificationOptions,
) -> Result<(Dataset, LoadReport)> {
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(csv_err)?;
    let headers = reader.headers().map_err(csv_err)?.clone();
    let target = headers
        .iter()
        .position(|h| h == opts.target_column)
        .ok_or_else(|| Error::MissingTargetColumn(opts.target_column.clone()))?;
    let inputs: Vec<usize> = (0..headers.len())
        .filter(|&i| i != target && !opts.exclude_columns.iter().any(|e| e == &headers[i]))
        .collect();

    let parse = |cell: &str| cell.parse::<f64>().ok().filter(|v| v.is_finite());
    let mut rows = Vec::new();
    let mut report = LoadReport::default();
    for record in reader.records() {
        let record = record.map_err(csv_err)?;
        let label = record.get(target).unwrap_or("");
        let y = if opts.target_map.is_empty() {
            parse(label)
        } else {
            opts.target_map.get(label).copied()
        };
        let xs: Option<Vec<f64>> = inputs
            .iter()
            .map(|&i| record.get(i).and_then(parse))
            .collect();
        match (xs, y) {
            (Some(mut row), Some(y)) => {
                row.push(y);
                rows.push(row);
            }
            _ => report.skipped += 1,
        }
    }
    if let Some(n) = opts.sample_count {
        if rows.len() < n {
            return Err(Error::TooFewRows {
                requested: n,
                available: rows.len(),
            });
        }
        rows.truncate(n);
    }
    if rows.is_empty() {
        return Err(Error::TooFewRows {
            requested: opts.sample_count.unwrap_or(1),
            available: 0,
        });
    }
    report.retained = rows.len();
    let mut names: Vec<String> = (1..=inputs.len()).map(|i| format!("x{i}")).collect();
    names.push(opts.target_column.clone());
    let ds = Dataset::from_rows(names, &rows, inputs.len())?;
    Ok((ds, report))
}

/// Uniformly random row permutation.
pub fn shuffle_dataset<R: Rng + ?Sized>(ds: &Dataset, rng: &mut R) -> Dataset {
    let mut order: Vec<usize> = (0..ds.rows()).collect();
    order.shuffle(rng);
    ds.select_rows(&order)
}

/// Two-class stand-in for the breast-cancer table: ten integer features in
/// `1..=10`, class 2 rows concentrated at low values and class 4 rows at
/// high values, with overlap.
pub fn synthetic_classification<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Dataset {
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let malignant = rng.random_bool(0.35);
            let mut row: Vec<f64> = (0..10)
                .map(|_| {
                    let centre: f64 = if malignant { 7.0 } else { 2.5 };
                    let v = centre + rng.random_range(-3.0..3.0);
                    v.round().clamp(1.0, 10.0)
                })
                .collect();
            row.push(if malignant { 4.0 } else { 2.0 });
            row
        })
        .collect();
    let mut names: Vec<String> = (1..=10).map(|i| format!("x{i}")).collect();
    names.push("class".into());
    Dataset::from_rows(names, &rows, 10).expect("generated rows are valid")
}

/// Writes `ds` as a CSV with a header row.
pub fn write_dataset_csv(ds: &Dataset, path: &Path) -> Result<()> {
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(ds.names()).map_err(csv_err)?;
    for r in 0..ds.rows() {
        w.write_record(ds.row(r).iter().map(|v| v.to_string()))
            .map_err(csv_err)?;
    }
    w.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
