use std::collections::BTreeMap;
use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::engine::OsParams;
use crate::error::{Error, Result};
use crate::genops::CrossoverKind;
use crate::problems::{
    self, ClassificationOptions, MackeyGlassParams, Problem, ProblemKind, MACKEY_GLASS_LAGS,
    MACKEY_GLASS_ROWS,
};

/// Where a problem's data comes from and how it is shaped.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DataConfig {
    /// Poly-10 row count; row count of the synthetic classification table.
    pub rows: usize,
    /// Seed for generated data. Independent of the run seed so that all
    /// runs of an experiment share one training set.
    pub seed: u64,
    /// Series CSV (Mackey-Glass) or labelled table (classification).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    /// Column holding the series when `path` is a Mackey-Glass CSV.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub column: Option<String>,
    pub lags: Vec<usize>,
    pub train_rows: usize,
    pub mackey_glass: MackeyGlassParams,
    /// Use a generated stand-in instead of a classification file.
    pub synthetic: bool,
    pub target_column: String,
    pub target_map: BTreeMap<String, f64>,
    pub exclude_columns: Vec<String>,
    pub sample_count: usize,
}

impl Default for DataConfig {
    fn default() -> Self {
        DataConfig {
            rows: 100,
            seed: 0,
            path: None,
            column: None,
            lags: MACKEY_GLASS_LAGS.to_vec(),
            train_rows: MACKEY_GLASS_ROWS,
            mackey_glass: MackeyGlassParams::default(),
            synthetic: false,
            target_column: "class".into(),
            target_map: BTreeMap::new(),
            exclude_columns: Vec::new(),
            sample_count: 400,
        }
    }
}

/// Complete parameterization of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub problem: ProblemKind,
    pub seed: u64,
    pub population_size: usize,
    pub mutation_rate: f64,
    pub crossover: CrossoverKind,
    pub max_selection_pressure: f64,
    pub max_evaluations: u64,
    pub init_min_size: usize,
    pub init_max_size: usize,
    pub output_dir: PathBuf,
    pub data: DataConfig,
}

impl RunConfig {
    pub const DEFAULT_POPULATION: usize = 1000;
    pub const DEFAULT_MUTATION_RATE: f64 = 0.15;
    pub const DEFAULT_MAX_SELECTION_PRESSURE: f64 = 200.0;
    pub const DEFAULT_INIT_SIZE: (usize, usize) = (3, 50);

    /// Defaults for `problem`.
    pub fn new(problem: ProblemKind) -> Self {
        RunConfig {
            problem,
            seed: 1,
            population_size: Self::DEFAULT_POPULATION,
            mutation_rate: Self::DEFAULT_MUTATION_RATE,
            crossover: CrossoverKind::Standard,
            max_selection_pressure: Self::DEFAULT_MAX_SELECTION_PRESSURE,
            max_evaluations: problem.default_max_evaluations(),
            init_min_size: Self::DEFAULT_INIT_SIZE.0,
            init_max_size: Self::DEFAULT_INIT_SIZE.1,
            output_dir: PathBuf::from("results"),
            data: DataConfig::default(),
        }
    }

    pub fn params(&self) -> OsParams {
        OsParams {
            population_size: self.population_size,
            mutation_rate: self.mutation_rate,
            crossover: self.crossover,
            max_selection_pressure: self.max_selection_pressure,
            max_evaluations: self.max_evaluations,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params().validate()?;
        if self.init_min_size < 1 {
            return Err(Error::config("init_min_size", "must be at least 1"));
        }
        if self.init_min_size > self.init_max_size {
            return Err(Error::config(
                "init_max_size",
                format!(
                    "must be >= init_min_size ({} > {})",
                    self.init_min_size, self.init_max_size
                ),
            ));
        }
        let data = &self.data;
        match self.problem {
            ProblemKind::Poly10 => {
                if data.rows == 0 {
                    return Err(Error::config("data.rows", "must be at least 1"));
                }
            }
            ProblemKind::MackeyGlass => {
                if data.lags.is_empty() || data.lags.contains(&0) {
                    return Err(Error::config("data.lags", "must be non-empty and positive"));
                }
                if data.train_rows == 0 {
                    return Err(Error::config("data.train_rows", "must be at least 1"));
                }
                let mg = &data.mackey_glass;
                if !(mg.step > 0.0 && mg.sample_interval >= mg.step && mg.tau >= 0.0) {
                    return Err(Error::config(
                        "data.mackey_glass",
                        "need step > 0, sample_interval >= step and tau >= 0",
                    ));
                }
            }
            ProblemKind::Classification => {
                if data.path.is_none() && !data.synthetic {
                    return Err(Error::config(
                        "data.path",
                        "classification needs a CSV file (or data.synthetic = true)",
                    ));
                }
                if data.sample_count == 0 {
                    return Err(Error::config("data.sample_count", "must be at least 1"));
                }
            }
        }
        if let Some(path) = &data.path {
            if !path.is_file() {
                return Err(Error::config(
                    "data.path",
                    format!("{} does not exist", path.display()),
                ));
            }
        }
        Ok(())
    }

    /// Builds the problem instance. Classification data is shuffled with a
    /// stream derived from `run_seed` before the sample is taken, so every
    /// run sees a different training set.
    pub fn build_problem(&self, run_seed: u64) -> Result<Problem> {
        let data = &self.data;
        let dataset = match self.problem {
            ProblemKind::Poly10 => {
                let mut rng = ChaCha8Rng::seed_from_u64(data.seed);
                problems::gen_poly10(&mut rng, data.rows)
            }
            ProblemKind::MackeyGlass => {
                let max_lag = data.lags.iter().copied().max().unwrap_or(0);
                let series = match &data.path {
                    Some(path) => problems::load_series_csv(path, data.column.as_deref())?,
                    None => problems::gen_mackey_glass(data.train_rows + max_lag, &data.mackey_glass),
                };
                problems::lag_embed(&series, &data.lags, data.train_rows)?
            }
            ProblemKind::Classification => {
                let full = match &data.path {
                    Some(path) => {
                        let opts = ClassificationOptions {
                            target_column: data.target_column.clone(),
                            target_map: data.target_map.clone(),
                            exclude_columns: data.exclude_columns.clone(),
                            sample_count: None,
                        };
                        problems::load_classification_csv(path, &opts)?.0
                    }
                    None => {
                        let mut rng = ChaCha8Rng::seed_from_u64(data.seed);
                        problems::synthetic_classification(&mut rng, data.rows.max(data.sample_count))
                    }
                };
                if full.rows() < data.sample_count {
                    return Err(Error::TooFewRows {
                        requested: data.sample_count,
                        available: full.rows(),
                    });
                }
                let mut rng = ChaCha8Rng::seed_from_u64(run_seed);
                rng.set_stream(1);
                let mut shuffled = problems::shuffle_dataset(&full, &mut rng);
                shuffled.truncate_rows(data.sample_count);
                shuffled
            }
        };
        Problem::new(self.problem, dataset)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_follow_the_benchmark_table() {
        let c = RunConfig::new(ProblemKind::Poly10);
        assert_eq!(c.population_size, 1000);
        assert_eq!(c.mutation_rate, 0.15);
        assert_eq!((c.init_min_size, c.init_max_size), (3, 50));
        assert_eq!(c.max_evaluations, 1_000_000);
        assert_eq!(RunConfig::new(ProblemKind::MackeyGlass).max_evaluations, 5_000_000);
        assert_eq!(RunConfig::new(ProblemKind::Classification).max_evaluations, 2_000_000);
    }

    #[test]
    fn validation_names_fields() {
        let mut c = RunConfig::new(ProblemKind::Poly10);
        c.mutation_rate = 1.5;
        assert!(c.validate().unwrap_err().to_string().contains("mutation_rate"));
        let mut c = RunConfig::new(ProblemKind::Poly10);
        c.init_min_size = 60;
        assert!(c.validate().unwrap_err().to_string().contains("init_max_size"));
        let c = RunConfig::new(ProblemKind::Classification);
        assert!(c.validate().unwrap_err().to_string().contains("data.path"));
    }

    #[test]
    fn classification_sample_differs_per_run() {
        let mut c = RunConfig::new(ProblemKind::Classification);
        c.data.synthetic = true;
        c.data.rows = 569;
        c.validate().unwrap();
        let a = c.build_problem(1).unwrap();
        let b = c.build_problem(2).unwrap();
        assert_eq!(a.dataset.rows(), 400);
        assert_ne!(a.dataset, b.dataset);
        assert_eq!(c.build_problem(1).unwrap().dataset, a.dataset);
    }

    #[test]
    fn mackey_glass_problem_shape() {
        let c = RunConfig::new(ProblemKind::MackeyGlass);
        let p = c.build_problem(0).unwrap();
        assert_eq!((p.dataset.rows(), p.dataset.width()), (928, 9));
    }
}
