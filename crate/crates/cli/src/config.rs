//! TOML experiment files.
//!
//! A run file sets any subset of the [`RunConfig`] keys; everything else
//! takes the benchmark defaults (population 1000, mutation rate 0.15, PTC2
//! sizes 3..=50, problem-specific evaluation budget):
//!
//! ```toml
//! problem = "poly10"            # poly10 | mackey_glass | classification
//! crossover = "standard"        # standard | onepoint | uniform | sizefair | homologous | mixed
//! seed = 1
//! population_size = 1000
//! mutation_rate = 0.15
//! max_selection_pressure = 200
//! max_evaluations = 1000000
//! init_min_size = 3
//! init_max_size = 50
//! output_dir = "results"
//!
//! [data]
//! rows = 100                    # Poly-10 sample count
//! seed = 0                      # seed of generated data
//! # path = "wdbc.csv"           # series or classification table
//! # target_column = "class"
//! # target_map = { B = 2, M = 4 }
//! # exclude_columns = ["id"]
//! # sample_count = 400
//! ```
//!
//! A batch file adds the operators to compare and the repetition count and
//! nests the run keys under `[base]` (or points at a run file with
//! `base_config`).

use std::path::{Path, PathBuf};

use osgp_core::config::DataConfig;
use osgp_core::{CrossoverKind, ProblemKind, RunConfig};
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    /// Syntax or type error; the message carries line and column.
    #[error("{origin}: parse error: {message}")]
    Parse { origin: String, message: String },
    #[error("{origin}: {source}")]
    Invalid {
        origin: String,
        #[source]
        source: osgp_core::Error,
    },
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRunConfig {
    problem: Option<String>,
    seed: Option<u64>,
    population_size: Option<usize>,
    mutation_rate: Option<f64>,
    crossover: Option<String>,
    max_selection_pressure: Option<f64>,
    max_evaluations: Option<u64>,
    init_min_size: Option<usize>,
    init_max_size: Option<usize>,
    output_dir: Option<PathBuf>,
    data: Option<DataConfig>,
}

impl RawRunConfig {
    fn resolve(self, origin: &str, base_dir: Option<&Path>) -> Result<RunConfig, ConfigError> {
        let invalid = |source| ConfigError::Invalid {
            origin: origin.to_string(),
            source,
        };
        let problem: ProblemKind = self
            .problem
            .as_deref()
            .ok_or_else(|| {
                invalid(osgp_core::Error::Config {
                    field: "problem".into(),
                    reason: "missing (poly10, mackey_glass or classification)".into(),
                })
            })?
            .parse()
            .map_err(invalid)?;
        let mut c = RunConfig::new(problem);
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if let Some(v) = self.population_size {
            c.population_size = v;
        }
        if let Some(v) = self.mutation_rate {
            c.mutation_rate = v;
        }
        if let Some(v) = self.crossover {
            c.crossover = v.parse().map_err(invalid)?;
        }
        if let Some(v) = self.max_selection_pressure {
            c.max_selection_pressure = v;
        }
        if let Some(v) = self.max_evaluations {
            c.max_evaluations = v;
        }
        if let Some(v) = self.init_min_size {
            c.init_min_size = v;
        }
        if let Some(v) = self.init_max_size {
            c.init_max_size = v;
        }
        if let Some(v) = self.output_dir {
            c.output_dir = v;
        }
        if let Some(mut data) = self.data {
            // relative data paths are relative to the config file
            if let (Some(dir), Some(path)) = (base_dir, data.path.as_mut()) {
                if path.is_relative() {
                    *path = dir.join(&*path);
                }
            }
            c.data = data;
        }
        c.validate().map_err(invalid)?;
        Ok(c)
    }
}

fn parse_toml<T: for<'de> Deserialize<'de>>(text: &str, origin: &str) -> Result<T, ConfigError> {
    toml::from_str(text).map_err(|e| ConfigError::Parse {
        origin: origin.to_string(),
        message: e.to_string().trim_end().to_string(),
    })
}

fn read(path: &Path) -> Result<String, ConfigError> {
    std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Parses run-config text. Relative data paths stay as written.
pub fn parse_config_str(text: &str) -> Result<RunConfig, ConfigError> {
    parse_toml::<RawRunConfig>(text, "<config>")?.resolve("<config>", None)
}

/// Reads and validates a run-config file.
pub fn parse_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let origin = path.display().to_string();
    let raw: RawRunConfig = parse_toml(&read(path)?, &origin)?;
    raw.resolve(&origin, path.parent())
}

/// Fully explicit TOML rendering; [`parse_config_str`] reads it back to an
/// equal config.
pub fn render_config(config: &RunConfig) -> String {
    toml::to_string(config).expect("run configs are representable in TOML")
}

/// Several operators, each repeated with consecutive seeds.
#[derive(Clone, Debug, PartialEq)]
pub struct BatchSpec {
    pub base: RunConfig,
    pub kinds: Vec<CrossoverKind>,
    /// Runs per operator; run `i` uses seed `base.seed + i`.
    pub repetitions: usize,
    /// Parallel runs; 0 picks the number of CPUs.
    pub workers: usize,
}

impl BatchSpec {
    pub fn seed_for(&self, run_index: usize) -> u64 {
        self.base.seed + run_index as u64
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBatchSpec {
    kinds: Option<Vec<String>>,
    repetitions: Option<usize>,
    workers: Option<usize>,
    base_config: Option<PathBuf>,
    base: Option<RawRunConfig>,
}

/// Default repetitions per operator.
pub const DEFAULT_REPETITIONS: usize = 20;

fn resolve_batch(raw: RawBatchSpec, origin: &str, dir: Option<&Path>) -> Result<BatchSpec, ConfigError> {
    let invalid = |field: &str, reason: String| ConfigError::Invalid {
        origin: origin.to_string(),
        source: osgp_core::Error::Config {
            field: field.into(),
            reason,
        },
    };
    let base = match (raw.base_config, raw.base) {
        (Some(_), Some(_)) => {
            return Err(invalid("base", "give either base_config or [base], not both".into()))
        }
        (Some(path), None) => {
            let path = match dir {
                Some(d) if path.is_relative() => d.join(path),
                _ => path,
            };
            parse_config(&path)?
        }
        (None, Some(raw)) => raw.resolve(origin, dir)?,
        (None, None) => return Err(invalid("base", "missing [base] table or base_config".into())),
    };
    let kinds = match raw.kinds {
        None => CrossoverKind::ALL.to_vec(),
        Some(names) => names
            .iter()
            .map(|n| n.parse())
            .collect::<Result<Vec<CrossoverKind>, _>>()
            .map_err(|source| ConfigError::Invalid {
                origin: origin.to_string(),
                source,
            })?,
    };
    if kinds.is_empty() {
        return Err(invalid("kinds", "must list at least one crossover".into()));
    }
    let repetitions = raw.repetitions.unwrap_or(DEFAULT_REPETITIONS);
    if repetitions == 0 {
        return Err(invalid("repetitions", "must be at least 1".into()));
    }
    Ok(BatchSpec {
        base,
        kinds,
        repetitions,
        workers: raw.workers.unwrap_or(0),
    })
}

pub fn parse_batch_str(text: &str) -> Result<BatchSpec, ConfigError> {
    resolve_batch(parse_toml(text, "<batch>")?, "<batch>", None)
}

pub fn parse_batch(path: &Path) -> Result<BatchSpec, ConfigError> {
    let origin = path.display().to_string();
    resolve_batch(parse_toml(&read(path)?, &origin)?, &origin, path.parent())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config_str("problem = \"poly10\"").unwrap();
        assert_eq!(c.population_size, 1000);
        assert_eq!(c.mutation_rate, 0.15);
        assert_eq!(c.max_evaluations, 1_000_000);
        assert_eq!((c.init_min_size, c.init_max_size), (3, 50));
        assert_eq!(c.crossover, CrossoverKind::Standard);
        let c = parse_config_str("problem = \"mackey_glass\"").unwrap();
        assert_eq!(c.max_evaluations, 5_000_000);
    }

    #[test]
    fn validation_errors_name_the_field() {
        let e = parse_config_str("problem = \"poly10\"\nmutation_rate = 1.5").unwrap_err();
        assert!(matches!(e, ConfigError::Invalid { .. }));
        assert!(e.to_string().contains("mutation_rate"), "{e}");

        let e = parse_config_str("problem = \"poly10\"\ncrossover = \"twopoint\"").unwrap_err();
        let msg = e.to_string();
        for k in CrossoverKind::ALL {
            assert!(msg.contains(k.name()), "{msg}");
        }
        assert!(parse_config_str("seed = 3").unwrap_err().to_string().contains("problem"));
    }

    #[test]
    fn syntax_errors_report_the_line() {
        let e = parse_config_str("problem = \"poly10\"\npopulation_size = = 3\n").unwrap_err();
        assert!(matches!(e, ConfigError::Parse { .. }));
        assert!(e.to_string().contains("line 2"), "{e}");
        let e = parse_config_str("problem = \"poly10\"\npopulaton_size = 3\n").unwrap_err();
        assert!(e.to_string().contains("populaton_size"), "{e}");
    }

    #[test]
    fn render_round_trip() {
        let mut c = parse_config_str(
            "problem = \"mackey_glass\"\ncrossover = \"homologous\"\nseed = 42\n[data]\nlags = [4, 2, 1]\n",
        )
        .unwrap();
        assert_eq!(parse_config_str(&render_config(&c)).unwrap(), c);
        c.data.target_map.insert("M".into(), 4.0);
        c.data.mackey_glass.tau = 30.0;
        c.max_selection_pressure = 17.5;
        assert_eq!(parse_config_str(&render_config(&c)).unwrap(), c);
    }

    #[test]
    fn batch_defaults_and_seeds() {
        let b = parse_batch_str("[base]\nproblem = \"poly10\"\nseed = 10\n").unwrap();
        assert_eq!(b.kinds, CrossoverKind::ALL.to_vec());
        assert_eq!(b.repetitions, 20);
        assert_eq!(b.seed_for(3), 13);
        let b = parse_batch_str("kinds = [\"onepoint\"]\nrepetitions = 2\n[base]\nproblem = \"poly10\"\n")
            .unwrap();
        assert_eq!(b.kinds, vec![CrossoverKind::Onepoint]);
        assert!(parse_batch_str("repetitions = 0\n[base]\nproblem = \"poly10\"\n").is_err());
        assert!(parse_batch_str("kinds = [\"standard\"]\n").is_err());
    }
}
