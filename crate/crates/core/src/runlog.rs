//! Run logs and their CSV and text renderings.

use std::fmt::Write as _;
use std::io;
use std::path::Path;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{Error, Result};

/// Header of per-generation CSV files.
pub const CSV_HEADER: &str = "generation,evaluations,best_quality,avg_tree_size,selection_pressure";

/// Measurements taken after one generation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationLog {
    pub generation: usize,
    /// Cumulative evaluations, initialization included.
    pub evaluations: u64,
    pub best_quality: f64,
    pub avg_tree_size: f64,
    pub selection_pressure: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    SelectionPressure,
    EvaluationBudget,
}

impl Termination {
    pub fn name(self) -> &'static str {
        match self {
            Termination::SelectionPressure => "selection_pressure",
            Termination::EvaluationBudget => "evaluation_budget",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunLog {
    pub config: RunConfig,
    pub seed: u64,
    pub generations: Vec<GenerationLog>,
    pub best_tree: String,
    pub best_quality: f64,
    pub total_evaluations: u64,
    pub termination: Termination,
}

impl RunLog {
    /// `<problem>_<crossover>_<seed>`
    pub fn file_stem(&self) -> String {
        format!(
            "{}_{}_{}",
            self.config.problem, self.config.crossover, self.seed
        )
    }

    pub fn write_csv<W: io::Write>(&self, out: W) -> Result<(), csv::Error> {
        write_generations(&self.generations, out)
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is utf-8")
    }

    /// Final generation record.
    pub fn last(&self) -> &GenerationLog {
        self.generations.last().expect("a run logs at least generation 0")
    }

    /// Plain `key: value` summary of the run.
    pub fn summary(&self, wall_time: Duration) -> String {
        let mut s = String::new();
        let c = &self.config;
        let _ = writeln!(s, "problem: {}", c.problem);
        let _ = writeln!(s, "crossover: {}", c.crossover);
        let _ = writeln!(s, "seed: {}", self.seed);
        let _ = writeln!(s, "population_size: {}", c.population_size);
        let _ = writeln!(s, "mutation_rate: {}", c.mutation_rate);
        let _ = writeln!(s, "max_selection_pressure: {}", c.max_selection_pressure);
        let _ = writeln!(s, "max_evaluations: {}", c.max_evaluations);
        let _ = writeln!(s, "termination: {}", self.termination.name());
        let _ = writeln!(s, "generations: {}", self.generations.len() - 1);
        let _ = writeln!(s, "total_evaluations: {}", self.total_evaluations);
        let _ = writeln!(s, "final_best_quality: {}", self.best_quality);
        let _ = writeln!(s, "final_avg_tree_size: {}", self.last().avg_tree_size);
        let _ = writeln!(s, "final_selection_pressure: {}", self.last().selection_pressure);
        let _ = writeln!(s, "best_tree: {}", self.best_tree);
        let _ = writeln!(s, "wall_time_seconds: {:.3}", wall_time.as_secs_f64());
        s
    }
}

pub fn write_generations<W: io::Write>(rows: &[GenerationLog], out: W) -> Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new().has_headers(true).from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_generations<R: io::Read>(input: R) -> Result<Vec<GenerationLog>, csv::Error> {
    csv::Reader::from_reader(input).deserialize().collect()
}

pub fn read_generations_file(path: &Path) -> Result<Vec<GenerationLog>> {
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_generations(file).map_err(|source| Error::Csv {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_round_trip() {
        let rows = vec![
            GenerationLog {
                generation: 0,
                evaluations: 100,
                best_quality: 0.123456789012345,
                avg_tree_size: 26.5,
                selection_pressure: 1.0,
            },
            GenerationLog {
                generation: 1,
                evaluations: 351,
                best_quality: f64::INFINITY,
                avg_tree_size: 1e-7,
                selection_pressure: 2.51,
            },
        ];
        let mut buf = Vec::new();
        write_generations(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().next().unwrap(), CSV_HEADER);
        assert!(text.ends_with('\n'));
        assert_eq!(read_generations(&buf[..]).unwrap(), rows);
    }
}
