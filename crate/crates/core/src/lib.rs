//! Genetic programming with strict offspring selection.
//!
//! The crate provides a prefix-encoded expression tree ([`trees`]), a
//! protected interpreter with MSE fitness ([`interp`]), PTC2 initialization,
//! single-point mutation and six subtree crossovers ([`genops`]), the
//! offspring-selection loop ([`engine`]) and generators and loaders for the
//! Poly-10, Mackey-Glass and classification benchmarks ([`problems`]).

pub mod config;
pub mod engine;
pub mod error;
pub mod genops;
pub mod interp;
pub mod problems;
pub mod runlog;
pub mod trees;

pub use config::{DataConfig, RunConfig};
pub use engine::{run, Individual, Observer, Offspring, OsParams, Population};
pub use error::{Error, Result};
pub use genops::CrossoverKind;
pub use interp::{Dataset, Quality};
pub use problems::{Problem, ProblemKind};
pub use runlog::{GenerationLog, RunLog, Termination};
pub use trees::{ExpressionTree, Function, NodeCoord, PrimitiveSet, Symbol};
