//! Command-line front end: config files, batches, log output and
//! aggregation over runs.

pub mod aggregate;
pub mod batch;
pub mod config;
pub mod logs;
