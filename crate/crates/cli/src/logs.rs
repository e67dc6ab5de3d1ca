//! Writing run logs to disk.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{Context, Result};
use osgp_core::RunLog;

/// Writes `<problem>_<crossover>_<seed>.csv` into `dir` and returns its path.
pub fn emit_logs(log: &RunLog, dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(format!("{}.csv", log.file_stem()));
    let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    log.write_csv(BufWriter::new(file))
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

/// Writes the text summary next to the CSV.
pub fn emit_summary(log: &RunLog, dir: &Path, wall_time: Duration) -> Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(format!("{}.summary.txt", log.file_stem()));
    fs::write(&path, log.summary(wall_time)).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}
