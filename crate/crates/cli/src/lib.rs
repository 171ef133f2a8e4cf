//! Library side of the `photometrix` command: pipelines that write CSV tables
//! plus a manifest, and a generic parameter sweep.

// `!(x > 0.0)` is deliberate throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod grid;
pub mod output;
pub mod pipelines;
pub mod sweep;

use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use thiserror::Error;

use crate::config::Config;
use crate::output::{OutputFile, RunManifest, Table};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("infeasible parameters: {0}")]
    Infeasible(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Infeasible(_) => 3,
        }
    }
}

impl From<photometrix::Error> for CliError {
    fn from(e: photometrix::Error) -> Self {
        CliError::Infeasible(e.to_string())
    }
}

/// Writes `tables` and a manifest into `out_dir`, creating it if needed.
pub fn write_run(
    name: &str,
    config: &Config,
    tables: &[Table],
    out_dir: &Path,
    started: SystemTime,
    clock: Instant,
) -> Result<RunManifest, CliError> {
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::Io(format!("{}: {e}", out_dir.display())))?;
    for t in tables {
        t.write(out_dir)?;
    }
    let manifest = RunManifest {
        pipeline: name.to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        parameters: config.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
        started_unix_s: started.duration_since(UNIX_EPOCH).map_or(0.0, |d| d.as_secs_f64()),
        wall_clock_s: clock.elapsed().as_secs_f64(),
        outputs: tables
            .iter()
            .map(|t| OutputFile { file: t.file.clone(), columns: t.columns.clone(), rows: t.rows.len() })
            .collect(),
    };
    manifest.write(out_dir)?;
    Ok(manifest)
}

/// Runs a named pipeline with an already resolved config.
pub fn run_pipeline(name: &str, config: &Config, out_dir: &Path) -> Result<RunManifest, CliError> {
    let p = pipelines::find(name).ok_or_else(|| CliError::Config(format!("unknown pipeline `{name}`")))?;
    let (started, clock) = (SystemTime::now(), Instant::now());
    let tables = (p.run)(config)?;
    write_run(name, config, &tables, out_dir, started, clock)
}
