//! Runner behind the `spikeloom` binary: configuration, scenario runs,
//! truth tables, noise sweeps and raster rendering.

pub mod commands;
pub mod config;
pub mod svg;
pub mod sweep;

pub use commands::{cmd_run, cmd_truthtable, Block, RunOutcome};
pub use config::{ConfigFile, ModelKind, Overrides, RunConfig, ScenarioSource};
pub use sweep::{noise_sweep, SweepConfig, SweepReport, SweepRow};

use std::path::PathBuf;

use spikeloom::{BuildError, StreamError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}:{line}: {message}")]
    ConfigLine {
        path: String,
        line: usize,
        message: String,
    },
    #[error("invalid value for `{key}`: {message}")]
    ConfigValue { key: String, message: String },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Scenario {
        path: PathBuf,
        #[source]
        source: StreamError,
    },
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error("writing raster: {0}")]
    Csv(#[from] spikeloom::engine::CsvError),
}
