//! Batch driver for the `rta-ofdma-core` simulator: config files, CLI
//! invocations, parameter sweeps with seeded replications, CSV/JSON output
//! and per-slot RU traces.

pub mod settings;
pub mod sweep;
pub mod trace;

use rta_ofdma_core::{ConfigError, MetricsError};
use thiserror::Error;

pub use settings::{parse_invocation, Axis, Cli, Command, ScenarioArgs, Settings, SweepArgs, SweepSpec, TraceArgs};
pub use sweep::{run_sweep, SweepRow, SweepSummary};
pub use trace::{dump_trace, parse_arrivals, TraceRecord};

/// Environment variable naming the directory sweeps write into.
pub const OUT_DIR_ENV: &str = "RTA_OFDMA_OUT_DIR";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    /// 2 for usage errors, 1 for anything that failed at runtime.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}
