//! Scenario runner, offline recording processor, elasticity sweep and
//! report plumbing.

mod config;
mod output;
mod plot;
mod process;
mod report;
mod scenario;
mod sweep;

pub use config::{ChecksSection, ConfigError, Event, ObjectSection, ScenarioConfig, ScenarioSection, CUP_TOML, EMPTY_TOML};
pub use output::{sha256_hex, write_manifest, Manifest, ManifestFile};
pub use plot::write_plot;
pub use process::{process_recording, write_processed, ProcessConfig, Processed};
pub use report::{compute_report, read_trace_dir, Check, DutyStep, ModeChange, RunReport, TraceColumns};
pub use scenario::{run_scenario, simulate, write_run, RunOutcome};
pub use sweep::{band_edges, run_sweep, write_sweep, SweepConfig, SweepOutcome, SweepSection, SweepSummary, SWEEP_TOML};

use thiserror::Error;

use crate::detector::DetectorError;
use crate::plant::PlantError;
use crate::signal::SignalError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Signal(#[from] SignalError),
    #[error(transparent)]
    Detector(#[from] DetectorError),
    #[error(transparent)]
    Plant(#[from] PlantError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{file}: row {row}: {msg}")]
    Trace { file: String, row: usize, msg: String },
    #[error("plot: {0}")]
    Plot(String),
}

impl HarnessError {
    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}
