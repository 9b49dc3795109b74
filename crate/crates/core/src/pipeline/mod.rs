//! Batch driver tying the stages together: series (cached on disk),
//! large-order extraction and closed-form search for a range of degrees,
//! with deterministic JSON and text reports.

mod config;
mod convergence;
mod report;
mod run;
mod verify;

use std::path::PathBuf;

use thiserror::Error;

use crate::asymptotics::AsymptoticsError;
use crate::precision::PrecisionError;
use crate::recognition::RecognitionError;
use crate::rs::RsError;

pub use config::{
    desk_params, desk_windows, parse_m_range, schedule_for, standard_params, DegreeParams,
    Overrides, ResolvedParams, RunConfig,
};
pub use convergence::{convergence_csv, default_sweep, emit_convergence};
pub use report::{
    DegreeRecord, DegreeResult, DegreeStatus, Estimate, PipelineReport, RecognitionRecord,
    StokesRecord, Tables, WindowRecord,
};
pub use run::{run_degree, run_pipeline, run_pipeline_with, Event};
pub use verify::{verify_reference, VerifyReport, ACTION_REFERENCE, MULTIPLIER_REFERENCE};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Rs(#[from] RsError),
    #[error(transparent)]
    Asymptotics(#[from] AsymptoticsError),
    #[error(transparent)]
    Recognition(#[from] RecognitionError),
    #[error(transparent)]
    Precision(#[from] PrecisionError),
}

impl PipelineError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        PipelineError::Io {
            path: path.into(),
            source,
        }
    }
}
