//! End-to-end runs: configuration, the forward and backward pipelines, and
//! report rendering.

mod backward;
mod config;
mod forward;
mod render;

pub use backward::{run_backward, BackwardReport, ModeComparison};
pub use config::{OutputFormat, PipelineConfig, RouteChoice, Scenario, SheepOverrides};
pub use forward::{
    load_dataset, load_mesh_spec, run_forward, run_forward_at, AgeRow, Calibration, FitReport, ForwardReport,
    MassComparison, FITTED_DIMENSIONS,
};
pub use render::{emit_csv, format_sig, render, render_human};

use serde::Serialize;
use thiserror::Error;

use crate::dataset::DatasetError;
use crate::ecology::EcologyError;
use crate::energetics::EnergeticsError;
use crate::feasibility::FeasibilityError;
use crate::growth::GrowthError;
use crate::mesh::MeshError;

/// What went wrong, coarse enough to choose a process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    Validation,
    Io,
    NonConvergence,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Validation => 1,
            ErrorKind::Io => 2,
            ErrorKind::NonConvergence => 3,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PipelineError {
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("fit did not converge: {0}")]
    NonConvergence(String),
}

impl PipelineError {
    pub fn kind(&self) -> ErrorKind {
        match self {
            PipelineError::Validation(_) => ErrorKind::Validation,
            PipelineError::Io { .. } => ErrorKind::Io,
            PipelineError::NonConvergence(_) => ErrorKind::NonConvergence,
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.kind().exit_code()
    }

    pub(crate) fn io(path: &str, err: impl std::fmt::Display) -> Self {
        PipelineError::Io { path: path.to_string(), message: err.to_string() }
    }
}

macro_rules! validation_from {
    ($($t:ty),*) => {$(
        impl From<$t> for PipelineError {
            fn from(e: $t) -> Self {
                PipelineError::Validation(e.to_string())
            }
        }
    )*};
}
validation_from!(DatasetError, EcologyError, EnergeticsError, FeasibilityError, MeshError);

impl From<GrowthError> for PipelineError {
    fn from(e: GrowthError) -> Self {
        match e {
            GrowthError::NonConvergence(best) => PipelineError::NonConvergence(format!(
                "stopped after {} iterations at rmse {}",
                best.iterations, best.rmse
            )),
            other => PipelineError::Validation(other.to_string()),
        }
    }
}

/// Outcome of one report stage. A failed stage keeps its place in the report.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Stage<T> {
    Ok { result: T },
    Error { kind: ErrorKind, message: String },
}

impl<T> Stage<T> {
    pub fn ok(&self) -> Option<&T> {
        match self {
            Stage::Ok { result } => Some(result),
            Stage::Error { .. } => None,
        }
    }

    pub fn error_kind(&self) -> Option<ErrorKind> {
        match self {
            Stage::Ok { .. } => None,
            Stage::Error { kind, .. } => Some(*kind),
        }
    }
}

impl<T, E: Into<PipelineError>> From<Result<T, E>> for Stage<T> {
    fn from(r: Result<T, E>) -> Self {
        match r {
            Ok(result) => Stage::Ok { result },
            Err(e) => {
                let e = e.into();
                Stage::Error { kind: e.kind(), message: e.to_string() }
            }
        }
    }
}

/// Everything `report` produces.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FullReport {
    pub forward: ForwardReport,
    pub backward: BackwardReport,
    /// Known inconsistencies in the reference figures, with computed magnitudes.
    pub notes: Vec<String>,
}

impl FullReport {
    /// Most severe stage failure, for the process exit code.
    pub fn worst_error(&self) -> Option<ErrorKind> {
        let mut kinds = self.forward.stage_errors();
        kinds.extend(self.backward.stage_errors());
        kinds.into_iter().max_by_key(|k| k.exit_code())
    }
}

pub fn run_report(config: &PipelineConfig) -> Result<FullReport, PipelineError> {
    let forward = run_forward(config)?;
    let backward = run_backward(config)?;
    let mut notes = forward.notes.clone();
    notes.extend(backward.notes.iter().cloned());
    Ok(FullReport { forward, backward, notes })
}
