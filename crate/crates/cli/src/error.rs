use std::fmt;

use cropcast_core::Error as CoreError;

/// Pipeline stage an error is attributed to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Config,
    Ingest,
    Discretize,
    Estimate,
    TrainHmm,
    Decode,
    TrainLstm,
    Evaluate,
    Forecast,
    SteadyState,
    Plot,
    Archive,
    Output,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Config => "config",
            Stage::Ingest => "ingest",
            Stage::Discretize => "discretize",
            Stage::Estimate => "estimate",
            Stage::TrainHmm => "train-hmm",
            Stage::Decode => "decode",
            Stage::TrainLstm => "train-lstm",
            Stage::Evaluate => "evaluate",
            Stage::Forecast => "forecast",
            Stage::SteadyState => "steady-state",
            Stage::Plot => "plot",
            Stage::Archive => "archive",
            Stage::Output => "output",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Unreadable or malformed input; exit code 2.
    Input,
    /// Numerical failure or non-convergence; exit code 3.
    Numeric,
    /// Invalid settings; exit code 4.
    Config,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("[{stage}] {message}")]
pub struct CliError {
    pub stage: Stage,
    pub kind: ErrorKind,
    pub message: String,
}

impl CliError {
    pub fn input(stage: Stage, message: impl Into<String>) -> Self {
        Self { stage, kind: ErrorKind::Input, message: message.into() }
    }

    pub fn numeric(stage: Stage, message: impl Into<String>) -> Self {
        Self { stage, kind: ErrorKind::Numeric, message: message.into() }
    }

    pub fn config(message: impl Into<String>) -> Self {
        Self { stage: Stage::Config, kind: ErrorKind::Config, message: message.into() }
    }

    /// Attributes a library error to `stage`.
    pub fn core(stage: Stage, err: CoreError) -> Self {
        let kind = match err {
            CoreError::Dimension(_) | CoreError::InvalidArgument(_) | CoreError::DegenerateThreshold(_) => {
                ErrorKind::Input
            }
            CoreError::InvalidParams(_)
            | CoreError::TooLarge { .. }
            | CoreError::NotConverged { .. }
            | CoreError::Undefined(_)
            | CoreError::NonFinite(_) => ErrorKind::Numeric,
        };
        Self { stage, kind, message: err.to_string() }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            ErrorKind::Input => 2,
            ErrorKind::Numeric => 3,
            ErrorKind::Config => 4,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Maps a library result into a stage-attributed one.
pub trait AtStage<T> {
    fn at(self, stage: Stage) -> CliResult<T>;
}

impl<T> AtStage<T> for Result<T, CoreError> {
    fn at(self, stage: Stage) -> CliResult<T> {
        self.map_err(|e| CliError::core(stage, e))
    }
}
