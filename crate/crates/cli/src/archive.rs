//! Versioned JSON model archives.
//!
//! Floats are written in shortest round-trip form, so loading an archive and
//! saving it again reproduces the same bytes.

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use cropcast_core::estimation::{CountEstimates, DiscretizedSeries};
use cropcast_core::lstm::{EpochLoss, LstmModel};
use cropcast_core::HmmParams;
use serde::{Deserialize, Serialize};

use crate::config::{HmmSettings, LstmSettings};
use crate::error::{CliError, CliResult, Stage};

pub const FORMAT_VERSION: u32 = 1;
pub const HMM_FILE: &str = "hmm.json";
pub const LSTM_FILE: &str = "lstm.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelArchive {
    pub format_version: u32,
    /// Seconds since the Unix epoch at save time; the only field that varies
    /// between otherwise identical runs.
    pub created_unix: u64,
    pub model: ArchivedModel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ArchivedModel {
    Hmm(Box<HmmArchive>),
    Lstm(Box<LstmArchive>),
}

impl ArchivedModel {
    pub fn kind(&self) -> &'static str {
        match self {
            ArchivedModel::Hmm(_) => "hmm",
            ArchivedModel::Lstm(_) => "lstm",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HmmArchive {
    pub settings: HmmSettings,
    /// Training series, including the cut points when it was discretized here.
    pub series: DiscretizedSeries,
    pub counts: CountEstimates,
    pub counted: HmmParams,
    pub trained: HmmParams,
    pub iterations: usize,
    pub converged: bool,
    pub log_lik_trace: Vec<f64>,
    pub stale_transition_rows: Vec<usize>,
    pub stale_emission_rows: Vec<usize>,
    /// Viterbi path of the training series under `trained`.
    pub decoded: Vec<usize>,
    pub decoded_log_probability: f64,
    pub match_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LstmArchive {
    pub settings: LstmSettings,
    pub model: LstmModel,
    pub years: Vec<i32>,
    pub loss_trace: Vec<EpochLoss>,
    pub final_train_loss: f64,
    pub final_val_loss: f64,
    pub n_train_samples: usize,
    pub n_test_samples: usize,
}

impl ModelArchive {
    pub fn new(model: ArchivedModel) -> Self {
        let created_unix = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        Self { format_version: FORMAT_VERSION, created_unix, model }
    }

    pub fn to_json(&self) -> CliResult<String> {
        let mut s = serde_json::to_string_pretty(self)
            .map_err(|e| CliError::numeric(Stage::Archive, format!("cannot serialise archive: {e}")))?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        let archive: Self = serde_json::from_str(text)
            .map_err(|e| CliError::input(Stage::Archive, format!("malformed archive: {e}")))?;
        if archive.format_version != FORMAT_VERSION {
            return Err(CliError::input(
                Stage::Archive,
                format!(
                    "archive format version {} is not supported (expected {FORMAT_VERSION})",
                    archive.format_version
                ),
            ));
        }
        Ok(archive)
    }

    pub fn save(&self, path: &Path) -> CliResult<()> {
        std::fs::write(path, self.to_json()?)
            .map_err(|e| CliError::input(Stage::Output, format!("cannot write {}: {e}", path.display())))
    }

    /// Loads an archive; `producer` names the command that writes it.
    pub fn load(path: &Path, producer: &str) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::input(Stage::Archive, format!("cannot read {} ({e}); run `{producer}` first", path.display()))
        })?;
        Self::from_json(&text)
    }

    pub fn into_hmm(self, stage: Stage) -> CliResult<HmmArchive> {
        match self.model {
            ArchivedModel::Hmm(h) => Ok(*h),
            other => Err(CliError::input(stage, format!("expected an hmm archive, found kind `{}`", other.kind()))),
        }
    }

    pub fn into_lstm(self, stage: Stage) -> CliResult<LstmArchive> {
        match self.model {
            ArchivedModel::Lstm(l) => Ok(*l),
            other => Err(CliError::input(stage, format!("expected an lstm archive, found kind `{}`", other.kind()))),
        }
    }
}
