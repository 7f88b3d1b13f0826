use std::path::{Path, PathBuf};

use cropcast_core::estimation::Thresholds;
use cropcast_core::hmm::{BaumWelchConfig, ForecastMode};
use cropcast_core::lstm::LstmConfig;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HmmSettings {
    pub max_iter: usize,
    pub tol: f64,
    /// Pseudo-count added to every transition and emission count.
    pub smoothing: f64,
    pub update_initial: bool,
}

impl Default for HmmSettings {
    fn default() -> Self {
        let bw = BaumWelchConfig::default();
        Self { max_iter: bw.max_iter, tol: bw.tol, smoothing: 0.0, update_initial: bw.update_initial }
    }
}

impl HmmSettings {
    pub fn baum_welch(&self) -> BaumWelchConfig {
        BaumWelchConfig { max_iter: self.max_iter, tol: self.tol, update_initial: self.update_initial }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LstmSettings {
    pub hidden_size: usize,
    pub window_length: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_epsilon: f64,
    pub seed: u64,
    pub train_fraction: f64,
    pub batch_size: Option<usize>,
    pub dense_size: Option<usize>,
    /// Feed rainfall and temperature alongside yield.
    pub include_climate: bool,
}

impl Default for LstmSettings {
    fn default() -> Self {
        let c = LstmConfig::default();
        Self {
            hidden_size: c.hidden_size,
            window_length: c.window_length,
            epochs: c.epochs,
            learning_rate: c.learning_rate,
            adam_beta1: c.adam_beta1,
            adam_beta2: c.adam_beta2,
            adam_epsilon: c.adam_epsilon,
            seed: c.seed,
            train_fraction: c.train_fraction,
            batch_size: c.batch_size,
            dense_size: c.dense_size,
            include_climate: false,
        }
    }
}

impl LstmSettings {
    pub fn input_size(&self) -> usize {
        if self.include_climate {
            3
        } else {
            1
        }
    }

    pub fn lstm_config(&self) -> LstmConfig {
        LstmConfig {
            hidden_size: self.hidden_size,
            input_size: self.input_size(),
            window_length: self.window_length,
            epochs: self.epochs,
            learning_rate: self.learning_rate,
            adam_beta1: self.adam_beta1,
            adam_beta2: self.adam_beta2,
            adam_epsilon: self.adam_epsilon,
            seed: self.seed,
            train_fraction: self.train_fraction,
            batch_size: self.batch_size,
            dense_size: self.dense_size,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ForecastStart {
    /// Last state of the Viterbi path under the trained model.
    #[default]
    Decoded,
    /// Last recorded state of the input series.
    Recorded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForecastSettings {
    pub horizon: usize,
    pub mode: ForecastMode,
    pub seed: u64,
    pub start: ForecastStart,
}

impl Default for ForecastSettings {
    fn default() -> Self {
        Self { horizon: 4, mode: ForecastMode::Argmax, seed: 0, start: ForecastStart::Decoded }
    }
}

/// Complete run configuration, loadable from TOML and overridable by flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub out_dir: PathBuf,
    /// Explicit cut points for raw input; quantile cuts when absent.
    pub thresholds: Option<Thresholds>,
    pub hmm: HmmSettings,
    pub lstm: LstmSettings,
    pub forecast: ForecastSettings,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            input: None,
            out_dir: PathBuf::from("out"),
            thresholds: None,
            hmm: HmmSettings::default(),
            lstm: LstmSettings::default(),
            forecast: ForecastSettings::default(),
        }
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::config(format!("invalid config {}: {e}", path.display())))
    }

    /// Checks every setting a command may use.
    pub fn validate(&self) -> CliResult<()> {
        if self.hmm.max_iter == 0 {
            return Err(CliError::config("hmm max_iter must be at least 1"));
        }
        if self.hmm.tol.is_nan() || self.hmm.tol <= 0.0 {
            return Err(CliError::config("hmm tol must be positive"));
        }
        if !(self.hmm.smoothing.is_finite() && self.hmm.smoothing >= 0.0) {
            return Err(CliError::config("hmm smoothing must be finite and >= 0"));
        }
        if self.forecast.horizon == 0 {
            return Err(CliError::config("forecast horizon must be at least 1"));
        }
        self.lstm.lstm_config().validate().map_err(|e| CliError::config(format!("lstm: {e}")))
    }

    pub fn input_path(&self) -> CliResult<&Path> {
        let p = self.input.as_deref().ok_or_else(|| CliError::config("no input file given (use --input)"))?;
        if !p.exists() {
            return Err(CliError::config(format!("input file {} does not exist", p.display())));
        }
        Ok(p)
    }

    pub fn out_path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }
}
