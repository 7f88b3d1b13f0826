use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use cropcast_core::hmm::ForecastMode;

use crate::commands::{self, Report};
use crate::config::{ForecastStart, RunConfig};
use crate::error::CliResult;

#[derive(Debug, Parser)]
#[command(name = "cropcast", version, about = "HMM and LSTM crop-yield modelling from climate states")]
pub struct Cli {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Input CSV (raw or labelled schema).
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Output directory for archives, tables and plot data.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and discretize the input, writing series.csv.
    Ingest,
    /// Fit the HMM and write hmm.json.
    TrainHmm(HmmArgs),
    /// Fit the LSTM and write lstm.json plus its loss trace.
    TrainLstm(LstmArgs),
    /// Fit both models and compare them on the same held-out years.
    Compare {
        #[command(flatten)]
        hmm: HmmArgs,
        #[command(flatten)]
        lstm: LstmArgs,
    },
    /// Walk the trained chain forward from the end of the series.
    Forecast(ForecastArgs),
    /// Stationary distributions of the counted and trained transition matrices.
    SteadyState {
        /// HMM archive; defaults to <out>/hmm.json.
        #[arg(long)]
        archive: Option<PathBuf>,
    },
    /// Write plot-ready CSVs from the archives in the output directory.
    Plot,
}

#[derive(Debug, Clone, Default, Args)]
pub struct HmmArgs {
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Pseudo-count added to transition and emission counts.
    #[arg(long)]
    pub smoothing: Option<f64>,
    /// Re-estimate the initial distribution too.
    #[arg(long)]
    pub update_initial: bool,
}

#[derive(Debug, Clone, Default, Args)]
pub struct LstmArgs {
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub hidden_size: Option<usize>,
    #[arg(long)]
    pub window_length: Option<usize>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Feed rainfall and temperature alongside yield.
    #[arg(long)]
    pub include_climate: bool,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ForecastArgs {
    #[arg(long)]
    pub horizon: Option<usize>,
    /// Draw states and symbols instead of taking the most probable ones.
    #[arg(long)]
    pub sample: bool,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Start from the last recorded state instead of the last decoded one.
    #[arg(long)]
    pub from_recorded: bool,
    /// HMM archive; defaults to <out>/hmm.json.
    #[arg(long)]
    pub archive: Option<PathBuf>,
}

impl HmmArgs {
    fn apply(&self, c: &mut RunConfig) {
        if let Some(v) = self.max_iter {
            c.hmm.max_iter = v;
        }
        if let Some(v) = self.tol {
            c.hmm.tol = v;
        }
        if let Some(v) = self.smoothing {
            c.hmm.smoothing = v;
        }
        c.hmm.update_initial |= self.update_initial;
    }
}

impl LstmArgs {
    fn apply(&self, c: &mut RunConfig) {
        let l = &mut c.lstm;
        if let Some(v) = self.epochs {
            l.epochs = v;
        }
        if let Some(v) = self.hidden_size {
            l.hidden_size = v;
        }
        if let Some(v) = self.window_length {
            l.window_length = v;
        }
        if let Some(v) = self.learning_rate {
            l.learning_rate = v;
        }
        if self.batch_size.is_some() {
            l.batch_size = self.batch_size;
        }
        if let Some(v) = self.seed {
            l.seed = v;
        }
        l.include_climate |= self.include_climate;
    }
}

impl ForecastArgs {
    fn apply(&self, c: &mut RunConfig) {
        if let Some(v) = self.horizon {
            c.forecast.horizon = v;
        }
        if self.sample {
            c.forecast.mode = ForecastMode::Sample;
        }
        if let Some(v) = self.seed {
            c.forecast.seed = v;
        }
        if self.from_recorded {
            c.forecast.start = ForecastStart::Recorded;
        }
    }
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Ingest => "ingest",
            Command::TrainHmm(_) => "train-hmm",
            Command::TrainLstm(_) => "train-lstm",
            Command::Compare { .. } => "compare",
            Command::Forecast(_) => "forecast",
            Command::SteadyState { .. } => "steady-state",
            Command::Plot => "plot",
        }
    }
}

/// Builds the effective configuration: file, then flags.
pub fn resolve_config(cli: &Cli) -> CliResult<RunConfig> {
    let mut c = match &cli.config {
        Some(p) => RunConfig::from_file(p)?,
        None => RunConfig::default(),
    };
    if let Some(p) = &cli.input {
        c.input = Some(p.clone());
    }
    if let Some(p) = &cli.out {
        c.out_dir = p.clone();
    }
    match &cli.command {
        Command::TrainHmm(a) => a.apply(&mut c),
        Command::TrainLstm(a) => a.apply(&mut c),
        Command::Compare { hmm, lstm } => {
            hmm.apply(&mut c);
            lstm.apply(&mut c);
        }
        Command::Forecast(a) => a.apply(&mut c),
        Command::Ingest | Command::SteadyState { .. } | Command::Plot => {}
    }
    c.validate()?;
    Ok(c)
}

/// Runs a parsed command line and writes its diagnostics file.
pub fn execute(cli: &Cli) -> CliResult<Report> {
    let config = resolve_config(cli)?;
    let report = match &cli.command {
        Command::Ingest => commands::ingest(&config),
        Command::TrainHmm(_) => commands::train_hmm(&config),
        Command::TrainLstm(_) => commands::train_lstm(&config),
        Command::Compare { .. } => commands::compare(&config),
        Command::Forecast(a) => commands::forecast(&config, a.archive.as_deref()),
        Command::SteadyState { archive } => commands::steady_state(&config, archive.as_deref()),
        Command::Plot => commands::plot(&config),
    }?;
    commands::write_diagnostics(&config, cli.command.name(), &report.diagnostics)?;
    Ok(report)
}
