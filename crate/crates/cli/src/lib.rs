//! Command-line pipeline: ingestion, HMM and LSTM training, comparison,
//! forecasting and plot-data emission.

pub mod archive;
pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod input;

pub use archive::{ArchivedModel, HmmArchive, LstmArchive, ModelArchive};
pub use commands::Report;
pub use config::RunConfig;
pub use error::{CliError, CliResult, ErrorKind, Stage};
