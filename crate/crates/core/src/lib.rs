//! Discrete hidden Markov models and a from-scratch LSTM for forecasting
//! discretized crop yield from climate states, plus the accuracy measures
//! used to compare them.

pub mod diagnostics;
pub mod error;
pub mod estimation;
pub mod hmm;
pub mod lstm;
pub mod metrics;
pub mod reference;

pub use error::{Error, Result};
pub use estimation::{ClimateYieldRecord, CountEstimates, DiscretizedSeries, ThresholdPolicy, Thresholds};
pub use hmm::{HmmParams, LabelSet, TrainingReport};
pub use metrics::MetricsReport;
