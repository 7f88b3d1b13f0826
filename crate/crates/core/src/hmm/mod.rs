//! Discrete hidden Markov models: representation, inference, learning,
//! long-run behaviour and forecasting.

mod baum_welch;
mod forecast;
mod inference;
mod model;
mod steady_state;
mod viterbi;

pub use baum_welch::{baum_welch, BaumWelchConfig, TrainingReport};
pub use forecast::{forecast, ForecastMode, ForecastStep};
pub use inference::{
    backward, forward, likelihood_bruteforce, next_state_distribution, next_symbol_distribution, posteriors,
    PosteriorStats, TrellisResult, BRUTEFORCE_PATH_LIMIT,
};
pub use model::{
    validate_params, HmmParams, LabelSet, Matrix, ObservationAlphabet, StateSpace, ValidationReport, Violation,
    STOCHASTIC_TOL,
};
pub use steady_state::{direct_solve, steady_state, steady_state_with, SteadyState, POWER_MAX_ITER, POWER_TOL};
pub use viterbi::{match_fraction, viterbi, ViterbiPath};
