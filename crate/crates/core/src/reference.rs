//! The 1990-2021 Nigerian maize state/observation series and the model
//! values published alongside it, kept for side-by-side diagnostics.
//!
//! State codes are 1-based in the published table: 1 = LL, 2 = LH, 3 = HL,
//! 4 = HH. Published matrices are transcribed verbatim, including the ones
//! that are not row-stochastic.

use crate::estimation::{DiscretizedSeries, N_CLIMATE_STATES, N_YIELD_LEVELS};

pub const FIRST_YEAR: i32 = 1990;

/// Hidden-state code per year, 1990..=2021.
pub const STATE_CODES: [u8; 32] =
    [1, 3, 1, 1, 3, 1, 3, 3, 2, 3, 1, 1, 1, 3, 1, 2, 2, 2, 3, 2, 4, 2, 3, 2, 2, 1, 4, 4, 4, 1, 4, 4];

/// Yield level per year, 1990..=2021.
pub const OBSERVATIONS: [char; 32] = [
    'M', 'M', 'M', 'M', 'M', 'M', 'M', 'L', 'L', 'M', 'L', 'M', 'M', 'M', 'M', 'M', 'M', 'M', 'M', 'M', 'M', 'M', 'M',
    'M', 'H', 'H', 'H', 'H', 'H', 'H', 'H', 'H',
];

/// Count-based transition matrix (rows/cols LL, LH, HL, HH).
pub const COUNTED_TRANSITION: [[f64; 4]; 4] = [
    [0.3000, 0.1000, 0.4000, 0.2000],
    [0.1250, 0.3750, 0.3750, 0.1250],
    [0.5000, 0.3750, 0.1250, 0.0000],
    [0.2000, 0.2000, 0.0000, 0.6000],
];

/// Published observation-count matrix, columns as printed (labelled L, M, H).
pub const EMISSION_COUNTS: [[u64; 3]; 4] = [[2, 1, 7], [1, 1, 6], [0, 1, 7], [5, 0, 1]];

/// Published count-based emission matrix, columns as printed.
pub const COUNTED_EMISSION: [[f64; 3]; 4] =
    [[0.2000, 0.1000, 0.7000], [0.1250, 0.1250, 0.7500], [0.0000, 0.1250, 0.8750], [0.8333, 0.0000, 0.1667]];

pub const COUNTED_INITIAL: [f64; 4] = [0.3125, 0.2500, 0.2500, 0.1875];

/// Initial distribution used to start re-estimation.
pub const TRAINED_INITIAL: [f64; 4] = [0.25, 0.25, 0.25, 0.25];

/// Published re-estimated transition matrix after 1000 iterations.
pub const TRAINED_TRANSITION: [[f64; 4]; 4] = [
    [1.0000, 0.0000, 0.0000, 0.0000],
    [0.0924, 0.8076, 0.0000, 0.1000],
    [0.0000, 0.2246, 0.7754, 0.0000],
    [0.0000, 0.0000, 0.2052, 0.7948],
];

/// Published re-estimated emission matrix. Row 2 sums to 1.7809.
pub const TRAINED_EMISSION: [[f64; 3]; 4] =
    [[0.0000, 0.0000, 1.0000], [0.0000, 1.0000, 0.7809], [0.0000, 1.0000, 0.0000], [0.5272, 0.4728, 0.0000]];

/// Published Viterbi decode (1-based codes). 30 entries for a 32-year series.
pub const DECODED_STATE_CODES: [u8; 30] =
    [3, 1, 3, 1, 3, 1, 1, 3, 1, 1, 3, 1, 3, 1, 3, 1, 3, 1, 3, 1, 3, 1, 3, 1, 3, 1, 3, 1, 3, 1];

pub const MATCH_FRACTION: f64 = 0.3125;

pub const STEADY_STATE: [f64; 4] = [0.7738, 0.1310, 0.0952, 0.0000];

/// Narrated forecast for 2022-2025: state code 2 emitting `H` each year,
/// starting from state code 4 in 2021.
pub const FORECAST_START_CODE: u8 = 4;
pub const FORECAST_STATE_CODES: [u8; 4] = [2, 2, 2, 2];
pub const FORECAST_OBSERVATIONS: [char; 4] = ['H', 'H', 'H', 'H'];

/// One row of the published accuracy table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsRow {
    pub model: &'static str,
    pub mape: f64,
    pub rmse: f64,
    pub corr: f64,
    pub sem: f64,
    pub mse: f64,
}

pub const METRICS: [MetricsRow; 2] = [
    MetricsRow { model: "HMM", mape: 1.26, rmse: 0.37, corr: -0.85, sem: 0.18, mse: 0.13 },
    MetricsRow { model: "LSTM", mape: 12.98, rmse: 1.21, corr: -0.85, sem: 4.19, mse: 0.87 },
];

/// Reported LSTM training figures: loss, validation loss, "test accuracy".
pub const LSTM_LOSS: f64 = 0.7100;
pub const LSTM_VAL_LOSS: f64 = 0.1055;
pub const LSTM_TEST_ACCURACY: f64 = 0.5813;

pub fn observation_index(symbol: char) -> Option<usize> {
    match symbol {
        'L' => Some(0),
        'M' => Some(1),
        'H' => Some(2),
        _ => None,
    }
}

pub fn years() -> Vec<i32> {
    (0..STATE_CODES.len() as i32).map(|i| FIRST_YEAR + i).collect()
}

/// The 32-year series as 0-based indices over `LL, LH, HL, HH` and `L, M, H`.
pub fn maize_series() -> DiscretizedSeries {
    DiscretizedSeries::from_labels(
        years(),
        STATE_CODES.iter().map(|&c| usize::from(c) - 1).collect(),
        OBSERVATIONS.iter().map(|&c| observation_index(c).expect("static symbol")).collect(),
        N_CLIMATE_STATES,
        N_YIELD_LEVELS,
    )
    .expect("static series is well formed")
}

pub fn to_rows<const C: usize>(m: &[[f64; C]]) -> Vec<Vec<f64>> {
    m.iter().map(|r| r.to_vec()).collect()
}
