//! Single-layer LSTM regressor trained by backpropagation through time
//! with ADAM on mean squared error.

mod adam;
mod cell;
mod params;
mod train;

pub use adam::{adam_update, AdamState};
pub use cell::{accumulate_gradients, backprop, cell_step, forward_sequence, ForwardCache, GateActivations, LstmState};
pub use params::{init_params, Gate, Layout, LstmConfig, LstmParams};
pub use train::{
    chronological_split, loss_mse, minimum_series_length, train, EpochLoss, LstmModel, MinMaxScaler, Split,
    TrainOutcome,
};
