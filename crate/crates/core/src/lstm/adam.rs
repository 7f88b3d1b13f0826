use serde::{Deserialize, Serialize};

use super::params::{LstmConfig, LstmParams};
use crate::error::{Error, Result};

/// First and second moment estimates, one entry per parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdamState {
    pub first_moment: Vec<f64>,
    pub second_moment: Vec<f64>,
    pub step_count: u64,
}

impl AdamState {
    pub fn new(n_params: usize) -> Self {
        Self { first_moment: vec![0.0; n_params], second_moment: vec![0.0; n_params], step_count: 0 }
    }
}

/// One bias-corrected ADAM step, in place.
pub fn adam_update(
    params: &mut LstmParams,
    grads: &LstmParams,
    state: &mut AdamState,
    config: &LstmConfig,
) -> Result<()> {
    let n = params.values.len();
    if grads.values.len() != n || state.first_moment.len() != n || state.second_moment.len() != n {
        return Err(Error::Dimension("parameter, gradient and moment sizes differ".into()));
    }
    let (b1, b2) = (config.adam_beta1, config.adam_beta2);
    state.step_count += 1;
    let t = state.step_count as i32;
    let c1 = 1.0 - b1.powi(t);
    let c2 = 1.0 - b2.powi(t);
    for k in 0..n {
        let g = grads.values[k];
        let m = b1 * state.first_moment[k] + (1.0 - b1) * g;
        let v = b2 * state.second_moment[k] + (1.0 - b2) * g * g;
        state.first_moment[k] = m;
        state.second_moment[k] = v;
        params.values[k] -= config.learning_rate * (m / c1) / ((v / c2).sqrt() + config.adam_epsilon);
    }
    Ok(())
}
