use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The four gate blocks, in storage order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gate {
    Input = 0,
    Forget = 1,
    Cell = 2,
    Output = 3,
}

impl Gate {
    pub const ALL: [Gate; 4] = [Gate::Input, Gate::Forget, Gate::Cell, Gate::Output];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LstmConfig {
    pub hidden_size: usize,
    pub input_size: usize,
    pub window_length: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_epsilon: f64,
    pub seed: u64,
    pub train_fraction: f64,
    /// Samples per update; `None` trains full-batch.
    pub batch_size: Option<usize>,
    /// Width of an optional tanh dense layer between the LSTM and the
    /// output unit; `None` feeds the last hidden state straight into it.
    pub dense_size: Option<usize>,
}

impl Default for LstmConfig {
    fn default() -> Self {
        Self {
            hidden_size: 32,
            input_size: 1,
            window_length: 4,
            epochs: 200,
            learning_rate: 1e-3,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_epsilon: 1e-8,
            seed: 0,
            train_fraction: 0.8,
            batch_size: None,
            dense_size: None,
        }
    }
}

impl LstmConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.to_string()));
        if self.hidden_size == 0 {
            return bad("hidden_size must be at least 1");
        }
        if self.input_size == 0 {
            return bad("input_size must be at least 1");
        }
        if self.window_length == 0 {
            return bad("window_length must be at least 1");
        }
        if self.epochs == 0 {
            return bad("epochs must be at least 1");
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return bad("train_fraction must lie strictly between 0 and 1");
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return bad("learning_rate must be positive");
        }
        if !(0.0..1.0).contains(&self.adam_beta1) || !(0.0..1.0).contains(&self.adam_beta2) {
            return bad("adam betas must lie in [0, 1)");
        }
        if self.adam_epsilon.is_nan() || self.adam_epsilon <= 0.0 {
            return bad("adam_epsilon must be positive");
        }
        if self.batch_size == Some(0) {
            return bad("batch_size must be at least 1");
        }
        if self.dense_size == Some(0) {
            return bad("dense_size must be at least 1");
        }
        Ok(())
    }
}

/// Offsets of each parameter group inside the flat value vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layout {
    pub hidden: usize,
    pub input: usize,
    pub dense: Option<usize>,
}

impl Layout {
    pub fn w_offset(&self, gate: Gate) -> usize {
        gate as usize * self.hidden * self.input
    }

    pub fn r_offset(&self, gate: Gate) -> usize {
        4 * self.hidden * self.input + gate as usize * self.hidden * self.hidden
    }

    pub fn b_offset(&self, gate: Gate) -> usize {
        4 * self.hidden * (self.input + self.hidden) + gate as usize * self.hidden
    }

    fn lstm_len(&self) -> usize {
        4 * self.hidden * (self.input + self.hidden + 1)
    }

    /// Dense layer weights (`dense x hidden`), then its biases.
    pub fn dense_w_offset(&self) -> usize {
        self.lstm_len()
    }

    pub fn dense_b_offset(&self) -> usize {
        self.lstm_len() + self.dense.map_or(0, |d| d * self.hidden)
    }

    /// Width of the vector feeding the output unit.
    pub fn head_input(&self) -> usize {
        self.dense.unwrap_or(self.hidden)
    }

    pub fn out_w_offset(&self) -> usize {
        self.dense_b_offset() + self.dense.unwrap_or(0)
    }

    pub fn out_b_offset(&self) -> usize {
        self.out_w_offset() + self.head_input()
    }

    pub fn len(&self) -> usize {
        self.out_b_offset() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Every trainable value of the network, stored contiguously.
///
/// Gate blocks `W`, `R`, `b` are kept in `i, f, g, o` order; each `W` block
/// is `hidden x input` and each `R` block `hidden x hidden`, row-major.
/// Gradients use the same type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LstmParams {
    pub layout: Layout,
    pub values: Vec<f64>,
}

impl LstmParams {
    pub fn zeros(layout: Layout) -> Self {
        Self { layout, values: vec![0.0; layout.len()] }
    }

    pub fn w(&self, gate: Gate) -> &[f64] {
        let o = self.layout.w_offset(gate);
        &self.values[o..o + self.layout.hidden * self.layout.input]
    }

    pub fn r(&self, gate: Gate) -> &[f64] {
        let o = self.layout.r_offset(gate);
        &self.values[o..o + self.layout.hidden * self.layout.hidden]
    }

    pub fn b(&self, gate: Gate) -> &[f64] {
        let o = self.layout.b_offset(gate);
        &self.values[o..o + self.layout.hidden]
    }

    pub fn w_mut(&mut self, gate: Gate) -> &mut [f64] {
        let o = self.layout.w_offset(gate);
        let len = self.layout.hidden * self.layout.input;
        &mut self.values[o..o + len]
    }

    pub fn r_mut(&mut self, gate: Gate) -> &mut [f64] {
        let o = self.layout.r_offset(gate);
        let len = self.layout.hidden * self.layout.hidden;
        &mut self.values[o..o + len]
    }

    pub fn b_mut(&mut self, gate: Gate) -> &mut [f64] {
        let o = self.layout.b_offset(gate);
        let len = self.layout.hidden;
        &mut self.values[o..o + len]
    }

    pub fn dense_w(&self) -> &[f64] {
        let o = self.layout.dense_w_offset();
        &self.values[o..self.layout.dense_b_offset()]
    }

    pub fn dense_b(&self) -> &[f64] {
        &self.values[self.layout.dense_b_offset()..self.layout.out_w_offset()]
    }

    pub fn out_w(&self) -> &[f64] {
        &self.values[self.layout.out_w_offset()..self.layout.out_b_offset()]
    }

    pub fn out_b(&self) -> f64 {
        self.values[self.layout.out_b_offset()]
    }

    pub fn out_b_mut(&mut self) -> &mut f64 {
        let o = self.layout.out_b_offset();
        &mut self.values[o]
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

/// Seeded uniform initialisation in `[-1/sqrt(fan), 1/sqrt(fan)]` with the
/// forget-gate bias set to one and all other biases zero.
pub fn init_params(config: &LstmConfig) -> Result<LstmParams> {
    config.validate()?;
    let layout = Layout { hidden: config.hidden_size, input: config.input_size, dense: config.dense_size };
    let mut p = LstmParams::zeros(layout);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let k = 1.0 / (config.hidden_size as f64).sqrt();
    for gate in Gate::ALL {
        p.w_mut(gate).iter_mut().for_each(|v| *v = rng.random_range(-k..k));
        p.r_mut(gate).iter_mut().for_each(|v| *v = rng.random_range(-k..k));
    }
    p.b_mut(Gate::Forget).iter_mut().for_each(|v| *v = 1.0);

    let dw = layout.dense_w_offset()..layout.dense_b_offset();
    p.values[dw].iter_mut().for_each(|v| *v = rng.random_range(-k..k));
    let kh = 1.0 / (layout.head_input() as f64).sqrt();
    let ow = layout.out_w_offset()..layout.out_b_offset();
    p.values[ow].iter_mut().for_each(|v| *v = rng.random_range(-kh..kh));
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_is_contiguous() {
        let l = Layout { hidden: 3, input: 2, dense: None };
        assert_eq!(l.w_offset(Gate::Forget), 6);
        assert_eq!(l.r_offset(Gate::Input), 24);
        assert_eq!(l.b_offset(Gate::Input), 24 + 36);
        assert_eq!(l.out_w_offset(), 24 + 36 + 12);
        assert_eq!(l.len(), 24 + 36 + 12 + 3 + 1);
        let d = Layout { hidden: 3, input: 2, dense: Some(5) };
        assert_eq!(d.dense_b_offset(), 72 + 15);
        assert_eq!(d.out_w_offset(), 72 + 20);
        assert_eq!(d.len(), 72 + 20 + 5 + 1);
    }

    #[test]
    fn init_shapes_and_biases() {
        let cfg = LstmConfig { hidden_size: 32, input_size: 1, ..Default::default() };
        let p = init_params(&cfg).unwrap();
        for gate in Gate::ALL {
            assert_eq!(p.w(gate).len(), 32);
            assert_eq!(p.r(gate).len(), 32 * 32);
        }
        assert!(p.b(Gate::Forget).iter().all(|&v| v == 1.0));
        for gate in [Gate::Input, Gate::Cell, Gate::Output] {
            assert!(p.b(gate).iter().all(|&v| v == 0.0));
        }
        assert_eq!(p.out_b(), 0.0);
        let k = 1.0 / 32f64.sqrt();
        assert!(p.w(Gate::Cell).iter().all(|v| v.abs() <= k));
    }

    #[test]
    fn init_is_seeded() {
        let cfg = LstmConfig { seed: 11, ..Default::default() };
        assert_eq!(init_params(&cfg).unwrap(), init_params(&cfg).unwrap());
        let other = LstmConfig { seed: 12, ..Default::default() };
        assert_ne!(init_params(&cfg).unwrap(), init_params(&other).unwrap());
    }

    #[test]
    fn config_checks() {
        assert!(LstmConfig::default().validate().is_ok());
        assert!(LstmConfig { epochs: 0, ..Default::default() }.validate().is_err());
        assert!(LstmConfig { train_fraction: 1.0, ..Default::default() }.validate().is_err());
        assert!(LstmConfig { hidden_size: 0, ..Default::default() }.validate().is_err());
        assert!(LstmConfig { batch_size: Some(0), ..Default::default() }.validate().is_err());
    }
}
