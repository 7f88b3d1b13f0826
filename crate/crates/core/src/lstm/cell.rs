use serde::{Deserialize, Serialize};

use super::params::{Gate, LstmParams};
use crate::error::{Error, Result};

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LstmState {
    pub c: Vec<f64>,
    pub h: Vec<f64>,
}

impl LstmState {
    pub fn zeros(hidden: usize) -> Self {
        Self { c: vec![0.0; hidden], h: vec![0.0; hidden] }
    }
}

/// Gate activations of one step: input, forget, candidate, output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateActivations {
    pub i: Vec<f64>,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    pub o: Vec<f64>,
}

/// `z = W x + R h + b` for one gate block.
fn preactivation(params: &LstmParams, gate: Gate, x: &[f64], h: &[f64]) -> Vec<f64> {
    let (hid, inp) = (params.layout.hidden, params.layout.input);
    let (w, r, b) = (params.w(gate), params.r(gate), params.b(gate));
    (0..hid)
        .map(|row| {
            let wx: f64 = w[row * inp..(row + 1) * inp].iter().zip(x).map(|(a, b)| a * b).sum();
            let rh: f64 = r[row * hid..(row + 1) * hid].iter().zip(h).map(|(a, b)| a * b).sum();
            wx + rh + b[row]
        })
        .collect()
}

/// One LSTM step.
///
/// `i, f, o` use the logistic sigmoid, `g` and the cell output use tanh:
/// `C_t = f * C_{t-1} + i * g` and `H_t = o * tanh(C_t)` elementwise.
pub fn cell_step(params: &LstmParams, state: &LstmState, x: &[f64]) -> Result<(LstmState, GateActivations)> {
    if x.len() != params.layout.input {
        return Err(Error::Dimension(format!("input has {} features, expected {}", x.len(), params.layout.input)));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("LSTM input".into()));
    }
    let h = &state.h;
    let i: Vec<f64> = preactivation(params, Gate::Input, x, h).into_iter().map(sigmoid).collect();
    let f: Vec<f64> = preactivation(params, Gate::Forget, x, h).into_iter().map(sigmoid).collect();
    let g: Vec<f64> = preactivation(params, Gate::Cell, x, h).into_iter().map(f64::tanh).collect();
    let o: Vec<f64> = preactivation(params, Gate::Output, x, h).into_iter().map(sigmoid).collect();
    let c: Vec<f64> = (0..i.len()).map(|k| f[k] * state.c[k] + i[k] * g[k]).collect();
    let h: Vec<f64> = c.iter().zip(&o).map(|(c, o)| o * c.tanh()).collect();
    Ok((LstmState { c, h }, GateActivations { i, f, g, o }))
}

/// Everything from a forward pass that backpropagation needs.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardCache {
    pub inputs: Vec<Vec<f64>>,
    /// `states[0]` is the zero state; `states[t + 1]` follows step `t`.
    pub states: Vec<LstmState>,
    pub gates: Vec<GateActivations>,
    /// Dense-layer activations when that layer is configured.
    pub dense: Option<Vec<f64>>,
    pub prediction: f64,
}

/// Runs the window from a zero state and applies the output head to the
/// last hidden state.
pub fn forward_sequence(params: &LstmParams, window: &[Vec<f64>]) -> Result<ForwardCache> {
    if window.is_empty() {
        return Err(Error::Dimension("window must contain at least one step".into()));
    }
    let hidden = params.layout.hidden;
    let mut states = Vec::with_capacity(window.len() + 1);
    let mut gates = Vec::with_capacity(window.len());
    states.push(LstmState::zeros(hidden));
    for x in window {
        let (next, acts) = cell_step(params, states.last().expect("non-empty"), x)?;
        states.push(next);
        gates.push(acts);
    }
    let h_last = &states.last().expect("non-empty").h;
    let dense = params.layout.dense.map(|d| {
        let (w, b) = (params.dense_w(), params.dense_b());
        (0..d)
            .map(|r| {
                (w[r * hidden..(r + 1) * hidden].iter().zip(h_last).map(|(a, b)| a * b).sum::<f64>() + b[r]).tanh()
            })
            .collect::<Vec<f64>>()
    });
    let head_in = dense.as_deref().unwrap_or(h_last);
    let prediction = params.out_w().iter().zip(head_in).map(|(a, b)| a * b).sum::<f64>() + params.out_b();
    Ok(ForwardCache { inputs: window.to_vec(), states, gates, dense, prediction })
}

/// Gradient of `(prediction - target)^2 / batch_size` with respect to
/// every parameter.
pub fn backprop(params: &LstmParams, cache: &ForwardCache, target: f64, batch_size: usize) -> LstmParams {
    let mut grads = LstmParams::zeros(params.layout);
    let d_pred = 2.0 * (cache.prediction - target) / batch_size as f64;
    accumulate_gradients(params, cache, d_pred, &mut grads);
    grads
}

/// Adds the gradient for an upstream derivative `d_pred` into `grads`.
pub fn accumulate_gradients(params: &LstmParams, cache: &ForwardCache, d_pred: f64, grads: &mut LstmParams) {
    let layout = params.layout;
    let (hid, inp) = (layout.hidden, layout.input);
    let steps = cache.gates.len();
    let h_last = &cache.states[steps].h;

    // output head
    let head_in = cache.dense.as_deref().unwrap_or(h_last);
    let ow = layout.out_w_offset();
    for (k, v) in head_in.iter().enumerate() {
        grads.values[ow + k] += d_pred * v;
    }
    *grads.out_b_mut() += d_pred;

    let mut dh: Vec<f64> = match &cache.dense {
        None => params.out_w().iter().map(|w| w * d_pred).collect(),
        Some(z) => {
            let mut dh = vec![0.0; hid];
            let (dw_off, db_off) = (layout.dense_w_offset(), layout.dense_b_offset());
            let dense_w = params.dense_w();
            for (r, zr) in z.iter().enumerate() {
                let da = d_pred * params.out_w()[r] * (1.0 - zr * zr);
                grads.values[db_off + r] += da;
                for c in 0..hid {
                    grads.values[dw_off + r * hid + c] += da * h_last[c];
                    dh[c] += dense_w[r * hid + c] * da;
                }
            }
            dh
        }
    };
    let mut dc = vec![0.0; hid];

    for t in (0..steps).rev() {
        let acts = &cache.gates[t];
        let prev = &cache.states[t];
        let cur = &cache.states[t + 1];
        let x = &cache.inputs[t];
        let mut da = [vec![0.0; hid], vec![0.0; hid], vec![0.0; hid], vec![0.0; hid]];
        for k in 0..hid {
            let tc = cur.c[k].tanh();
            let d_o = dh[k] * tc;
            dc[k] += dh[k] * acts.o[k] * (1.0 - tc * tc);
            let d_i = dc[k] * acts.g[k];
            let d_g = dc[k] * acts.i[k];
            let d_f = dc[k] * prev.c[k];
            da[Gate::Input as usize][k] = d_i * acts.i[k] * (1.0 - acts.i[k]);
            da[Gate::Forget as usize][k] = d_f * acts.f[k] * (1.0 - acts.f[k]);
            da[Gate::Cell as usize][k] = d_g * (1.0 - acts.g[k] * acts.g[k]);
            da[Gate::Output as usize][k] = d_o * acts.o[k] * (1.0 - acts.o[k]);
            dc[k] *= acts.f[k];
        }
        let mut dh_prev = vec![0.0; hid];
        for gate in Gate::ALL {
            let (wo, ro, bo) = (layout.w_offset(gate), layout.r_offset(gate), layout.b_offset(gate));
            let r = params.r(gate);
            for (row, &d) in da[gate as usize].iter().enumerate() {
                if d == 0.0 {
                    continue;
                }
                grads.values[bo + row] += d;
                for (g, xc) in grads.values[wo + row * inp..wo + (row + 1) * inp].iter_mut().zip(x) {
                    *g += d * xc;
                }
                for c in 0..hid {
                    grads.values[ro + row * hid + c] += d * prev.h[c];
                    dh_prev[c] += r[row * hid + c] * d;
                }
            }
        }
        dh = dh_prev;
    }
}
