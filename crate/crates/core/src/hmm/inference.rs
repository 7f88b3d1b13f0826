//! Likelihood evaluation and the forward/backward recursions.
//!
//! The recursions are scaled: after each step the forward vector is
//! renormalised to sum to one and the normaliser is kept, so long sequences
//! never underflow. With `scales[t] = 1 / sum_i alpha~_t(i)` the
//! log-likelihood is `-sum_t ln(scales[t])`.

use serde::{Deserialize, Serialize};

use super::model::HmmParams;
use crate::error::{Error, Result};

/// Maximum number of state paths [`likelihood_bruteforce`] will enumerate.
pub const BRUTEFORCE_PATH_LIMIT: u128 = 10_000_000;

/// Sums `P(X, Q)` over every state path `Q`. Exponential in the sequence
/// length; intended as a reference for small instances.
pub fn likelihood_bruteforce(params: &HmmParams, obs: &[usize]) -> Result<f64> {
    params.check_observations(obs)?;
    let n = params.n_states();
    let paths = (n as u128).checked_pow(obs.len() as u32).unwrap_or(u128::MAX);
    if paths > BRUTEFORCE_PATH_LIMIT {
        return Err(Error::TooLarge { paths, limit: BRUTEFORCE_PATH_LIMIT });
    }
    let (a, b, pi) = (params.transition(), params.emission(), params.initial());
    let mut path = vec![0usize; obs.len()];
    let mut total = 0.0;
    loop {
        let mut p = pi[path[0]] * b[path[0]][obs[0]];
        for t in 1..obs.len() {
            p *= a[path[t - 1]][path[t]] * b[path[t]][obs[t]];
        }
        total += p;
        // odometer increment, last position fastest
        let mut pos = obs.len();
        loop {
            if pos == 0 {
                return Ok(total);
            }
            pos -= 1;
            path[pos] += 1;
            if path[pos] < n {
                break;
            }
            path[pos] = 0;
        }
    }
}

/// Scaled forward trellis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrellisResult {
    /// `T x N` forward variables, each row normalised to sum to one.
    pub alpha_hat: Vec<Vec<f64>>,
    /// Per-step scale factors, reciprocal of the unnormalised row sums.
    pub scales: Vec<f64>,
    /// `ln P(X | model)`, `-inf` when the sequence is impossible.
    pub log_likelihood: f64,
}

impl TrellisResult {
    pub fn is_impossible(&self) -> bool {
        self.log_likelihood == f64::NEG_INFINITY
    }
}

pub fn forward(params: &HmmParams, obs: &[usize]) -> Result<TrellisResult> {
    params.check_observations(obs)?;
    let n = params.n_states();
    let (a, b, pi) = (params.transition(), params.emission(), params.initial());
    let t_len = obs.len();
    let mut alpha_hat = vec![vec![0.0; n]; t_len];
    let mut scales = vec![f64::INFINITY; t_len];

    let mut row: Vec<f64> = (0..n).map(|i| pi[i] * b[i][obs[0]]).collect();
    for t in 0..t_len {
        if t > 0 {
            let prev = &alpha_hat[t - 1];
            row = (0..n)
                .map(|j| {
                    let s: f64 = (0..n).map(|i| prev[i] * a[i][j]).sum();
                    s * b[j][obs[t]]
                })
                .collect();
        }
        let sum: f64 = row.iter().sum();
        if sum <= 0.0 {
            // remaining rows stay zero, remaining scales stay infinite
            return Ok(TrellisResult { alpha_hat, scales, log_likelihood: f64::NEG_INFINITY });
        }
        scales[t] = 1.0 / sum;
        for (dst, v) in alpha_hat[t].iter_mut().zip(&row) {
            *dst = v / sum;
        }
    }
    let log_likelihood = -scales.iter().map(|s| s.ln()).sum::<f64>();
    Ok(TrellisResult { alpha_hat, scales, log_likelihood })
}

/// Scaled backward variables using the forward scale factors.
///
/// The last row is all ones; earlier rows are
/// `beta^_t(i) = scales[t+1] * sum_j a_ij b_j(x_{t+1}) beta^_{t+1}(j)`,
/// which makes `sum_i alpha^_t(i) beta^_t(i) = 1` for every `t`.
/// For an impossible sequence the rows at and before the failure point are
/// zero.
pub fn backward(params: &HmmParams, obs: &[usize], trellis: &TrellisResult) -> Result<Vec<Vec<f64>>> {
    params.check_observations(obs)?;
    if trellis.scales.len() != obs.len() {
        return Err(Error::Dimension(format!(
            "trellis has {} steps, sequence has {}",
            trellis.scales.len(),
            obs.len()
        )));
    }
    let n = params.n_states();
    let (a, b) = (params.transition(), params.emission());
    let t_len = obs.len();
    let mut beta = vec![vec![0.0; n]; t_len];
    beta[t_len - 1] = vec![1.0; n];
    for t in (0..t_len - 1).rev() {
        let scale = trellis.scales[t + 1];
        if !scale.is_finite() {
            // impossible continuation: leave this row at zero
            continue;
        }
        for i in 0..n {
            let s: f64 = (0..n).map(|j| a[i][j] * b[j][obs[t + 1]] * beta[t + 1][j]).sum();
            beta[t][i] = s * scale;
        }
    }
    Ok(beta)
}

/// Posterior marginals from one forward-backward pass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorStats {
    /// `T x N` state posteriors.
    pub gamma: Vec<Vec<f64>>,
    /// `(T-1) x N x N` pairwise posteriors of consecutive states.
    pub xi: Vec<Vec<Vec<f64>>>,
    pub log_likelihood: f64,
}

pub fn posteriors(params: &HmmParams, obs: &[usize]) -> Result<PosteriorStats> {
    let trellis = forward(params, obs)?;
    if trellis.is_impossible() {
        return Err(Error::InvalidArgument("observation sequence has zero probability under the model".into()));
    }
    let beta = backward(params, obs, &trellis)?;
    Ok(posteriors_from(params, obs, &trellis, &beta))
}

pub(crate) fn posteriors_from(
    params: &HmmParams,
    obs: &[usize],
    trellis: &TrellisResult,
    beta: &[Vec<f64>],
) -> PosteriorStats {
    let n = params.n_states();
    let (a, b) = (params.transition(), params.emission());
    let alpha = &trellis.alpha_hat;
    let t_len = obs.len();

    let mut xi = Vec::with_capacity(t_len.saturating_sub(1));
    for t in 0..t_len - 1 {
        let mut slice = vec![vec![0.0; n]; n];
        let mut total = 0.0;
        for i in 0..n {
            for j in 0..n {
                let v = alpha[t][i] * a[i][j] * b[j][obs[t + 1]] * beta[t + 1][j];
                slice[i][j] = v;
                total += v;
            }
        }
        for v in slice.iter_mut().flatten() {
            *v /= total;
        }
        xi.push(slice);
    }

    let mut gamma: Vec<Vec<f64>> = xi.iter().map(|slice| slice.iter().map(|row| row.iter().sum()).collect()).collect();
    let last = &alpha[t_len - 1];
    let z: f64 = last.iter().sum();
    gamma.push(last.iter().map(|v| v / z).collect());

    PosteriorStats { gamma, xi, log_likelihood: trellis.log_likelihood }
}

/// Predictive distribution of the next symbol given an observed history.
///
/// With an empty history this is `pi * B`.
pub fn next_symbol_distribution(params: &HmmParams, history: &[usize]) -> Result<Vec<f64>> {
    let state = next_state_distribution(params, history)?;
    let m = params.n_symbols();
    let b = params.emission();
    Ok((0..m).map(|k| state.iter().zip(b).map(|(p, row)| p * row[k]).sum()).collect())
}

/// Predictive distribution of the next hidden state given an observed history.
pub fn next_state_distribution(params: &HmmParams, history: &[usize]) -> Result<Vec<f64>> {
    if history.is_empty() {
        return Ok(params.initial().to_vec());
    }
    let trellis = forward(params, history)?;
    if trellis.is_impossible() {
        return Err(Error::InvalidArgument("history has zero probability under the model".into()));
    }
    let filtered = trellis.alpha_hat.last().expect("non-empty history");
    let n = params.n_states();
    let a = params.transition();
    Ok((0..n).map(|j| (0..n).map(|i| filtered[i] * a[i][j]).sum()).collect())
}
