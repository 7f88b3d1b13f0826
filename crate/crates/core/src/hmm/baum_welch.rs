use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::inference::{backward, forward, posteriors_from, PosteriorStats};
use super::model::HmmParams;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaumWelchConfig {
    pub max_iter: usize,
    /// Stop once the absolute change in log-likelihood drops below this.
    pub tol: f64,
    /// Re-estimate the initial distribution from the first posterior.
    /// Off by default: only the transition and emission matrices are updated.
    pub update_initial: bool,
}

impl Default for BaumWelchConfig {
    fn default() -> Self {
        Self { max_iter: 1000, tol: 1e-6, update_initial: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingReport {
    pub params: HmmParams,
    /// Log-likelihood of the initial model followed by one entry per update.
    pub log_lik_trace: Vec<f64>,
    /// Number of re-estimation steps applied.
    pub iterations: usize,
    pub converged: bool,
    /// Rows whose expected visit count was zero at some update and were
    /// therefore carried over unchanged.
    pub stale_transition_rows: Vec<usize>,
    pub stale_emission_rows: Vec<usize>,
}

impl TrainingReport {
    pub fn final_log_likelihood(&self) -> f64 {
        *self.log_lik_trace.last().expect("trace is never empty")
    }
}

/// Expectation-maximisation for a single observation sequence.
pub fn baum_welch(init: &HmmParams, obs: &[usize], config: &BaumWelchConfig) -> Result<TrainingReport> {
    if config.max_iter == 0 {
        return Err(Error::InvalidArgument("max_iter must be at least 1".into()));
    }
    if config.tol.is_nan() || config.tol <= 0.0 {
        return Err(Error::InvalidArgument(format!("tol must be positive, got {}", config.tol)));
    }

    let mut params = init.clone();
    let mut stale_a = BTreeSet::new();
    let mut stale_b = BTreeSet::new();
    let mut post = match e_step(&params, obs)? {
        Some(p) => p,
        None => {
            return Ok(TrainingReport {
                params,
                log_lik_trace: vec![f64::NEG_INFINITY],
                iterations: 0,
                converged: false,
                stale_transition_rows: Vec::new(),
                stale_emission_rows: Vec::new(),
            })
        }
    };
    let mut trace = vec![post.log_likelihood];
    let mut iterations = 0;
    let mut converged = false;

    for it in 1..=config.max_iter {
        params = m_step(&params, obs, &post, config.update_initial, &mut stale_a, &mut stale_b)?;
        post = e_step(&params, obs)?
            .ok_or_else(|| Error::NonFinite(format!("re-estimated model lost all probability at iteration {it}")))?;
        let prev = *trace.last().expect("non-empty");
        trace.push(post.log_likelihood);
        iterations = it;
        if (post.log_likelihood - prev).abs() < config.tol {
            converged = true;
            break;
        }
    }

    Ok(TrainingReport {
        params,
        log_lik_trace: trace,
        iterations,
        converged,
        stale_transition_rows: stale_a.into_iter().collect(),
        stale_emission_rows: stale_b.into_iter().collect(),
    })
}

fn e_step(params: &HmmParams, obs: &[usize]) -> Result<Option<PosteriorStats>> {
    let trellis = forward(params, obs)?;
    if trellis.is_impossible() {
        return Ok(None);
    }
    let beta = backward(params, obs, &trellis)?;
    Ok(Some(posteriors_from(params, obs, &trellis, &beta)))
}

fn m_step(
    params: &HmmParams,
    obs: &[usize],
    post: &PosteriorStats,
    update_initial: bool,
    stale_a: &mut BTreeSet<usize>,
    stale_b: &mut BTreeSet<usize>,
) -> Result<HmmParams> {
    let n = params.n_states();
    let m = params.n_symbols();
    let mut a = params.transition().to_vec();
    let mut b = params.emission().to_vec();

    for i in 0..n {
        let denom: f64 = post.xi.iter().map(|slice| slice[i].iter().sum::<f64>()).sum();
        if denom < f64::MIN_POSITIVE {
            stale_a.insert(i);
            continue;
        }
        for j in 0..n {
            a[i][j] = post.xi.iter().map(|slice| slice[i][j]).sum::<f64>() / denom;
        }
    }

    for j in 0..n {
        let denom: f64 = post.gamma.iter().map(|g| g[j]).sum();
        if denom < f64::MIN_POSITIVE {
            stale_b.insert(j);
            continue;
        }
        let mut row = vec![0.0; m];
        for (g, &x) in post.gamma.iter().zip(obs) {
            row[x] += g[j];
        }
        b[j] = row.into_iter().map(|v| v / denom).collect();
    }

    let pi = if update_initial { post.gamma[0].clone() } else { params.initial().to_vec() };
    HmmParams::new(pi, a, b)
}
