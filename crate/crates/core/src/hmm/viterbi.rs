use serde::{Deserialize, Serialize};

use super::model::HmmParams;
use crate::error::{Error, Result};

/// Most probable state path and its log joint probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViterbiPath {
    pub states: Vec<usize>,
    pub log_probability: f64,
}

/// Log-space Viterbi decoding.
///
/// Ties are broken toward the lowest state index, both when choosing a
/// predecessor and when choosing the final state. If every path has zero
/// probability the result has `log_probability = -inf` and the tie rule
/// yields the all-zeros path.
pub fn viterbi(params: &HmmParams, obs: &[usize]) -> Result<ViterbiPath> {
    params.check_observations(obs)?;
    let n = params.n_states();
    let ln = |p: f64| p.ln();
    let log_a: Vec<Vec<f64>> = params.transition().iter().map(|r| r.iter().copied().map(ln).collect()).collect();
    let log_b: Vec<Vec<f64>> = params.emission().iter().map(|r| r.iter().copied().map(ln).collect()).collect();

    let mut score: Vec<f64> = (0..n).map(|i| ln(params.initial()[i]) + log_b[i][obs[0]]).collect();
    let mut back: Vec<Vec<usize>> = Vec::with_capacity(obs.len());
    back.push(vec![0; n]);

    for &x in &obs[1..] {
        let mut next = vec![f64::NEG_INFINITY; n];
        let mut ptr = vec![0usize; n];
        for j in 0..n {
            let (best_i, best) = argmax((0..n).map(|i| score[i] + log_a[i][j]));
            next[j] = best + log_b[j][x];
            ptr[j] = best_i;
        }
        score = next;
        back.push(ptr);
    }

    let (mut state, log_probability) = argmax(score.iter().copied());
    if log_probability.is_nan() {
        return Err(Error::NonFinite("viterbi score is NaN".into()));
    }
    let mut states = vec![0; obs.len()];
    for t in (0..obs.len()).rev() {
        states[t] = state;
        state = back[t][state];
    }
    Ok(ViterbiPath { states, log_probability })
}

/// First index of the maximum; `(0, -inf)` if all values are `-inf`.
fn argmax(values: impl Iterator<Item = f64>) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, v) in values.enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    best
}

/// Fraction of positions at which two state sequences agree.
pub fn match_fraction(decoded: &[usize], reference: &[usize]) -> Result<f64> {
    if decoded.len() != reference.len() {
        return Err(Error::Dimension(format!(
            "decoded sequence has {} entries, reference has {}",
            decoded.len(),
            reference.len()
        )));
    }
    if decoded.is_empty() {
        return Err(Error::InvalidArgument("cannot compare empty sequences".into()));
    }
    let hits = decoded.iter().zip(reference).filter(|(a, b)| a == b).count();
    Ok(hits as f64 / decoded.len() as f64)
}
