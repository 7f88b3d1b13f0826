#![allow(dead_code)]

use cropcast_core::hmm::HmmParams;
use proptest::prelude::*;

pub fn normalize(raw: Vec<f64>) -> Vec<f64> {
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / s).collect()
}

pub fn prob_vec(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..1.0, len).prop_map(normalize)
}

pub fn prob_matrix(rows: usize, cols: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prob_vec(cols), rows)
}

/// Random strictly positive model with `n` states and `m` symbols.
pub fn model(n: usize, m: usize) -> impl Strategy<Value = HmmParams> {
    (prob_vec(n), prob_matrix(n, n), prob_matrix(n, m)).prop_map(|(pi, a, b)| HmmParams::new(pi, a, b).unwrap())
}

/// A model together with an observation sequence over its alphabet.
pub fn model_and_obs(max_n: usize, max_m: usize, max_t: usize) -> impl Strategy<Value = (HmmParams, Vec<usize>)> {
    (1..=max_n, 1..=max_m, 1..=max_t).prop_flat_map(|(n, m, t)| (model(n, m), prop::collection::vec(0..m, t)))
}

pub fn path_probability(p: &HmmParams, path: &[usize], obs: &[usize]) -> f64 {
    let mut prob = p.initial()[path[0]] * p.emission()[path[0]][obs[0]];
    for t in 1..obs.len() {
        prob *= p.transition()[path[t - 1]][path[t]] * p.emission()[path[t]][obs[t]];
    }
    prob
}

/// Exhaustive maximum over all state paths: `(path, probability)`,
/// first path in lexicographic order on ties.
pub fn exhaustive_best_path(p: &HmmParams, obs: &[usize]) -> (Vec<usize>, f64) {
    let n = p.n_states();
    let t_len = obs.len();
    let total = n.pow(t_len as u32);
    let mut best = (vec![0; t_len], -1.0);
    for code in 0..total {
        let mut path = vec![0; t_len];
        let mut c = code;
        for t in (0..t_len).rev() {
            path[t] = c % n;
            c /= n;
        }
        let prob = path_probability(p, &path, obs);
        if prob > best.1 {
            best = (path, prob);
        }
    }
    best
}
