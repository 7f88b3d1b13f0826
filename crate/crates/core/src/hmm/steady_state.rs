use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const POWER_TOL: f64 = 1e-12;
pub const POWER_MAX_ITER: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteadyState {
    pub distribution: Vec<f64>,
    pub iterations: usize,
    /// `max_j |(sA)_j - s_j|` of the returned vector.
    pub residual: f64,
    /// Solution of `s(A - I) = 0, sum(s) = 1` by elimination, when that
    /// system is non-singular.
    pub direct: Option<Vec<f64>>,
}

impl SteadyState {
    /// Largest componentwise gap between power iteration and the direct solve.
    pub fn cross_check_gap(&self) -> Option<f64> {
        self.direct.as_ref().map(|d| d.iter().zip(&self.distribution).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
    }
}

/// Stationary distribution of a row-stochastic matrix by power iteration
/// from the uniform vector.
pub fn steady_state(transition: &[Vec<f64>]) -> Result<SteadyState> {
    steady_state_with(transition, POWER_TOL, POWER_MAX_ITER)
}

pub fn steady_state_with(transition: &[Vec<f64>], tol: f64, max_iter: usize) -> Result<SteadyState> {
    let n = transition.len();
    if n == 0 || transition.iter().any(|r| r.len() != n) {
        return Err(Error::Dimension("transition matrix must be square and non-empty".into()));
    }
    for (i, row) in transition.iter().enumerate() {
        let sum: f64 = row.iter().sum();
        if row.iter().any(|v| !(0.0..=1.0).contains(v)) || (sum - 1.0).abs() > super::model::STOCHASTIC_TOL {
            return Err(Error::InvalidParams(format!("A row {} is not stochastic (sum {sum})", i + 1)));
        }
    }

    let mut s = vec![1.0 / n as f64; n];
    let mut delta = f64::INFINITY;
    for it in 1..=max_iter {
        let mut next = left_multiply(&s, transition);
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|v| *v /= total);
        delta = next.iter().zip(&s).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        s = next;
        if delta < tol {
            let residual = left_multiply(&s, transition).iter().zip(&s).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            return Ok(SteadyState { distribution: s, iterations: it, residual, direct: direct_solve(transition) });
        }
    }
    Err(Error::NotConverged { max_iter, last_delta: delta })
}

fn left_multiply(s: &[f64], a: &[Vec<f64>]) -> Vec<f64> {
    let n = s.len();
    (0..n).map(|j| (0..n).map(|i| s[i] * a[i][j]).sum()).collect()
}

/// Solves `(A^T - I) s = 0` with the last equation replaced by `sum(s) = 1`.
/// Returns `None` when the system is singular, i.e. the chain has more than
/// one closed class.
pub fn direct_solve(a: &[Vec<f64>]) -> Option<Vec<f64>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = (0..n)
        .map(|r| {
            let mut row: Vec<f64> = (0..n).map(|c| a[c][r] - if r == c { 1.0 } else { 0.0 }).collect();
            row.push(0.0);
            row
        })
        .collect();
    m[n - 1] = vec![1.0; n + 1];

    for col in 0..n {
        let pivot = (col..n).max_by(|&x, &y| m[x][col].abs().total_cmp(&m[y][col].abs()))?;
        if m[pivot][col].abs() < 1e-12 {
            return None;
        }
        m.swap(col, pivot);
        let pivot_row = m[col].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != col {
                let f = row[col] / pivot_row[col];
                if f != 0.0 {
                    for (x, p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                        *x -= f * p;
                    }
                }
            }
        }
    }
    Some((0..n).map(|i| m[i][n] / m[i][i]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_two_state() {
        let s = steady_state(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        assert_eq!(s.distribution, vec![0.5, 0.5]);
    }

    #[test]
    fn two_state_analytic() {
        let s = steady_state(&[vec![0.9, 0.1], vec![0.2, 0.8]]).unwrap();
        assert!((s.distribution[0] - 2.0 / 3.0).abs() < 1e-10);
        assert!((s.distribution[1] - 1.0 / 3.0).abs() < 1e-10);
        assert!(s.residual <= 1e-10);
        assert!(s.cross_check_gap().unwrap() < 1e-10);
    }

    #[test]
    fn absorbing_chain() {
        let a = vec![vec![1.0, 0.0, 0.0], vec![0.3, 0.5, 0.2], vec![0.0, 0.4, 0.6]];
        let s = steady_state(&a).unwrap();
        assert!((s.distribution[0] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn periodic_chain_does_not_converge() {
        // uniform start is already stationary for a pure cycle
        let cycle = vec![vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0], vec![1.0, 0.0, 0.0]];
        assert!(steady_state(&cycle).is_ok());
        // bipartite chain: the iterate oscillates between two vectors
        let b = vec![vec![0.0, 0.5, 0.5], vec![1.0, 0.0, 0.0], vec![1.0, 0.0, 0.0]];
        match steady_state_with(&b, 1e-12, 1000) {
            Err(Error::NotConverged { max_iter, .. }) => assert_eq!(max_iter, 1000),
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn reducible_chain_has_no_direct_solution() {
        let a = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let s = steady_state(&a).unwrap();
        assert_eq!(s.distribution, vec![0.5, 0.5]);
        assert!(s.direct.is_none());
    }

    #[test]
    fn rejects_non_stochastic() {
        assert!(steady_state(&[vec![0.5, 0.6], vec![0.5, 0.5]]).is_err());
        assert!(steady_state(&[vec![1.0], vec![1.0]]).is_err());
    }
}
