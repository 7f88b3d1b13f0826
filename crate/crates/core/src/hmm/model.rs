use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used when checking that a row of probabilities sums to one.
pub const STOCHASTIC_TOL: f64 = 1e-9;

/// Ordered, unique labels for a finite set. Label order is the index order
/// used by every matrix built over the set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelSet {
    labels: Vec<String>,
}

impl LabelSet {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::InvalidArgument("label set must not be empty".into()));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::InvalidArgument(format!("duplicate label `{l}`")));
            }
        }
        Ok(Self { labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, index: usize) -> Option<&str> {
        self.labels.get(index).map(String::as_str)
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

/// The hidden states of a model.
pub type StateSpace = LabelSet;
/// The observable symbols of a model.
pub type ObservationAlphabet = LabelSet;

impl LabelSet {
    /// Rainfall level crossed with temperature level, rainfall first:
    /// `LL, LH, HL, HH`.
    pub fn rainfall_temperature() -> StateSpace {
        Self::new(["LL", "LH", "HL", "HH"]).expect("static labels")
    }

    /// Yield levels `L, M, H`.
    pub fn yield_levels() -> ObservationAlphabet {
        Self::new(["L", "M", "H"]).expect("static labels")
    }
}

/// A discrete hidden Markov model `(pi, A, B)`.
///
/// `transition[i][j]` is the probability of moving from state `i` to `j`,
/// `emission[i][k]` the probability that state `i` emits symbol `k`.
/// Construction only checks shapes; stochasticity is reported by
/// [`HmmParams::validate`] so that non-stochastic published matrices can
/// still be loaded and inspected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HmmParams {
    initial: Vec<f64>,
    transition: Vec<Vec<f64>>,
    emission: Vec<Vec<f64>>,
}

impl HmmParams {
    pub fn new(initial: Vec<f64>, transition: Vec<Vec<f64>>, emission: Vec<Vec<f64>>) -> Result<Self> {
        let n = initial.len();
        if n == 0 {
            return Err(Error::Dimension("model needs at least one state".into()));
        }
        if transition.len() != n {
            return Err(Error::Dimension(format!("transition matrix has {} rows, expected {n}", transition.len())));
        }
        if let Some((i, row)) = transition.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::Dimension(format!("transition row {} has {} entries, expected {n}", i + 1, row.len())));
        }
        if emission.len() != n {
            return Err(Error::Dimension(format!("emission matrix has {} rows, expected {n}", emission.len())));
        }
        let m = emission[0].len();
        if m == 0 {
            return Err(Error::Dimension("model needs at least one symbol".into()));
        }
        if let Some((i, row)) = emission.iter().enumerate().find(|(_, r)| r.len() != m) {
            return Err(Error::Dimension(format!("emission row {} has {} entries, expected {m}", i + 1, row.len())));
        }
        let all = initial.iter().chain(transition.iter().flatten()).chain(emission.iter().flatten());
        if all.clone().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("model parameters must be finite".into()));
        }
        Ok(Self { initial, transition, emission })
    }

    /// Uniform initial, transition and emission probabilities.
    pub fn uniform(n_states: usize, n_symbols: usize) -> Result<Self> {
        if n_states == 0 || n_symbols == 0 {
            return Err(Error::Dimension("model needs at least one state and symbol".into()));
        }
        let p = 1.0 / n_states as f64;
        let q = 1.0 / n_symbols as f64;
        Self::new(vec![p; n_states], vec![vec![p; n_states]; n_states], vec![vec![q; n_symbols]; n_states])
    }

    pub fn n_states(&self) -> usize {
        self.initial.len()
    }

    pub fn n_symbols(&self) -> usize {
        self.emission[0].len()
    }

    pub fn initial(&self) -> &[f64] {
        &self.initial
    }

    pub fn transition(&self) -> &[Vec<f64>] {
        &self.transition
    }

    pub fn emission(&self) -> &[Vec<f64>] {
        &self.emission
    }

    /// Returns a copy with a different initial distribution.
    pub fn with_initial(&self, initial: Vec<f64>) -> Result<Self> {
        Self::new(initial, self.transition.clone(), self.emission.clone())
    }

    /// Lists every stochasticity violation. Empty means the model is valid.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        check_vector(Matrix::Initial, 0, &self.initial, &mut violations, false);
        for (i, row) in self.transition.iter().enumerate() {
            check_vector(Matrix::Transition, i, row, &mut violations, true);
        }
        for (i, row) in self.emission.iter().enumerate() {
            check_vector(Matrix::Emission, i, row, &mut violations, true);
        }
        ValidationReport { violations }
    }

    /// Checks the observation sequence against this model's alphabet.
    pub(crate) fn check_observations(&self, obs: &[usize]) -> Result<()> {
        if obs.is_empty() {
            return Err(Error::InvalidArgument("observation sequence is empty".into()));
        }
        let m = self.n_symbols();
        if let Some((t, &k)) = obs.iter().enumerate().find(|(_, &k)| k >= m) {
            return Err(Error::Dimension(format!("observation {t} has symbol index {k}, alphabet has {m} symbols")));
        }
        Ok(())
    }
}

fn check_vector(matrix: Matrix, row: usize, values: &[f64], out: &mut Vec<Violation>, is_row: bool) {
    for (col, &v) in values.iter().enumerate() {
        if !(0.0..=1.0).contains(&v) {
            out.push(Violation::Entry { matrix, row: is_row.then_some(row), col, value: v });
        }
    }
    let sum: f64 = values.iter().sum();
    if (sum - 1.0).abs() > STOCHASTIC_TOL {
        out.push(Violation::Sum { matrix, row: is_row.then_some(row), sum });
    }
}

/// Validates `params` against a declared number of states and symbols.
///
/// Shape disagreement is a hard error; stochasticity problems come back as
/// entries of the report.
pub fn validate_params(params: &HmmParams, n_states: usize, n_symbols: usize) -> Result<ValidationReport> {
    if params.n_states() != n_states || params.n_symbols() != n_symbols {
        return Err(Error::Dimension(format!(
            "model is {}x{} (states x symbols), declared {n_states}x{n_symbols}",
            params.n_states(),
            params.n_symbols()
        )));
    }
    Ok(params.validate())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Matrix {
    Initial,
    Transition,
    Emission,
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Matrix::Initial => "pi",
            Matrix::Transition => "A",
            Matrix::Emission => "B",
        })
    }
}

/// One stochasticity violation. Rows and columns print 1-based.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Entry { matrix: Matrix, row: Option<usize>, col: usize, value: f64 },
    Sum { matrix: Matrix, row: Option<usize>, sum: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Entry { matrix, row: Some(r), col, value } => {
                write!(f, "{matrix} entry ({}, {}) = {value} is outside [0, 1]", r + 1, col + 1)
            }
            Violation::Entry { matrix, row: None, col, value } => {
                write!(f, "{matrix} entry {} = {value} is outside [0, 1]", col + 1)
            }
            Violation::Sum { matrix, row: Some(r), sum } => {
                write!(f, "{matrix} row {} sums to {sum}", r + 1)
            }
            Violation::Sum { matrix, row: None, sum } => write!(f, "{matrix} sums to {sum}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    /// Converts a non-empty report into an error.
    pub fn into_result(self) -> Result<()> {
        if self.is_valid() {
            return Ok(());
        }
        let msgs: Vec<String> = self.violations.iter().map(ToString::to_string).collect();
        Err(Error::InvalidParams(msgs.join("; ")))
    }
}
