//! From yearly climate and yield records to discrete state/observation
//! series, and from those series to count-based model parameters.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hmm::HmmParams;

/// Number of rainfall x temperature states (`LL, LH, HL, HH`).
pub const N_CLIMATE_STATES: usize = 4;
/// Number of yield levels (`L, M, H`).
pub const N_YIELD_LEVELS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClimateYieldRecord {
    pub year: i32,
    /// Annual rainfall, millimetres.
    pub rainfall: f64,
    /// Mean annual temperature, degrees Celsius.
    pub temperature: f64,
    pub maize_yield: f64,
}

/// Cut points used to discretize a series. A value equal to a cut falls in
/// the lower bin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub rainfall: f64,
    pub temperature: f64,
    pub yield_low: f64,
    pub yield_high: f64,
}

impl Thresholds {
    /// `2 * rain_high + temp_high`, i.e. `LL=0, LH=1, HL=2, HH=3`.
    pub fn state_of(&self, rainfall: f64, temperature: f64) -> usize {
        2 * usize::from(rainfall > self.rainfall) + usize::from(temperature > self.temperature)
    }

    pub fn level_of(&self, maize_yield: f64) -> usize {
        if maize_yield <= self.yield_low {
            0
        } else if maize_yield <= self.yield_high {
            1
        } else {
            2
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub enum ThresholdPolicy {
    /// Median split for rainfall and temperature, terciles for yield,
    /// all computed over the full series.
    #[default]
    Quantile,
    Explicit(Thresholds),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscretizedSeries {
    pub years: Vec<i32>,
    pub states: Vec<usize>,
    pub observations: Vec<usize>,
    pub n_states: usize,
    pub n_symbols: usize,
    /// `None` when labels were supplied directly.
    pub thresholds: Option<Thresholds>,
}

impl DiscretizedSeries {
    /// Accepts pre-labelled data as-is.
    pub fn from_labels(
        years: Vec<i32>,
        states: Vec<usize>,
        observations: Vec<usize>,
        n_states: usize,
        n_symbols: usize,
    ) -> Result<Self> {
        if years.len() != states.len() || years.len() != observations.len() {
            return Err(Error::Dimension(format!(
                "{} years, {} states, {} observations",
                years.len(),
                states.len(),
                observations.len()
            )));
        }
        check_years(&years)?;
        if let Some((t, s)) = states.iter().enumerate().find(|(_, &s)| s >= n_states) {
            return Err(Error::InvalidArgument(format!("row {t}: state index {s} >= {n_states}")));
        }
        if let Some((t, k)) = observations.iter().enumerate().find(|(_, &k)| k >= n_symbols) {
            return Err(Error::InvalidArgument(format!("row {t}: observation index {k} >= {n_symbols}")));
        }
        Ok(Self { years, states, observations, n_states, n_symbols, thresholds: None })
    }

    pub fn len(&self) -> usize {
        self.years.len()
    }

    pub fn is_empty(&self) -> bool {
        self.years.is_empty()
    }
}

fn check_years(years: &[i32]) -> Result<()> {
    if let Some(w) = years.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(format!("years must be strictly increasing: {} follows {}", w[1], w[0])));
    }
    Ok(())
}

/// Linear-interpolation quantile of sorted data (`p` in `[0, 1]`).
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

fn sorted_column(
    records: &[ClimateYieldRecord],
    name: &str,
    f: impl Fn(&ClimateYieldRecord) -> f64,
) -> Result<Vec<f64>> {
    let mut v: Vec<f64> = records.iter().map(f).collect();
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite(format!("column `{name}`")));
    }
    v.sort_by(f64::total_cmp);
    if v[0] == v[v.len() - 1] {
        return Err(Error::DegenerateThreshold(name.to_string()));
    }
    Ok(v)
}

/// Computes quantile thresholds for a record series.
pub fn quantile_thresholds(records: &[ClimateYieldRecord]) -> Result<Thresholds> {
    let rain = sorted_column(records, "rainfall", |r| r.rainfall)?;
    let temp = sorted_column(records, "temperature", |r| r.temperature)?;
    let yld = sorted_column(records, "maize_yield", |r| r.maize_yield)?;
    Ok(Thresholds {
        rainfall: quantile(&rain, 0.5),
        temperature: quantile(&temp, 0.5),
        yield_low: quantile(&yld, 1.0 / 3.0),
        yield_high: quantile(&yld, 2.0 / 3.0),
    })
}

pub fn discretize(records: &[ClimateYieldRecord], policy: &ThresholdPolicy) -> Result<DiscretizedSeries> {
    if records.len() < 3 {
        return Err(Error::InvalidArgument(format!("need at least 3 records to discretize, got {}", records.len())));
    }
    let years: Vec<i32> = records.iter().map(|r| r.year).collect();
    check_years(&years)?;
    if let Some(r) = records.iter().find(|r| r.rainfall < 0.0 || r.maize_yield < 0.0) {
        return Err(Error::InvalidArgument(format!("year {}: rainfall and yield must be non-negative", r.year)));
    }
    let thresholds = match policy {
        ThresholdPolicy::Quantile => quantile_thresholds(records)?,
        ThresholdPolicy::Explicit(t) => {
            if t.yield_low > t.yield_high {
                return Err(Error::InvalidArgument("yield_low cut exceeds yield_high cut".into()));
            }
            *t
        }
    };
    Ok(DiscretizedSeries {
        years,
        states: records.iter().map(|r| thresholds.state_of(r.rainfall, r.temperature)).collect(),
        observations: records.iter().map(|r| thresholds.level_of(r.maize_yield)).collect(),
        n_states: N_CLIMATE_STATES,
        n_symbols: N_YIELD_LEVELS,
        thresholds: Some(thresholds),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountEstimates {
    /// `[i][j]`: number of steps from state `i` to state `j`.
    pub transition_counts: Vec<Vec<u64>>,
    /// `[i][k]`: number of times state `i` coincides with symbol `k`.
    pub emission_counts: Vec<Vec<u64>>,
    pub state_counts: Vec<u64>,
}

pub fn count_estimates(series: &DiscretizedSeries) -> Result<CountEstimates> {
    if series.len() < 2 {
        return Err(Error::InvalidArgument("need at least 2 labelled steps to count transitions".into()));
    }
    let (n, m) = (series.n_states, series.n_symbols);
    let mut transition_counts = vec![vec![0u64; n]; n];
    let mut emission_counts = vec![vec![0u64; m]; n];
    let mut state_counts = vec![0u64; n];
    for w in series.states.windows(2) {
        transition_counts[w[0]][w[1]] += 1;
    }
    for (&s, &k) in series.states.iter().zip(&series.observations) {
        emission_counts[s][k] += 1;
        state_counts[s] += 1;
    }
    Ok(CountEstimates { transition_counts, emission_counts, state_counts })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialEstimate {
    pub params: HmmParams,
    /// Transition rows with no counts (replaced by uniform rows).
    pub zero_transition_rows: Vec<usize>,
    /// Emission rows with no counts (replaced by uniform rows).
    pub zero_emission_rows: Vec<usize>,
}

/// Row-normalised counts plus `smoothing` pseudo-counts per cell; the
/// initial distribution is the state frequency over the whole series.
pub fn estimate_initial_params(counts: &CountEstimates, smoothing: f64) -> Result<InitialEstimate> {
    if !(smoothing.is_finite() && smoothing >= 0.0) {
        return Err(Error::InvalidArgument(format!("smoothing must be finite and >= 0, got {smoothing}")));
    }
    let (a, zero_a) = normalize_rows(&counts.transition_counts, smoothing);
    let (b, zero_b) = normalize_rows(&counts.emission_counts, smoothing);
    let total: u64 = counts.state_counts.iter().sum();
    if total == 0 {
        return Err(Error::InvalidArgument("no state observations".into()));
    }
    let pi = counts.state_counts.iter().map(|&c| c as f64 / total as f64).collect();
    Ok(InitialEstimate { params: HmmParams::new(pi, a, b)?, zero_transition_rows: zero_a, zero_emission_rows: zero_b })
}

fn normalize_rows(counts: &[Vec<u64>], smoothing: f64) -> (Vec<Vec<f64>>, Vec<usize>) {
    let mut zero = Vec::new();
    let rows = counts
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let total: f64 = row.iter().map(|&c| c as f64 + smoothing).sum();
            if total == 0.0 {
                zero.push(i);
                vec![1.0 / row.len() as f64; row.len()]
            } else {
                row.iter().map(|&c| (c as f64 + smoothing) / total).collect()
            }
        })
        .collect();
    (rows, zero)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(year: i32, rainfall: f64, temperature: f64, maize_yield: f64) -> ClimateYieldRecord {
        ClimateYieldRecord { year, rainfall, temperature, maize_yield }
    }

    #[test]
    fn monotone_three_records() {
        let records = [rec(1, 10.0, 1.0, 5.0), rec(2, 20.0, 2.0, 15.0), rec(3, 30.0, 3.0, 25.0)];
        let s = discretize(&records, &ThresholdPolicy::Quantile).unwrap();
        assert_eq!(s.states[0], 0);
        assert_eq!(s.states[2], 3);
        // median value sits on the cut and goes low
        assert_eq!(s.states[1], 0);
        assert_eq!(s.observations, vec![0, 1, 2]);
        let t = s.thresholds.unwrap();
        assert_eq!(t.rainfall, 20.0);
    }

    #[test]
    fn constant_column_is_degenerate() {
        let records = [rec(1, 10.0, 1.0, 5.0), rec(2, 20.0, 1.0, 15.0), rec(3, 30.0, 1.0, 25.0)];
        match discretize(&records, &ThresholdPolicy::Quantile) {
            Err(Error::DegenerateThreshold(c)) => assert_eq!(c, "temperature"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn input_checks() {
        let two = [rec(1, 1.0, 1.0, 1.0), rec(2, 2.0, 2.0, 2.0)];
        assert!(discretize(&two, &ThresholdPolicy::Quantile).is_err());
        let unordered = [rec(2, 1.0, 1.0, 1.0), rec(1, 2.0, 2.0, 2.0), rec(3, 3.0, 3.0, 3.0)];
        assert!(discretize(&unordered, &ThresholdPolicy::Quantile).is_err());
        let negative = [rec(1, -1.0, 1.0, 1.0), rec(2, 2.0, 2.0, 2.0), rec(3, 3.0, 3.0, 3.0)];
        assert!(discretize(&negative, &ThresholdPolicy::Quantile).is_err());
    }

    #[test]
    fn explicit_thresholds() {
        let t = Thresholds { rainfall: 100.0, temperature: 27.0, yield_low: 5.0, yield_high: 8.0 };
        let records = [rec(1, 150.0, 20.0, 5.0), rec(2, 50.0, 30.0, 9.0), rec(3, 100.0, 27.0, 6.0)];
        let s = discretize(&records, &ThresholdPolicy::Explicit(t)).unwrap();
        assert_eq!(s.states, vec![2, 1, 0]);
        assert_eq!(s.observations, vec![0, 2, 1]);
    }

    #[test]
    fn quantile_interpolates() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&v, 0.5), 2.5);
        assert_eq!(quantile(&v, 0.0), 1.0);
        assert_eq!(quantile(&v, 1.0), 4.0);
    }

    #[test]
    fn length_two_counts() {
        let s = DiscretizedSeries::from_labels(vec![1, 2], vec![0, 1], vec![0, 0], 2, 1).unwrap();
        let c = count_estimates(&s).unwrap();
        assert_eq!(c.transition_counts, vec![vec![0, 1], vec![0, 0]]);
        let est = estimate_initial_params(&c, 0.0).unwrap();
        assert_eq!(est.zero_transition_rows, vec![1]);
        assert_eq!(est.params.transition()[1], vec![0.5, 0.5]);
    }

    #[test]
    fn uniform_counts_give_uniform_params() {
        let c = CountEstimates {
            transition_counts: vec![vec![2, 2], vec![2, 2]],
            emission_counts: vec![vec![3, 3, 3], vec![3, 3, 3]],
            state_counts: vec![9, 9],
        };
        let p = estimate_initial_params(&c, 0.0).unwrap().params;
        assert_eq!(p, HmmParams::new(vec![0.5; 2], vec![vec![0.5; 2]; 2], vec![vec![1.0 / 3.0; 3]; 2]).unwrap());
    }

    #[test]
    fn smoothing_removes_zero_rows() {
        let s = DiscretizedSeries::from_labels(vec![1, 2, 3], vec![0, 0, 0], vec![0, 1, 0], 3, 2).unwrap();
        let c = count_estimates(&s).unwrap();
        let est = estimate_initial_params(&c, 1.0).unwrap();
        assert!(est.zero_transition_rows.is_empty());
        assert!(est.params.validate().is_valid());
        assert!(estimate_initial_params(&c, -1.0).is_err());
    }

    #[test]
    fn label_validation() {
        assert!(DiscretizedSeries::from_labels(vec![1, 2], vec![0, 4], vec![0, 0], 4, 3).is_err());
        assert!(DiscretizedSeries::from_labels(vec![1, 2], vec![0, 1], vec![0, 3], 4, 3).is_err());
        assert!(DiscretizedSeries::from_labels(vec![2, 2], vec![0, 1], vec![0, 0], 4, 3).is_err());
        assert!(DiscretizedSeries::from_labels(vec![1], vec![0, 1], vec![0, 0], 4, 3).is_err());
    }
}
