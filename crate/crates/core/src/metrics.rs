//! Forecast accuracy measures, computed identically for every model.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn check_pair(actual: &[f64], predicted: &[f64]) -> Result<()> {
    if actual.len() != predicted.len() {
        return Err(Error::Dimension(format!("actual has {} values, predicted has {}", actual.len(), predicted.len())));
    }
    if actual.is_empty() {
        return Err(Error::InvalidArgument("empty input".into()));
    }
    if actual.iter().chain(predicted).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("metric inputs must be finite".into()));
    }
    Ok(())
}

/// Mean absolute percentage error, in percent.
pub fn mape(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    check_pair(actual, predicted)?;
    let zeros: Vec<usize> = actual.iter().enumerate().filter(|(_, &a)| a == 0.0).map(|(i, _)| i).collect();
    if !zeros.is_empty() {
        return Err(Error::Undefined(format!("MAPE with zero actual values at indices {zeros:?}")));
    }
    let sum: f64 = actual.iter().zip(predicted).map(|(a, p)| ((a - p) / a).abs()).sum();
    Ok(100.0 * sum / actual.len() as f64)
}

pub fn mse(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    check_pair(actual, predicted)?;
    let sum: f64 = actual.iter().zip(predicted).map(|(a, p)| (a - p) * (a - p)).sum();
    Ok(sum / actual.len() as f64)
}

pub fn rmse(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    mse(actual, predicted).map(f64::sqrt)
}

/// Standard error of the mean residual: sample standard deviation of
/// `actual - predicted` over `sqrt(n)`.
pub fn sem(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    check_pair(actual, predicted)?;
    let n = actual.len();
    if n < 2 {
        return Err(Error::Undefined("SEM needs at least 2 values".into()));
    }
    let resid: Vec<f64> = actual.iter().zip(predicted).map(|(a, p)| a - p).collect();
    let mean = resid.iter().sum::<f64>() / n as f64;
    let var = resid.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / (n - 1) as f64;
    Ok(var.sqrt() / (n as f64).sqrt())
}

/// Sample Pearson correlation.
pub fn pearson_corr(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    check_pair(actual, predicted)?;
    let n = actual.len();
    if n < 2 {
        return Err(Error::Undefined("correlation needs at least 2 values".into()));
    }
    let ma = actual.iter().sum::<f64>() / n as f64;
    let mp = predicted.iter().sum::<f64>() / n as f64;
    let (mut sap, mut saa, mut spp) = (0.0, 0.0, 0.0);
    for (a, p) in actual.iter().zip(predicted) {
        let (da, dp) = (a - ma, p - mp);
        sap += da * dp;
        saa += da * da;
        spp += dp * dp;
    }
    if saa == 0.0 || spp == 0.0 {
        let which = if saa == 0.0 { "actual" } else { "predicted" };
        return Err(Error::Undefined(format!("correlation with constant {which} series")));
    }
    Ok((sap / (saa.sqrt() * spp.sqrt())).clamp(-1.0, 1.0))
}

/// All five measures for one model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub mape: f64,
    pub rmse: f64,
    pub corr: Option<f64>,
    pub sem: f64,
    pub mse: f64,
}

/// Computes every measure. Correlation is left empty when either series is
/// constant; every other failure is an error.
pub fn evaluate(actual: &[f64], predicted: &[f64]) -> Result<MetricsReport> {
    let mse = mse(actual, predicted)?;
    let corr = match pearson_corr(actual, predicted) {
        Ok(c) => Some(c),
        Err(Error::Undefined(_)) if actual.len() >= 2 => None,
        Err(e) => return Err(e),
    };
    Ok(MetricsReport { mape: mape(actual, predicted)?, rmse: mse.sqrt(), corr, sem: sem(actual, predicted)?, mse })
}

/// Column header for [`MetricsReport::table_row`].
pub const TABLE_HEADER: &str = "model,MAPE,RMSE,Corr,SEM,MSE";

impl MetricsReport {
    /// `model,MAPE,RMSE,Corr,SEM,MSE` with 4 decimals; `NA` for an undefined correlation.
    pub fn table_row(&self, model: &str) -> String {
        let corr = self.corr.map_or_else(|| "NA".to_string(), |c| format!("{c:.4}"));
        format!("{model},{:.4},{:.4},{corr},{:.4},{:.4}", self.mape, self.rmse, self.sem, self.mse)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_vectors() {
        let a = [1.0, 2.0, 3.0];
        assert_eq!(mape(&a, &a).unwrap(), 0.0);
        assert_eq!(mse(&a, &a).unwrap(), 0.0);
        assert_eq!(rmse(&a, &a).unwrap(), 0.0);
        assert_eq!(sem(&a, &a).unwrap(), 0.0);
        assert!((pearson_corr(&a, &a).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hand_derived_pair() {
        let (a, p) = ([1.0, 2.0], [2.0, 4.0]);
        assert!((mape(&a, &p).unwrap() - 100.0).abs() < 1e-12);
        assert!((mse(&a, &p).unwrap() - 2.5).abs() < 1e-15);
        assert!((rmse(&a, &p).unwrap() - 1.58114).abs() < 1e-5);
        // residuals -1, -2: mean -1.5, sample sd sqrt(0.5), sem 0.5
        assert!((sem(&a, &p).unwrap() - 0.5).abs() < 1e-15);
        assert!((pearson_corr(&a, &p).unwrap() - 1.0).abs() < 1e-15);
        let r = evaluate(&a, &p).unwrap();
        assert_eq!(r.mse, 2.5);
        assert!((r.corr.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn residuals_plus_minus_one() {
        assert!((sem(&[1.0, -1.0], &[0.0, 0.0]).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn mse_of_zero_prediction() {
        assert_eq!(mse(&[1.0, 3.0], &[0.0, 0.0]).unwrap(), 5.0);
    }

    #[test]
    fn anticorrelation() {
        assert!((pearson_corr(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn error_paths() {
        match mape(&[1.0, 0.0, 2.0, 0.0], &[1.0; 4]) {
            Err(Error::Undefined(msg)) => assert!(msg.contains("[1, 3]"), "{msg}"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(mse(&[1.0], &[1.0, 2.0]), Err(Error::Dimension(_))));
        assert!(mse(&[], &[]).is_err());
        assert!(sem(&[1.0], &[1.0]).is_err());
        assert!(matches!(pearson_corr(&[1.0, 1.0], &[1.0, 2.0]), Err(Error::Undefined(_))));
    }

    #[test]
    fn evaluate_tolerates_constant_series() {
        let r = evaluate(&[3.0, 3.0, 3.0], &[2.9, 3.1, 3.0]).unwrap();
        assert!(r.corr.is_none());
        assert!(r.table_row("HMM").contains(",NA,"));
    }

    #[test]
    fn table_row_layout() {
        let r = evaluate(&[1.0, 2.0], &[2.0, 4.0]).unwrap();
        assert_eq!(r.table_row("X"), "X,100.0000,1.5811,1.0000,0.5000,2.5000");
    }
}
