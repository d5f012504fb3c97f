//! Forecast-accuracy metrics: RMSE, MAE, MAPE, MASE.
//!
//! MAPE is reported as a raw fraction (no x100 factor), and the MASE
//! denominator is the mean absolute one-step naive difference over the
//! evaluation vector itself.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetricError {
    #[error("length mismatch: y has {y} values, prediction has {y_hat}")]
    LengthMismatch { y: usize, y_hat: usize },
    #[error("empty input: need at least {min} values")]
    TooShort { min: usize },
    #[error("mape undefined: y[{0}] is zero")]
    ZeroTarget(usize),
    #[error("mase undefined: naive one-step differences of y sum to zero")]
    DegenerateDenominator,
}

/// All four metrics on one evaluation vector.
#[derive(Debug, Clone, serde::Serialize)]
pub struct MetricReport {
    pub rmse: f64,
    pub mae: f64,
    pub mape: f64,
    pub mase: f64,
    /// Sample count.
    pub m: usize,
}

impl MetricReport {
    pub fn compute(y: &[f64], y_hat: &[f64]) -> Result<Self, MetricError> {
        Ok(Self {
            rmse: rmse(y, y_hat)?,
            mae: mae(y, y_hat)?,
            mape: mape(y, y_hat)?,
            mase: mase(y, y_hat)?,
            m: y.len(),
        })
    }

    /// One CSV row: `dataset,algorithm,horizon,rmse,mae,mape,mase,M`.
    pub fn to_csv_row(&self, dataset: &str, algorithm: &str, horizon: usize) -> String {
        format!(
            "{dataset},{algorithm},{horizon},{},{},{},{},{}",
            self.rmse, self.mae, self.mape, self.mase, self.m
        )
    }

    pub fn csv_header() -> &'static str {
        "dataset,algorithm,horizon,rmse,mae,mape,mase,M"
    }
}

fn check_lengths(y: &[f64], y_hat: &[f64], min: usize) -> Result<(), MetricError> {
    if y.len() != y_hat.len() {
        return Err(MetricError::LengthMismatch {
            y: y.len(),
            y_hat: y_hat.len(),
        });
    }
    if y.len() < min {
        return Err(MetricError::TooShort { min });
    }
    Ok(())
}

pub fn rmse(y: &[f64], y_hat: &[f64]) -> Result<f64, MetricError> {
    check_lengths(y, y_hat, 1)?;
    let mse = y
        .iter()
        .zip(y_hat)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        / y.len() as f64;
    Ok(mse.sqrt())
}

pub fn mae(y: &[f64], y_hat: &[f64]) -> Result<f64, MetricError> {
    check_lengths(y, y_hat, 1)?;
    Ok(y.iter().zip(y_hat).map(|(a, b)| (a - b).abs()).sum::<f64>() / y.len() as f64)
}

pub fn mape(y: &[f64], y_hat: &[f64]) -> Result<f64, MetricError> {
    check_lengths(y, y_hat, 1)?;
    let mut acc = 0.0;
    for (i, (a, b)) in y.iter().zip(y_hat).enumerate() {
        if *a == 0.0 {
            return Err(MetricError::ZeroTarget(i));
        }
        acc += ((a - b) / a).abs();
    }
    Ok(acc / y.len() as f64)
}

pub fn mase(y: &[f64], y_hat: &[f64]) -> Result<f64, MetricError> {
    check_lengths(y, y_hat, 2)?;
    let naive = y
        .windows(2)
        .map(|p| (p[1] - p[0]).abs())
        .sum::<f64>()
        / (y.len() - 1) as f64;
    if naive == 0.0 {
        return Err(MetricError::DegenerateDenominator);
    }
    Ok(mae(y, y_hat)? / naive)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn perfect_forecast_is_zero() {
        let y = [1.0, 2.0, 4.0];
        let r = MetricReport::compute(&y, &y).unwrap();
        assert_eq!((r.rmse, r.mae, r.mape, r.mase), (0.0, 0.0, 0.0, 0.0));
        assert_eq!(r.m, 3);
    }

    #[test]
    fn rmse_mae_hand_example() {
        let y = [0.0, 0.0];
        let y_hat = [3.0, 4.0];
        assert_relative_eq!(rmse(&y, &y_hat).unwrap(), (12.5f64).sqrt(), epsilon = 1e-12);
        assert_relative_eq!(rmse(&y, &y_hat).unwrap(), 3.5355, epsilon = 5e-5);
        assert_relative_eq!(mae(&y, &y_hat).unwrap(), 3.5);
    }

    #[test]
    fn mase_hand_example() {
        let y = [1.0, 2.0, 4.0];
        let y_hat = [1.0, 3.0, 3.0];
        assert_relative_eq!(mae(&y, &y_hat).unwrap(), 2.0 / 3.0, epsilon = 1e-12);
        // naive denominator (|2-1| + |4-2|) / 2 = 1.5
        assert_relative_eq!(mase(&y, &y_hat).unwrap(), (2.0 / 3.0) / 1.5, epsilon = 1e-12);
        assert_relative_eq!(mase(&y, &y_hat).unwrap(), 0.4444, epsilon = 1e-4);
    }

    #[test]
    fn mape_hand_example() {
        assert_relative_eq!(mape(&[2.0, 4.0], &[1.0, 5.0]).unwrap(), 0.375);
    }

    #[test]
    fn mape_zero_target_errors() {
        match mape(&[1.0, 0.0], &[1.0, 1.0]) {
            Err(MetricError::ZeroTarget(i)) => assert_eq!(i, 1),
            other => panic!("expected zero-target error, got {other:?}"),
        }
    }

    #[test]
    fn mase_constant_target_errors() {
        assert!(matches!(
            mase(&[2.0, 2.0, 2.0], &[1.0, 1.0, 1.0]),
            Err(MetricError::DegenerateDenominator)
        ));
    }

    #[test]
    fn mase_below_one_iff_beats_naive() {
        let y = [1.0, 2.0, 1.5, 3.0, 2.5];
        let y_hat = [1.1, 1.9, 1.6, 2.9, 2.6];
        let model_mae = mae(&y, &y_hat).unwrap();
        // explicit naive forecast: predict the previous value
        let naive_mae = mae(&y[1..], &y[..y.len() - 1]).unwrap();
        let scaled = mase(&y, &y_hat).unwrap();
        // the metric uses the (M-1)-mean over the same differences, so the
        // comparison against an explicitly computed naive forecast agrees
        assert_eq!(scaled < 1.0, model_mae < naive_mae);
        assert!(scaled < 1.0);
    }
}
