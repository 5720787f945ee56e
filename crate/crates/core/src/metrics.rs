//! Error and quality measures.

use std::fmt;

use crate::linalg::{Entry, Matrix};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct MetricValue {
    pub name: String,
    /// Finite, or `+∞` for an exact reconstruction under SNR.
    pub value: f64,
}

impl MetricValue {
    pub fn new(name: impl Into<String>, value: f64) -> Self {
        Self {
            name: name.into(),
            value,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.value == f64::INFINITY
    }
}

impl fmt::Display for MetricValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact() {
            write!(f, "{}=inf", self.name)
        } else {
            write!(f, "{}={:.6}", self.name, self.value)
        }
    }
}

/// Normalized root square error `‖X_est − X_org‖_F / ‖X_org‖_F`.
pub fn rse<T: Entry>(estimate: &Matrix<T>, reference: &Matrix<T>) -> Result<f64> {
    let denom = reference.frobenius_norm();
    let num = estimate.distance(reference)?;
    if denom == 0.0 {
        return Err(Error::ZeroReference);
    }
    Ok(num / denom)
}

/// `20·log₁₀(‖ref‖ / ‖ref − est‖)` in dB; `+∞` when the estimate is exact.
pub fn snr_db(reference: &[f64], estimate: &[f64]) -> Result<f64> {
    if reference.len() != estimate.len() {
        return Err(Error::ShapeMismatch {
            expected: (reference.len(), 1),
            found: (estimate.len(), 1),
        });
    }
    let signal = reference.iter().map(|r| r * r).sum::<f64>().sqrt();
    if signal == 0.0 {
        return Err(Error::ZeroReference);
    }
    let error = reference
        .iter()
        .zip(estimate)
        .map(|(r, e)| (r - e) * (r - e))
        .sum::<f64>()
        .sqrt();
    if error == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(20.0 * (signal / error).log10())
}
