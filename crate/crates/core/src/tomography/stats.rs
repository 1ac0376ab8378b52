use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mean and Bessel-corrected standard deviation of repeated fidelities (in percent).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityStats {
    pub values: Vec<f64>,
    pub mean: f64,
    pub sample_std: f64,
}

pub fn fidelity_stats(values: &[f64]) -> Result<FidelityStats> {
    if values.len() < 2 {
        return Err(Error::TooFewValues(values.len()));
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(format!("non-finite value {v}")));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(FidelityStats { values: values.to_vec(), mean, sample_std: var.sqrt() })
}
