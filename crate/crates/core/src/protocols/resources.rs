use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::{StateVector, NORM_TOLERANCE};

/// Entanglement consumed by a scheme.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceReport {
    pub bell_pairs: usize,
    pub channel_qubits: usize,
    pub unknown_coefficients: usize,
}

/// Bell pairs needed to teleport a state with `unknown_coefficients` unknown
/// complex amplitudes: ⌈log₂ n⌉, and none for a single (known) coefficient.
pub fn count_bell_resources(unknown_coefficients: usize) -> Result<ResourceReport> {
    if unknown_coefficients < 1 {
        return Err(Error::InvalidArgument("need at least one coefficient".into()));
    }
    let bell_pairs = (usize::BITS - (unknown_coefficients - 1).leading_zeros()) as usize;
    Ok(ResourceReport { bell_pairs, channel_qubits: 2 * bell_pairs, unknown_coefficients })
}

/// |φ⁺⟩ = (|00⟩ + |11⟩)/√2.
pub fn prepare_bell() -> StateVector {
    StateVector::from_real(&[FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2]).expect("normalized")
}

/// Five-qubit cluster channel ½(|00000⟩ + |01011⟩ + |10100⟩ + |11111⟩).
pub fn prepare_cluster5() -> StateVector {
    let mut amps = vec![Complex64::new(0.0, 0.0); 32];
    for idx in [0b00000, 0b01011, 0b10100, 0b11111] {
        amps[idx] = Complex64::new(0.5, 0.0);
    }
    StateVector::new(amps).expect("normalized")
}

/// Arbitrary two-qubit state `α|00⟩ + β|01⟩ + γ|10⟩ + δ|11⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoQubitState {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub gamma: Complex64,
    pub delta: Complex64,
}

impl TwoQubitState {
    pub fn new(alpha: Complex64, beta: Complex64, gamma: Complex64, delta: Complex64) -> Result<Self> {
        let norm = alpha.norm_sqr() + beta.norm_sqr() + gamma.norm_sqr() + delta.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { alpha, beta, gamma, delta })
    }

    pub fn to_state_vector(&self) -> StateVector {
        StateVector::new(vec![self.alpha, self.beta, self.gamma, self.delta]).expect("validated")
    }
}
