use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::calibration::CalibrationRecord;
use super::kraus::{depolarizing, depolarizing_from_gate_error, thermal_relaxation, KrausChannel};
use crate::error::{Error, Result};

/// Gate and readout durations in nanoseconds.
///
/// The defaults are typical of 7-qubit Falcon devices. They are not
/// calibration data; override them when better numbers are known.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DurationConfig {
    pub single_qubit_gate_ns: f64,
    pub cnot_ns: f64,
    pub readout_ns: f64,
}

impl Default for DurationConfig {
    fn default() -> Self {
        Self { single_qubit_gate_ns: 35.5, cnot_ns: 300.0, readout_ns: 1500.0 }
    }
}

impl DurationConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("single_qubit_gate_ns", self.single_qubit_gate_ns),
            ("cnot_ns", self.cnot_ns),
            ("readout_ns", self.readout_ns),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// Kinds of step that take time in the noisy simulator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StepKind {
    SingleQubitGate,
    Cnot,
    Readout,
}

/// Noise for one qubit.
#[derive(Clone, Debug, PartialEq)]
pub struct QubitNoise {
    /// Thermal relaxation over one step of each kind.
    pub idle: BTreeMap<StepKind, KrausChannel>,
    /// Depolarizing channel following every single-qubit gate.
    pub gate: KrausChannel,
    /// `confusion[read][true]`; columns sum to 1.
    pub confusion: [[f64; 2]; 2],
    pub readout_error: f64,
}

/// Per-qubit decoherence, gate depolarizing and readout confusion, plus a
/// two-qubit depolarizing channel per calibrated CNOT pair.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseModel {
    qubits: Vec<Option<QubitNoise>>,
    /// Keyed by `(min, max)` qubit pair. Values are total Pauli-error probabilities.
    cnot_strength: BTreeMap<(usize, usize), f64>,
    cnot: BTreeMap<(usize, usize), KrausChannel>,
}

fn pair_key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

fn confusion(e: f64) -> [[f64; 2]; 2] {
    [[1.0 - e, e], [e, 1.0 - e]]
}

impl NoiseModel {
    /// Noise-free model on `num_qubits` fully connected qubits.
    pub fn ideal(num_qubits: usize) -> Self {
        let q = QubitNoise {
            idle: [StepKind::SingleQubitGate, StepKind::Cnot, StepKind::Readout]
                .into_iter()
                .map(|k| (k, KrausChannel::identity(1)))
                .collect(),
            gate: KrausChannel::identity(1),
            confusion: confusion(0.0),
            readout_error: 0.0,
        };
        let mut cnot = BTreeMap::new();
        let mut cnot_strength = BTreeMap::new();
        for a in 0..num_qubits {
            for b in (a + 1)..num_qubits {
                cnot.insert((a, b), KrausChannel::identity(2));
                cnot_strength.insert((a, b), 0.0);
            }
        }
        Self { qubits: vec![Some(q); num_qubits], cnot_strength, cnot }
    }

    pub fn num_qubits(&self) -> usize {
        self.qubits.len()
    }

    pub fn qubit(&self, q: usize) -> Result<&QubitNoise> {
        self.qubits.get(q).and_then(Option::as_ref).ok_or(Error::MissingCalibration(q))
    }

    pub fn cnot_channel(&self, a: usize, b: usize) -> Result<&KrausChannel> {
        self.cnot.get(&pair_key(a, b)).ok_or(Error::MissingCnotCalibration(a, b))
    }

    /// Total Pauli-error probability of the CNOT channel on `(a, b)`.
    pub fn cnot_depolarizing(&self, a: usize, b: usize) -> Result<f64> {
        self.cnot_strength.get(&pair_key(a, b)).copied().ok_or(Error::MissingCnotCalibration(a, b))
    }

    /// Model over logical qubits: logical `i` takes physical `layout[i]`'s noise.
    pub fn remapped(&self, layout: &[usize]) -> Result<Self> {
        let qubits = layout.iter().map(|&p| self.qubit(p).cloned().map(Some)).collect::<Result<Vec<_>>>()?;
        let mut cnot = BTreeMap::new();
        let mut cnot_strength = BTreeMap::new();
        for (i, &pi) in layout.iter().enumerate() {
            for (j, &pj) in layout.iter().enumerate().skip(i + 1) {
                if let Some(ch) = self.cnot.get(&pair_key(pi, pj)) {
                    cnot.insert((i, j), ch.clone());
                    cnot_strength.insert((i, j), self.cnot_strength[&pair_key(pi, pj)]);
                }
            }
        }
        Ok(Self { qubits, cnot_strength, cnot })
    }
}

/// Builds the noise model:
/// * idle/gate decoherence: amplitude damping with `1 − exp(−t/T1)` then pure
///   dephasing at rate `max(0, 1/T2 − 1/(2·T1))`, for each step duration;
/// * gate error: Pauli depolarizing whose average gate infidelity equals the
///   calibrated X or CNOT error;
/// * readout: symmetric confusion with flip probability `readout_error`.
pub fn build_noise_model(records: &[CalibrationRecord], durations: &DurationConfig) -> Result<NoiseModel> {
    durations.validate()?;
    let n = records.iter().map(|r| r.qubit + 1).max().unwrap_or(0);
    let mut qubits: Vec<Option<QubitNoise>> = vec![None; n];
    let mut cnot = BTreeMap::new();
    let mut cnot_strength = BTreeMap::new();
    for r in records {
        let r = r.clone().validated()?;
        if qubits[r.qubit].is_some() {
            return Err(Error::Calibration(format!("duplicate record for qubit {}", r.qubit)));
        }
        let idle = [
            (StepKind::SingleQubitGate, durations.single_qubit_gate_ns),
            (StepKind::Cnot, durations.cnot_ns),
            (StepKind::Readout, durations.readout_ns),
        ]
        .into_iter()
        .map(|(k, ns)| (k, thermal_relaxation(ns * 1e-3, r.t1_us, r.t2_us)))
        .collect();
        qubits[r.qubit] = Some(QubitNoise {
            idle,
            gate: depolarizing(1, depolarizing_from_gate_error(1, r.pauli_x_error)),
            confusion: confusion(r.readout_error),
            readout_error: r.readout_error,
        });
        for (&nb, &err) in &r.cnot_errors {
            let key = pair_key(r.qubit, nb);
            // Records list each pair from both ends; the first one wins.
            if let std::collections::btree_map::Entry::Vacant(e) = cnot_strength.entry(key) {
                let p = depolarizing_from_gate_error(2, err);
                e.insert(p);
                cnot.insert(key, depolarizing(2, p));
            }
        }
    }
    Ok(NoiseModel { qubits, cnot_strength, cnot })
}
