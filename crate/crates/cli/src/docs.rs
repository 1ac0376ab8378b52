//! Output documents. Every document carries `schema_version` and a
//! `command` tag; the JSON Schemas under `schemas/` describe them.

use std::collections::BTreeMap;

use serde::Serialize;
use teleport_core::experiment::SchemeComparison;
use teleport_core::protocols::{BranchRecord, ResourceReport};
use teleport_core::tomography::FidelityStats;
use teleport_core::transpile::CostReport;

use crate::config::Scheme;

pub const SCHEMA_VERSION: &str = "1.0.0";

#[derive(Debug, Serialize)]
pub struct RunDocument {
    pub schema_version: &'static str,
    pub command: &'static str,
    pub scheme: Scheme,
    pub m: usize,
    pub shots: u64,
    pub seed: u64,
    /// Calibration file, or `null` for the noiseless model.
    pub calibration: Option<String>,
    pub resources: ResourceReport,
    pub ideal: IdealSection,
    /// Absent for schemes that do not fit the device.
    pub device: Option<DeviceSection>,
}

#[derive(Debug, Serialize)]
pub struct IdealSection {
    /// Smallest per-branch fidelity with the target state.
    pub fidelity: f64,
    pub branches: Vec<BranchRecord>,
}

#[derive(Debug, Serialize)]
pub struct DeviceSection {
    /// What the receivers should hold, as `[re, im]` amplitudes.
    pub target_amplitudes: Vec<[f64; 2]>,
    pub layout: Vec<usize>,
    pub cost: CostReport,
    /// Receivers' readout, keyed by `b₁b₂`.
    pub histogram: BTreeMap<String, u64>,
    pub probabilities: BTreeMap<String, f64>,
    /// Fidelity of the receivers' simulated state with the target.
    pub fidelity: f64,
    pub classical_limit: f64,
    pub repetitions: Repetitions,
}

#[derive(Debug, Serialize)]
pub struct Repetitions {
    pub reps: usize,
    pub shots_per_setting: u64,
    /// Tomographic fidelity per repetition, in percent.
    pub fidelities_percent: Vec<f64>,
    /// Present when there are at least two repetitions.
    pub stats: Option<FidelityStats>,
}

#[derive(Debug, Serialize)]
pub struct TomographyDocument {
    pub schema_version: &'static str,
    pub command: &'static str,
    pub scheme: Scheme,
    pub mode: &'static str,
    pub shots_per_setting: u64,
    pub seed: u64,
    pub calibration: Option<String>,
    pub settings: Vec<String>,
    pub rho_real: Vec<Vec<f64>>,
    pub rho_imag: Vec<Vec<f64>>,
    pub fidelity: f64,
    pub fidelity_percent: f64,
    pub classical_limit: f64,
    pub repetitions: Option<Repetitions>,
}

#[derive(Debug, Serialize)]
pub struct StatsDocument {
    pub schema_version: &'static str,
    pub command: &'static str,
    pub count: usize,
    #[serde(flatten)]
    pub stats: FidelityStats,
}

#[derive(Debug, Serialize)]
pub struct RouteDocument {
    pub schema_version: &'static str,
    pub command: &'static str,
    pub logical_qubits: usize,
    pub physical_qubits: usize,
    pub edges: Vec<[usize; 2]>,
    pub original_two_qubit_gates: usize,
    pub layout: Vec<usize>,
    pub final_layout: Vec<usize>,
    pub cost: CostReport,
    pub routed_circuit: String,
}

#[derive(Debug, Serialize)]
pub struct CompareDocument {
    pub schema_version: &'static str,
    pub command: &'static str,
    #[serde(flatten)]
    pub comparison: SchemeComparison,
}
