use serde::{Deserialize, Serialize};

use super::resources::ResourceReport;
use super::teleport::{Correction, TeleportBranch};

/// Serializable form of one [`TeleportBranch`]. Amplitudes are `[re, im]` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchRecord {
    pub outcome_bits: String,
    pub probability: f64,
    pub corrections: Vec<Correction>,
    pub output_amplitudes: Vec<[f64; 2]>,
}

impl From<&TeleportBranch> for BranchRecord {
    fn from(b: &TeleportBranch) -> Self {
        Self {
            outcome_bits: b.outcome_bits.to_string(),
            probability: b.probability,
            corrections: b.corrections.clone(),
            output_amplitudes: b.output.amplitudes().iter().map(|a| [a.re, a.im]).collect(),
        }
    }
}

/// A protocol run: scheme name, resources and one record per branch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolReport {
    pub scheme: String,
    pub resources: ResourceReport,
    pub branches: Vec<BranchRecord>,
}

impl ProtocolReport {
    pub fn new(scheme: impl Into<String>, resources: ResourceReport, branches: &[TeleportBranch]) -> Self {
        Self { scheme: scheme.into(), resources, branches: branches.iter().map(BranchRecord::from).collect() }
    }
}
