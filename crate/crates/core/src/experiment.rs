//! The two-receiver device experiment end to end: prepare the inputs, route
//! onto a coupling graph, run under a noise model and inspect what the
//! receivers hold.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{run_noisy, NoiseModel, NoisyRun};
use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::protocols::{
    cluster_channel_teleport, multi_output_teleport, receiver_qubit, teleport_circuit, GeneralizedBellTypeState,
    ResourceReport,
};
use crate::qstate::{bit_shift, gates, CMatrix, DensityMatrix, StateVector};
use crate::tomography::{pure_fidelity, tomography};
use crate::transpile::{route, CouplingGraph, Routing};

/// Logical qubits holding Bob₁'s and Bob₂'s outputs in [`device_circuit`].
pub const RECEIVERS: [usize; 2] = [receiver_qubit(2, 0), receiver_qubit(2, 1)];

/// Splits a two-qubit product state into its factors.
pub fn factor_product(psi: &StateVector) -> Option<(StateVector, StateVector)> {
    let a = psi.amplitudes();
    if a.len() != 4 || (a[0] * a[3] - a[1] * a[2]).norm() > 1e-12 {
        return None;
    }
    let (i, _) = a.iter().enumerate().max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))?;
    let (row, col) = (i >> 1, i & 1);
    let first = StateVector::normalized(vec![a[col], a[2 | col]]).ok()?;
    let second = StateVector::normalized(vec![a[row << 1], a[(row << 1) | 1]]).ok()?;
    Some((first, second))
}

/// Six-qubit circuit teleporting the two-qubit `input` held on qubits 0 and
/// 1 to qubits 3 and 5 over two Bell pairs. Product inputs are prepared with
/// one single-qubit gate per qubit, entangled ones with a two-qubit gate.
/// With `readout`, qubits 3 and 5 are measured into bits 4 and 5 at the end.
pub fn device_circuit(input: &StateVector, readout: bool) -> Result<Circuit> {
    if input.num_qubits() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: input.num_qubits() });
    }
    let mut c = Circuit::new(6);
    match factor_product(input) {
        Some((a, b)) => {
            for (q, s) in [(0, a), (1, b)] {
                let amps = s.amplitudes();
                c.gate(Gate::custom(gates::state_prep(amps[0], amps[1]), vec![q])?);
            }
        }
        None => {
            c.gate(Gate::custom(gates::state_prep_general(input.amplitudes()), vec![0, 1])?);
        }
    }
    c.extend(&teleport_circuit(2, true));
    if readout {
        c.measure(&RECEIVERS, &[4, 5]);
    }
    Ok(c)
}

/// A routed circuit executed under a device noise model.
#[derive(Clone, Debug)]
pub struct DeviceRun {
    pub routing: Routing,
    /// Compact qubit `i` is physical qubit `physical[i]`.
    pub physical: Vec<usize>,
    /// Compact position of each logical qubit after the last step.
    pub final_positions: Vec<usize>,
    /// Noise model over the compact qubits.
    pub model: NoiseModel,
    pub run: NoisyRun,
}

/// Routes `c` onto `graph`, keeps only the physical qubits it touches and
/// runs it under `model` (indexed by physical qubit).
pub fn run_on_device(
    c: &Circuit,
    graph: &CouplingGraph,
    model: &NoiseModel,
    shots: u64,
    seed: u64,
) -> Result<DeviceRun> {
    let routing = route(c, graph)?;
    let (compact, physical, final_positions) = routing.compact();
    let model = model.remapped(&physical)?;
    let run = run_noisy(&compact, &model, shots, seed)?;
    Ok(DeviceRun { routing, physical, final_positions, model, run })
}

impl DeviceRun {
    /// Reduced state of the given logical qubits, in the order given.
    pub fn reduced(&self, logical: &[usize]) -> Result<DensityMatrix> {
        let positions: Vec<usize> = logical.iter().map(|&l| self.final_positions[l]).collect();
        reduced_in_order(&self.run.density, &positions)
    }

    /// Noise model of the physical qubits finally holding `logical`.
    pub fn model_for(&self, logical: &[usize]) -> Result<NoiseModel> {
        let positions: Vec<usize> = logical.iter().map(|&l| self.final_positions[l]).collect();
        self.model.remapped(&positions)
    }
}

/// Partial trace onto `keep`, with the kept qubits ordered as listed.
pub fn reduced_in_order(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let r = rho.partial_trace(keep)?;
    let mut sorted = keep.to_vec();
    sorted.sort_unstable();
    if sorted == keep {
        return Ok(r);
    }
    let k = keep.len();
    // Output qubit j is sorted position perm[j].
    let perm: Vec<usize> = keep.iter().map(|q| sorted.iter().position(|s| s == q).expect("kept")).collect();
    let map = |idx: usize| (0..k).fold(0, |acc, j| acc | (((idx >> bit_shift(k, perm[j])) & 1) << bit_shift(k, j)));
    let d = 1 << k;
    let mut m = CMatrix::zeros(d);
    for i in 0..d {
        for j in 0..d {
            m[(map(i), map(j))] = r.matrix()[(i, j)];
        }
    }
    DensityMatrix::new(m)
}

/// Fidelity of `reps` independent tomographic reconstructions of `rho`
/// against `ideal`. Repetition `r` is seeded with `seed + r`; repetitions run
/// in parallel and the result is in repetition order.
pub fn tomography_fidelities(
    rho: &DensityMatrix,
    noise: Option<&NoiseModel>,
    ideal: &StateVector,
    shots: u64,
    seed: u64,
    reps: usize,
) -> Result<Vec<f64>> {
    (0..reps)
        .into_par_iter()
        .map(|r| pure_fidelity(ideal, &tomography(rho, noise, shots, seed.wrapping_add(r as u64))?))
        .collect()
}

/// Branch-by-branch comparison of the two-Bell-pair scheme with the
/// five-qubit cluster baseline (m = 1).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemeComparison {
    /// Same outcomes, same probabilities and identical receiver states.
    pub equivalent: bool,
    pub branches: usize,
    /// Largest `1 − |⟨ψ_cluster|ψ_two_bell⟩|²` over paired branches.
    pub max_infidelity: f64,
    pub two_bell: ResourceReport,
    pub cluster5: ResourceReport,
}

/// Tolerance for [`SchemeComparison::equivalent`].
pub const EQUIVALENCE_TOLERANCE: f64 = 1e-10;

/// Runs both schemes on the same inputs. Cluster outcomes carry one extra
/// bit (Alice's fifth qubit); branches are paired on the first four.
pub fn compare_schemes(chi_a: &GeneralizedBellTypeState, chi_b: &GeneralizedBellTypeState) -> Result<SchemeComparison> {
    let (two, two_bell) = multi_output_teleport(chi_a, chi_b)?;
    let (cl, cluster5) = cluster_channel_teleport(chi_a, chi_b)?;
    let mut equivalent = two.len() == cl.len();
    let mut max_infidelity: f64 = 0.0;
    for (x, y) in cl.iter().zip(&two) {
        equivalent &= x.outcome_bits.select(&[0, 1, 2, 3]) == y.outcome_bits;
        equivalent &= (x.probability - y.probability).abs() < EQUIVALENCE_TOLERANCE;
        max_infidelity = max_infidelity.max(1.0 - x.output.overlap(&y.output)?);
    }
    equivalent &= max_infidelity < EQUIVALENCE_TOLERANCE;
    Ok(SchemeComparison { equivalent, branches: two.len(), max_infidelity, two_bell, cluster5 })
}

/// `|+⟩ ⊗ |+⟩`, the receivers' target in the reference experiment.
pub fn plus_plus() -> StateVector {
    StateVector::plus().tensor(&StateVector::plus())
}
