use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ghz::{compress_ghz_class, GeneralizedBellTypeState};
use super::resources::{count_bell_resources, prepare_cluster5, ResourceReport, TwoQubitState};
use crate::circuit::{run_exact_from, Bitstring, Circuit, Gate};
use crate::error::{Error, Result};
use crate::qstate::{gates, CMatrix, StateVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix(self) -> CMatrix {
        match self {
            Pauli::I => gates::identity(),
            Pauli::X => gates::pauli_x(),
            Pauli::Y => gates::pauli_y(),
            Pauli::Z => gates::pauli_z(),
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Receiver {
    Bob1,
    Bob2,
}

/// One Pauli a receiver applies; `qubit` indexes the protocol's circuit register.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Correction {
    pub receiver: Receiver,
    pub pauli: Pauli,
    pub qubit: usize,
}

/// One Bell-measurement outcome of a teleportation run.
#[derive(Clone, Debug)]
pub struct TeleportBranch {
    pub outcome_bits: Bitstring,
    /// Corrections in the order they are applied.
    pub corrections: Vec<Correction>,
    pub probability: f64,
    /// Receivers' joint state after corrections (and expansion, where the
    /// scheme expands).
    pub output: StateVector,
}

/// Paulis (in application order) that undo Bell outcome `(b1, b2)`:
/// 00 → I, 01 → X, 10 → Z, 11 → Z·X.
pub fn correction_table(b1: bool, b2: bool) -> &'static [Pauli] {
    match (b1, b2) {
        (false, false) => &[],
        (false, true) => &[Pauli::X],
        (true, false) => &[Pauli::Z],
        (true, true) => &[Pauli::X, Pauli::Z],
    }
}

/// Qubit that receives input `i` in [`teleport_circuit`] with `k` inputs.
pub const fn receiver_qubit(k: usize, i: usize) -> usize {
    k + 2 * i + 1
}

/// Alice's half of the Bell pair used for input `i`.
pub const fn sender_channel_qubit(k: usize, i: usize) -> usize {
    k + 2 * i
}

/// `k` independent standard teleportations. Qubits `0..k` hold the inputs;
/// input `i` uses the pair `(k+2i, k+2i+1)` and writes its Bell outcome to
/// bits `(2i, 2i+1)`. Corrections are appended when `corrected` is set.
pub fn teleport_circuit(k: usize, corrected: bool) -> Circuit {
    let mut c = Circuit::new(3 * k);
    for i in 0..k {
        let (a, b) = (sender_channel_qubit(k, i), receiver_qubit(k, i));
        c.h(a).cnot(a, b);
    }
    for i in 0..k {
        c.bell_measure(i, sender_channel_qubit(k, i), [2 * i, 2 * i + 1]).expect("distinct qubits and bits");
    }
    if corrected {
        for i in 0..k {
            let b = receiver_qubit(k, i);
            c.conditional(Gate::x(b), 2 * i + 1).conditional(Gate::z(b), 2 * i);
        }
    }
    c
}

/// The six-qubit two-teleportation experiment: both inputs prepared as |+⟩
/// with H, two Bell-pair channels, Pauli corrections, and (optionally) a final
/// readout of the receivers' qubits 3 and 5 into bits 4 and 5.
pub fn experiment_circuit(readout: bool) -> Circuit {
    let mut c = Circuit::new(6);
    c.h(0).h(1);
    c.extend(&teleport_circuit(2, true));
    if readout {
        c.measure(&[3, 5], &[4, 5]);
    }
    c
}

fn corrections_for(bits: &Bitstring, k: usize, receivers: &[Receiver]) -> Vec<Correction> {
    let mut out = Vec::new();
    for (i, &receiver) in receivers.iter().enumerate().take(k) {
        for &pauli in correction_table(bits.get(2 * i), bits.get(2 * i + 1)) {
            out.push(Correction { receiver, pauli, qubit: receiver_qubit(k, i) });
        }
    }
    out
}

/// Runs [`teleport_circuit`] on `inputs` (a `k`-qubit state) and returns the
/// receivers' joint `k`-qubit state per branch.
fn teleport_inputs(inputs: &StateVector, receivers: &[Receiver]) -> Result<Vec<TeleportBranch>> {
    let k = inputs.num_qubits();
    let circuit = teleport_circuit(k, true);
    let initial = inputs.tensor(&StateVector::zero(2 * k));
    let dist = run_exact_from(&circuit, &initial)?;
    dist.entries
        .into_iter()
        .map(|b| {
            let mut fixed: Vec<(usize, usize)> = (0..k).map(|i| (i, b.bits.get(2 * i) as usize)).collect();
            fixed.extend((0..k).map(|i| (sender_channel_qubit(k, i), b.bits.get(2 * i + 1) as usize)));
            let output = b
                .state
                .condition_on(&fixed)
                .ok_or_else(|| Error::MalformedCircuit("branch inconsistent with its outcome".into()))?;
            Ok(TeleportBranch {
                corrections: corrections_for(&b.bits, k, receivers),
                outcome_bits: b.bits,
                probability: b.probability,
                output,
            })
        })
        .collect()
}

/// Standard single-qubit teleportation over one |φ⁺⟩ channel.
pub fn teleport_single(psi: &StateVector) -> Result<Vec<TeleportBranch>> {
    if psi.num_qubits() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: psi.num_qubits() });
    }
    teleport_inputs(psi, &[Receiver::Bob1])
}

/// Teleports `chi_a` (m qubits) to Bob₁ and `chi_b` (m+1 qubits) to Bob₂
/// using two Bell pairs: each input is compressed to one qubit, the two heads
/// are teleported independently, and each receiver re-expands with ancillas.
pub fn multi_output_teleport(
    chi_a: &GeneralizedBellTypeState,
    chi_b: &GeneralizedBellTypeState,
) -> Result<(Vec<TeleportBranch>, ResourceReport)> {
    let m = chi_a.num_qubits();
    if chi_b.num_qubits() != m + 1 {
        return Err(Error::InvalidArgument(format!(
            "second input must have {} qubits, got {}",
            m + 1,
            chi_b.num_qubits()
        )));
    }
    let (head_a, record_a) = compress_ghz_class(chi_a);
    let (head_b, record_b) = compress_ghz_class(chi_b);
    let branches = teleport_inputs(&head_a.tensor(&head_b), &[Receiver::Bob1, Receiver::Bob2])?;

    let total = 2 * m + 1;
    let expanded = branches
        .into_iter()
        .map(|mut br| {
            // Bob₁'s head goes to qubit 0, Bob₂'s to qubit m; ancillas start in |0⟩.
            let mut amps = vec![Complex64::new(0.0, 0.0); 1 << total];
            for (idx, a) in br.output.amplitudes().iter().enumerate() {
                let (h1, h2) = (idx >> 1, idx & 1);
                amps[(h1 << (total - 1)) | (h2 << (total - 1 - m))] = *a;
            }
            let mut joint = StateVector::from_raw(total, amps);
            record_a.undo_in_place(&mut joint, 0);
            record_b.undo_in_place(&mut joint, m);
            br.output = joint;
            br
        })
        .collect();
    Ok((expanded, count_bell_resources(4)?))
}

/// Baseline: the same task over the five-qubit cluster channel.
///
/// Register: 0 = χa, 1–2 = χb, 3–7 = channel qubits 1–5. Channel qubit 3
/// (register 5) goes to Bob₁, channel qubits 4–5 (registers 6–7) to Bob₂.
/// Alice compresses χb, then disentangles her five qubits with CNOT/H so that
/// a computational measurement realizes an entangled-basis measurement.
/// Receivers apply Pauli corrections, then `X^x` to restore each input's
/// basis pattern.
pub fn cluster_channel_teleport(
    chi_a: &GeneralizedBellTypeState,
    chi_b: &GeneralizedBellTypeState,
) -> Result<(Vec<TeleportBranch>, ResourceReport)> {
    if chi_a.num_qubits() != 1 || chi_b.num_qubits() != 2 {
        return Err(Error::InvalidArgument(format!(
            "cluster baseline supports m = 1 only (got {} and {} qubits)",
            chi_a.num_qubits(),
            chi_b.num_qubits()
        )));
    }
    const BOB1: usize = 5;
    const BOB2: [usize; 2] = [6, 7];

    let channel = prepare_cluster5();
    let initial = chi_a.to_state_vector().tensor(&chi_b.to_state_vector()).tensor(&channel);

    let mut c = Circuit::new(8);
    let (_, record_a) = compress_ghz_class(chi_a);
    let (_, record_b) = compress_ghz_class(chi_b);
    for g in record_a.gates() {
        c.gate(g.clone());
    }
    for g in record_b.gates() {
        c.gate(g.remapped(|q| q + 1));
    }
    c.cnot(0, 3).cnot(1, 4).h(0).h(1);
    c.measure(&[0, 3, 1, 4, 2], &[0, 1, 2, 3, 4]);
    c.conditional(Gate::x(BOB1), 1).conditional(Gate::z(BOB1), 0);
    c.conditional(Gate::x(BOB2[0]), 3).conditional(Gate::x(BOB2[1]), 3).conditional(Gate::z(BOB2[0]), 2);
    // The GHZ-type channel half fans Bob₂'s head out to α|00⟩+β|11⟩; X^x
    // restores α|x⟩+β|x̄⟩ (likewise for Bob₁).
    if chi_a.x() & 1 == 1 {
        c.x(BOB1);
    }
    for (j, &q) in BOB2.iter().enumerate() {
        if (chi_b.x() >> (1 - j)) & 1 == 1 {
            c.x(q);
        }
    }

    let dist = run_exact_from(&c, &initial)?;
    let branches = dist
        .entries
        .into_iter()
        .map(|b| {
            let fixed: Vec<(usize, usize)> = [(0, 0), (3, 1), (1, 2), (4, 3), (2, 4)]
                .iter()
                .map(|&(q, bit)| (q, b.bits.get(bit) as usize))
                .collect();
            let output = b
                .state
                .condition_on(&fixed)
                .ok_or_else(|| Error::MalformedCircuit("branch inconsistent with its outcome".into()))?;
            let mut corrections = Vec::new();
            for &pauli in correction_table(b.bits.get(0), b.bits.get(1)) {
                corrections.push(Correction { receiver: Receiver::Bob1, pauli, qubit: BOB1 });
            }
            for &pauli in correction_table(b.bits.get(2), b.bits.get(3)) {
                let targets: &[usize] = if pauli == Pauli::X { &BOB2 } else { &BOB2[..1] };
                for &qubit in targets {
                    corrections.push(Correction { receiver: Receiver::Bob2, pauli, qubit });
                }
            }
            Ok(TeleportBranch { outcome_bits: b.bits, corrections, probability: b.probability, output })
        })
        .collect::<Result<Vec<_>>>()?;
    let report = ResourceReport { bell_pairs: 0, channel_qubits: 5, unknown_coefficients: 4 };
    Ok((branches, report))
}

/// Teleports an arbitrary two-qubit state as two independent single-qubit
/// teleportations over two Bell pairs.
pub fn teleport_two_qubit_general(s: &TwoQubitState) -> Result<(Vec<TeleportBranch>, ResourceReport)> {
    let branches = teleport_inputs(&s.to_state_vector(), &[Receiver::Bob1, Receiver::Bob2])?;
    Ok((branches, count_bell_resources(4)?))
}
