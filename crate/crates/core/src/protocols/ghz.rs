use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::{Gate, GateKind};
use crate::error::{Error, Result};
use crate::qstate::{StateVector, MAX_QUBITS, NORM_TOLERANCE};

/// `alpha|x⟩ + beta|x̄⟩` over `n` qubits, with x̄ the bitwise complement of `x`.
///
/// The GHZ-class states `alpha|0…0⟩ + beta|1…1⟩` are the `x = 0` case.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneralizedBellTypeState {
    n: usize,
    x: usize,
    alpha: Complex64,
    beta: Complex64,
}

impl GeneralizedBellTypeState {
    pub fn new(n: usize, x: usize, alpha: Complex64, beta: Complex64) -> Result<Self> {
        if !(1..=MAX_QUBITS).contains(&n) {
            return Err(Error::InvalidArgument(format!("qubit count {n} outside 1..={MAX_QUBITS}")));
        }
        if x >= 1 << n {
            return Err(Error::InvalidArgument(format!("basis index {x} out of range for {n} qubits")));
        }
        let norm = alpha.norm_sqr() + beta.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { n, x, alpha, beta })
    }

    /// GHZ-class `alpha|0…0⟩ + beta|1…1⟩` on `m` qubits.
    pub fn ghz_class(m: usize, alpha: Complex64, beta: Complex64) -> Result<Self> {
        Self::new(m, 0, alpha, beta)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn x(&self) -> usize {
        self.x
    }

    pub fn x_bar(&self) -> usize {
        !self.x & ((1 << self.n) - 1)
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    pub fn to_state_vector(&self) -> StateVector {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << self.n];
        amps[self.x] += self.alpha;
        amps[self.x_bar()] += self.beta;
        StateVector::new(amps).expect("validated on construction")
    }
}

/// `alpha|0…0⟩ + beta|1…1⟩` on `m` qubits as a vector.
pub fn make_ghz_class(m: usize, alpha: Complex64, beta: Complex64) -> Result<StateVector> {
    Ok(GeneralizedBellTypeState::ghz_class(m, alpha, beta)?.to_state_vector())
}

/// Gates that compressed a generalized Bell-type state, in application order.
/// All of them are self-inverse; expansion replays them backwards.
#[derive(Clone, Debug, PartialEq)]
pub struct InversionRecord {
    num_qubits: usize,
    gates: Vec<Gate>,
}

impl InversionRecord {
    /// Validates that only CNOT and X gates inside the register appear.
    pub fn new(num_qubits: usize, gates: Vec<Gate>) -> Result<Self> {
        if num_qubits < 1 {
            return Err(Error::InvalidArgument("record needs at least one qubit".into()));
        }
        for g in &gates {
            if !matches!(g.kind(), GateKind::Cnot | GateKind::X) {
                return Err(Error::InvalidArgument(format!("record gate {g} is not CNOT or X")));
            }
            if g.targets().iter().any(|&q| q >= num_qubits) {
                return Err(Error::InvalidArgument(format!("record gate {g} outside {num_qubits} qubits")));
            }
        }
        Ok(Self { num_qubits, gates })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Undoes the compression on the block of qubits starting at `offset`
    /// inside `state`.
    pub(crate) fn undo_in_place(&self, state: &mut StateVector, offset: usize) {
        for g in self.gates.iter().rev() {
            let shifted = g.remapped(|q| q + offset);
            state.apply_trusted(&shifted.matrix(), shifted.targets());
        }
    }
}

/// CNOT ladder from qubit 0, X on each tail qubit left at 1, and X on qubit 0
/// when bit 0 of `x` is set. Leaves `(alpha|0⟩ + beta|1⟩) ⊗ |0…0⟩`; returns
/// the single-qubit head together with the record that undoes it.
pub fn compress_ghz_class(s: &GeneralizedBellTypeState) -> (StateVector, InversionRecord) {
    let n = s.num_qubits();
    let bit = |q: usize| (s.x() >> (n - 1 - q)) & 1;
    let mut gates: Vec<Gate> = (1..n).map(|k| Gate::cnot(0, k)).collect();
    gates.extend((1..n).filter(|&k| bit(k) ^ bit(0) == 1).map(Gate::x));
    if bit(0) == 1 {
        gates.push(Gate::x(0));
    }
    let record = InversionRecord { num_qubits: n, gates };

    let mut state = s.to_state_vector();
    for g in record.gates() {
        state.apply_trusted(&g.matrix(), g.targets());
    }
    // Tail qubits are |0…0⟩, so the head amplitudes sit at indices 0 and 2^(n-1).
    let head_one = 1usize << (n - 1);
    debug_assert!(state.amplitudes().iter().enumerate().all(|(i, a)| i == 0 || i == head_one || a.norm() < 1e-12));
    let amps = state.amplitudes();
    let head = StateVector::qubit(amps[0], amps[head_one]).expect("norm preserved by unitaries");
    (head, record)
}

/// Re-attaches `|0…0⟩` to the head qubit and replays the record backwards.
pub fn expand_ghz_class(q: &StateVector, record: &InversionRecord) -> Result<StateVector> {
    if q.num_qubits() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: q.num_qubits() });
    }
    let n = record.num_qubits();
    let mut state = if n > 1 { q.tensor(&StateVector::zero(n - 1)) } else { q.clone() };
    record.undo_in_place(&mut state, 0);
    Ok(state)
}
