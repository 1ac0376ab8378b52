//! Gate-level circuits, exact branch-enumerating execution and seeded shot
//! sampling.

mod bits;
mod exec;
pub mod sampling;
mod text;

use std::fmt;

pub use bits::Bitstring;
pub use exec::{run_exact, run_exact_from, Branch, BranchDistribution};
pub use sampling::{marginal_counts, sample_counts, sample_distribution, Counts};
pub use text::{parse_circuit, PARSER_GRAMMAR};

use crate::error::{Error, Result};
use crate::qstate::{gates, CMatrix, UNITARY_TOLERANCE};

#[derive(Clone, Debug, PartialEq)]
pub enum GateKind {
    H,
    X,
    Y,
    Z,
    S,
    /// S†, needed to rotate into the Y basis for tomography.
    Sdg,
    Cnot,
    Swap,
    Custom(CMatrix),
}

impl GateKind {
    pub fn arity(&self) -> usize {
        match self {
            GateKind::Cnot | GateKind::Swap => 2,
            GateKind::Custom(m) => m.dim().trailing_zeros() as usize,
            _ => 1,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::X => "X",
            GateKind::Y => "Y",
            GateKind::Z => "Z",
            GateKind::S => "S",
            GateKind::Sdg => "SDG",
            GateKind::Cnot => "CNOT",
            GateKind::Swap => "SWAP",
            GateKind::Custom(_) => "U",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    kind: GateKind,
    targets: Vec<usize>,
}

impl Gate {
    /// Checks arity, distinct targets and (for custom gates) unitarity.
    pub fn new(kind: GateKind, targets: Vec<usize>) -> Result<Self> {
        if let GateKind::Custom(m) = &kind {
            if !m.dim().is_power_of_two() || m.dim() < 2 {
                return Err(Error::MalformedCircuit(format!(
                    "custom gate dimension {} is not a power of two",
                    m.dim()
                )));
            }
            let err = m.unitarity_error();
            if err > UNITARY_TOLERANCE {
                return Err(Error::NotUnitary(err));
            }
        }
        if targets.len() != kind.arity() {
            return Err(Error::MalformedCircuit(format!(
                "{} expects {} target(s), got {}",
                kind.name(),
                kind.arity(),
                targets.len()
            )));
        }
        for (i, t) in targets.iter().enumerate() {
            if targets[..i].contains(t) {
                return Err(Error::BadTargets(format!("qubit {t} repeated")));
            }
        }
        Ok(Self { kind, targets })
    }

    pub fn h(q: usize) -> Self {
        Self { kind: GateKind::H, targets: vec![q] }
    }

    pub fn x(q: usize) -> Self {
        Self { kind: GateKind::X, targets: vec![q] }
    }

    pub fn y(q: usize) -> Self {
        Self { kind: GateKind::Y, targets: vec![q] }
    }

    pub fn z(q: usize) -> Self {
        Self { kind: GateKind::Z, targets: vec![q] }
    }

    pub fn s(q: usize) -> Self {
        Self { kind: GateKind::S, targets: vec![q] }
    }

    pub fn sdg(q: usize) -> Self {
        Self { kind: GateKind::Sdg, targets: vec![q] }
    }

    /// Panics if `control == target`.
    pub fn cnot(control: usize, target: usize) -> Self {
        assert_ne!(control, target, "CNOT control equals target");
        Self { kind: GateKind::Cnot, targets: vec![control, target] }
    }

    pub fn swap(a: usize, b: usize) -> Self {
        assert_ne!(a, b, "SWAP on a single qubit");
        Self { kind: GateKind::Swap, targets: vec![a, b] }
    }

    pub fn custom(matrix: CMatrix, targets: Vec<usize>) -> Result<Self> {
        Self::new(GateKind::Custom(matrix), targets)
    }

    pub fn kind(&self) -> &GateKind {
        &self.kind
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn arity(&self) -> usize {
        self.targets.len()
    }

    pub fn matrix(&self) -> CMatrix {
        match &self.kind {
            GateKind::H => gates::hadamard(),
            GateKind::X => gates::pauli_x(),
            GateKind::Y => gates::pauli_y(),
            GateKind::Z => gates::pauli_z(),
            GateKind::S => gates::phase_s(),
            GateKind::Sdg => gates::phase_s_dagger(),
            GateKind::Cnot => gates::cnot(),
            GateKind::Swap => gates::swap(),
            GateKind::Custom(m) => m.clone(),
        }
    }

    /// Same gate acting on relabelled qubits.
    pub fn remapped(&self, f: impl Fn(usize) -> usize) -> Self {
        Self { kind: self.kind.clone(), targets: self.targets.iter().map(|&q| f(q)).collect() }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind.name())?;
        for t in &self.targets {
            write!(f, " {t}")?;
        }
        if let GateKind::Custom(m) = &self.kind {
            write!(f, " :")?;
            for z in m.as_slice() {
                write!(f, " {} {}", z.re, z.im)?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Step {
    Gate(Gate),
    /// Computational-basis measurement of `qubits[i]` into classical bit `bits[i]`.
    Measure {
        qubits: Vec<usize>,
        bits: Vec<usize>,
    },
    /// Applies `gate` when classical bit `bit` equals `value`.
    Conditional {
        gate: Gate,
        bit: usize,
        value: bool,
    },
}

impl Step {
    /// Qubits touched by this step.
    pub fn qubits(&self) -> &[usize] {
        match self {
            Step::Gate(g) | Step::Conditional { gate: g, .. } => g.targets(),
            Step::Measure { qubits, .. } => qubits,
        }
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Step::Gate(g) => write!(f, "{g}"),
            Step::Measure { qubits, bits } => {
                write!(f, "M")?;
                for q in qubits {
                    write!(f, " {q}")?;
                }
                write!(f, " ->")?;
                for b in bits {
                    write!(f, " c{b}")?;
                }
                Ok(())
            }
            Step::Conditional { gate, bit, value } => {
                let neg = if *value { "" } else { "!" };
                write!(f, "{gate} if {neg}c{bit}")
            }
        }
    }
}

/// Ordered list of steps over a fixed qubit register and a classical register
/// that grows as measurements name new bits.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Circuit {
    num_qubits: usize,
    num_bits: usize,
    steps: Vec<Step>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Self { num_qubits, num_bits: 0, steps: Vec::new() }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_bits(&self) -> usize {
        self.num_bits
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    /// Reserves classical bits up to `num_bits` even if no measurement writes them.
    pub fn with_bits(mut self, num_bits: usize) -> Self {
        self.num_bits = self.num_bits.max(num_bits);
        self
    }

    pub fn push(&mut self, step: Step) -> &mut Self {
        match &step {
            Step::Measure { bits, .. } => {
                if let Some(&m) = bits.iter().max() {
                    self.num_bits = self.num_bits.max(m + 1);
                }
            }
            Step::Conditional { bit, .. } => self.num_bits = self.num_bits.max(bit + 1),
            Step::Gate(_) => {}
        }
        self.steps.push(step);
        self
    }

    pub fn gate(&mut self, gate: Gate) -> &mut Self {
        self.push(Step::Gate(gate))
    }

    pub fn h(&mut self, q: usize) -> &mut Self {
        self.gate(Gate::h(q))
    }

    pub fn x(&mut self, q: usize) -> &mut Self {
        self.gate(Gate::x(q))
    }

    pub fn z(&mut self, q: usize) -> &mut Self {
        self.gate(Gate::z(q))
    }

    pub fn cnot(&mut self, control: usize, target: usize) -> &mut Self {
        self.gate(Gate::cnot(control, target))
    }

    pub fn swap(&mut self, a: usize, b: usize) -> &mut Self {
        self.gate(Gate::swap(a, b))
    }

    pub fn measure(&mut self, qubits: &[usize], bits: &[usize]) -> &mut Self {
        self.push(Step::Measure { qubits: qubits.to_vec(), bits: bits.to_vec() })
    }

    pub fn conditional(&mut self, gate: Gate, bit: usize) -> &mut Self {
        self.push(Step::Conditional { gate, bit, value: true })
    }

    /// Bell-basis measurement: CNOT(q1→q2), H(q1), then measure `(q1, q2)`
    /// into `bits`. Outcome `(b1, b2)` = (0,0) for |φ⁺⟩, (0,1) for |ψ⁺⟩,
    /// (1,0) for |φ⁻⟩, (1,1) for |ψ⁻⟩.
    pub fn bell_measure(&mut self, q1: usize, q2: usize, bits: [usize; 2]) -> Result<&mut Self> {
        if q1 == q2 {
            return Err(Error::BadTargets(format!("Bell measurement on qubit {q1} twice")));
        }
        if bits[0] == bits[1] {
            return Err(Error::MalformedCircuit(format!("Bell measurement writes c{} twice", bits[0])));
        }
        self.cnot(q1, q2).h(q1).measure(&[q1, q2], &bits);
        Ok(self)
    }

    /// Checks qubit ranges, arities and that every classical bit is written
    /// before it is read.
    pub fn validate(&self) -> Result<()> {
        if self.num_qubits == 0 {
            return Err(Error::MalformedCircuit("circuit has no qubits".into()));
        }
        let mut written = vec![false; self.num_bits];
        for (i, step) in self.steps.iter().enumerate() {
            let ctx = |msg: String| Error::MalformedCircuit(format!("step {i} ({step}): {msg}"));
            let qs = step.qubits();
            if qs.is_empty() {
                return Err(ctx("no qubits".into()));
            }
            for (j, &q) in qs.iter().enumerate() {
                if q >= self.num_qubits {
                    return Err(ctx(format!("qubit {q} out of range")));
                }
                if qs[..j].contains(&q) {
                    return Err(ctx(format!("qubit {q} repeated")));
                }
            }
            match step {
                Step::Gate(g) | Step::Conditional { gate: g, .. } => {
                    if g.targets.len() != g.kind.arity() {
                        return Err(ctx("arity mismatch".into()));
                    }
                }
                Step::Measure { qubits, bits } => {
                    if qubits.len() != bits.len() {
                        return Err(ctx("qubit and bit counts differ".into()));
                    }
                    for (j, b) in bits.iter().enumerate() {
                        if bits[..j].contains(b) {
                            return Err(ctx(format!("bit c{b} written twice")));
                        }
                    }
                }
            }
            match step {
                Step::Measure { bits, .. } => {
                    for &b in bits {
                        written[b] = true;
                    }
                }
                Step::Conditional { bit, .. } => {
                    if !written[*bit] {
                        return Err(ctx(format!("bit c{bit} read before it is written")));
                    }
                }
                Step::Gate(_) => {}
            }
        }
        Ok(())
    }

    /// Number of two-qubit gate steps (conditional ones included).
    pub fn two_qubit_gate_count(&self) -> usize {
        self.steps
            .iter()
            .filter(|s| matches!(s, Step::Gate(g) | Step::Conditional { gate: g, .. } if g.arity() == 2))
            .count()
    }

    /// Appends all steps of `other`, which must act on the same register size.
    pub fn extend(&mut self, other: &Circuit) -> &mut Self {
        for s in &other.steps {
            self.push(s.clone());
        }
        self.num_bits = self.num_bits.max(other.num_bits);
        self
    }

    /// Line-oriented text form accepted by [`parse_circuit`].
    pub fn to_text(&self) -> String {
        let mut out = format!("qubits {}\n", self.num_qubits);
        if self.num_bits > 0 {
            out.push_str(&format!("bits {}\n", self.num_bits));
        }
        for s in &self.steps {
            out.push_str(&s.to_string());
            out.push('\n');
        }
        out
    }
}

/// Consuming form of [`Circuit::bell_measure`].
pub fn bell_measure(mut c: Circuit, q1: usize, q2: usize, bits: [usize; 2]) -> Result<Circuit> {
    c.bell_measure(q1, q2, bits)?;
    Ok(c)
}
