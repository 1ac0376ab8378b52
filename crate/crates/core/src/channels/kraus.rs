use num_complex::Complex64;

use crate::qstate::{gates, CMatrix};

/// Completely positive map given by Kraus operators on `num_qubits` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel {
    num_qubits: usize,
    ops: Vec<CMatrix>,
}

const NEGLIGIBLE: f64 = 1e-15;

impl KrausChannel {
    /// Operators with negligible norm are dropped.
    pub fn new(num_qubits: usize, ops: Vec<CMatrix>) -> Self {
        let ops: Vec<CMatrix> = ops.into_iter().filter(|k| k.frobenius_norm() > NEGLIGIBLE).collect();
        debug_assert!(ops.iter().all(|k| k.dim() == 1 << num_qubits));
        Self { num_qubits, ops }
    }

    pub fn identity(num_qubits: usize) -> Self {
        Self::new(num_qubits, vec![CMatrix::identity(1 << num_qubits)])
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn ops(&self) -> &[CMatrix] {
        &self.ops
    }

    /// A single operator proportional to the identity.
    pub fn is_identity(&self) -> bool {
        self.ops.len() == 1 && self.ops[0].max_abs_diff(&CMatrix::identity(1 << self.num_qubits)) < 1e-15
    }

    /// Largest entry of `Σ K†K − I`.
    pub fn completeness_error(&self) -> f64 {
        let dim = 1 << self.num_qubits;
        let mut acc = CMatrix::zeros(dim);
        for k in &self.ops {
            acc = &acc + &(&k.adjoint() * k);
        }
        acc.max_abs_diff(&CMatrix::identity(dim))
    }

    pub fn is_trace_preserving(&self, tol: f64) -> bool {
        self.completeness_error() <= tol
    }

    /// `other ∘ self`: apply `self` first.
    pub fn then(&self, other: &Self) -> Self {
        assert_eq!(self.num_qubits, other.num_qubits);
        let mut ops = Vec::with_capacity(self.ops.len() * other.ops.len());
        for b in &other.ops {
            for a in &self.ops {
                ops.push(b * a);
            }
        }
        Self::new(self.num_qubits, ops)
    }

    /// Entanglement fidelity `Σ |tr K|² / d²`.
    pub fn entanglement_fidelity(&self) -> f64 {
        let d = (1usize << self.num_qubits) as f64;
        self.ops.iter().map(|k| k.trace().norm_sqr()).sum::<f64>() / (d * d)
    }

    /// `1 − (d·F_e + 1)/(d + 1)`.
    pub fn average_gate_infidelity(&self) -> f64 {
        let d = (1usize << self.num_qubits) as f64;
        1.0 - (d * self.entanglement_fidelity() + 1.0) / (d + 1.0)
    }
}

fn diag2(a: f64, b: f64) -> CMatrix {
    CMatrix::diagonal(&[Complex64::new(a, 0.0), Complex64::new(b, 0.0)])
}

/// Energy relaxation with decay probability `gamma`.
pub fn amplitude_damping(gamma: f64) -> KrausChannel {
    let mut k1 = CMatrix::zeros(2);
    k1[(0, 1)] = Complex64::new(gamma.sqrt(), 0.0);
    KrausChannel::new(1, vec![diag2(1.0, (1.0 - gamma).sqrt()), k1])
}

/// Pure dephasing that scales coherences by `sqrt(1 − lambda)`.
pub fn phase_damping(lambda: f64) -> KrausChannel {
    KrausChannel::new(1, vec![diag2(1.0, (1.0 - lambda).sqrt()), diag2(0.0, lambda.sqrt())])
}

/// `1 − exp(−t/T1)`.
pub fn amplitude_damping_probability(duration_us: f64, t1_us: f64) -> f64 {
    1.0 - (-duration_us / t1_us).exp()
}

/// Pure-dephasing rate `max(0, 1/T2 − 1/(2·T1))` in 1/µs.
pub fn pure_dephasing_rate(t1_us: f64, t2_us: f64) -> f64 {
    (1.0 / t2_us - 1.0 / (2.0 * t1_us)).max(0.0)
}

/// Amplitude damping followed by pure dephasing over `duration_us`. Together
/// they decay populations as `exp(−t/T1)` and coherences as `exp(−t/T2)`.
pub fn thermal_relaxation(duration_us: f64, t1_us: f64, t2_us: f64) -> KrausChannel {
    let gamma = amplitude_damping_probability(duration_us, t1_us);
    let rate = pure_dephasing_rate(t1_us, t2_us);
    let lambda = 1.0 - (-2.0 * rate * duration_us).exp();
    amplitude_damping(gamma).then(&phase_damping(lambda))
}

/// Pauli depolarizing channel on `num_qubits` (1 or 2) qubits: with
/// probability `p_total` one of the `d² − 1` non-identity Paulis, chosen
/// uniformly, is applied.
pub fn depolarizing(num_qubits: usize, p_total: f64) -> KrausChannel {
    assert!(num_qubits == 1 || num_qubits == 2, "depolarizing supports 1 or 2 qubits");
    let singles = [gates::identity(), gates::pauli_x(), gates::pauli_y(), gates::pauli_z()];
    let paulis: Vec<CMatrix> = if num_qubits == 1 {
        singles.to_vec()
    } else {
        singles.iter().flat_map(|a| singles.iter().map(move |b| a.kron(b))).collect()
    };
    let d2 = paulis.len() as f64;
    let ops = paulis
        .into_iter()
        .enumerate()
        .map(|(i, p)| {
            let w = if i == 0 { 1.0 - p_total } else { p_total / (d2 - 1.0) };
            p.scale_real(w.sqrt())
        })
        .collect();
    KrausChannel::new(num_qubits, ops)
}

/// Total Pauli-error probability whose average gate infidelity equals
/// `error`: `error · (d + 1)/d`.
pub fn depolarizing_from_gate_error(num_qubits: usize, error: f64) -> f64 {
    let d = (1usize << num_qubits) as f64;
    error * (d + 1.0) / d
}
