use std::collections::BTreeMap;

use num_complex::Complex64;

use super::{Bitstring, Circuit, Step};
use crate::error::{Error, Result};
use crate::qstate::{bit_shift, StateVector, MAX_QUBITS};

/// Branches whose weight drops below this are discarded as numerically impossible.
const PRUNE_PROBABILITY: f64 = 1e-24;

/// One measurement history: the classical register, its probability and the
/// normalized post-measurement state.
#[derive(Clone, Debug)]
pub struct Branch {
    pub bits: Bitstring,
    pub probability: f64,
    pub state: StateVector,
}

/// Every measurement history of a circuit, sorted lexicographically by bits.
#[derive(Clone, Debug)]
pub struct BranchDistribution {
    pub num_bits: usize,
    pub entries: Vec<Branch>,
}

impl BranchDistribution {
    /// Probability of each full classical outcome (merging identical registers).
    pub fn outcome_probabilities(&self) -> BTreeMap<Bitstring, f64> {
        let mut out = BTreeMap::new();
        for b in &self.entries {
            *out.entry(b.bits.clone()).or_insert(0.0) += b.probability;
        }
        out
    }

    /// Outcome probabilities restricted to the classical bits in `positions`.
    pub fn marginal_probabilities(&self, positions: &[usize]) -> BTreeMap<Bitstring, f64> {
        let mut out = BTreeMap::new();
        for b in &self.entries {
            *out.entry(b.bits.select(positions)).or_insert(0.0) += b.probability;
        }
        out
    }

    pub fn total_probability(&self) -> f64 {
        self.entries.iter().map(|b| b.probability).sum()
    }
}

struct Partial {
    bits: Vec<bool>,
    // Unnormalized; its squared norm is the branch probability.
    amps: Vec<Complex64>,
}

/// Runs `c` from |0…0⟩. See [`run_exact_from`].
pub fn run_exact(c: &Circuit) -> Result<BranchDistribution> {
    run_exact_from(c, &StateVector::zero(c.num_qubits().max(1)))
}

/// Exact execution from `initial`. Each measurement forks one branch per
/// outcome of nonzero probability; classically controlled gates act per
/// branch.
pub fn run_exact_from(c: &Circuit, initial: &StateVector) -> Result<BranchDistribution> {
    c.validate()?;
    let n = c.num_qubits();
    if n > MAX_QUBITS {
        return Err(Error::MalformedCircuit(format!("{n} qubits exceeds the limit of {MAX_QUBITS}")));
    }
    if initial.num_qubits() != n {
        return Err(Error::DimensionMismatch { expected: n, found: initial.num_qubits() });
    }
    let mut branches = vec![Partial { bits: vec![false; c.num_bits()], amps: initial.amplitudes().to_vec() }];
    for step in c.steps() {
        match step {
            Step::Gate(g) => {
                let m = g.matrix();
                for b in &mut branches {
                    crate::qstate::apply_matrix_in_place(&mut b.amps, n, &m, g.targets());
                }
            }
            Step::Conditional { gate, bit, value } => {
                let m = gate.matrix();
                for b in branches.iter_mut().filter(|b| b.bits[*bit] == *value) {
                    crate::qstate::apply_matrix_in_place(&mut b.amps, n, &m, gate.targets());
                }
            }
            Step::Measure { qubits, bits } => {
                let k = qubits.len();
                let mut next = Vec::with_capacity(branches.len() << k);
                for b in branches {
                    for outcome in 0..(1usize << k) {
                        let mut amps = b.amps.clone();
                        let mut weight = 0.0;
                        for (idx, a) in amps.iter_mut().enumerate() {
                            let consistent = qubits
                                .iter()
                                .enumerate()
                                .all(|(j, &q)| ((idx >> bit_shift(n, q)) & 1) == ((outcome >> (k - 1 - j)) & 1));
                            if consistent {
                                weight += a.norm_sqr();
                            } else {
                                *a = Complex64::new(0.0, 0.0);
                            }
                        }
                        if weight <= PRUNE_PROBABILITY {
                            continue;
                        }
                        let mut reg = b.bits.clone();
                        for (j, &cb) in bits.iter().enumerate() {
                            reg[cb] = (outcome >> (k - 1 - j)) & 1 == 1;
                        }
                        next.push(Partial { bits: reg, amps });
                    }
                }
                branches = next;
            }
        }
    }

    let mut entries: Vec<Branch> = branches
        .into_iter()
        .map(|p| {
            let probability: f64 = p.amps.iter().map(|a| a.norm_sqr()).sum();
            let scale = probability.sqrt();
            let amps = p.amps.into_iter().map(|a| a / scale).collect();
            Branch { bits: Bitstring::from_bits(p.bits), probability, state: StateVector::from_raw(n, amps) }
        })
        .collect();
    entries.sort_by(|a, b| a.bits.cmp(&b.bits));
    Ok(BranchDistribution { num_bits: c.num_bits(), entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{bell_measure, Gate};
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn h_then_measure_forks_evenly() {
        let mut c = Circuit::new(1);
        c.h(0).measure(&[0], &[0]);
        let d = run_exact(&c).unwrap();
        assert_eq!(d.entries.len(), 2);
        assert_eq!(d.entries[0].bits.to_string(), "0");
        assert!((d.entries[0].probability - 0.5).abs() < 1e-15);
        assert!((d.entries[1].probability - 0.5).abs() < 1e-15);
    }

    #[test]
    fn bell_prep_single_branch() {
        let mut c = Circuit::new(2);
        c.h(0).cnot(0, 1);
        let d = run_exact(&c).unwrap();
        assert_eq!(d.entries.len(), 1);
        let phi = StateVector::from_real(&[FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2]).unwrap();
        assert!(d.entries[0].state.overlap(&phi).unwrap() > 1.0 - 1e-15);
    }

    fn bell_outcomes(initial: StateVector) -> BTreeMap<Bitstring, f64> {
        let c = bell_measure(Circuit::new(2), 0, 1, [0, 1]).unwrap();
        run_exact_from(&c, &initial).unwrap().outcome_probabilities()
    }

    #[test]
    fn bell_measure_identifies_phi_plus() {
        let phi = StateVector::from_real(&[FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2]).unwrap();
        let p = bell_outcomes(phi);
        assert_eq!(p.len(), 1);
        assert!((p[&"00".parse().unwrap()] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bell_measure_identifies_psi_minus() {
        let psi = StateVector::from_real(&[0.0, FRAC_1_SQRT_2, -FRAC_1_SQRT_2, 0.0]).unwrap();
        let p = bell_outcomes(psi);
        assert_eq!(p.len(), 1);
        assert!((p[&"11".parse().unwrap()] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bell_measure_on_product_zero() {
        let p = bell_outcomes(StateVector::zero(2));
        assert_eq!(p.len(), 2);
        assert!((p[&"00".parse().unwrap()] - 0.5).abs() < 1e-12);
        assert!((p[&"10".parse().unwrap()] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn conditional_gate_applies_per_branch() {
        let mut c = Circuit::new(2);
        c.h(0).measure(&[0], &[0]).conditional(Gate::x(1), 0);
        let d = run_exact(&c).unwrap();
        for b in &d.entries {
            let expect = if b.bits.get(0) { 3 } else { 0 };
            assert!(b.state.overlap(&StateVector::basis(2, expect)).unwrap() > 1.0 - 1e-15);
        }
    }

    #[test]
    fn repeated_measure_is_idempotent() {
        let mut once = Circuit::new(2);
        once.h(0).cnot(0, 1).h(1).measure(&[0, 1], &[0, 1]);
        let mut twice = once.clone();
        twice.measure(&[0, 1], &[0, 1]);
        let a = run_exact(&once).unwrap().outcome_probabilities();
        let b = run_exact(&twice).unwrap().outcome_probabilities();
        assert_eq!(a.len(), b.len());
        for (k, v) in &a {
            assert!((v - b[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn initial_dimension_checked() {
        let c = Circuit::new(2);
        assert!(run_exact_from(&c, &StateVector::zero(3)).is_err());
    }
}
