use std::collections::BTreeMap;

use num_complex::Complex64;

use super::kraus::KrausChannel;
use super::model::{NoiseModel, StepKind};
use crate::circuit::{sample_distribution, Bitstring, Circuit, Counts, Gate, GateKind, Step};
use crate::error::{Error, Result};
use crate::qstate::{bit_shift, CMatrix, DensityMatrix};

/// Largest register the density-matrix simulator accepts (128×128).
pub const MAX_NOISY_QUBITS: usize = 7;

/// Result of [`run_noisy`].
#[derive(Clone, Debug)]
pub struct NoisyRun {
    /// Quantum state summed over all classical histories, before the final
    /// readout is applied.
    pub density: DensityMatrix,
    /// Distribution of the classical register after readout error.
    pub probabilities: BTreeMap<Bitstring, f64>,
    pub counts: Counts,
}

fn apply_channel(rho: &mut DensityMatrix, ch: &KrausChannel, targets: &[usize]) {
    if ch.is_identity() {
        return;
    }
    let ops = ch.ops();
    if ops.len() == 1 {
        rho.conjugate_in_place(&ops[0], targets);
        return;
    }
    let mut acc = CMatrix::zeros(rho.dim());
    for k in ops {
        let mut r = rho.clone();
        r.conjugate_in_place(k, targets);
        acc = &acc + r.matrix();
    }
    *rho = DensityMatrix::from_matrix_unchecked(acc);
}

/// Applies a gate and its depolarizing error.
fn apply_gate(rho: &mut DensityMatrix, gate: &Gate, nm: &NoiseModel) -> Result<()> {
    rho.conjugate_in_place(&gate.matrix(), gate.targets());
    let t = gate.targets();
    match (gate.kind(), t.len()) {
        (_, 1) => apply_channel(rho, &nm.qubit(t[0])?.gate, t),
        (GateKind::Swap, 2) => {
            // Three CNOTs' worth of error.
            let ch = nm.cnot_channel(t[0], t[1])?;
            for _ in 0..3 {
                apply_channel(rho, ch, t);
            }
        }
        (_, 2) => apply_channel(rho, nm.cnot_channel(t[0], t[1])?, t),
        (_, k) => {
            return Err(Error::InvalidArgument(format!("no noise model for a {k}-qubit gate")));
        }
    }
    Ok(())
}

fn step_kind(gate: &Gate) -> (StepKind, usize) {
    match (gate.kind(), gate.arity()) {
        (GateKind::Swap, _) => (StepKind::Cnot, 3),
        (_, 1) => (StepKind::SingleQubitGate, 1),
        _ => (StepKind::Cnot, 1),
    }
}

fn idle_all(rho: &mut DensityMatrix, nm: &NoiseModel, kind: StepKind, repeat: usize) -> Result<()> {
    for q in 0..rho.num_qubits() {
        let ch = &nm.qubit(q)?.idle[&kind];
        for _ in 0..repeat {
            apply_channel(rho, ch, &[q]);
        }
    }
    Ok(())
}

/// For each measurement step, which `(qubit, bit)` pairs are terminal: no
/// later step touches the qubit, reads the bit or rewrites it.
fn terminal_pairs(c: &Circuit) -> Vec<Vec<bool>> {
    let steps = c.steps();
    steps
        .iter()
        .enumerate()
        .map(|(i, s)| match s {
            Step::Measure { qubits, bits } => qubits
                .iter()
                .zip(bits)
                .map(|(q, b)| {
                    steps[i + 1..].iter().all(|later| {
                        !later.qubits().contains(q)
                            && match later {
                                Step::Measure { bits: lb, .. } => !lb.contains(b),
                                Step::Conditional { bit, .. } => bit != b,
                                Step::Gate(_) => true,
                            }
                    })
                })
                .collect(),
            _ => Vec::new(),
        })
        .collect()
}

/// Zeroes every entry of `rho` whose row or column disagrees with `value` on `qubit`.
fn project(rho: &DensityMatrix, qubit: usize, value: usize) -> DensityMatrix {
    let n = rho.num_qubits();
    let shift = bit_shift(n, qubit);
    let mut m = rho.matrix().clone();
    let dim = m.dim();
    for i in 0..dim {
        for j in 0..dim {
            if (i >> shift) & 1 != value || (j >> shift) & 1 != value {
                m[(i, j)] = Complex64::new(0.0, 0.0);
            }
        }
    }
    DensityMatrix::from_matrix_unchecked(m)
}

/// Runs `c` from |0…0⟩ under `nm`. See [`run_noisy_from`].
pub fn run_noisy(c: &Circuit, nm: &NoiseModel, shots: u64, seed: u64) -> Result<NoisyRun> {
    let n = c.num_qubits();
    if n == 0 || n > MAX_NOISY_QUBITS {
        return Err(Error::InvalidArgument(format!("noisy simulation needs 1..={MAX_NOISY_QUBITS} qubits, got {n}")));
    }
    let mut m = CMatrix::zeros(1 << n);
    m[(0, 0)] = Complex64::new(1.0, 0.0);
    run_noisy_from(c, nm, &DensityMatrix::from_matrix_unchecked(m), shots, seed)
}

/// Density-matrix execution under `nm`.
///
/// Every step lasts one gate (or readout) duration, during which all qubits
/// relax. Gates are followed by their depolarizing error. Mid-circuit
/// measurements project the state and record each bit through the qubit's
/// readout confusion, so later classically controlled gates see the
/// misread value. Terminal measurements do not project: their bits are drawn
/// from the final diagonal mixed through the confusion matrices, and the
/// returned density is the state just before that readout.
pub fn run_noisy_from(
    c: &Circuit,
    nm: &NoiseModel,
    initial: &DensityMatrix,
    shots: u64,
    seed: u64,
) -> Result<NoisyRun> {
    c.validate()?;
    let n = c.num_qubits();
    if n == 0 || n > MAX_NOISY_QUBITS {
        return Err(Error::InvalidArgument(format!("noisy simulation needs 1..={MAX_NOISY_QUBITS} qubits, got {n}")));
    }
    if initial.num_qubits() != n {
        return Err(Error::DimensionMismatch { expected: n, found: initial.num_qubits() });
    }
    for q in 0..n {
        nm.qubit(q)?;
    }

    let terminal = terminal_pairs(c);
    let mut deferred: Vec<(usize, usize)> = Vec::new();
    // Unnormalized state per recorded classical register; trace = probability.
    let mut branches: BTreeMap<Vec<bool>, DensityMatrix> = BTreeMap::new();
    branches.insert(vec![false; c.num_bits()], initial.clone());

    for (step, term) in c.steps().iter().zip(&terminal) {
        match step {
            Step::Gate(g) => {
                let (kind, repeat) = step_kind(g);
                for rho in branches.values_mut() {
                    apply_gate(rho, g, nm)?;
                    idle_all(rho, nm, kind, repeat)?;
                }
            }
            Step::Conditional { gate, bit, value } => {
                let (kind, repeat) = step_kind(gate);
                for (reg, rho) in branches.iter_mut() {
                    if reg[*bit] == *value {
                        apply_gate(rho, gate, nm)?;
                    }
                    idle_all(rho, nm, kind, repeat)?;
                }
            }
            Step::Measure { qubits, bits } => {
                for rho in branches.values_mut() {
                    idle_all(rho, nm, StepKind::Readout, 1)?;
                }
                for ((&q, &b), &is_terminal) in qubits.iter().zip(bits).zip(term) {
                    if is_terminal {
                        deferred.push((q, b));
                        continue;
                    }
                    let conf = nm.qubit(q)?.confusion;
                    let mut next: BTreeMap<Vec<bool>, DensityMatrix> = BTreeMap::new();
                    for (reg, rho) in &branches {
                        for truth in 0..2 {
                            let projected = project(rho, q, truth);
                            if projected.trace() <= 1e-24 {
                                continue;
                            }
                            for (read, row) in conf.iter().enumerate() {
                                let w = row[truth];
                                if w == 0.0 {
                                    continue;
                                }
                                let mut r = reg.clone();
                                r[b] = read == 1;
                                let part = projected.matrix().scale_real(w);
                                next.entry(r)
                                    .and_modify(|acc| *acc = DensityMatrix::from_matrix_unchecked(acc.matrix() + &part))
                                    .or_insert_with(|| DensityMatrix::from_matrix_unchecked(part.clone()));
                            }
                        }
                    }
                    branches = next;
                }
            }
        }
    }

    let mut total = CMatrix::zeros(1 << n);
    let mut probabilities: BTreeMap<Bitstring, f64> = BTreeMap::new();
    for (reg, rho) in &branches {
        total = &total + rho.matrix();
        for (bits, p) in readout(rho, reg, &deferred, nm)? {
            *probabilities.entry(bits).or_insert(0.0) += p;
        }
    }
    let tr = total.trace().re;
    if (tr - 1.0).abs() > 1e-8 {
        return Err(Error::NotNormalized(tr));
    }
    probabilities.retain(|_, p| *p > 0.0);
    let counts = sample_distribution(&probabilities, shots, seed)?;
    Ok(NoisyRun { density: DensityMatrix::from_matrix_unchecked(total), probabilities, counts })
}

/// Distribution over full registers for one branch after terminal readout.
fn readout(
    rho: &DensityMatrix,
    reg: &[bool],
    deferred: &[(usize, usize)],
    nm: &NoiseModel,
) -> Result<Vec<(Bitstring, f64)>> {
    let n = rho.num_qubits();
    let k = deferred.len();
    let diag = rho.diagonal();
    // True pattern distribution over the deferred qubits (first pair = MSB).
    let mut dist = vec![0.0; 1 << k];
    for (idx, p) in diag.iter().enumerate() {
        let pattern = deferred.iter().fold(0usize, |acc, &(q, _)| (acc << 1) | ((idx >> bit_shift(n, q)) & 1));
        dist[pattern] += p;
    }
    for (j, &(q, _)) in deferred.iter().enumerate() {
        let conf = nm.qubit(q)?.confusion;
        let shift = k - 1 - j;
        let mut mixed = vec![0.0; 1 << k];
        for (pattern, &p) in dist.iter().enumerate() {
            let truth = (pattern >> shift) & 1;
            for read in 0..2 {
                mixed[(pattern & !(1 << shift)) | (read << shift)] += conf[read][truth] * p;
            }
        }
        dist = mixed;
    }
    Ok(dist
        .into_iter()
        .enumerate()
        .filter(|(_, p)| *p > 0.0)
        .map(|(pattern, p)| {
            let mut bits = reg.to_vec();
            for (j, &(_, b)) in deferred.iter().enumerate() {
                bits[b] = (pattern >> (k - 1 - j)) & 1 == 1;
            }
            (Bitstring::from_bits(bits), p)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{build_noise_model, casablanca_calibration, CalibrationRecord, DurationConfig};
    use crate::circuit::run_exact;
    use crate::protocols::{experiment_circuit, teleport_circuit};
    use crate::qstate::{eigh, gates, StateVector};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    // Two disjoint input–sender–receiver paths: 0–1–2 and 4–5–6.
    const LAYOUT: [usize; 6] = [0, 4, 1, 2, 5, 6];

    fn table_model() -> NoiseModel {
        build_noise_model(&casablanca_calibration(), &DurationConfig::default()).unwrap()
    }

    fn quiet_model(n: usize) -> NoiseModel {
        let records: Vec<CalibrationRecord> = (0..n)
            .map(|q| CalibrationRecord {
                qubit: q,
                t1_us: 1e12,
                t2_us: 1e12,
                frequency_ghz: 5.0,
                readout_error: 0.0,
                pauli_x_error: 0.0,
                cnot_errors: (0..n).filter(|&o| o != q).map(|o| (o, 0.0)).collect(),
            })
            .collect();
        let d = DurationConfig { single_qubit_gate_ns: 1e-9, cnot_ns: 1e-9, readout_ns: 1e-9 };
        build_noise_model(&records, &d).unwrap()
    }

    fn readout_marginal(run: &NoisyRun, positions: &[usize]) -> BTreeMap<Bitstring, f64> {
        let mut out = BTreeMap::new();
        for (k, p) in &run.probabilities {
            *out.entry(k.select(positions)).or_insert(0.0) += p;
        }
        out
    }

    #[test]
    fn ideal_model_gives_uniform_histogram() {
        let run = run_noisy(&experiment_circuit(true), &NoiseModel::ideal(6), 8192, 1).unwrap();
        let m = readout_marginal(&run, &[4, 5]);
        assert_eq!(m.len(), 4);
        for p in m.values() {
            assert!((p - 0.25).abs() < 1e-12);
        }
        assert_eq!(run.counts.values().sum::<u64>(), 8192);
        assert!((run.density.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn table_model_skews_histogram() {
        let nm = table_model().remapped(&LAYOUT).unwrap();
        let run = run_noisy(&experiment_circuit(true), &nm, 8192, 7).unwrap();
        assert!((run.density.trace() - 1.0).abs() < 1e-8);
        let m = readout_marginal(&run, &[4, 5]);
        let probs: Vec<f64> = m.values().copied().collect();
        assert_eq!(probs.len(), 4);
        assert!(probs.iter().all(|&p| p > 0.15 && p < 0.35), "{probs:?}");
        let spread = probs.iter().cloned().fold(f64::MIN, f64::max) - probs.iter().cloned().fold(f64::MAX, f64::min);
        assert!(spread > 0.005, "{probs:?}");
    }

    #[test]
    fn x_then_readout_closed_form() {
        let nm = table_model();
        let mut c = Circuit::new(1);
        c.x(0).measure(&[0], &[0]);
        let run = run_noisy(&c, &nm.remapped(&[0]).unwrap(), 100, 0).unwrap();
        // Independent oracle: depolarizing flips |1⟩ back with probability
        // (2/3)·p; amplitude damping then decays the excited population over
        // the gate and readout windows; readout flips with probability e.
        let (t1, x_err, e): (f64, f64, f64) = (97.07, 2.73e-4, 3.52e-2);
        let p = x_err * 1.5;
        let p1 = (1.0 - 2.0 / 3.0 * p) * (-0.0355 / t1).exp() * (-1.5 / t1).exp();
        let read0 = e * p1 + (1.0 - e) * (1.0 - p1);
        let got = run.probabilities[&"0".parse::<Bitstring>().unwrap()];
        assert!((got - read0).abs() < 1e-12, "{got} vs {read0}");
        assert!((got - 0.0352).abs() < 0.03);
    }

    fn assert_matches_exact(c: &Circuit) {
        let n = c.num_qubits();
        let run = run_noisy(c, &quiet_model(n), 10, 3).unwrap();
        let exact = run_exact(c).unwrap().outcome_probabilities();
        let keys: std::collections::BTreeSet<_> = exact.keys().chain(run.probabilities.keys()).collect();
        for k in keys {
            let a = exact.get(k).copied().unwrap_or(0.0);
            let b = run.probabilities.get(k).copied().unwrap_or(0.0);
            assert!((a - b).abs() < 1e-9, "{k}: {a} vs {b}");
        }
    }

    #[test]
    fn zero_noise_limit_matches_exact() {
        assert_matches_exact(&experiment_circuit(true));
        let mut c = teleport_circuit(1, true);
        c.measure(&[2], &[2]);
        assert_matches_exact(&c);
        let mut c = Circuit::new(3);
        c.h(0).cnot(0, 1).swap(1, 2).measure(&[0, 1, 2], &[0, 1, 2]);
        assert_matches_exact(&c);
    }

    #[test]
    fn missing_calibration_is_reported() {
        let recs: Vec<_> = casablanca_calibration().into_iter().filter(|r| r.qubit != 2).collect();
        let nm = build_noise_model(&recs, &DurationConfig::default()).unwrap();
        let mut c = Circuit::new(3);
        c.h(0);
        assert_eq!(run_noisy(&c, &nm, 1, 0).unwrap_err(), Error::MissingCalibration(2));
    }

    #[test]
    fn non_edge_cnot_is_rejected() {
        let mut c = Circuit::new(3);
        c.cnot(0, 2);
        assert_eq!(
            run_noisy(&c, &table_model().remapped(&[0, 1, 2]).unwrap(), 1, 0).unwrap_err(),
            Error::MissingCnotCalibration(0, 2)
        );
    }

    fn random_circuit(seed: u64) -> Circuit {
        // Chain 0–1–2 maps onto physical qubits 0, 1, 2.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut c = Circuit::new(3);
        for _ in 0..12 {
            let q = rng.gen_range(0..3);
            match rng.gen_range(0..5) {
                0 => c.h(q),
                1 => c.x(q),
                2 => c.gate(Gate::s(q)),
                3 => c.cnot(1, if q == 1 { 0 } else { q }),
                _ => c.measure(&[q], &[q]),
            };
        }
        c
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn noisy_density_stays_psd(seed in any::<u64>()) {
            let nm = table_model().remapped(&[0, 1, 2]).unwrap();
            let run = run_noisy(&random_circuit(seed), &nm, 16, seed).unwrap();
            prop_assert!((run.density.trace() - 1.0).abs() < 1e-8);
            let eig = eigh(run.density.matrix()).unwrap();
            prop_assert!(eig.values[0] >= -1e-8, "{:?}", eig.values);
        }
    }

    fn bob_fidelity(nm: &NoiseModel, a: &StateVector, b: &StateVector) -> f64 {
        let mut c = Circuit::new(6);
        let prep = |s: &StateVector, q| {
            Gate::custom(gates::state_prep(s.amplitudes()[0], s.amplitudes()[1]), vec![q]).unwrap()
        };
        c.gate(prep(a, 0)).gate(prep(b, 1));
        c.extend(&teleport_circuit(2, true));
        let run = run_noisy(&c, nm, 1, 0).unwrap();
        let bob = run.density.partial_trace(&[3, 5]).unwrap();
        let psi = a.tensor(b);
        let amps = psi.amplitudes();
        let mut f = Complex64::new(0.0, 0.0);
        for i in 0..4 {
            for j in 0..4 {
                f += amps[i].conj() * bob.matrix()[(i, j)] * amps[j];
            }
        }
        f.re
    }

    #[test]
    fn noise_never_raises_fidelity() {
        let noisy = table_model().remapped(&LAYOUT).unwrap();
        let ideal = NoiseModel::ideal(6);
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        for _ in 0..20 {
            let mut rand_qubit = || {
                let v: Vec<Complex64> =
                    (0..2).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
                StateVector::normalized(v).unwrap()
            };
            let (a, b) = (rand_qubit(), rand_qubit());
            let f_ideal = bob_fidelity(&ideal, &a, &b);
            let f_noisy = bob_fidelity(&noisy, &a, &b);
            assert!((f_ideal - 1.0).abs() < 1e-10);
            assert!(f_noisy < f_ideal, "{f_noisy} ≥ {f_ideal}");
        }
    }
}
