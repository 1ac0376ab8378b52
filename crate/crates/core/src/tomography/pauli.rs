use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::channels::{run_noisy_from, NoiseModel};
use crate::circuit::{Circuit, Counts, Gate};
use crate::error::{Error, Result};
use crate::qstate::{eigh, gates, CMatrix, DensityMatrix};

/// Tolerance on `|⟨P⟩|` above 1 before an expectation is rejected.
const EXPECTATION_SLACK: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Measurement basis per qubit, e.g. `XZ`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliSetting {
    axes: Vec<Axis>,
}

impl PauliSetting {
    pub fn new(axes: Vec<Axis>) -> Self {
        Self { axes }
    }

    /// All `3ⁿ` settings in lexicographic order.
    pub fn all(n: usize) -> Vec<Self> {
        let mut out = vec![Self { axes: Vec::new() }];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|s| {
                    [Axis::X, Axis::Y, Axis::Z].map(|a| {
                        let mut axes = s.axes.clone();
                        axes.push(a);
                        Self { axes }
                    })
                })
                .collect();
        }
        out
    }

    pub fn num_qubits(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    /// Basis change onto Z (X: H; Y: S† then H) followed by measuring qubit
    /// `j` into bit `j`.
    pub fn rotation_circuit(&self) -> Circuit {
        let n = self.num_qubits();
        let mut c = Circuit::new(n);
        for (q, a) in self.axes.iter().enumerate() {
            match a {
                Axis::X => {
                    c.h(q);
                }
                Axis::Y => {
                    c.gate(Gate::sdg(q)).h(q);
                }
                Axis::Z => {}
            }
        }
        let all: Vec<usize> = (0..n).collect();
        c.measure(&all, &all);
        c
    }

    /// Whether this setting measures Pauli string `p` (ignoring identities).
    fn covers(&self, p: &[u8]) -> bool {
        self.axes
            .iter()
            .zip(p)
            .all(|(a, &c)| matches!((a, c), (_, b'I') | (Axis::X, b'X') | (Axis::Y, b'Y') | (Axis::Z, b'Z')))
    }
}

impl fmt::Display for PauliSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in &self.axes {
            write!(f, "{a:?}")?;
        }
        Ok(())
    }
}

impl FromStr for PauliSetting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                'X' => Ok(Axis::X),
                'Y' => Ok(Axis::Y),
                'Z' => Ok(Axis::Z),
                other => Err(Error::InvalidArgument(format!("bad axis {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }
}

impl Serialize for PauliSetting {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliSetting {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// The `4ⁿ − 1` non-identity Pauli strings over `IXYZ`, lexicographic.
pub fn pauli_strings(n: usize) -> Vec<String> {
    let mut out = vec![String::new()];
    for _ in 0..n {
        out = out.into_iter().flat_map(|s| ['I', 'X', 'Y', 'Z'].map(|c| format!("{s}{c}"))).collect();
    }
    out.retain(|s| s.chars().any(|c| c != 'I'));
    out
}

/// Tensor product of single-qubit Paulis, first character on qubit 0.
pub fn pauli_matrix(p: &str) -> Result<CMatrix> {
    let mut m = CMatrix::identity(1);
    for c in p.chars() {
        let f = match c {
            'I' => gates::identity(),
            'X' => gates::pauli_x(),
            'Y' => gates::pauli_y(),
            'Z' => gates::pauli_z(),
            other => return Err(Error::InvalidArgument(format!("bad Pauli {other:?}"))),
        };
        m = m.kron(&f);
    }
    Ok(m)
}

/// `Tr(ρP)` for every non-identity Pauli string.
pub fn exact_expectations(rho: &DensityMatrix) -> BTreeMap<String, f64> {
    pauli_strings(rho.num_qubits())
        .into_iter()
        .map(|p| {
            let m = pauli_matrix(&p).expect("valid string");
            let v = (&m * rho.matrix()).trace().re;
            (p, v)
        })
        .collect()
}

/// Estimates every Pauli expectation from per-setting counts. A string is
/// averaged over all settings that measure it; its value per shot is the
/// parity of the bits on its non-identity positions.
pub fn expectations_from_counts(counts: &BTreeMap<PauliSetting, Counts>) -> Result<BTreeMap<String, f64>> {
    let n = counts.keys().next().map(PauliSetting::num_qubits).ok_or(Error::MissingExpectation("any".into()))?;
    let mut out = BTreeMap::new();
    for p in pauli_strings(n) {
        let bytes = p.as_bytes();
        let (mut sum, mut total) = (0i64, 0u64);
        for (setting, c) in counts.iter().filter(|(s, _)| s.covers(bytes)) {
            if setting.num_qubits() != n {
                return Err(Error::DimensionMismatch { expected: n, found: setting.num_qubits() });
            }
            for (bits, &k) in c {
                let parity = bytes.iter().enumerate().filter(|(j, &b)| b != b'I' && bits.get(*j)).count() % 2;
                sum += if parity == 0 { k as i64 } else { -(k as i64) };
                total += k;
            }
        }
        if total == 0 {
            return Err(Error::MissingExpectation(p));
        }
        out.insert(p, sum as f64 / total as f64);
    }
    Ok(out)
}

/// Linear inversion `ρ = 2⁻ⁿ (I + Σ ⟨P⟩ P)`, projected onto the physical
/// states by clipping negative eigenvalues and renormalizing.
pub fn reconstruct(expectations: &BTreeMap<String, f64>) -> Result<DensityMatrix> {
    let n = expectations.keys().next().map(String::len).ok_or(Error::MissingExpectation("any".into()))?;
    if n == 0 {
        return Err(Error::InvalidArgument("empty Pauli string".into()));
    }
    let dim = 1usize << n;
    let mut m = CMatrix::identity(dim);
    for p in pauli_strings(n) {
        let v = *expectations.get(&p).ok_or_else(|| Error::MissingExpectation(p.clone()))?;
        if v.is_nan() || v.abs() > 1.0 + EXPECTATION_SLACK {
            return Err(Error::ExpectationOutOfRange(p, v));
        }
        m = &m + &pauli_matrix(&p)?.scale_real(v);
    }
    let m = m.scale_real(1.0 / dim as f64);
    let eig = eigh(&m)?;
    let kept: f64 = eig.values.iter().map(|v| v.max(0.0)).sum();
    let projected = eig.map(|v| v.max(0.0) / kept);
    DensityMatrix::new(projected)
}

/// Seed for setting `index` of a run seeded with `seed`.
fn setting_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_add((index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Measures `rho` in every Pauli setting with `shots` shots each. Rotations
/// and readout suffer `noise` when given (its qubits are `rho`'s qubits).
/// Settings run in parallel; each has its own seed, so the result does not
/// depend on thread count.
pub fn simulate_settings(
    rho: &DensityMatrix,
    noise: Option<&NoiseModel>,
    shots: u64,
    seed: u64,
) -> Result<BTreeMap<PauliSetting, Counts>> {
    let n = rho.num_qubits();
    let ideal;
    let nm = match noise {
        Some(nm) => nm,
        None => {
            ideal = NoiseModel::ideal(n);
            &ideal
        }
    };
    PauliSetting::all(n)
        .into_par_iter()
        .enumerate()
        .map(|(i, s)| {
            let run = run_noisy_from(&s.rotation_circuit(), nm, rho, shots, setting_seed(seed, i))?;
            Ok((s, run.counts))
        })
        .collect()
}

/// Full sampled tomography: settings, expectations, reconstruction.
pub fn tomography(rho: &DensityMatrix, noise: Option<&NoiseModel>, shots: u64, seed: u64) -> Result<DensityMatrix> {
    reconstruct(&expectations_from_counts(&simulate_settings(rho, noise, shots, seed)?)?)
}

/// Real and imaginary parts of every entry, row-major.
pub fn matrix_parts(rho: &DensityMatrix) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let d = rho.dim();
    let part = |f: fn(&Complex64) -> f64| (0..d).map(|i| (0..d).map(|j| f(&rho.matrix()[(i, j)])).collect()).collect();
    (part(|c| c.re), part(|c| c.im))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::StateVector;

    fn plus_plus() -> StateVector {
        StateVector::plus().tensor(&StateVector::plus())
    }

    #[test]
    fn setting_enumeration() {
        let all = PauliSetting::all(2);
        assert_eq!(all.len(), 9);
        assert_eq!(all[0].to_string(), "XX");
        assert_eq!(all[8].to_string(), "ZZ");
        assert_eq!("YZ".parse::<PauliSetting>().unwrap(), all[5]);
        assert_eq!(pauli_strings(2).len(), 15);
    }

    #[test]
    fn zero_zero_from_exact() {
        let rho = StateVector::zero(2).to_density();
        let e = exact_expectations(&rho);
        assert_eq!(e["ZZ"], 1.0);
        assert_eq!(e["XI"], 0.0);
        let r = reconstruct(&e).unwrap();
        assert!(r.matrix().max_abs_diff(rho.matrix()) < 1e-12);
    }

    #[test]
    fn plus_plus_from_analytic_expectations() {
        // X-only strings are +1; anything containing Y or Z averages to 0.
        let e: BTreeMap<String, f64> = pauli_strings(2)
            .into_iter()
            .map(|p| {
                let v = if p.chars().all(|c| c == 'X' || c == 'I') { 1.0 } else { 0.0 };
                (p, v)
            })
            .collect();
        let r = reconstruct(&e).unwrap();
        assert!(r.matrix().max_abs_diff(plus_plus().to_density().matrix()) < 1e-10);
    }

    #[test]
    fn missing_and_out_of_range() {
        let mut e = exact_expectations(&StateVector::zero(2).to_density());
        e.remove("XY");
        assert_eq!(reconstruct(&e).unwrap_err(), Error::MissingExpectation("XY".into()));
        let mut e = exact_expectations(&StateVector::zero(2).to_density());
        e.insert("ZZ".into(), 1.1);
        assert!(matches!(reconstruct(&e), Err(Error::ExpectationOutOfRange(_, _))));
    }

    #[test]
    fn y_basis_rotation_sends_plus_i_to_zero() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus_i = StateVector::new(vec![Complex64::new(h, 0.0), Complex64::new(0.0, h)]).unwrap();
        let counts = simulate_settings(&plus_i.to_density(), None, 256, 1).unwrap();
        let y = &counts[&"Y".parse().unwrap()];
        assert_eq!(y.len(), 1);
        assert_eq!(y[&"0".parse().unwrap()], 256);
    }

    #[test]
    fn sampled_plus_plus_is_close() {
        let ideal = plus_plus().to_density();
        let r = tomography(&ideal, None, 8192, 11).unwrap();
        assert!(r.trace_distance(&ideal).unwrap() < 0.05);
    }

    #[test]
    fn sampling_is_deterministic() {
        let rho = plus_plus().to_density();
        let a = simulate_settings(&rho, None, 1000, 5).unwrap();
        let b = simulate_settings(&rho, None, 1000, 5).unwrap();
        assert_eq!(a, b);
    }
}
