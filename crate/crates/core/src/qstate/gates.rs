//! Standard gate matrices.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use super::matrix::CMatrix;

const fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn m2(a: Complex64, b: Complex64, cc: Complex64, d: Complex64) -> CMatrix {
    CMatrix::from_rows(vec![a, b, cc, d]).expect("2x2")
}

pub fn identity() -> CMatrix {
    CMatrix::identity(2)
}

pub fn hadamard() -> CMatrix {
    let h = FRAC_1_SQRT_2;
    m2(c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0))
}

pub fn pauli_x() -> CMatrix {
    m2(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0))
}

pub fn pauli_y() -> CMatrix {
    m2(c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0))
}

pub fn pauli_z() -> CMatrix {
    m2(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0))
}

pub fn phase_s() -> CMatrix {
    m2(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0))
}

pub fn phase_s_dagger() -> CMatrix {
    m2(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -1.0))
}

/// CNOT with the first target as control.
pub fn cnot() -> CMatrix {
    let mut m = CMatrix::zeros(4);
    m[(0, 0)] = c(1.0, 0.0);
    m[(1, 1)] = c(1.0, 0.0);
    m[(2, 3)] = c(1.0, 0.0);
    m[(3, 2)] = c(1.0, 0.0);
    m
}

pub fn swap() -> CMatrix {
    let mut m = CMatrix::zeros(4);
    m[(0, 0)] = c(1.0, 0.0);
    m[(1, 2)] = c(1.0, 0.0);
    m[(2, 1)] = c(1.0, 0.0);
    m[(3, 3)] = c(1.0, 0.0);
    m
}

/// Single-qubit unitary whose first column is `(alpha, beta)`, i.e. it maps
/// |0⟩ to `alpha|0⟩ + beta|1⟩`.
pub fn state_prep(alpha: Complex64, beta: Complex64) -> CMatrix {
    m2(alpha, -beta.conj(), beta, alpha.conj())
}

/// Unitary whose first column is the normalized vector `v` (Householder
/// reflection, phase-corrected).
pub fn state_prep_general(v: &[Complex64]) -> CMatrix {
    let n = v.len();
    // Reflect e0 onto v up to a phase: H = I - 2 w w† with w ∝ e^{iφ}e0 - v.
    let phase = if v[0].norm() > 1e-15 { v[0] / v[0].norm() } else { c(1.0, 0.0) };
    let mut w: Vec<Complex64> = v.iter().map(|x| -x).collect();
    w[0] += phase;
    let wn: f64 = w.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let mut h = CMatrix::identity(n);
    if wn > 1e-14 {
        for x in w.iter_mut() {
            *x /= wn;
        }
        h = &h - &CMatrix::outer(&w, &w).scale_real(2.0);
    }
    // H e0 = e^{-iφ} v; absorb the phase so column 0 equals v exactly.
    h.scale(phase)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_standard_gates_are_unitary() {
        for g in [hadamard(), pauli_x(), pauli_y(), pauli_z(), phase_s(), phase_s_dagger(), cnot(), swap()] {
            assert!(g.is_unitary(1e-12));
        }
    }

    #[test]
    fn general_prep_first_column() {
        let v = vec![c(0.5, 0.0), c(0.0, 0.5), c(-0.5, 0.0), c(0.5, 0.0)];
        let u = state_prep_general(&v);
        assert!(u.is_unitary(1e-12));
        for (i, x) in v.iter().enumerate() {
            assert!((u[(i, 0)] - x).norm() < 1e-12);
        }
        let e0 = vec![c(0.0, 0.0), c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0)];
        let u = state_prep_general(&e0);
        assert!(u.is_unitary(1e-12));
        assert!((u[(1, 0)] - c(0.0, 1.0)).norm() < 1e-12);
    }
}
