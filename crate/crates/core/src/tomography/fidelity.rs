use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qstate::{eigh, hermitian_sqrt, DensityMatrix, StateVector};

/// Best average fidelity of teleporting an unknown qubit without entanglement.
pub const CLASSICAL_LIMIT: f64 = 2.0 / 3.0;

// Eigenvalues of √σ ρ √σ below this are rounding noise; their square roots
// would otherwise add ~1e-8 to the fidelity of rank-deficient states.
const EIGEN_FLOOR: f64 = 1e-13;

/// Uhlmann fidelity `F(σ, ρ) = (Tr √(√σ ρ √σ))²`, clamped to `[0, 1]`.
pub fn fidelity(sigma: &DensityMatrix, rho: &DensityMatrix) -> Result<f64> {
    if sigma.dim() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: sigma.dim(), found: rho.dim() });
    }
    let s = hermitian_sqrt(sigma.matrix())?;
    let m = &(&s * rho.matrix()) * &s;
    let m = (&m + &m.adjoint()).scale_real(0.5);
    let root_sum: f64 = eigh(&m)?.values.iter().filter(|&&v| v > EIGEN_FLOOR).map(|v| v.sqrt()).sum();
    Ok((root_sum * root_sum).clamp(0.0, 1.0))
}

/// `⟨ψ|ρ|ψ⟩`, the fidelity when one state is pure.
pub fn pure_fidelity(psi: &StateVector, rho: &DensityMatrix) -> Result<f64> {
    if 1 << psi.num_qubits() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: 1 << psi.num_qubits(), found: rho.dim() });
    }
    let a = psi.amplitudes();
    let rho_psi = rho.matrix().mul_vec(a);
    let f: Complex64 = a.iter().zip(&rho_psi).map(|(x, y)| x.conj() * y).sum();
    Ok(f.re.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::CMatrix;
    use proptest::prelude::*;

    fn random_pure(n: usize, parts: &[f64]) -> StateVector {
        let amps = parts.chunks(2).take(1 << n).map(|c| Complex64::new(c[0], c[1])).collect();
        StateVector::normalized(amps).unwrap()
    }

    // ρ = G G† / Tr(G G†) for a random complex G.
    fn random_mixed(n: usize, parts: &[f64]) -> DensityMatrix {
        let d = 1 << n;
        let g = CMatrix::from_rows(parts.chunks(2).take(d * d).map(|c| Complex64::new(c[0], c[1])).collect()).unwrap();
        let m = &g * &g.adjoint();
        let tr = m.trace().re;
        DensityMatrix::new(m.scale_real(1.0 / tr)).unwrap()
    }

    #[test]
    fn self_fidelity_is_one() {
        let rho = DensityMatrix::maximally_mixed(2);
        assert!((fidelity(&rho, &rho).unwrap() - 1.0).abs() < 1e-10);
        let p = StateVector::plus().to_density();
        assert!((fidelity(&p, &p).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn plus_against_mixed() {
        let p = StateVector::plus().to_density();
        let mixed = DensityMatrix::maximally_mixed(1);
        assert!((fidelity(&p, &mixed).unwrap() - 0.5).abs() < 1e-12);
        assert!((pure_fidelity(&StateVector::plus(), &mixed).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn orthogonal_states() {
        let zero = StateVector::basis(1, 0).to_density();
        let one = StateVector::basis(1, 1).to_density();
        assert!(fidelity(&zero, &one).unwrap().abs() < 1e-10);
    }

    #[test]
    fn dimension_mismatch() {
        let a = DensityMatrix::maximally_mixed(1);
        let b = DensityMatrix::maximally_mixed(2);
        assert!(matches!(fidelity(&a, &b), Err(Error::DimensionMismatch { .. })));
        assert!(pure_fidelity(&StateVector::plus(), &b).is_err());
    }

    proptest! {
        #[test]
        fn symmetric_and_bounded(n in 1usize..=2, a in prop::collection::vec(-1.0f64..1.0, 32), b in prop::collection::vec(-1.0f64..1.0, 32)) {
            let (x, y) = (random_mixed(n, &a), random_mixed(n, &b));
            let f = fidelity(&x, &y).unwrap();
            prop_assert!((0.0..=1.0 + 1e-9).contains(&f));
            prop_assert!((f - fidelity(&y, &x).unwrap()).abs() < 1e-8);
        }

        #[test]
        fn pure_formula_agrees(n in 1usize..=2, a in prop::collection::vec(-1.0f64..1.0, 8), b in prop::collection::vec(-1.0f64..1.0, 32)) {
            let psi = random_pure(n, &a);
            let rho = random_mixed(n, &b);
            let general = fidelity(&psi.to_density(), &rho).unwrap();
            prop_assert!((general - pure_fidelity(&psi, &rho).unwrap()).abs() < 1e-8);
            prop_assert!((general - fidelity(&rho, &psi.to_density()).unwrap()).abs() < 1e-8);
        }
    }
}
