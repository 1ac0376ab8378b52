//! Hermitian eigendecomposition by cyclic complex Jacobi rotations.
//!
//! Each rotation first removes the phase of the pivot `a_pq` with a diagonal
//! unitary and then applies the real symmetric Jacobi rotation that zeroes it.
//! Matrices here never exceed 128×128, where Jacobi is both accurate and fast
//! enough.

use num_complex::Complex64;

use super::matrix::CMatrix;
use crate::error::{Error, Result};

/// Off-diagonal Frobenius norm at which the iteration stops.
pub const JACOBI_TOLERANCE: f64 = 1e-12;
pub const JACOBI_MAX_SWEEPS: usize = 100;
/// Eigenvalues in `[-CLIP_THRESHOLD, 0)` are treated as zero.
pub const CLIP_THRESHOLD: f64 = 1e-9;
const HERMITIAN_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct HermitianEigen {
    /// Ascending eigenvalues.
    pub values: Vec<f64>,
    /// Eigenvectors as columns, ordered like `values`.
    pub vectors: CMatrix,
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.dim();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Right-multiplies columns `p`, `q` of `m` by the 2×2 block `g`.
fn rotate_columns(m: &mut CMatrix, p: usize, q: usize, g: &[[Complex64; 2]; 2]) {
    for k in 0..m.dim() {
        let (mp, mq) = (m[(k, p)], m[(k, q)]);
        m[(k, p)] = mp * g[0][0] + mq * g[1][0];
        m[(k, q)] = mp * g[0][1] + mq * g[1][1];
    }
}

/// Left-multiplies rows `p`, `q` of `m` by the adjoint of `g`.
fn rotate_rows_adjoint(m: &mut CMatrix, p: usize, q: usize, g: &[[Complex64; 2]; 2]) {
    for k in 0..m.dim() {
        let (mp, mq) = (m[(p, k)], m[(q, k)]);
        m[(p, k)] = g[0][0].conj() * mp + g[1][0].conj() * mq;
        m[(q, k)] = g[0][1].conj() * mp + g[1][1].conj() * mq;
    }
}

/// Diagonalizes a Hermitian matrix: `m = V diag(values) V†`.
pub fn eigh(m: &CMatrix) -> Result<HermitianEigen> {
    let herm_err = m.hermiticity_error();
    if herm_err > HERMITIAN_TOLERANCE * m.frobenius_norm().max(1.0) {
        return Err(Error::NotHermitian(herm_err));
    }
    let n = m.dim();
    let mut a = m.clone();
    let mut v = CMatrix::identity(n);
    let tol = JACOBI_TOLERANCE * m.frobenius_norm().max(1.0);

    let mut converged = off_diagonal_norm(&a) <= tol;
    let mut sweeps = 0;
    while !converged {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence(sweeps));
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r < f64::MIN_POSITIVE.sqrt() {
                    continue;
                }
                let phase = apq / r;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * r);
                let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                let t = sign / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let pc = phase.conj();
                let g = [[Complex64::new(c, 0.0), Complex64::new(s, 0.0)], [-pc * s, pc * c]];
                rotate_columns(&mut a, p, q, &g);
                rotate_rows_adjoint(&mut a, p, q, &g);
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
                rotate_columns(&mut v, p, q, &g);
            }
        }
        converged = off_diagonal_norm(&a) <= tol;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = CMatrix::zeros(n);
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            vectors[(row, col)] = v[(row, src)];
        }
    }
    Ok(HermitianEigen { values, vectors })
}

impl HermitianEigen {
    /// Rebuilds `V diag(f(λ)) V†`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.vectors.dim();
        let fv: Vec<f64> = self.values.iter().map(|&x| f(x)).collect();
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, &w) in fv.iter().enumerate() {
                    if w != 0.0 {
                        acc += self.vectors[(i, k)] * self.vectors[(j, k)].conj() * w;
                    }
                }
                out[(i, j)] = acc;
                out[(j, i)] = acc.conj();
            }
        }
        out
    }
}

/// Principal square root of a Hermitian positive-semidefinite matrix.
///
/// Eigenvalues in `[-1e-9, 0)` are clipped to zero; anything more negative is
/// reported as [`Error::NegativeEigenvalue`].
pub fn hermitian_sqrt(m: &CMatrix) -> Result<CMatrix> {
    let eig = eigh(m)?;
    if let Some(&lowest) = eig.values.first() {
        if lowest < -CLIP_THRESHOLD {
            return Err(Error::NegativeEigenvalue(lowest));
        }
    }
    Ok(eig.map(|x| x.max(0.0).sqrt()))
}
