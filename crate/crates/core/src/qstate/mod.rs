//! Complex linear algebra and quantum-state primitives.
//!
//! Bit ordering: qubit 0 is the **most significant** bit of a basis index, so
//! the ket |q0 q1 … q(n-1)⟩ reads left to right as a binary number. For a
//! five-qubit register, |01011⟩ is index 11.

mod eigen;
pub mod gates;
mod matrix;

use num_complex::Complex64;

pub use eigen::{eigh, hermitian_sqrt, HermitianEigen, CLIP_THRESHOLD};
pub use matrix::CMatrix;

use crate::error::{Error, Result};

/// Normalization tolerance for state vectors and density-matrix traces.
pub const NORM_TOLERANCE: f64 = 1e-10;
/// Unitarity tolerance for gate matrices.
pub const UNITARY_TOLERANCE: f64 = 1e-10;
/// Largest register the dense simulator accepts.
pub const MAX_QUBITS: usize = 12;

#[inline]
pub(crate) fn bit_shift(num_qubits: usize, qubit: usize) -> usize {
    num_qubits - 1 - qubit
}

/// Value (0 or 1) of `qubit` within basis index `index`.
#[inline]
pub fn qubit_value(index: usize, num_qubits: usize, qubit: usize) -> usize {
    (index >> bit_shift(num_qubits, qubit)) & 1
}

fn check_targets(num_qubits: usize, targets: &[usize]) -> Result<()> {
    if targets.is_empty() {
        return Err(Error::BadTargets("no targets".into()));
    }
    for (i, &t) in targets.iter().enumerate() {
        if t >= num_qubits {
            return Err(Error::BadTargets(format!("qubit {t} out of range for {num_qubits} qubits")));
        }
        if targets[..i].contains(&t) {
            return Err(Error::BadTargets(format!("qubit {t} repeated")));
        }
    }
    Ok(())
}

/// Applies the `2^k × 2^k` matrix `u` to `targets` of an amplitude vector
/// over `num_qubits` qubits. `targets[0]` is the most significant bit of `u`'s
/// index. No unitarity check: Kraus operators go through here too.
pub(crate) fn apply_matrix_in_place(amps: &mut [Complex64], num_qubits: usize, u: &CMatrix, targets: &[usize]) {
    let k = targets.len();
    let sub = 1usize << k;
    debug_assert_eq!(u.dim(), sub);
    let offsets: Vec<usize> = (0..sub)
        .map(|s| {
            targets.iter().enumerate().fold(0usize, |acc, (j, &t)| {
                let bit = (s >> (k - 1 - j)) & 1;
                acc | (bit << bit_shift(num_qubits, t))
            })
        })
        .collect();
    let mask: usize = targets.iter().map(|&t| 1usize << bit_shift(num_qubits, t)).sum();
    let mut gathered = vec![Complex64::new(0.0, 0.0); sub];
    for base in 0..amps.len() {
        if base & mask != 0 {
            continue;
        }
        for (g, &off) in gathered.iter_mut().zip(&offsets) {
            *g = amps[base | off];
        }
        for (row, &off) in offsets.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (col, g) in gathered.iter().enumerate() {
                acc += u[(row, col)] * g;
            }
            amps[base | off] = acc;
        }
    }
}

/// Normalized pure state over `num_qubits` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Validates length and normalization.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::InvalidArgument(format!("amplitude count {len} is not a power of two ≥ 2")));
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { num_qubits: len.trailing_zeros() as usize, amplitudes })
    }

    /// Like [`StateVector::new`] but rescales any nonzero vector to unit norm.
    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized(norm * norm));
        }
        for a in amplitudes.iter_mut() {
            *a /= norm;
        }
        Self::new(amplitudes)
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Computational basis state |index⟩.
    pub fn basis(num_qubits: usize, index: usize) -> Self {
        assert!(num_qubits >= 1 && index < (1 << num_qubits));
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self { num_qubits, amplitudes }
    }

    pub fn zero(num_qubits: usize) -> Self {
        Self::basis(num_qubits, 0)
    }

    /// Single-qubit state `alpha|0⟩ + beta|1⟩`.
    pub fn qubit(alpha: Complex64, beta: Complex64) -> Result<Self> {
        Self::new(vec![alpha, beta])
    }

    /// |+⟩ = (|0⟩ + |1⟩)/√2.
    pub fn plus() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::from_real(&[h, h]).expect("normalized")
    }

    pub(crate) fn from_raw(num_qubits: usize, amplitudes: Vec<Complex64>) -> Self {
        debug_assert_eq!(amplitudes.len(), 1 << num_qubits);
        Self { num_qubits, amplitudes }
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    #[inline]
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.amplitudes.len() != other.amplitudes.len() {
            return Err(Error::DimensionMismatch { expected: self.num_qubits, found: other.num_qubits });
        }
        Ok(self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum())
    }

    /// `|⟨self|other⟩|²`, insensitive to global phase.
    pub fn overlap(&self, other: &Self) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Amplitude at `(i·2^nb + j)` is `self[i]·other[j]`.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut amplitudes = Vec::with_capacity(self.amplitudes.len() * other.amplitudes.len());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        Self { num_qubits: self.num_qubits + other.num_qubits, amplitudes }
    }

    /// Applies a unitary to `targets`; `targets[0]` is the most significant
    /// qubit of `u`'s index.
    pub fn apply_unitary(&self, u: &CMatrix, targets: &[usize]) -> Result<Self> {
        let mut out = self.clone();
        out.apply_unitary_in_place(u, targets)?;
        Ok(out)
    }

    pub fn apply_unitary_in_place(&mut self, u: &CMatrix, targets: &[usize]) -> Result<()> {
        check_targets(self.num_qubits, targets)?;
        if u.dim() != 1 << targets.len() {
            return Err(Error::DimensionMismatch { expected: 1 << targets.len(), found: u.dim() });
        }
        let err = u.unitarity_error();
        if err > UNITARY_TOLERANCE {
            return Err(Error::NotUnitary(err));
        }
        apply_matrix_in_place(&mut self.amplitudes, self.num_qubits, u, targets);
        Ok(())
    }

    /// Unchecked variant for validated gates inside the simulator.
    pub(crate) fn apply_trusted(&mut self, u: &CMatrix, targets: &[usize]) {
        apply_matrix_in_place(&mut self.amplitudes, self.num_qubits, u, targets);
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix { num_qubits: self.num_qubits, matrix: CMatrix::outer(&self.amplitudes, &self.amplitudes) }
    }

    /// Probability that measuring `qubit` yields 1.
    pub fn probability_one(&self, qubit: usize) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| qubit_value(*i, self.num_qubits, qubit) == 1)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// State of the qubits *not* in `fixed`, conditioned on each fixed qubit
    /// holding the paired value. Returns `None` if that conditional has zero
    /// weight. Remaining qubits keep their relative order.
    pub fn condition_on(&self, fixed: &[(usize, usize)]) -> Option<Self> {
        let n = self.num_qubits;
        let keep: Vec<usize> = (0..n).filter(|q| !fixed.iter().any(|(f, _)| f == q)).collect();
        if keep.is_empty() {
            return None;
        }
        let m = keep.len();
        let mut base = 0usize;
        for &(q, v) in fixed {
            base |= (v & 1) << bit_shift(n, q);
        }
        let mut amps = Vec::with_capacity(1 << m);
        for r in 0..(1usize << m) {
            let mut idx = base;
            for (j, &q) in keep.iter().enumerate() {
                idx |= ((r >> (m - 1 - j)) & 1) << bit_shift(n, q);
            }
            amps.push(self.amplitudes[idx]);
        }
        StateVector::normalized(amps).ok()
    }
}

/// Hermitian, positive-semidefinite, unit-trace density operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    num_qubits: usize,
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, trace and eigenvalues (≥ −1e-9).
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let dim = matrix.dim();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::InvalidArgument(format!("dimension {dim} is not a power of two ≥ 2")));
        }
        let herm = matrix.hermiticity_error();
        if herm > NORM_TOLERANCE {
            return Err(Error::NotHermitian(herm));
        }
        let tr = matrix.trace().re;
        if (tr - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized(tr));
        }
        let eig = eigh(&matrix)?;
        if eig.values[0] < -CLIP_THRESHOLD {
            return Err(Error::NegativeEigenvalue(eig.values[0]));
        }
        Ok(Self { num_qubits: dim.trailing_zeros() as usize, matrix })
    }

    pub(crate) fn from_matrix_unchecked(matrix: CMatrix) -> Self {
        Self { num_qubits: matrix.dim().trailing_zeros() as usize, matrix }
    }

    /// Maximally mixed state I/2ⁿ.
    pub fn maximally_mixed(num_qubits: usize) -> Self {
        let dim = 1 << num_qubits;
        Self { num_qubits, matrix: CMatrix::identity(dim).scale_real(1.0 / dim as f64) }
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    #[inline]
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self { num_qubits: self.num_qubits + other.num_qubits, matrix: self.matrix.kron(&other.matrix) }
    }

    /// Diagonal of the matrix as real probabilities.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).collect()
    }

    /// `U ρ U†` on `targets`.
    pub fn apply_unitary(&self, u: &CMatrix, targets: &[usize]) -> Result<Self> {
        check_targets(self.num_qubits, targets)?;
        let err = u.unitarity_error();
        if err > UNITARY_TOLERANCE {
            return Err(Error::NotUnitary(err));
        }
        let mut out = self.clone();
        out.conjugate_in_place(u, targets);
        Ok(out)
    }

    /// `K ρ K†` without any checks on `K`.
    pub(crate) fn conjugate_in_place(&mut self, k: &CMatrix, targets: &[usize]) {
        // Row-major ρ is a vector over 2n qubits: rows then columns.
        let n = self.num_qubits;
        let rows: Vec<usize> = targets.to_vec();
        let cols: Vec<usize> = targets.iter().map(|t| t + n).collect();
        let kc = CMatrix::from_rows(k.as_slice().iter().map(|x| x.conj()).collect()).expect("square");
        let data = self.matrix.data_mut();
        apply_matrix_in_place(data, 2 * n, k, &rows);
        apply_matrix_in_place(data, 2 * n, &kc, &cols);
    }

    /// Reduced state on `keep` (sorted ascending in the result).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        let mut keep: Vec<usize> = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if keep.is_empty() {
            return Err(Error::EmptyQubitSet);
        }
        let n = self.num_qubits;
        if let Some(&q) = keep.iter().find(|&&q| q >= n) {
            return Err(Error::BadTargets(format!("qubit {q} out of range for {n} qubits")));
        }
        let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
        let m = keep.len();
        let spread = |r: usize, qubits: &[usize]| -> usize {
            let k = qubits.len();
            qubits.iter().enumerate().fold(0, |acc, (j, &q)| acc | (((r >> (k - 1 - j)) & 1) << bit_shift(n, q)))
        };
        let kept_idx: Vec<usize> = (0..1usize << m).map(|r| spread(r, &keep)).collect();
        let traced_idx: Vec<usize> = (0..1usize << traced.len()).map(|r| spread(r, &traced)).collect();
        let mut out = CMatrix::zeros(1 << m);
        for (i, &ki) in kept_idx.iter().enumerate() {
            for (j, &kj) in kept_idx.iter().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for &t in &traced_idx {
                    acc += self.matrix[(ki | t, kj | t)];
                }
                out[(i, j)] = acc;
            }
        }
        Ok(Self { num_qubits: m, matrix: out })
    }

    /// Trace distance ½‖ρ − σ‖₁.
    pub fn trace_distance(&self, other: &Self) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        let diff = &self.matrix - &other.matrix;
        let eig = eigh(&diff)?;
        Ok(0.5 * eig.values.iter().map(|v| v.abs()).sum::<f64>())
    }
}
