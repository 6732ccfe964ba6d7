//! Dense complex operator algebra on `2 ⊗ d` systems.
//!
//! Basis convention: the product ket `|i j⟩` (qubit level `i`, qudit level `j`)
//! sits at row/column `i·d + j`.

mod state_file;

pub use state_file::{parse_state_json, to_state_json, RawState};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

/// Dense complex matrix.
pub type ComplexMatrix = DMatrix<Complex64>;
/// Dense complex column vector.
pub type ComplexVector = DVector<Complex64>;

/// Entrywise tolerance for Hermiticity, trace and positivity checks.
pub const VALIDATION_TOL: f64 = 1e-10;
/// Frobenius tolerance for eigendecomposition reconstruction.
pub const RECONSTRUCTION_TOL: f64 = 1e-9;

/// Validation tolerances, overridable per call.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub validation: f64,
    pub reconstruction: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            validation: VALIDATION_TOL,
            reconstruction: RECONSTRUCTION_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OpError {
    #[error("dimension mismatch: expected {expected}x{expected} for dims ({dim_a}, {dim_b}), got {rows}x{cols}")]
    DimensionMismatch {
        dim_a: usize,
        dim_b: usize,
        expected: usize,
        rows: usize,
        cols: usize,
    },
    #[error("unsupported dimensions ({dim_a}, {dim_b}): the first factor must be a qubit and the second at least 2-dimensional")]
    UnsupportedDimension { dim_a: usize, dim_b: usize },
    #[error("matrix is not Hermitian: max |M - M†| = {residual:e}")]
    NonHermitian { residual: f64 },
    #[error("matrix does not have unit trace: |tr M - 1| = {residual:e}")]
    NonUnitTrace { residual: f64 },
    #[error("matrix is not positive semidefinite: smallest eigenvalue = {min_eigenvalue:e}")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },
    #[error("malformed state file: {0}")]
    Format(String),
}

/// A validated bipartite density operator on `C^{dim_a} ⊗ C^{dim_b}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim_a: usize,
    dim_b: usize,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.dim_a, self.dim_b)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// `I / (2d)`.
    pub fn maximally_mixed(dim_b: usize) -> Self {
        let n = 2 * dim_b;
        Self::new_unchecked(
            ComplexMatrix::identity(n, n) * Complex64::new(1.0 / n as f64, 0.0),
            2,
            dim_b,
        )
    }

    /// `|ψ⟩⟨ψ|` for a state vector of length `2·dim_b`; the vector is normalized first.
    pub fn from_pure(psi: &ComplexVector, dim_b: usize) -> Result<Self, OpError> {
        let norm = psi.norm();
        if norm == 0.0 {
            return Err(OpError::NonUnitTrace { residual: 1.0 });
        }
        let psi = psi / Complex64::new(norm, 0.0);
        validate_density(&psi * psi.adjoint(), 2, dim_b)
    }

    /// Wraps a matrix that is a density operator by construction.
    pub(crate) fn new_unchecked(matrix: ComplexMatrix, dim_a: usize, dim_b: usize) -> Self {
        debug_assert_eq!(matrix.nrows(), dim_a * dim_b);
        Self {
            dim_a,
            dim_b,
            matrix,
        }
    }

    /// Expectation value `⟨v|ρ|v⟩` (real part).
    pub fn expectation(&self, v: &ComplexVector) -> f64 {
        (v.adjoint() * &self.matrix * v)[(0, 0)].re
    }
}

/// Eigenvalues sorted in descending order.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
}

impl Spectrum {
    pub fn new(mut eigenvalues: Vec<f64>) -> Self {
        eigenvalues.sort_by(|a, b| b.total_cmp(a));
        Self { eigenvalues }
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.eigenvalues.iter().sum()
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(f64::NAN)
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(f64::NAN)
    }

    /// Shannon entropy of the eigenvalues in bits, clamping each to `[0, 1]`.
    pub fn entropy_bits(&self) -> f64 {
        shannon_bits(&self.eigenvalues)
    }

    /// L∞ distance to another spectrum; the shorter one is padded with zeros.
    pub fn linf_distance(&self, other: &Spectrum) -> f64 {
        let n = self.len().max(other.len());
        (0..n)
            .map(|i| {
                let a = self.eigenvalues.get(i).copied().unwrap_or(0.0);
                let b = other.eigenvalues.get(i).copied().unwrap_or(0.0);
                (a - b).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// `-Σ p log₂ p` with `0 log 0 = 0`; entries are clamped to `[0, 1]`.
pub fn shannon_bits(probabilities: &[f64]) -> f64 {
    probabilities
        .iter()
        .map(|&p| {
            let p = p.clamp(0.0, 1.0);
            if p > 0.0 {
                -p * p.log2()
            } else {
                0.0
            }
        })
        .sum()
}

/// Largest entrywise modulus of `M − M†`.
pub fn hermiticity_residual(m: &ComplexMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn validate_density(
    matrix: ComplexMatrix,
    dim_a: usize,
    dim_b: usize,
) -> Result<DensityMatrix, OpError> {
    validate_density_with(matrix, dim_a, dim_b, &Tolerances::default())
}

/// Checks shape, Hermiticity, unit trace and positivity. Never renormalizes.
pub fn validate_density_with(
    matrix: ComplexMatrix,
    dim_a: usize,
    dim_b: usize,
    tol: &Tolerances,
) -> Result<DensityMatrix, OpError> {
    if dim_a != 2 || dim_b < 2 {
        return Err(OpError::UnsupportedDimension { dim_a, dim_b });
    }
    let expected = dim_a * dim_b;
    if matrix.nrows() != expected || matrix.ncols() != expected {
        return Err(OpError::DimensionMismatch {
            dim_a,
            dim_b,
            expected,
            rows: matrix.nrows(),
            cols: matrix.ncols(),
        });
    }
    let residual = hermiticity_residual(&matrix);
    if residual > tol.validation {
        return Err(OpError::NonHermitian { residual });
    }
    let trace = matrix.trace();
    let residual = (trace - Complex64::new(1.0, 0.0)).norm();
    if residual > tol.validation {
        return Err(OpError::NonUnitTrace { residual });
    }
    let min_eigenvalue = eigenvalues_unchecked(&matrix).min();
    if min_eigenvalue < -tol.validation {
        return Err(OpError::NotPositiveSemidefinite { min_eigenvalue });
    }
    Ok(DensityMatrix::new_unchecked(matrix, dim_a, dim_b))
}

/// Kronecker product; `(a ⊗ b)[(i·rb + k, j·cb + l)] = a[(i, j)]·b[(k, l)]`.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Traces out the first factor of a `(dim_a·dim_b)`-square matrix.
pub fn trace_out_a(m: &ComplexMatrix, dim_a: usize, dim_b: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim_b, dim_b, |j, l| {
        (0..dim_a).map(|i| m[(i * dim_b + j, i * dim_b + l)]).sum()
    })
}

/// Traces out the second factor of a `(dim_a·dim_b)`-square matrix.
pub fn trace_out_b(m: &ComplexMatrix, dim_a: usize, dim_b: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim_a, dim_a, |i, k| {
        (0..dim_b).map(|j| m[(i * dim_b + j, k * dim_b + j)]).sum()
    })
}

/// Marginal `ρ^B = tr_A ρ` (d×d).
pub fn partial_trace_a(rho: &DensityMatrix) -> ComplexMatrix {
    trace_out_a(&rho.matrix, rho.dim_a, rho.dim_b)
}

/// Marginal `ρ^A = tr_B ρ` (2×2).
pub fn partial_trace_b(rho: &DensityMatrix) -> ComplexMatrix {
    trace_out_b(&rho.matrix, rho.dim_a, rho.dim_b)
}

/// Transposes the qubit indices: `⟨i j|ρ^{T_A}|k l⟩ = ⟨k j|ρ|i l⟩`.
pub fn transpose_a(m: &ComplexMatrix, dim_a: usize, dim_b: usize) -> ComplexMatrix {
    let n = dim_a * dim_b;
    ComplexMatrix::from_fn(n, n, |r, c| {
        let (i, j) = (r / dim_b, r % dim_b);
        let (k, l) = (c / dim_b, c % dim_b);
        m[(k * dim_b + j, i * dim_b + l)]
    })
}

pub fn partial_transpose_a(rho: &DensityMatrix) -> ComplexMatrix {
    transpose_a(&rho.matrix, rho.dim_a, rho.dim_b)
}

// Symmetrizes before handing the lower triangle to the eigensolver.
fn eigenvalues_unchecked(m: &ComplexMatrix) -> Spectrum {
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    Spectrum::new(h.symmetric_eigenvalues().iter().copied().collect())
}

/// Eigenvalues of a Hermitian matrix, descending.
pub fn hermitian_spectrum(m: &ComplexMatrix) -> Result<Spectrum, OpError> {
    let residual = hermiticity_residual(m);
    if residual > VALIDATION_TOL {
        return Err(OpError::NonHermitian { residual });
    }
    Ok(eigenvalues_unchecked(m))
}

/// Full eigendecomposition `m = V Λ V†` with eigenpairs ordered by descending eigenvalue.
pub fn hermitian_eigen(m: &ComplexMatrix) -> Result<(Spectrum, ComplexMatrix), OpError> {
    let residual = hermiticity_residual(m);
    if residual > VALIDATION_TOL {
        return Err(OpError::NonHermitian { residual });
    }
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors =
        ComplexMatrix::from_fn(m.nrows(), m.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((
        Spectrum {
            eigenvalues: values,
        },
        vectors,
    ))
}

/// `S(m) = −tr m log₂ m` in bits.
pub fn von_neumann_entropy(m: &ComplexMatrix) -> Result<f64, OpError> {
    let spectrum = hermitian_spectrum(m)?;
    if spectrum.min() < -VALIDATION_TOL {
        return Err(OpError::NotPositiveSemidefinite {
            min_eigenvalue: spectrum.min(),
        });
    }
    Ok(spectrum.entropy_bits())
}

/// Quantum mutual information `S(ρ^A) + S(ρ^B) − S(ρ)` in bits.
pub fn mutual_information(rho: &DensityMatrix) -> f64 {
    let s_a = eigenvalues_unchecked(&partial_trace_b(rho)).entropy_bits();
    let s_b = eigenvalues_unchecked(&partial_trace_a(rho)).entropy_bits();
    let s_ab = eigenvalues_unchecked(&rho.matrix).entropy_bits();
    s_a + s_b - s_ab
}

/// Sum of singular values of a Hermitian matrix.
pub fn trace_norm(m: &ComplexMatrix) -> f64 {
    eigenvalues_unchecked(m)
        .eigenvalues
        .iter()
        .map(|x| x.abs())
        .sum()
}

/// `max(0, ‖ρ^{T_A}‖₁ − 1)`: zero on PPT states, 1 on a Bell state.
pub fn negativity_oracle(rho: &DensityMatrix) -> f64 {
    (trace_norm(&partial_transpose_a(rho)) - 1.0).max(0.0)
}

/// Smallest eigenvalue of `ρ^{T_A}`.
pub fn min_partial_transpose_eigenvalue(rho: &DensityMatrix) -> f64 {
    eigenvalues_unchecked(&partial_transpose_a(rho)).min()
}

/// Frobenius norm of `[ρ, ρ_A ⊗ I_B]`.
///
/// A nonzero value certifies nonzero discord for measurements on the qubit.
/// The converse does not hold: every state with `ρ_A = I/2` gives zero.
pub fn commutator_condition(rho: &DensityMatrix) -> f64 {
    let lifted = tensor(
        &partial_trace_b(rho),
        &ComplexMatrix::identity(rho.dim_b, rho.dim_b),
    );
    (&rho.matrix * &lifted - &lifted * &rho.matrix).norm()
}

/// True iff every off-diagonal entry in the product basis has modulus ≤ `tol`.
pub fn is_classical_diagonal(rho: &DensityMatrix, tol: f64) -> bool {
    let n = rho.matrix.nrows();
    (0..n).all(|r| (0..n).all(|c| r == c || rho.matrix[(r, c)].norm() <= tol))
}

/// Product basis ket `|i j⟩` in `C^2 ⊗ C^{dim_b}`.
pub fn basis_ket(dim_b: usize, i: usize, j: usize) -> ComplexVector {
    let mut v = ComplexVector::zeros(2 * dim_b);
    v[i * dim_b + j] = Complex64::new(1.0, 0.0);
    v
}

/// The four Bell vectors on `span{|0⟩,|1⟩} ⊗ span{|0⟩,|1⟩}`, embedded in `2 ⊗ d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bell {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl Bell {
    pub const ALL: [Bell; 4] = [Bell::PhiPlus, Bell::PhiMinus, Bell::PsiPlus, Bell::PsiMinus];

    pub fn vector(self, dim_b: usize) -> ComplexVector {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let (first, second, sign) = match self {
            Bell::PhiPlus => ((0, 0), (1, 1), 1.0),
            Bell::PhiMinus => ((0, 0), (1, 1), -1.0),
            Bell::PsiPlus => ((0, 1), (1, 0), 1.0),
            Bell::PsiMinus => ((0, 1), (1, 0), -1.0),
        };
        (basis_ket(dim_b, first.0, first.1)
            + basis_ket(dim_b, second.0, second.1) * Complex64::new(sign, 0.0))
            * h
    }

    pub fn projector(self, dim_b: usize) -> ComplexMatrix {
        let v = self.vector(dim_b);
        &v * v.adjoint()
    }
}
