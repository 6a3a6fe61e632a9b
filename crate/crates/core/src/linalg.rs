//! Dense complex matrix helpers used by every block-level operation.
//!
//! Blocks are small (side ≤ a few dozen), so everything here is plain dense
//! linear algebra on top of `nalgebra`. Hermitian problems go through the
//! symmetric eigensolver; the general matrix exponential uses scaling and
//! squaring with a truncated Taylor series.

use alloc::vec::Vec;

use nalgebra::{Complex, DMatrix, DVector};

/// Complex double-precision scalar.
pub type C64 = Complex<f64>;

/// Dense complex matrix; every Fourier block is one of these.
pub type CMatrix = DMatrix<C64>;

/// Modulus of a complex scalar.
pub fn cabs(z: C64) -> f64 {
    libm::hypot(z.re, z.im)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn zeros(n: usize) -> CMatrix {
    CMatrix::zeros(n, n)
}

/// `n × n` matrix `value · I`.
pub fn scalar(n: usize, value: f64) -> CMatrix {
    CMatrix::from_diagonal_element(n, n, C64::new(value, 0.0))
}

pub fn from_real_diagonal(diag: &[f64]) -> CMatrix {
    let d = DVector::from_iterator(diag.len(), diag.iter().map(|&x| C64::new(x, 0.0)));
    CMatrix::from_diagonal(&d)
}

/// Builds a matrix from row-major real entries.
pub fn from_real_rows(rows: &[&[f64]]) -> CMatrix {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    CMatrix::from_fn(n, m, |i, j| C64::new(rows[i][j], 0.0))
}

/// Spectral norm of `A - A*`.
pub fn hermitian_residual(a: &CMatrix) -> f64 {
    spectral_norm(&(a - a.adjoint()))
}

/// Returns `(A + A*) / 2` with an exactly real diagonal and exactly
/// conjugate-symmetric off-diagonal entries.
pub fn hermitian_part(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    let mut h = zeros(n);
    for i in 0..n {
        h[(i, i)] = C64::new(a[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let v = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            h[(i, j)] = v;
            h[(j, i)] = v.conj();
        }
    }
    h
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Unitary matrix whose columns are the matching eigenvectors.
    pub vectors: CMatrix,
}

impl HermitianEigen {
    /// Decomposes the Hermitian part of `a`. Callers that care whether `a`
    /// was Hermitian in the first place check [`hermitian_residual`].
    pub fn new(a: &CMatrix) -> Self {
        let n = a.nrows();
        if n == 0 {
            return Self { values: Vec::new(), vectors: zeros(0) };
        }
        let h = hermitian_part(a);
        if n == 1 {
            return Self { values: alloc::vec![h[(0, 0)].re], vectors: identity(1) };
        }
        let eig = h.symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
        Self { values, vectors }
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// `V f(D) V*`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (c, &lambda) in self.values.iter().enumerate() {
            let w = f(lambda);
            for r in 0..n {
                scaled[(r, c)] *= w;
            }
        }
        hermitian_part(&(scaled * self.vectors.adjoint()))
    }
}

/// Smallest eigenvalue of the Hermitian part of `a`.
pub fn min_eigenvalue(a: &CMatrix) -> f64 {
    HermitianEigen::new(a).min()
}

/// Largest singular value.
pub fn spectral_norm(a: &CMatrix) -> f64 {
    match (a.nrows(), a.ncols()) {
        (0, _) | (_, 0) => 0.0,
        (1, 1) => cabs(a[(0, 0)]),
        _ => {
            let gram = a.adjoint() * a;
            libm::sqrt(HermitianEigen::new(&gram).max().max(0.0))
        }
    }
}

/// Frobenius norm; an upper bound for the spectral norm.
pub fn frobenius_norm(a: &CMatrix) -> f64 {
    libm::sqrt(a.iter().map(|z| z.norm_sqr()).sum())
}

/// Maximum absolute column sum.
pub fn one_norm(a: &CMatrix) -> f64 {
    (0..a.ncols()).map(|j| a.column(j).iter().map(|z| cabs(*z)).sum::<f64>()).fold(0.0, f64::max)
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| cabs(x - y)).fold(0.0, f64::max)
}

pub fn exp_real(x: f64) -> f64 {
    libm::exp(x)
}

/// Matrix exponential of a Hermitian matrix via its eigendecomposition.
pub fn expm_hermitian(a: &CMatrix) -> CMatrix {
    HermitianEigen::new(a).apply(libm::exp)
}

/// Degree of the Taylor polynomial used by [`expm_general`].
const TAYLOR_DEGREE: usize = 18;
/// The scaled argument satisfies `‖A / 2^s‖₁ ≤ SCALED_NORM`.
const SCALED_NORM: f64 = 0.5;

/// Matrix exponential by scaling and squaring.
///
/// After scaling, `‖X‖₁ ≤ 0.5`; the Taylor remainder past degree 18 is then
/// bounded by `0.5^19 / 19! · 1/(1 - 0.5/20) < 2e-23` in relative terms, well
/// below double precision. Squaring amplifies that by at most `2^s`.
pub fn expm_general(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    let norm = one_norm(a);
    let mut squarings = 0u32;
    let mut scale = 1.0;
    while norm * scale > SCALED_NORM {
        scale *= 0.5;
        squarings += 1;
    }
    let x = a * C64::new(scale, 0.0);
    // Horner evaluation of sum_{k ≤ d} X^k / k!
    let mut result = identity(n);
    for k in (1..=TAYLOR_DEGREE).rev() {
        result = identity(n) + (&x * result) * C64::new(1.0 / k as f64, 0.0);
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Exponential with the Hermitian fast path when `a` is Hermitian to
/// within `16 ε (1 + ‖a‖_F)`.
pub fn expm(a: &CMatrix) -> CMatrix {
    if is_hermitian(a) {
        expm_hermitian(a)
    } else {
        expm_general(a)
    }
}

pub(crate) fn is_hermitian(a: &CMatrix) -> bool {
    let scale = 1.0 + frobenius_norm(a);
    frobenius_norm(&(a - a.adjoint())) <= 16.0 * f64::EPSILON * scale
}

/// Result of a clamped principal square root.
#[derive(Debug, Clone)]
pub struct PsdRoot {
    pub root: CMatrix,
    /// Most negative eigenvalue that was clamped to zero (0 if none).
    pub clamped: f64,
}

/// Principal positive semidefinite square root of the Hermitian part of
/// `a`. Eigenvalues in `[-tol, 0)` are clamped to 0; anything below `-tol`
/// is returned as `Err(eigenvalue)`.
pub fn psd_sqrt(a: &CMatrix, tol: f64) -> Result<PsdRoot, f64> {
    let eig = HermitianEigen::new(a);
    let min = eig.min();
    if min < -tol {
        return Err(min);
    }
    let clamped = if min < 0.0 { min } else { 0.0 };
    let root = eig.apply(|lambda| libm::sqrt(lambda.max(0.0)));
    Ok(PsdRoot { root, clamped })
}

/// Kronecker product; row-major index flattening, left factor outermost.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// `Σ_j I ⊗ … ⊗ A_j ⊗ … ⊗ I` over the factors in order.
pub fn kron_sum(factors: &[&CMatrix]) -> CMatrix {
    let dims: Vec<usize> = factors.iter().map(|m| m.nrows()).collect();
    let total: usize = dims.iter().product();
    let mut sum = zeros(total);
    for (j, a) in factors.iter().enumerate() {
        let left: usize = dims[..j].iter().product();
        let right: usize = dims[j + 1..].iter().product();
        sum += kron(&kron(&identity(left), a), &identity(right));
    }
    sum
}
