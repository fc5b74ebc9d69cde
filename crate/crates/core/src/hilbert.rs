//! Dense complex linear algebra on `ℂ^d`.
//!
//! Vectors and matrices are plain nalgebra types over [`Complex64`]. The inner
//! product is linear in the first argument and conjugate-linear in the second,
//! `<u, v> = Σ u_i conj(v_i)`, so that `<αu, v> = α<u, v>`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Scalar = Complex64;
pub type HVector = DVector<Complex64>;
pub type CMatrix = DMatrix<Complex64>;

/// Numerical slack used by every predicate in the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceConfig {
    /// Allowed `| ||e|| - 1 |` for unit vectors.
    pub eps_unit: f64,
    /// Allowed `max |A - A*|` for Hermitian matrices.
    pub eps_herm: f64,
    /// Relative threshold for pivots and numerical rank.
    pub eps_rank: f64,
    /// Eigenvalue floor for PSD and contraction tests.
    pub eps_eig: f64,
    /// Allowed residual of matrix and vector identities.
    pub eps_id: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            eps_unit: 1e-10,
            eps_herm: 1e-10,
            eps_rank: 1e-9,
            eps_eig: 1e-9,
            eps_id: 1e-8,
        }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("eps_unit", self.eps_unit),
            ("eps_herm", self.eps_herm),
            ("eps_rank", self.eps_rank),
            ("eps_eig", self.eps_eig),
            ("eps_id", self.eps_id),
        ];
        for (name, value) in fields {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidTolerance(format!("{name} must be positive, got {value}")));
            }
        }
        if self.eps_unit > self.eps_id {
            return Err(Error::InvalidTolerance(format!(
                "eps_unit ({}) must not exceed eps_id ({})",
                self.eps_unit, self.eps_id
            )));
        }
        Ok(())
    }
}

/// Builds a vector from real entries.
pub fn real_vector(entries: &[f64]) -> HVector {
    HVector::from_iterator(entries.len(), entries.iter().map(|&x| Complex64::new(x, 0.0)))
}

/// Builds a matrix from real rows.
pub fn real_matrix(rows: &[&[f64]]) -> CMatrix {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, |r| r.len());
    CMatrix::from_fn(nrows, ncols, |i, j| Complex64::new(rows[i][j], 0.0))
}

pub fn is_finite_vector(v: &HVector) -> bool {
    v.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn is_finite_matrix(a: &CMatrix) -> bool {
    a.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Checks that `vs` is nonempty, finite and of one shared positive dimension,
/// and returns that dimension.
pub fn common_dim(vs: &[HVector]) -> Result<usize> {
    let first = vs.first().ok_or(Error::Empty)?;
    let dim = first.len();
    if dim == 0 {
        return Err(Error::Empty);
    }
    for v in vs {
        if v.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: v.len() });
        }
        if !is_finite_vector(v) {
            return Err(Error::NonFinite);
        }
    }
    Ok(dim)
}

pub fn inner(u: &HVector, v: &HVector) -> Result<Scalar> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch { expected: u.len(), found: v.len() });
    }
    Ok(inner_unchecked(u, v))
}

// `dotc` conjugates its receiver, so `v.dotc(u) = Σ conj(v_i) u_i = <u, v>`.
pub(crate) fn inner_unchecked(u: &HVector, v: &HVector) -> Scalar {
    v.dotc(u)
}

/// Gram matrix `G[i][j] = <vs[i], vs[j]>`.
pub fn gram(vs: &[HVector]) -> Result<CMatrix> {
    common_dim(vs)?;
    Ok(gram_unchecked(vs))
}

pub(crate) fn gram_unchecked(vs: &[HVector]) -> CMatrix {
    let n = vs.len();
    let mut g = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let z = inner_unchecked(&vs[i], &vs[j]);
            g[(i, j)] = z;
            g[(j, i)] = z.conj();
        }
    }
    g
}

/// Largest singular value.
pub fn operator_norm(a: &CMatrix) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    crate::svd::singular_values(a).first().copied().unwrap_or(0.0)
}

/// Largest entry modulus, `||A||_max`.
pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub(crate) fn ensure_square(a: &CMatrix) -> Result<usize> {
    if a.nrows() != a.ncols() {
        return Err(Error::NotSquare { rows: a.nrows(), cols: a.ncols() });
    }
    Ok(a.nrows())
}

/// `max |A - A*|`.
pub fn hermitian_asymmetry(a: &CMatrix) -> Result<f64> {
    ensure_square(a)?;
    Ok(max_abs(&(a - a.adjoint())))
}

/// Eigenvalues of the Hermitian part `(A + A*)/2`, ascending.
pub fn hermitian_eigenvalues(a: &CMatrix) -> Result<Vec<f64>> {
    let n = ensure_square(a)?;
    if n == 0 {
        return Ok(Vec::new());
    }
    let h = (a + a.adjoint()).scale(0.5);
    let mut values: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

pub fn is_contraction(a: &CMatrix, tol: &ToleranceConfig) -> Result<bool> {
    ensure_square(a)?;
    Ok(operator_norm(a) <= 1.0 + tol.eps_eig)
}

pub fn is_projection(a: &CMatrix, tol: &ToleranceConfig) -> Result<bool> {
    ensure_square(a)?;
    if hermitian_asymmetry(a)? > tol.eps_herm {
        return Ok(false);
    }
    Ok(operator_norm(&(a * a - a)) <= tol.eps_id)
}

/// Inverse of a unit lower triangular matrix by forward substitution.
///
/// The input must have an exact unit diagonal and an exactly zero strictly
/// upper part; the result has the same shape.
pub fn invert_unit_lower(l: &CMatrix) -> Result<CMatrix> {
    let n = ensure_square(l)?;
    if !is_finite_matrix(l) {
        return Err(Error::NonFinite);
    }
    for i in 0..n {
        for j in i..n {
            let expected = if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
            if l[(i, j)] != expected {
                return Err(Error::NotUnitLower { row: i, col: j, value: l[(i, j)].norm() });
            }
        }
    }
    let mut inv = CMatrix::identity(n, n);
    for j in 0..n {
        for i in (j + 1)..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in j..i {
                acc += l[(i, k)] * inv[(k, j)];
            }
            inv[(i, j)] = -acc;
        }
    }
    Ok(inv)
}

/// Numerical rank of the family `vs` (columns of a `d x k` matrix), counting
/// singular values above `eps_rank` times the largest one.
pub fn numerical_rank(vs: &[HVector], tol: &ToleranceConfig) -> Result<usize> {
    if vs.is_empty() {
        return Ok(0);
    }
    common_dim(vs)?;
    let a = CMatrix::from_columns(vs);
    let sv = crate::svd::singular_values(&a);
    let top = sv[0];
    if top <= 0.0 {
        return Ok(0);
    }
    Ok(sv.iter().filter(|&&s| s > tol.eps_rank * top).count())
}

/// Whether `vs` spans all of `ℂ^dim`.
pub fn spans(vs: &[HVector], dim: usize, tol: &ToleranceConfig) -> Result<bool> {
    if vs.len() < dim {
        return Ok(false);
    }
    Ok(numerical_rank(vs, tol)? == dim)
}
