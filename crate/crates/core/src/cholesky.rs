//! Cholesky factorization `B = VV*` for Hermitian positive semidefinite `B`.
//!
//! Indices are scanned in increasing order. Index `n` becomes the next pivot
//! when the determinant of the pivot block grows to include it, i.e. when the
//! Schur complement of `b_nn` with respect to the current pivots,
//! `Δ_{k+1} / Δ_k`, exceeds `eps_rank * max_i b_ii`. A pivot at `n` opens a
//! new column of `V` whose entries are `v_mk = <δ_m, η_k>_B`, where `η_k` is the
//! `B`-orthonormal vector obtained from `δ_{n_1}, ..., δ_{n_k}`. Rows of skipped
//! indices are `B`-linear combinations of earlier pivots and only touch the
//! columns that already exist, which keeps `V` lower triangular.
//!
//! Pivot positions in this module are 0-based.
//!
//! For strictly positive definite `B` every index is a pivot and `V` is the
//! classical Cholesky factor with a positive diagonal.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{
    ensure_square, hermitian_asymmetry, hermitian_eigenvalues, is_finite_matrix, max_abs, CMatrix, HVector,
    Scalar, ToleranceConfig,
};

/// Selected pivot positions `n_1 < ... < n_K` and the leading pivot-block
/// determinants `Δ_1, ..., Δ_K`.
#[derive(Debug, Clone, PartialEq)]
pub struct PivotSequence {
    indices: Vec<usize>,
    deltas: Vec<f64>,
}

impl PivotSequence {
    /// Checks ordering, positivity and bounds against a matrix of size `size`.
    pub fn new(indices: Vec<usize>, deltas: Vec<f64>, size: usize) -> Result<Self> {
        if indices.len() != deltas.len() {
            return Err(Error::InvalidPivots(format!(
                "{} indices but {} determinants",
                indices.len(),
                deltas.len()
            )));
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidPivots("indices not strictly increasing".into()));
        }
        if let Some(&last) = indices.last() {
            if last >= size {
                return Err(Error::InvalidPivots(format!("index {last} outside a {size}x{size} matrix")));
            }
        }
        if deltas.iter().any(|&d| !(d > 0.0)) {
            return Err(Error::InvalidPivots("non-positive determinant".into()));
        }
        Ok(PivotSequence { indices, deltas })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// The indices counted from 1.
    pub fn one_based(&self) -> Vec<usize> {
        self.indices.iter().map(|i| i + 1).collect()
    }

    pub fn deltas(&self) -> &[f64] {
        &self.deltas
    }

    /// `K`.
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Number of pivots strictly before position `n`.
    fn count_before(&self, n: usize) -> usize {
        self.indices.partition_point(|&p| p < n)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CholeskyFactor {
    /// Lower triangular, `n x n`; columns past `rank` are zero.
    pub v: CMatrix,
    pub rank: usize,
    pub pivots: PivotSequence,
}

impl CholeskyFactor {
    /// `max |VV* - B|`.
    pub fn residual(&self, b: &CMatrix) -> f64 {
        max_abs(&(&self.v * self.v.adjoint() - b))
    }
}

/// Checks that `b` is square, finite, Hermitian and PSD within tolerance.
pub fn validate_psd(b: &CMatrix, tol: &ToleranceConfig) -> Result<()> {
    ensure_square(b)?;
    if !is_finite_matrix(b) {
        return Err(Error::NonFinite);
    }
    let scale = max_abs(b).max(1.0);
    let asymmetry = hermitian_asymmetry(b)?;
    if asymmetry > tol.eps_herm * scale {
        return Err(Error::NotHermitian { asymmetry });
    }
    if let Some(&min_eigenvalue) = hermitian_eigenvalues(b)?.first() {
        if min_eigenvalue < -tol.eps_eig * scale {
            return Err(Error::NotPositiveSemidefinite { min_eigenvalue });
        }
    }
    Ok(())
}

struct Scan {
    pivots: Vec<usize>,
    schur: Vec<f64>,
    columns: Vec<HVector>,
}

fn pivot_threshold(b: &CMatrix, tol: &ToleranceConfig) -> f64 {
    let max_diag = (0..b.nrows()).map(|i| b[(i, i)].re).fold(0.0, f64::max);
    tol.eps_rank * max_diag
}

fn schur_scan(b: &CMatrix, tol: &ToleranceConfig) -> Scan {
    let n = b.nrows();
    let threshold = pivot_threshold(b, tol);
    let mut scan = Scan { pivots: Vec::new(), schur: Vec::new(), columns: Vec::new() };
    if threshold <= 0.0 {
        return scan;
    }
    for j in 0..n {
        let d = b[(j, j)].re - scan.columns.iter().map(|c| c[j].norm_sqr()).sum::<f64>();
        if d <= threshold {
            continue;
        }
        let pivot = d.sqrt();
        let mut col = DVector::zeros(n);
        col[j] = Complex64::new(pivot, 0.0);
        for i in (j + 1)..n {
            let mut acc = b[(i, j)];
            for c in &scan.columns {
                acc -= c[i] * c[j].conj();
            }
            col[i] = acc / pivot;
        }
        scan.pivots.push(j);
        scan.schur.push(d);
        scan.columns.push(col);
    }
    scan
}

fn cumulative_products(schur: &[f64]) -> Vec<f64> {
    schur
        .iter()
        .scan(1.0, |acc, &s| {
            *acc *= s;
            Some(*acc)
        })
        .collect()
}

/// Greedy smallest-index pivot selection. `B = 0` yields the empty sequence.
pub fn pivot_sequence(b: &CMatrix, tol: &ToleranceConfig) -> Result<PivotSequence> {
    validate_psd(b, tol)?;
    let scan = schur_scan(b, tol);
    Ok(PivotSequence { deltas: cumulative_products(&scan.schur), indices: scan.pivots })
}

/// Coefficients `λ_{n,1..i}` expressing a non-pivot index `n` through the
/// pivots before it: `Σ_k λ_k b_{n_k n_l} = b_{n n_l}` for `l = 1..i`.
///
/// The residual `δ_n - Σ_k λ_k δ_{n_k}` has zero `B`-norm, so it is
/// `B`-orthogonal to every vector.
pub fn lambda_coefficients(b: &CMatrix, piv: &PivotSequence, n: usize) -> Result<Vec<Scalar>> {
    let size = ensure_square(b)?;
    if n >= size {
        return Err(Error::IndexOutOfRange { index: n, len: size });
    }
    if piv.indices.binary_search(&n).is_ok() {
        return Err(Error::IsPivot { index: n });
    }
    let before = &piv.indices[..piv.count_before(n)];
    let i = before.len();
    if i == 0 {
        return Ok(Vec::new());
    }
    let system = CMatrix::from_fn(i, i, |l, k| b[(before[k], before[l])]);
    let rhs = HVector::from_fn(i, |l, _| b[(n, before[l])]);
    let solution = system.lu().solve(&rhs).ok_or(Error::SingularPivotBlock)?;
    Ok(solution.iter().copied().collect())
}

/// `<x, y>_B = Σ b(a, c) x_a conj(y_c)`.
pub fn b_inner(b: &CMatrix, x: &HVector, y: &HVector) -> Scalar {
    x.dot(&(b * y.conjugate()))
}

/// `B`-orthonormal vectors `η_1..η_K` built from the pivot coordinate vectors.
///
/// Row `i` of the returned `K x n` matrix holds the coordinates of `η_i`; it is
/// supported on `n_1..n_i` with coefficient `sqrt(Δ_{i-1}/Δ_i)` on `n_i`.
pub fn eta_basis(b: &CMatrix, piv: &PivotSequence) -> Result<CMatrix> {
    let n = ensure_square(b)?;
    if piv.indices.last().is_some_and(|&p| p >= n) {
        return Err(Error::InvalidPivots(format!("pivot outside a {n}x{n} matrix")));
    }
    let mut etas: Vec<HVector> = Vec::with_capacity(piv.len());
    for &p in &piv.indices {
        let mut w = HVector::zeros(n);
        w[p] = Complex64::new(1.0, 0.0);
        // two passes of modified Gram-Schmidt in the B-form
        for _ in 0..2 {
            for eta in &etas {
                let c = b_inner(b, &w, eta);
                w -= eta * c;
            }
        }
        let norm_sq = b_inner(b, &w, &w).re;
        if !(norm_sq > 0.0) {
            return Err(Error::SingularPivotBlock);
        }
        etas.push(w.unscale(norm_sq.sqrt()));
    }
    let mut h = CMatrix::zeros(etas.len(), n);
    for (i, eta) in etas.iter().enumerate() {
        h.set_row(i, &eta.transpose());
    }
    Ok(h)
}

/// `H B H*` for a coefficient matrix `H` whose rows are vectors in the `B`-form.
pub fn b_gram(b: &CMatrix, h: &CMatrix) -> CMatrix {
    h * b * h.adjoint()
}

pub fn cholesky_psd(b: &CMatrix, tol: &ToleranceConfig) -> Result<CholeskyFactor> {
    validate_psd(b, tol)?;
    let n = b.nrows();
    let scan = schur_scan(b, tol);
    let mut v = CMatrix::zeros(n, n);
    for (k, col) in scan.columns.iter().enumerate() {
        v.set_column(k, col);
    }
    let rank = scan.pivots.len();
    let pivots = PivotSequence { deltas: cumulative_products(&scan.schur), indices: scan.pivots };
    Ok(CholeskyFactor { v, rank, pivots })
}
