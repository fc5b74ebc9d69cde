//! Singular value decompositions, delegated to faer.
//!
//! nalgebra's bidiagonal SVD loses accuracy on rank-deficient inputs (the
//! recomposition can be off by O(1)), and every rank decision in this crate
//! runs on rank-deficient matrices, so all SVDs go through here.

use faer::{c64, Mat};

use crate::hilbert::{CMatrix, HVector};

pub(crate) struct Svd {
    pub u: CMatrix,
    /// Nonincreasing.
    pub s: Vec<f64>,
    pub v: CMatrix,
}

fn to_faer(a: &CMatrix) -> Mat<c64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

fn from_faer(m: faer::MatRef<'_, c64>) -> CMatrix {
    CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Full SVD `A = U diag(s) V*`.
pub(crate) fn svd(a: &CMatrix) -> Svd {
    let (rows, cols) = a.shape();
    if rows == 0 || cols == 0 {
        return Svd { u: CMatrix::identity(rows, rows), s: Vec::new(), v: CMatrix::identity(cols, cols) };
    }
    let f = to_faer(a).svd().expect("SVD iteration converges on finite input");
    let s = f.S().column_vector().iter().map(|z| z.re).collect();
    Svd { u: from_faer(f.U()), s, v: from_faer(f.V()) }
}

pub(crate) fn singular_values(a: &CMatrix) -> Vec<f64> {
    if a.is_empty() {
        return Vec::new();
    }
    to_faer(a).singular_values().expect("SVD iteration converges on finite input")
}

impl Svd {
    /// Minimal-norm least-squares solution of `A y = b`, treating singular
    /// values `<= threshold` as zero.
    pub fn solve(&self, b: &HVector, threshold: f64) -> HVector {
        let mut y = HVector::zeros(self.v.nrows());
        for (k, &s) in self.s.iter().enumerate() {
            if s > threshold {
                let c = self.u.column(k).dotc(b) / s;
                y += self.v.column(k) * c;
            }
        }
        y
    }

    /// Orthonormal basis of the numerical kernel: right singular vectors with
    /// singular value `<= threshold`, plus those beyond `min(rows, cols)`.
    pub fn kernel(&self, threshold: f64) -> Vec<HVector> {
        (0..self.v.ncols())
            .filter(|&k| self.s.get(k).is_none_or(|&s| s <= threshold))
            .map(|k| self.v.column(k).into_owned())
            .collect()
    }
}
