//! The strictly lower triangular pair `(M, U)` attached to a unit-vector
//! sequence.
//!
//! `M` is the strictly lower part of the Gram matrix of `e`, and `U` is
//! determined by `(I + U)(I + M) = I`. Row `i` of `U` holds the coefficients
//! of `g_i` in terms of `e_0..e_{i-1}`, and the Gram matrix of `g` equals
//! `I - UU*`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{
    ensure_square, inner_unchecked, invert_unit_lower, max_abs, operator_norm, CMatrix, HVector, ToleranceConfig,
};
use crate::kaczmarz::{AuxiliarySequence, UnitVectorSequence};

#[derive(Debug, Clone, PartialEq)]
pub struct TriangularPair {
    m: CMatrix,
    u: CMatrix,
}

impl TriangularPair {
    /// Builds the pair from `U`, recovering `M = (I + U)^{-1} - I`.
    pub fn from_u(u: CMatrix) -> Result<Self> {
        let n = ensure_square(&u)?;
        let m = invert_unit_lower(&(&u + CMatrix::identity(n, n)))? - CMatrix::identity(n, n);
        Ok(TriangularPair { m, u })
    }

    pub fn m(&self) -> &CMatrix {
        &self.m
    }

    pub fn u(&self) -> &CMatrix {
        &self.u
    }

    /// `L + 1`.
    pub fn size(&self) -> usize {
        self.m.nrows()
    }

    /// `max |(I + U)(I + M) - I|`.
    pub fn inverse_residual(&self) -> f64 {
        let id = CMatrix::identity(self.size(), self.size());
        max_abs(&((&id + &self.u) * (&id + &self.m) - id))
    }
}

/// `M[i][j] = <e_i, e_j>` for `i > j`, zero elsewhere.
pub fn strict_lower_gram(es: &UnitVectorSequence) -> CMatrix {
    let e = es.vectors();
    let n = e.len();
    let mut m = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..i {
            m[(i, j)] = inner_unchecked(&e[i], &e[j]);
        }
    }
    m
}

pub fn triangular_pair(es: &UnitVectorSequence) -> TriangularPair {
    let m = strict_lower_gram(es);
    let n = m.nrows();
    let id = CMatrix::identity(n, n);
    let u = invert_unit_lower(&(&m + &id)).expect("I + M is unit lower triangular by construction") - id;
    TriangularPair { m, u }
}

/// `g_i = e_i + Σ_{k<i} U[i][k] e_k`.
pub fn coefficients_c(pair: &TriangularPair, es: &UnitVectorSequence) -> Result<AuxiliarySequence> {
    if pair.size() != es.len() {
        return Err(Error::LengthMismatch { expected: pair.size(), found: es.len() });
    }
    let e = es.vectors();
    let gs = (0..e.len())
        .map(|i| {
            let mut g = e[i].clone();
            for (k, ek) in e[..i].iter().enumerate() {
                g += ek * pair.u[(i, k)];
            }
            g
        })
        .collect();
    Ok(AuxiliarySequence::from_vec(gs))
}

/// `I - UU*`.
pub fn gram_via_u(pair: &TriangularPair) -> CMatrix {
    let n = pair.size();
    CMatrix::identity(n, n) - &pair.u * pair.u.adjoint()
}

/// Operator norm of `(I + U)(I + M + M*)(I + U*) - (I - UU*)`.
pub fn factorization_identity_residual(pair: &TriangularPair) -> f64 {
    let n = pair.size();
    let id = CMatrix::identity(n, n);
    let left = &id + &pair.u;
    let lhs = &left * (&id + &pair.m + pair.m.adjoint()) * left.adjoint();
    operator_norm(&(lhs - gram_via_u(pair)))
}

/// `Tr(I - UU*) = Σ_n ||g_n||^2`.
pub fn trace_dimension(pair: &TriangularPair) -> f64 {
    let n = pair.size();
    let frob: f64 = pair.u.iter().map(Complex64::norm_sqr).sum();
    n as f64 - frob
}

/// `max |UU* - U'U'*|` for two sequences of equal length.
pub fn equivalence_margin(es: &UnitVectorSequence, es2: &UnitVectorSequence) -> Result<f64> {
    if es.len() != es2.len() {
        return Err(Error::LengthMismatch { expected: es.len(), found: es2.len() });
    }
    let u1 = triangular_pair(es).u;
    let u2 = triangular_pair(es2).u;
    Ok(max_abs(&(&u1 * u1.adjoint() - &u2 * u2.adjoint())))
}

/// Whether the auxiliary sequences of `es` and `es2` differ by a unitary,
/// decided through `UU* = U'U'*`. The ambient dimensions may differ.
pub fn equivalence_check(es: &UnitVectorSequence, es2: &UnitVectorSequence, tol: &ToleranceConfig) -> Result<bool> {
    Ok(equivalence_margin(es, es2)? <= tol.eps_id)
}

/// Cross-check for [`equivalence_check`] when both sequences live in the same
/// space: the least-squares unitary `V` (polar factor of `Σ g'_n g_n*`) and
/// `max_n ||V g_n - g'_n||`.
pub fn unitary_alignment_residual(gs: &[HVector], gs2: &[HVector]) -> Result<f64> {
    if gs.len() != gs2.len() {
        return Err(Error::LengthMismatch { expected: gs.len(), found: gs2.len() });
    }
    let d = crate::hilbert::common_dim(gs)?;
    let d2 = crate::hilbert::common_dim(gs2)?;
    if d != d2 {
        return Err(Error::DimensionMismatch { expected: d, found: d2 });
    }
    let mut cross = CMatrix::zeros(d, d);
    for (g, h) in gs.iter().zip(gs2) {
        cross += h * g.adjoint();
    }
    let svd = crate::svd::svd(&cross);
    let v = svd.u * svd.v.adjoint();
    Ok(gs
        .iter()
        .zip(gs2)
        .map(|(g, h)| (&v * g - h).norm())
        .fold(0.0, f64::max))
}
