//! The Kaczmarz iteration and its auxiliary sequence.
//!
//! For unit vectors `e_0, ..., e_L` and a target `x`, the iteration is
//!
//! ```text
//! x_0 = <x, e_0> e_0
//! x_n = x_{n-1} + <x - x_{n-1}, e_n> e_n
//! ```
//!
//! The auxiliary vectors `g_0 = e_0`, `g_n = e_n - Σ_{i<n} <e_n, e_i> g_i`
//! turn the iterates into partial sums `x_n = Σ_{i<=n} <x, g_i> e_i`, and the
//! squared residuals telescope: `||x - x_n||^2 = ||x||^2 - Σ_{j<=n} |<x, g_j>|^2`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{common_dim, inner_unchecked, CMatrix, HVector, Scalar, ToleranceConfig};

/// Ordered unit vectors `e_0..e_L` in `ℂ^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitVectorSequence {
    vectors: Vec<HVector>,
}

impl UnitVectorSequence {
    /// Validates shape, finiteness and `| ||e_n|| - 1 | <= eps_unit`.
    pub fn new(vectors: Vec<HVector>, tol: &ToleranceConfig) -> Result<Self> {
        common_dim(&vectors)?;
        for (index, e) in vectors.iter().enumerate() {
            let deviation = (e.norm() - 1.0).abs();
            if deviation > tol.eps_unit {
                return Err(Error::NotUnit { index, deviation });
            }
        }
        Ok(UnitVectorSequence { vectors })
    }

    /// Normalizes every vector. Fails on zero or non-finite vectors.
    pub fn normalized(vectors: Vec<HVector>) -> Result<Self> {
        common_dim(&vectors)?;
        let vectors = vectors
            .into_iter()
            .enumerate()
            .map(|(index, v)| {
                let n = v.norm();
                if n == 0.0 {
                    Err(Error::NotUnit { index, deviation: 1.0 })
                } else {
                    Ok(v.unscale(n))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(UnitVectorSequence { vectors })
    }

    pub(crate) fn from_vec_unchecked(vectors: Vec<HVector>) -> Self {
        UnitVectorSequence { vectors }
    }

    pub fn dim(&self) -> usize {
        self.vectors[0].len()
    }

    /// Number of vectors, `L + 1`.
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[HVector] {
        &self.vectors
    }

    pub fn into_vectors(self) -> Vec<HVector> {
        self.vectors
    }

    /// `|<e_n, e_{n+1}>|` for consecutive pairs.
    pub fn consecutive_overlaps(&self) -> Vec<f64> {
        self.vectors.windows(2).map(|w| inner_unchecked(&w[0], &w[1]).norm()).collect()
    }
}

/// The auxiliary vectors `g_0..g_L` generated from a unit-vector sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct AuxiliarySequence {
    vectors: Vec<HVector>,
}

impl AuxiliarySequence {
    pub(crate) fn from_vec(vectors: Vec<HVector>) -> Self {
        AuxiliarySequence { vectors }
    }

    pub fn vectors(&self) -> &[HVector] {
        &self.vectors
    }

    pub fn into_vectors(self) -> Vec<HVector> {
        self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.vectors[0].len()
    }
}

/// One run of the iteration against a fixed target.
#[derive(Debug, Clone, PartialEq)]
pub struct KaczmarzTrace {
    /// `x_0..x_L`.
    pub iterates: Vec<HVector>,
    /// `||x - x_n||`.
    pub residual_norms: Vec<f64>,
    /// Frame coefficients `<x, g_n>`.
    pub coefficients: Vec<Scalar>,
    /// `||x||^2 - Σ_n |<x, g_n>|^2`.
    pub defect: f64,
}

impl KaczmarzTrace {
    /// The run reached `x` up to the identity slack.
    pub fn is_effective(&self, tol: &ToleranceConfig) -> bool {
        self.defect <= tol.eps_id
    }
}

fn check_dim(expected: usize, v: &HVector) -> Result<()> {
    if v.len() != expected {
        return Err(Error::DimensionMismatch { expected, found: v.len() });
    }
    Ok(())
}

/// One Kaczmarz update: `x_prev + <x - x_prev, e> e`.
pub fn kaczmarz_step(x: &HVector, x_prev: &HVector, e: &HVector, tol: &ToleranceConfig) -> Result<HVector> {
    check_dim(x.len(), x_prev)?;
    check_dim(x.len(), e)?;
    let deviation = (e.norm() - 1.0).abs();
    if deviation > tol.eps_unit {
        return Err(Error::NotUnit { index: 0, deviation });
    }
    Ok(step_unchecked(x, x_prev, e))
}

fn step_unchecked(x: &HVector, x_prev: &HVector, e: &HVector) -> HVector {
    let c = inner_unchecked(&(x - x_prev), e);
    x_prev + e * c
}

/// `g_0 = e_0`, `g_n = e_n - Σ_{i<n} <e_n, e_i> g_i`, evaluated in index order.
pub fn auxiliary_sequence(es: &UnitVectorSequence) -> AuxiliarySequence {
    let e = es.vectors();
    let mut gs: Vec<HVector> = Vec::with_capacity(e.len());
    for (n, en) in e.iter().enumerate() {
        let mut g = en.clone();
        for (ei, gi) in e[..n].iter().zip(&gs) {
            g -= gi * inner_unchecked(en, ei);
        }
        gs.push(g);
    }
    AuxiliarySequence::from_vec(gs)
}

pub fn run_kaczmarz(x: &HVector, es: &UnitVectorSequence) -> Result<KaczmarzTrace> {
    check_dim(es.dim(), x)?;
    let gs = auxiliary_sequence(es);
    let e = es.vectors();

    let mut iterates = Vec::with_capacity(e.len());
    let mut current = &e[0] * inner_unchecked(x, &e[0]);
    iterates.push(current.clone());
    for en in &e[1..] {
        current = step_unchecked(x, &current, en);
        iterates.push(current.clone());
    }

    let residual_norms = iterates.iter().map(|xn| (x - xn).norm()).collect();
    let coefficients: Vec<Scalar> = gs.vectors().iter().map(|g| inner_unchecked(x, g)).collect();
    let defect = x.norm_squared() - coefficients.iter().map(|c| c.norm_sqr()).sum::<f64>();
    Ok(KaczmarzTrace { iterates, residual_norms, coefficients, defect })
}

fn check_index(n: usize, len: usize) -> Result<()> {
    if n >= len {
        return Err(Error::IndexOutOfRange { index: n, len });
    }
    Ok(())
}

/// The matrix of `S_n y = Σ_{j<=n} <y, e_j> g_j`, i.e. `Σ_{j<=n} g_j e_j*`.
pub fn partial_sum_matrix(es: &UnitVectorSequence, gs: &AuxiliarySequence, n: usize) -> Result<CMatrix> {
    if gs.len() != es.len() {
        return Err(Error::LengthMismatch { expected: es.len(), found: gs.len() });
    }
    check_index(n, es.len())?;
    check_dim(es.dim(), &gs.vectors()[0])?;
    Ok(partial_sum_unchecked(es.vectors(), gs.vectors(), n + 1))
}

/// `Σ_{j<count} g_j e_j*`.
pub(crate) fn partial_sum_unchecked(e: &[HVector], g: &[HVector], count: usize) -> CMatrix {
    let d = e[0].len();
    let mut s = CMatrix::zeros(d, d);
    for (ej, gj) in e[..count].iter().zip(&g[..count]) {
        s.ger(Complex64::new(1.0, 0.0), gj, &ej.conjugate(), Complex64::new(1.0, 0.0));
    }
    s
}

/// `P_n P_{n-1} ... P_0` with `P_k = I - e_k e_k*`.
pub fn projection_product(es: &UnitVectorSequence, n: usize) -> Result<CMatrix> {
    check_index(n, es.len())?;
    let d = es.dim();
    let mut acc = CMatrix::identity(d, d);
    for ek in &es.vectors()[..=n] {
        // P_k acc = acc - e_k (e_k* acc)
        let row = ek.adjoint() * &acc;
        acc -= ek * row;
    }
    Ok(acc)
}

/// Per-step residual of the energy identity,
/// `| ||x - x_n||^2 - (||x||^2 - Σ_{j<=n} |<x, g_j>|^2) |`.
pub fn energy_residuals(x: &HVector, trace: &KaczmarzTrace) -> Result<Vec<f64>> {
    if trace.iterates.len() != trace.coefficients.len() || trace.iterates.is_empty() {
        return Err(Error::LengthMismatch { expected: trace.iterates.len(), found: trace.coefficients.len() });
    }
    for xn in &trace.iterates {
        check_dim(x.len(), xn)?;
    }
    let total = x.norm_squared();
    let mut captured = 0.0;
    Ok(trace
        .iterates
        .iter()
        .zip(&trace.coefficients)
        .map(|(xn, c)| {
            captured += c.norm_sqr();
            ((x - xn).norm_squared() - (total - captured)).abs()
        })
        .collect())
}

/// Largest of [`energy_residuals`].
pub fn energy_identity_residual(x: &HVector, trace: &KaczmarzTrace) -> Result<f64> {
    Ok(energy_residuals(x, trace)?.into_iter().fold(0.0, f64::max))
}

/// `||x - x_n|| >= |<e_{n-1}, e_n>| ||x - x_{n-1}||` for every `n >= 1`, up to `eps_id`.
pub fn convergence_lower_bound_check(trace: &KaczmarzTrace, es: &UnitVectorSequence, tol: &ToleranceConfig) -> bool {
    let r = &trace.residual_norms;
    if r.len() != es.len() {
        return false;
    }
    es.consecutive_overlaps()
        .iter()
        .enumerate()
        .all(|(i, overlap)| r[i + 1] >= overlap * r[i] - tol.eps_id)
}

/// `||x||^2 - Σ_n |<x, g_n>|^2`.
pub fn defect(x: &HVector, gs: &[HVector]) -> Result<f64> {
    let d = common_dim(gs)?;
    check_dim(d, x)?;
    Ok(x.norm_squared() - gs.iter().map(|g| inner_unchecked(x, g).norm_sqr()).sum::<f64>())
}
