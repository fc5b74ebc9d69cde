//! From normalized Bessel sequences back to unit vectors.
//!
//! A normalized Bessel sequence `g_0..g_L` has `||g_0|| = 1`, `g_0 ⊥ g_n` for
//! `n >= 1`, and a contractive Gram matrix. Every such sequence is the
//! auxiliary sequence of some unit vectors, and two constructions are offered:
//!
//! * [`synthesize_triangular`] factors `Ã = (I - G)` without its first row and
//!   column as `VV*`, shifts `V` into a strictly lower triangular `U` with
//!   `I - G = UU*`, inverts `I + U` to `I + M`, and sets
//!   `e_i = Σ_{k<=i} m_ik g_k`.
//! * [`synthesize_admissible`] solves `(I - S_{N-1}) y = g_N` step by step for
//!   the minimal-norm `y_N` and completes it to a unit vector along the kernel,
//!   producing the sequence with `<e_N, e_{N-1}> >= 0`. When the input is
//!   stable this sequence is unique.

use std::fmt;

use num_complex::Complex64;

use crate::cholesky::{cholesky_psd, CholeskyFactor};
use crate::error::{BesselViolation, Error, Result};
use crate::hilbert::{
    common_dim, gram_unchecked, inner_unchecked, is_projection, max_abs, operator_norm, spans, CMatrix, HVector,
    ToleranceConfig,
};
use crate::kaczmarz::{auxiliary_sequence, partial_sum_unchecked, UnitVectorSequence};
use crate::svd::svd;
use crate::triangular::TriangularPair;

/// A validated normalized Bessel sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct BesselSequence {
    vectors: Vec<HVector>,
}

impl BesselSequence {
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

    pub fn gram(&self) -> CMatrix {
        gram_unchecked(&self.vectors)
    }
}

/// Every normalized-Bessel margin of `gs`, violated or not.
#[derive(Debug, Clone, PartialEq)]
pub struct BesselMargins {
    pub first_norm: f64,
    pub max_first_overlap: f64,
    pub gram_norm: f64,
}

pub fn bessel_margins(gs: &[HVector]) -> Result<BesselMargins> {
    common_dim(gs)?;
    let first_norm = gs[0].norm();
    let max_first_overlap = gs[1..].iter().map(|g| inner_unchecked(&gs[0], g).norm()).fold(0.0, f64::max);
    let gram_norm = operator_norm(&gram_unchecked(gs));
    Ok(BesselMargins { first_norm, max_first_overlap, gram_norm })
}

/// Accepts `gs` when `| ||g_0|| - 1 | <= eps_unit`, `|<g_0, g_n>| <= eps_id`
/// and `||G|| <= 1 + eps_eig`; `g_0` is then rescaled to unit norm. Otherwise
/// every violated invariant is reported with its margin.
pub fn validate_bessel(gs: Vec<HVector>, tol: &ToleranceConfig) -> Result<BesselSequence> {
    common_dim(&gs)?;
    let mut violations = Vec::new();

    let norm = gs[0].norm();
    let margin = (norm - 1.0).abs();
    if margin > tol.eps_unit {
        violations.push(BesselViolation::FirstNorm { norm, margin });
    }
    for (index, g) in gs.iter().enumerate().skip(1) {
        let overlap = inner_unchecked(&gs[0], g).norm();
        if overlap > tol.eps_id {
            violations.push(BesselViolation::FirstNotOrthogonal { index, overlap });
        }
    }
    let gram_norm = operator_norm(&gram_unchecked(&gs));
    if gram_norm > 1.0 + tol.eps_eig {
        violations.push(BesselViolation::NotContraction { norm: gram_norm, margin: gram_norm - 1.0 });
    }

    if !violations.is_empty() {
        return Err(Error::InvalidBessel(violations));
    }
    let mut vectors = gs;
    if norm != 1.0 {
        vectors[0].unscale_mut(norm);
    }
    Ok(BesselSequence { vectors })
}

/// The vectors span `ℂ^d` and their Gram matrix is an orthogonal projection.
pub fn is_tight_frame(gs: &BesselSequence, tol: &ToleranceConfig) -> bool {
    spans(gs.vectors(), gs.dim(), tol).unwrap_or(false) && is_projection(&gs.gram(), tol).unwrap_or(false)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthesisMethod {
    Triangular,
    Admissible,
}

impl fmt::Display for SynthesisMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SynthesisMethod::Triangular => "triangular",
            SynthesisMethod::Admissible => "admissible",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SynthesisDiagnostics {
    /// `max_i | ||e_i|| - 1 |`.
    pub max_unit_deviation: f64,
    /// `max |auxiliary_sequence(e) - g|` over all entries.
    pub aux_residual: f64,
    /// Triangular path: `max_{i>j} |<e_i, e_j> - m_ij|`.
    pub overlap_residual: Option<f64>,
    /// Triangular path: `max |VV* - Ã|`.
    pub cholesky_residual: Option<f64>,
    /// Admissible path: `||y_N||` for `N = 1..L`.
    pub solution_norms: Vec<f64>,
    /// Admissible path: the completion weights `λ_N`.
    pub lambdas: Vec<f64>,
    /// Admissible path: numerical `dim ker(I - S_{N-1})`.
    pub kernel_dims: Vec<usize>,
    /// Admissible path: steps where the completion was not unique.
    pub non_unique_steps: Vec<usize>,
    /// Admissible path: `max_N ||(I - S_{N-1}) e_{N-1}||`.
    pub kernel_containment: Option<f64>,
    /// Admissible path: `max_N ||(I - S_{N-1}) y_N - g_N||`.
    pub solve_residual: Option<f64>,
}

impl SynthesisDiagnostics {
    /// Largest residual that must stay below `eps_id`.
    pub fn worst_residual(&self) -> f64 {
        [self.max_unit_deviation, self.aux_residual, self.overlap_residual.unwrap_or(0.0)]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisResult {
    pub units: UnitVectorSequence,
    pub method: SynthesisMethod,
    pub diagnostics: SynthesisDiagnostics,
    /// Triangular path only: the synthesized `(M, U)`.
    pub pair: Option<TriangularPair>,
    /// Triangular path only: the factorization of `Ã`.
    pub factor: Option<CholeskyFactor>,
}

fn finish(
    gs: &BesselSequence,
    units: Vec<HVector>,
    mut diagnostics: SynthesisDiagnostics,
    tol: &ToleranceConfig,
) -> Result<(UnitVectorSequence, SynthesisDiagnostics)> {
    diagnostics.max_unit_deviation = units.iter().map(|e| (e.norm() - 1.0).abs()).fold(0.0, f64::max);
    let units = UnitVectorSequence::from_vec_unchecked(units);
    let back = auxiliary_sequence(&units);
    diagnostics.aux_residual = back
        .vectors()
        .iter()
        .zip(gs.vectors())
        .flat_map(|(a, b)| (a - b).iter().map(|z| z.norm()).collect::<Vec<_>>())
        .fold(0.0, f64::max);
    let worst = diagnostics.worst_residual();
    if !(worst <= tol.eps_id) {
        return Err(Error::SynthesisResidual { residual: worst, tolerance: tol.eps_id });
    }
    Ok((units, diagnostics))
}

/// Unit vectors whose auxiliary sequence is `gs`, via the factorization
/// `I - G = UU*`.
pub fn synthesize_triangular(gs: &BesselSequence, tol: &ToleranceConfig) -> Result<SynthesisResult> {
    let g = gs.vectors();
    let n = g.len();
    let a = CMatrix::identity(n, n) - gs.gram();

    let first = (0..n).map(|j| a[(0, j)].norm()).fold(0.0, f64::max);
    if first > tol.eps_id {
        return Err(Error::InvalidBessel(vec![BesselViolation::FirstNotOrthogonal {
            index: (0..n).max_by(|&i, &j| a[(0, i)].norm().total_cmp(&a[(0, j)].norm())).unwrap_or(0),
            overlap: first,
        }]));
    }

    let trimmed = a.view((1, 1), (n - 1, n - 1)).into_owned();
    let trimmed = (&trimmed + trimmed.adjoint()).scale(0.5);
    let factor = cholesky_psd(&trimmed, tol)?;

    // zero row on top, zero column on the right: U[i][j] = V[i-1][j]
    let mut u = CMatrix::zeros(n, n);
    if n > 1 {
        u.view_mut((1, 0), (n - 1, n - 1)).copy_from(&factor.v);
    }
    let pair = TriangularPair::from_u(u)?;

    let m = pair.m();
    let units: Vec<HVector> = (0..n)
        .map(|i| {
            let mut e = g[i].clone();
            for k in 0..i {
                e += &g[k] * m[(i, k)];
            }
            e
        })
        .collect();

    let mut overlap_residual: f64 = 0.0;
    for i in 0..n {
        for j in 0..i {
            overlap_residual = overlap_residual.max((inner_unchecked(&units[i], &units[j]) - m[(i, j)]).norm());
        }
    }
    let diagnostics = SynthesisDiagnostics {
        overlap_residual: Some(overlap_residual),
        cholesky_residual: Some(factor.residual(&trimmed)),
        ..SynthesisDiagnostics::default()
    };
    let (units, diagnostics) = finish(gs, units, diagnostics, tol)?;
    Ok(SynthesisResult {
        units,
        method: SynthesisMethod::Triangular,
        diagnostics,
        pair: Some(pair),
        factor: Some(factor),
    })
}

/// The admissible unit vectors whose auxiliary sequence is `gs`.
///
/// At step `N` the minimal-norm solution `y_N` of `(I - S_{N-1}) y = g_N` is
/// computed from an SVD with rank threshold `eps_rank`, and
/// `e_N = y_N + sqrt(1 - ||y_N||^2) u` where `u` is `e_{N-1}` (always in the
/// kernel) or, when the numerical kernel is larger, the normalized projection
/// of `e_{N-1}` onto it. Larger kernels with `||y_N|| < 1` are recorded in
/// [`SynthesisDiagnostics::non_unique_steps`].
pub fn synthesize_admissible(gs: &BesselSequence, tol: &ToleranceConfig) -> Result<SynthesisResult> {
    let g = gs.vectors();
    let d = gs.dim();
    let mut units: Vec<HVector> = vec![g[0].clone()];
    let mut diagnostics = SynthesisDiagnostics::default();
    let mut containment: f64 = 0.0;
    let mut solve_residual: f64 = 0.0;

    for step in 1..g.len() {
        let t = CMatrix::identity(d, d) - partial_sum_unchecked(&units, g, step);
        let svd = svd(&t);
        let threshold = tol.eps_rank * svd.s[0].max(1.0);
        let y = svd.solve(&g[step], threshold);

        let residual = (&t * &y - &g[step]).norm();
        if residual > tol.eps_id {
            return Err(Error::Inconsistent { step, residual });
        }
        solve_residual = solve_residual.max(residual);
        let y_norm = y.norm();
        if y_norm > 1.0 + tol.eps_id {
            return Err(Error::SolutionTooLong { step, norm: y_norm });
        }

        let prev = &units[step - 1];
        containment = containment.max((&t * prev).norm());
        let kernel = svd.kernel(threshold);

        let direction = if kernel.len() <= 1 {
            prev.clone()
        } else {
            let mut p = HVector::zeros(d);
            for k in &kernel {
                p += k * inner_unchecked(prev, k);
            }
            let pn = p.norm();
            if pn > tol.eps_rank {
                p.unscale(pn)
            } else {
                prev.clone()
            }
        };

        let slack = 1.0 - y_norm * y_norm;
        let lambda = slack.max(0.0).sqrt();
        if kernel.len() > 1 && slack > tol.eps_id {
            diagnostics.non_unique_steps.push(step);
        }
        diagnostics.solution_norms.push(y_norm);
        diagnostics.lambdas.push(lambda);
        diagnostics.kernel_dims.push(kernel.len());
        units.push(y + direction * Complex64::new(lambda, 0.0));
    }
    diagnostics.kernel_containment = Some(containment);
    diagnostics.solve_residual = Some(solve_residual);

    let (units, diagnostics) = finish(gs, units, diagnostics, tol)?;
    Ok(SynthesisResult { units, method: SynthesisMethod::Admissible, diagnostics, pair: None, factor: None })
}

/// Multiplies each vector by a unit phase so that `<e_n, e_{n+1}>` is real
/// and nonnegative. Consecutive pairs with vanishing overlap keep their phase.
pub fn admissible_phases(es: &UnitVectorSequence) -> UnitVectorSequence {
    let mut out: Vec<HVector> = Vec::with_capacity(es.len());
    for e in es.vectors() {
        let mut e = e.clone();
        if let Some(prev) = out.last() {
            let c = inner_unchecked(prev, &e);
            if c.norm() > 0.0 {
                e *= c / c.norm();
            }
        }
        out.push(e);
    }
    UnitVectorSequence::from_vec_unchecked(out)
}

/// Finite stability levels.
///
/// `units_stable_through = Some(N)` means `{e_n}_{n>=N'}` spans `ℂ^d` for every
/// `N' <= N`; `bessel_stable_through` is the same for `{g_0} ∪ {g_n}_{n>=N'}`.
/// `None` means the test already fails at `N = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub bessel_stable_through: Option<usize>,
    pub units_stable_through: Option<usize>,
    /// `|<e_n, e_{n+1}>|`; empty when only the Bessel sequence is known.
    pub consecutive_overlaps: Vec<f64>,
}

fn bessel_tail(g: &[HVector], from: usize) -> Vec<HVector> {
    if from == 0 {
        return g.to_vec();
    }
    std::iter::once(g[0].clone()).chain(g[from.min(g.len())..].iter().cloned()).collect()
}

fn stable_through(len: usize, mut spans_at: impl FnMut(usize) -> bool) -> Option<usize> {
    let passing = (0..len).take_while(|&n| spans_at(n)).count();
    passing.checked_sub(1)
}

fn bessel_level(g: &[HVector], tol: &ToleranceConfig) -> Option<usize> {
    let d = g[0].len();
    stable_through(g.len(), |n| spans(&bessel_tail(g, n), d, tol).unwrap_or(false))
}

pub fn stability_report(es: &UnitVectorSequence, tol: &ToleranceConfig) -> StabilityReport {
    let e = es.vectors();
    let d = es.dim();
    let gs = auxiliary_sequence(es);
    StabilityReport {
        bessel_stable_through: bessel_level(gs.vectors(), tol),
        units_stable_through: stable_through(e.len(), |n| spans(&e[n..], d, tol).unwrap_or(false)),
        consecutive_overlaps: es.consecutive_overlaps(),
    }
}

pub fn bessel_stability_report(gs: &BesselSequence, tol: &ToleranceConfig) -> StabilityReport {
    StabilityReport {
        bessel_stable_through: bessel_level(gs.vectors(), tol),
        units_stable_through: None,
        consecutive_overlaps: Vec::new(),
    }
}

/// Both sides of the stability equivalence at each truncation level
/// `N = 0..=L`:
///
/// * left: `{g_0} ∪ {g_n}_{n>=N+1}` spans `ℂ^d`;
/// * right: `{e_n}_{n>=N}` spans `ℂ^d` and `|<e_k, e_{k+1}>| > eps_rank` for all `k < N`.
///
/// In finite dimensions the two are equivalent level by level.
pub fn stability_sides(es: &UnitVectorSequence, tol: &ToleranceConfig) -> Vec<(bool, bool)> {
    let e = es.vectors();
    let d = es.dim();
    let gs = auxiliary_sequence(es);
    let g = gs.vectors();
    let overlaps = es.consecutive_overlaps();
    (0..e.len())
        .map(|n| {
            let left = spans(&bessel_tail(g, n + 1), d, tol).unwrap_or(false);
            let right = spans(&e[n..], d, tol).unwrap_or(false) && overlaps[..n].iter().all(|&o| o > tol.eps_rank);
            (left, right)
        })
        .collect()
}

pub fn stability_equivalence_holds(es: &UnitVectorSequence, tol: &ToleranceConfig) -> bool {
    stability_sides(es, tol).iter().all(|(l, r)| l == r)
}

/// Eigenvalues of the Gram matrix of `gs`, ascending.
pub fn gram_spectrum(gs: &[HVector]) -> Result<Vec<f64>> {
    common_dim(gs)?;
    crate::hilbert::hermitian_eigenvalues(&gram_unchecked(gs))
}

/// `max |G - G_ref|` between the Gram matrices of two families.
pub fn gram_distance(a: &[HVector], b: &[HVector]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { expected: a.len(), found: b.len() });
    }
    common_dim(a)?;
    common_dim(b)?;
    Ok(max_abs(&(gram_unchecked(a) - gram_unchecked(b))))
}
