//! Kaczmarz iteration in `ℂ^d` and the correspondence between unit-vector
//! sequences and normalized Bessel sequences.
//!
//! Running the Kaczmarz iteration over unit vectors `e_0, e_1, ...` produces
//! auxiliary vectors `g_0, g_1, ...` whose coefficients `<x, g_n>` drive the
//! iterates. The `g_n` always form a normalized Bessel sequence, and they form
//! a Parseval frame exactly when the iteration converges for every target.
//! This crate computes the forward map ([`kaczmarz`]), the triangular matrix
//! calculus behind it ([`triangular`]), a semidefinite Cholesky factorization
//! ([`cholesky`]) and the inverse constructions ([`synthesis`]).
//!
//! ```
//! use framekz::prelude::*;
//!
//! let tol = ToleranceConfig::default();
//! let h = 3f64.sqrt() / 2.0;
//! let es = UnitVectorSequence::new(vec![real_vector(&[1.0, 0.0]), real_vector(&[0.5, h])], &tol)?;
//! let gs = auxiliary_sequence(&es);
//! assert!((gs.vectors()[1][1].re - h).abs() < 1e-15);
//!
//! let bessel = validate_bessel(gs.into_vectors(), &tol)?;
//! let back = synthesize_admissible(&bessel, &tol)?;
//! assert!((&back.units.vectors()[1] - &es.vectors()[1]).norm() < 1e-12);
//! # Ok::<(), framekz::Error>(())
//! ```

pub mod cholesky;
pub mod error;
pub mod hilbert;
pub mod kaczmarz;
mod svd;
pub mod synthesis;
pub mod triangular;

pub use error::{BesselViolation, Error, Result};

pub mod prelude {
    pub use crate::cholesky::{cholesky_psd, eta_basis, lambda_coefficients, pivot_sequence, CholeskyFactor, PivotSequence};
    pub use crate::error::{BesselViolation, Error};
    pub use crate::hilbert::{
        gram, inner, invert_unit_lower, is_contraction, is_projection, operator_norm, real_matrix, real_vector,
        CMatrix, HVector, Scalar, ToleranceConfig,
    };
    pub use crate::kaczmarz::{
        auxiliary_sequence, defect, run_kaczmarz, AuxiliarySequence, KaczmarzTrace, UnitVectorSequence,
    };
    pub use crate::synthesis::{
        is_tight_frame, stability_report, synthesize_admissible, synthesize_triangular, validate_bessel,
        BesselSequence, StabilityReport, SynthesisMethod, SynthesisResult,
    };
    pub use crate::triangular::{equivalence_check, gram_via_u, trace_dimension, triangular_pair, TriangularPair};
}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/kaczmarz.md")]
    mod kaczmarz {}
    #[doc = include_str!("../../../book/src/triangular.md")]
    mod triangular {}
    #[doc = include_str!("../../../book/src/cholesky.md")]
    mod cholesky {}
    #[doc = include_str!("../../../book/src/synthesis.md")]
    mod synthesis {}
    #[doc = include_str!("../../../book/src/tolerances.md")]
    mod tolerances {}
    #[doc = include_str!("../../../README.md")]
    mod readme {}
}
