use std::fmt;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Everything that can go wrong in the library.
///
/// Numeric variants carry the measured margin so that callers (and the CLI
/// reports) can show how far an input was from satisfying a precondition.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("length mismatch: expected {expected} vectors, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("empty input")]
    Empty,

    #[error("non-finite entry in input")]
    NonFinite,

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("index {index} out of range for a sequence of length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("matrix is not unit lower triangular: entry ({row}, {col}) = {value}")]
    NotUnitLower { row: usize, col: usize, value: f64 },

    #[error("vector {index} is not a unit vector: | ||e|| - 1 | = {deviation:e}")]
    NotUnit { index: usize, deviation: f64 },

    #[error("matrix is not Hermitian: max |B - B*| = {asymmetry:e}")]
    NotHermitian { asymmetry: f64 },

    #[error("matrix is not positive semidefinite: smallest eigenvalue {min_eigenvalue:e}")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error("index {index} is a pivot")]
    IsPivot { index: usize },

    #[error("pivot block is singular")]
    SingularPivotBlock,

    #[error("invalid pivot sequence: {0}")]
    InvalidPivots(String),

    #[error("not a normalized Bessel sequence: {}", DisplayViolations(.0))]
    InvalidBessel(Vec<BesselViolation>),

    #[error("step {step}: (I - S) y = g has no solution (residual {residual:e})")]
    Inconsistent { step: usize, residual: f64 },

    #[error("step {step}: minimal solution has norm {norm} > 1")]
    SolutionTooLong { step: usize, norm: f64 },

    #[error("synthesis residual {residual:e} exceeds tolerance {tolerance:e}")]
    SynthesisResidual { residual: f64, tolerance: f64 },

    #[error("invalid tolerance configuration: {0}")]
    InvalidTolerance(String),
}

impl Error {
    /// True for errors that describe a mathematical property of the input
    /// (as opposed to malformed shapes or arguments).
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::NotUnit { .. }
                | Error::NotHermitian { .. }
                | Error::NotPositiveSemidefinite { .. }
                | Error::InvalidBessel(_)
                | Error::Inconsistent { .. }
                | Error::SolutionTooLong { .. }
                | Error::SynthesisResidual { .. }
        )
    }
}

/// One violated normalized-Bessel invariant, with its margin.
#[derive(Debug, Clone, PartialEq)]
pub enum BesselViolation {
    /// `| ||g_0|| - 1 |` exceeds the unit slack.
    FirstNorm { norm: f64, margin: f64 },
    /// `|<g_0, g_n>|` exceeds the identity slack.
    FirstNotOrthogonal { index: usize, overlap: f64 },
    /// The Gram matrix has operator norm `norm > 1`; `margin = norm - 1`.
    NotContraction { norm: f64, margin: f64 },
}

impl BesselViolation {
    /// Stable identifier used as a diagnostic key.
    pub fn key(&self) -> String {
        match self {
            BesselViolation::FirstNorm { .. } => "g0_norm".to_string(),
            BesselViolation::FirstNotOrthogonal { index, .. } => format!("g0_orthogonality[{index}]"),
            BesselViolation::NotContraction { .. } => "contraction".to_string(),
        }
    }

    pub fn margin(&self) -> f64 {
        match *self {
            BesselViolation::FirstNorm { margin, .. } => margin,
            BesselViolation::FirstNotOrthogonal { overlap, .. } => overlap,
            BesselViolation::NotContraction { margin, .. } => margin,
        }
    }
}

impl fmt::Display for BesselViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BesselViolation::FirstNorm { norm, margin } => {
                write!(f, "||g_0|| = {norm} (margin {margin:e})")
            }
            BesselViolation::FirstNotOrthogonal { index, overlap } => {
                write!(f, "|<g_0, g_{index}>| = {overlap:e}")
            }
            BesselViolation::NotContraction { norm, margin } => {
                write!(f, "Gram norm {norm} (contraction margin {margin})")
            }
        }
    }
}

struct DisplayViolations<'a>(&'a [BesselViolation]);

impl fmt::Display for DisplayViolations<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}
