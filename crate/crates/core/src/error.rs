use num_complex::Complex64;
use thiserror::Error;

use crate::dpa::DpaTrace;
use crate::sadpa::SadpaOutcome;

pub type Result<T> = std::result::Result<T, Error>;

/// Partial results carried by [`Error::MaxIterExceeded`].
#[derive(Debug, Clone)]
pub enum PartialResult {
    Dpa(DpaTrace),
    Sadpa(SadpaOutcome),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("period mismatch: {left} vs {right}")]
    PeriodMismatch { left: f64, right: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The shift is numerically an eigenvalue of the operator.
    #[error("shift {s} is nearly singular (reciprocal condition {rcond:.3e})")]
    NearSingularShift { s: Complex64, rcond: f64 },

    #[error("harmonic truncation did not converge: tail {tail_norm:.3e} at depth {harmonic_depth}")]
    TruncationNotConverged { tail_norm: f64, harmonic_depth: usize },

    #[error("no convergence after {iterations} iterations")]
    MaxIterExceeded {
        iterations: usize,
        partial: Box<PartialResult>,
    },

    #[error("iteration broke down at shift {s}: {reason}")]
    BreakdownAtShift { s: Complex64, reason: String },

    #[error("projected pencil is singular")]
    SingularPencil,

    #[error("M_r = Q_r(0)^* P_r(0) is singular")]
    SingularMr,

    #[error("eigentriple normalization violated: |q(0)^* p(0) - 1| = {0:.3e}")]
    NormalizationViolated(f64),

    #[error("transformed ports have significant harmonics beyond depth {requested} (tail {tail:.3e})")]
    TruncatedPorts { requested: usize, tail: f64 },

    #[error("evaluation point {0} coincides with a pole")]
    PoleHit(Complex64),

    #[error("pole {0} lies on the imaginary axis")]
    ImaginaryAxisPole(Complex64),

    #[error("mode {0} is not asymptotically stable")]
    UnstableMode(Complex64),

    #[error("unsupported input: {0}")]
    UnsupportedInput(String),

    #[error("matrix is singular")]
    Singular,

    #[error("eigenvalue iteration did not converge")]
    EigenNotConverged,

    #[error("malformed data: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable identifier used in structured error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch(_) => "dimension_mismatch",
            Error::PeriodMismatch { .. } => "period_mismatch",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::NearSingularShift { .. } => "near_singular_shift",
            Error::TruncationNotConverged { .. } => "truncation_not_converged",
            Error::MaxIterExceeded { .. } => "max_iter_exceeded",
            Error::BreakdownAtShift { .. } => "breakdown_at_shift",
            Error::SingularPencil => "singular_pencil",
            Error::SingularMr => "singular_mr",
            Error::NormalizationViolated(_) => "normalization_violated",
            Error::TruncatedPorts { .. } => "truncated_ports",
            Error::PoleHit(_) => "pole_hit",
            Error::ImaginaryAxisPole(_) => "imaginary_axis_pole",
            Error::UnstableMode(_) => "unstable_mode",
            Error::UnsupportedInput(_) => "unsupported_input",
            Error::Singular => "singular",
            Error::EigenNotConverged => "eigen_not_converged",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}
