use thiserror::Error;

/// Errors raised by the solver pipeline.
///
/// Every variant has a stable name (see [`BvpError::kind`]) which the command
/// line front end prints in diagnostics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BvpError {
    #[error("singularity strength m must be positive, got {0}")]
    SingularityStrengthNonpositive(f64),
    #[error("invalid boundary form: {0}")]
    InvalidBoundary(String),
    #[error("non-finite value in field `{0}`")]
    NonFinite(&'static str),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("function evaluation failed at x = {x}{}", .s.map(|s| format!(", s = {s}")).unwrap_or_default())]
    EvaluationFailed { x: f64, s: Option<f64> },
    #[error("argument outside the domain of {func}: {detail}")]
    DomainError { func: &'static str, detail: String },
    #[error("pole of {func} at {at}")]
    PoleError { func: &'static str, at: f64 },
    #[error("{what} did not converge: {detail}")]
    ConvergenceError { what: &'static str, detail: String },
    #[error("the shift lambda must be nonzero")]
    ShiftZeroError,
    #[error("resonance: {0}")]
    ResonanceError(String),
    #[error("backward integration of the singular solution failed near x = {0}")]
    SingularEndpointError(f64),
    #[error("closed-form and series constructions disagree (relative discrepancy {0:e})")]
    CrossCheckFailed(f64),
    #[error("parameter mismatch: {0}")]
    ParameterMismatch(String),
    #[error("no sign change of the boundary functional on [0, {ceiling}]")]
    NotFoundInRange { ceiling: f64, samples: Vec<(f64, f64)> },
    #[error("no admissible shift: {0}")]
    NoAdmissibleShift(String),
    #[error("iteration diverged at step {iteration} (delta {delta:e})")]
    DivergenceError { iteration: usize, delta: f64 },
    #[error("parse error: {0}")]
    Parse(String),
}

impl BvpError {
    /// Stable variant name used in diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            BvpError::SingularityStrengthNonpositive(_) => "SingularityStrengthNonpositive",
            BvpError::InvalidBoundary(_) => "InvalidBoundary",
            BvpError::NonFinite(_) => "NonFinite",
            BvpError::InvalidGrid(_) => "InvalidGrid",
            BvpError::EvaluationFailed { .. } => "EvaluationFailed",
            BvpError::DomainError { .. } => "DomainError",
            BvpError::PoleError { .. } => "PoleError",
            BvpError::ConvergenceError { .. } => "ConvergenceError",
            BvpError::ShiftZeroError => "ShiftZeroError",
            BvpError::ResonanceError(_) => "ResonanceError",
            BvpError::SingularEndpointError(_) => "SingularEndpointError",
            BvpError::CrossCheckFailed(_) => "CrossCheckFailed",
            BvpError::ParameterMismatch(_) => "ParameterMismatch",
            BvpError::NotFoundInRange { .. } => "NotFoundInRange",
            BvpError::NoAdmissibleShift(_) => "NoAdmissibleShift",
            BvpError::DivergenceError { .. } => "DivergenceError",
            BvpError::Parse(_) => "Parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, BvpError>;
