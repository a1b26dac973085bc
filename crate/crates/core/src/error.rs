use thiserror::Error;

use crate::portfolio::{AllocationViolation, AssetClass};

pub type EngineResult<T> = Result<T, EngineError>;

/// Errors raised by the projection engine.
///
/// [`EngineError::is_validation`] splits them into input-validation failures
/// (bad field values, malformed grids) and domain failures (an input that is
/// well-formed but which the model cannot evaluate).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("rate must be non-negative, got {0}")]
    NegativeRate(String),

    #[error("expected a {expected} rate, got {actual}")]
    PeriodMismatch {
        expected: &'static str,
        actual: &'static str,
    },

    #[error("cannot combine rates of kind {0} and {1}")]
    KindMismatch(&'static str, &'static str),

    #[error("invalid value for `{field}`: {reason}")]
    InvalidField { field: String, reason: String },

    #[error("annuity share must lie in [0, 1], got {0}")]
    ShareOutOfRange(String),

    #[error("invalid sweep grid: {0}")]
    InvalidGrid(String),

    #[error("caps sum to {0}, below 100%: no full allocation exists")]
    CapsBelowFull(String),

    #[error("infeasible allocation: {0}")]
    InfeasibleAllocation(String),

    #[error("allocation violates caps: {}", format_violations(.0))]
    AllocationRejected(Vec<AllocationViolation>),

    #[error("no expected return defined for weighted class {0}")]
    MissingReturn(AssetClass),

    #[error("division by zero: {0}")]
    DivisionByZero(&'static str),
}

impl EngineError {
    pub(crate) fn field(field: impl Into<String>, reason: impl Into<String>) -> Self {
        EngineError::InvalidField {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// True for errors caused by malformed or out-of-range input, false for
    /// errors where the input is well-formed but the model cannot evaluate it.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            EngineError::InfeasibleAllocation(_)
                | EngineError::AllocationRejected(_)
                | EngineError::MissingReturn(_)
                | EngineError::CapsBelowFull(_)
                | EngineError::DivisionByZero(_)
        )
    }

    /// Name of the offending input field, when the error can be pinned to one.
    pub fn field_name(&self) -> Option<&str> {
        match self {
            EngineError::InvalidField { field, .. } => Some(field),
            EngineError::ShareOutOfRange(_) => Some("annuity_share"),
            EngineError::InvalidGrid(_) => Some("grid"),
            _ => None,
        }
    }
}

fn format_violations(violations: &[AllocationViolation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
