use thiserror::Error;

/// Failures surfaced by the simulation engine.
///
/// `InvalidParam` is reported during parameter validation, before any
/// integration runs. `Diverged` is raised mid-run when a position or
/// velocity stops being finite; the step index identifies where.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("invalid parameter {field}: {reason}")]
    InvalidParam {
        field: &'static str,
        reason: String,
    },

    #[error("numerical divergence at step {step}: non-finite {quantity}")]
    Diverged {
        step: usize,
        quantity: &'static str,
    },

    #[error("operation requires at least one living prey")]
    NoAlivePrey,
}

impl SimError {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        SimError::InvalidParam {
            field,
            reason: reason.into(),
        }
    }
}
