use thiserror::Error;

/// Errors raised by the jet calculus engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JetError {
    #[error("multi-index length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("multi-index has {0} entries, at most {max} base variables are supported", max = crate::multiindex::MAX_BASE_VARS)]
    TooManyBaseVariables(usize),

    #[error("multi-index {kappa} is not contained in {tau}")]
    NotContained { tau: String, kappa: String },

    #[error("expressions carry different bundle signatures")]
    SignatureMismatch,

    #[error("invalid signature: {0}")]
    InvalidSignature(String),

    #[error("coordinate {0} is outside the declared bundle")]
    CoordinateOutOfRange(String),

    #[error("operator shape mismatch: {op} needs {expected}, got {found}")]
    ShapeMismatch {
        op: &'static str,
        expected: String,
        found: String,
    },

    #[error("rank mismatch: expected {expected} components, found {found}")]
    RankMismatch { expected: usize, found: usize },

    #[error("no value assigned to coordinate {0}")]
    Unassigned(String),

    #[error("malformed JSON form: {0}")]
    Json(String),

    #[error("{0}")]
    Usage(String),
}

pub type Result<T, E = JetError> = std::result::Result<T, E>;
