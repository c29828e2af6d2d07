use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum NesError {
    /// A cost evaluation left its domain (log/sqrt of a non-positive
    /// argument, or a point outside the game's feasible set).
    #[error("domain violation at ({x1}, {x2}): {reason}")]
    Domain { x1: f64, x2: f64, reason: String },

    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("unknown identifier `{name}` at position {pos}")]
    UnknownIdentifier { name: String, pos: usize },

    #[error("function `{name}` expects {expected} argument(s), got {got}")]
    Arity {
        name: String,
        expected: usize,
        got: usize,
    },

    /// Integration produced a NaN or infinite state.
    #[error("non-finite state at t = {t}: {state:?}")]
    NonFinite { t: f64, state: Vec<f64> },

    #[error("no sign change of the follower stationarity condition at x1 = {x1}")]
    NoBracket { x1: f64 },

    #[error("{method} did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence {
        method: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("singular {what} at {at:?}")]
    Singular { what: &'static str, at: Vec<f64> },

    #[error("degenerate order probe: {0}")]
    DegenerateProbe(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("empty trajectory: {0}")]
    EmptyTrajectory(String),

    #[error("usage: {0}")]
    Usage(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl NesError {
    pub(crate) fn domain(x1: f64, x2: f64, reason: impl Into<String>) -> Self {
        NesError::Domain {
            x1,
            x2,
            reason: reason.into(),
        }
    }

    pub fn is_domain(&self) -> bool {
        matches!(self, NesError::Domain { .. })
    }

    /// Process exit code: 2 for usage and input errors, 4 for domain
    /// violations, 3 for other numeric failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            NesError::Domain { .. } => 4,
            NesError::Syntax { .. }
            | NesError::UnknownIdentifier { .. }
            | NesError::Arity { .. }
            | NesError::InvalidParameter(_)
            | NesError::Config(_)
            | NesError::EmptyTrajectory(_)
            | NesError::Usage(_)
            | NesError::Io(_) => 2,
            NesError::NonFinite { .. }
            | NesError::NoBracket { .. }
            | NesError::NonConvergence { .. }
            | NesError::Singular { .. }
            | NesError::DegenerateProbe(_) => 3,
        }
    }
}

impl From<std::io::Error> for NesError {
    fn from(e: std::io::Error) -> Self {
        NesError::Io(e.to_string())
    }
}

pub type Result<T, E = NesError> = std::result::Result<T, E>;
