use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: String,
        found: String,
    },
    #[error("degenerate subspace: {0}")]
    DegenerateSubspace(String),
    #[error("{algorithm} did not converge after {sweeps} sweeps")]
    NoConvergence { algorithm: &'static str, sweeps: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("channel is not an unambiguous unitary channel: {0}")]
    NotUuqc(String),
    #[error("error set is not correctable: residual {residual:e}")]
    NotCorrectable { residual: f64 },
    #[error("malformed document: {0}")]
    Format(String),
}

impl Error {
    pub(crate) fn dims(context: &'static str, expected: impl ToString, found: impl ToString) -> Self {
        Error::DimensionMismatch {
            context,
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }

    /// True for failures caused by the numerics rather than the caller's input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NoConvergence { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
