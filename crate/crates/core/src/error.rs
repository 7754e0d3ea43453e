use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("point {0} lies on the support interval")]
    OnSupport(String),

    #[error("quadrature failure: {0}")]
    Quadrature(String),

    #[error("normality failure for {index}: margin {margin:e}")]
    Normality { index: String, margin: f64 },

    #[error("expected {expected} zeros on {interval}, found {found}")]
    CountMismatch {
        expected: usize,
        found: usize,
        interval: String,
    },

    #[error("solver did not converge: {0}")]
    NonConvergence(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// A copy for handing the same failure to another caller; I/O errors
    /// keep only their message.
    pub fn duplicate(&self) -> Error {
        match self {
            Error::Invalid(s) => Error::Invalid(s.clone()),
            Error::OnSupport(s) => Error::OnSupport(s.clone()),
            Error::Quadrature(s) => Error::Quadrature(s.clone()),
            Error::Normality { index, margin } => Error::Normality {
                index: index.clone(),
                margin: *margin,
            },
            Error::CountMismatch {
                expected,
                found,
                interval,
            } => Error::CountMismatch {
                expected: *expected,
                found: *found,
                interval: interval.clone(),
            },
            Error::NonConvergence(s) => Error::NonConvergence(s.clone()),
            Error::Parse(s) => Error::Parse(s.clone()),
            Error::Io(e) => Error::Invalid(e.to_string()),
        }
    }
}

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Invalid(msg.into()))
}
