use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("variable count mismatch: {left} vs {right}")]
    VariableCountMismatch { left: usize, right: usize },

    #[error("syntax error at position {pos}: {message}")]
    Syntax { pos: usize, message: String },

    #[error("unknown variable `{name}` at position {pos}")]
    UnknownVariable { name: String, pos: usize },

    #[error("zero polynomial not allowed: {0}")]
    ZeroPolynomial(String),

    #[error("resource limit exceeded: {what} (limit {limit})")]
    ResourceLimit { what: String, limit: usize },

    #[error("invalid set system: {0}")]
    InvalidSetSystem(String),

    #[error("1 is not in the ideal generated by the factors indexed by {0}")]
    NotInIdeal(String),

    #[error("confluent case unsupported: repeated root {0}")]
    ConfluentRoots(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("generators {0} and {1} do not commute")]
    NonCommuting(usize, usize),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("integrability condition violated: {0}")]
    Integrability(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}

/// Coarse classification used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Input,
    Resource,
    Verification,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::ResourceLimit { .. } => ErrorKind::Resource,
            Error::Verification(_) | Error::Integrability(_) | Error::NotInIdeal(_) => {
                ErrorKind::Verification
            }
            _ => ErrorKind::Input,
        }
    }

    pub(crate) fn term_cap(what: impl Into<String>, limit: usize) -> Self {
        Error::ResourceLimit {
            what: what.into(),
            limit,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
