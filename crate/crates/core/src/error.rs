use thiserror::Error;

/// Errors raised by the solvers when an input falls outside its domain.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} = {value} is outside the domain: {constraint}")]
    Domain {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },

    #[error("invalid parameter `{key}`: {constraint}")]
    InvalidParam { key: &'static str, constraint: String },
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64, constraint: &'static str) -> Self {
        Error::Domain {
            name,
            value,
            constraint,
        }
    }

    pub(crate) fn param(key: &'static str, constraint: impl Into<String>) -> Self {
        Error::InvalidParam {
            key,
            constraint: constraint.into(),
        }
    }

    /// Stable machine-readable class of the error.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Domain { .. } => "domain_error",
            Error::InvalidParam { .. } => "constraint_violation",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
