use thiserror::Error;

/// Errors raised anywhere in the solver stack.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Inconsistent or unparsable problem description.
    #[error("{}", fmt_config(.line, .message))]
    Config { line: Option<usize>, message: String },

    /// A dense operation would exceed its memory or size budget.
    #[error("resource budget exceeded: {what} needs {required} but the budget is {budget}")]
    Resource {
        what: String,
        required: u64,
        budget: u64,
    },

    /// LU factorization hit a pivot below the singularity threshold.
    #[error("matrix is numerically singular (pivot {pivot:e} at column {column})")]
    Singular { column: usize, pivot: f64 },

    /// An iterative or dense numerical kernel failed.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A reference computation could not reach its accuracy target.
    #[error("accuracy error: {0}")]
    Accuracy(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn fmt_config(line: &Option<usize>, message: &str) -> String {
    match line {
        Some(l) => format!("configuration error at line {l}: {message}"),
        None => format!("configuration error: {message}"),
    }
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config {
            line: None,
            message: msg.into(),
        }
    }

    pub(crate) fn config_at(line: usize, msg: impl Into<String>) -> Self {
        Error::Config {
            line: Some(line),
            message: msg.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
