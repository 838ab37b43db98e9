use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("malformed graph: {0}")]
    Malformed(String),

    #[error("label {label:?} has length {found}, expected {expected}")]
    LabelLength {
        label: String,
        expected: usize,
        found: usize,
    },

    #[error("nondeterministic graph: state {state:?} has two edges labelled {label:?}")]
    Nondeterministic { state: String, label: String },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("{what} did not converge after {iterations} iterations (last change {last_change:e})")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
        last_change: f64,
    },

    #[error("numeric failure: {0}")]
    NumericFailure(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by bad input rather than by the numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameters(_)
                | Error::Malformed(_)
                | Error::LabelLength { .. }
                | Error::Nondeterministic { .. }
                | Error::Unsupported(_)
                | Error::Domain(_)
                | Error::Io(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
