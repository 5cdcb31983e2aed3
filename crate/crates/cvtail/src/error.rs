use crate::gpdfit::GpdFit;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Error type shared by every module.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A tail (or sub-sample) is too small for the requested operation.
    /// For dyadic-threshold requests the maximal feasible order is attached.
    #[error("insufficient tail: {detail}")]
    InsufficientTail {
        detail: String,
        max_feasible_m: Option<usize>,
    },

    /// Sampling requested for a parameter region this crate does not draw from.
    #[error("unsupported alternative: {0}")]
    UnsupportedAlternative(String),

    /// The requested quantity does not exist (second moment diverges).
    #[error("infinite variance: {0}")]
    InfiniteVariance(String),

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    /// Likelihood evaluated outside the distribution's support.
    #[error("out of support: {0}")]
    OutOfSupport(String),

    /// The profile-likelihood maximum sits on the search boundary; the best
    /// boundary fit is carried so callers can still inspect it.
    #[error("boundary solution: profile maximum at bracket edge (xi={}, beta={})", .0.xi, .0.beta)]
    BoundarySolution(Box<GpdFit>),

    /// A lookup (e.g. a critical value) failed for the requested key.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn insufficient(detail: impl Into<String>, max_feasible_m: Option<usize>) -> Self {
        Error::InsufficientTail {
            detail: detail.into(),
            max_feasible_m,
        }
    }
}
