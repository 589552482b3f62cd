use thiserror::Error;

/// Failure modes shared by every computation in the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Input outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Input is meaningful but the configuration is not supported here.
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    /// A quantity that must be an integer (or must agree with a second route) did not.
    #[error("internal inconsistency: {0}")]
    Inconsistency(String),
    #[error("desk-scale bound exceeded: {0}")]
    DeskScaleExceeded(String),
    /// 2-adic conductor exponent falls in the region the local rule leaves open.
    #[error("ambiguous conductor at {0}")]
    AmbiguousConductor(String),
    #[error("generator search exhausted: {0}")]
    SearchExhausted(String),
    /// Signature data needed for the answer is not computable in this configuration.
    #[error("undecidable: {0}")]
    Undecidable(String),
}

impl Error {
    /// Stable machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Unsupported(_) => "unsupported",
            Error::Inconsistency(_) => "inconsistency",
            Error::DeskScaleExceeded(_) => "desk_scale_exceeded",
            Error::AmbiguousConductor(_) => "ambiguous_conductor",
            Error::SearchExhausted(_) => "search_exhausted",
            Error::Undecidable(_) => "undecidable",
        }
    }

    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) => 2,
            Error::Inconsistency(_) => 4,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn inconsistent(msg: impl Into<String>) -> Error {
    Error::Inconsistency(msg.into())
}
