use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// An integer operation left the representable range.
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    /// The target function is not admissible (e.g. infinite zero set).
    #[error("invalid target function: {0}")]
    InvalidTarget(String),

    /// All values of a finite target were consumed before the requested prefix length.
    #[error("target exhausted: requested {requested} terms but only {available} exist")]
    TargetExhausted { requested: usize, available: u64 },

    /// Fewer than two admissible candidates were found inside the step window.
    #[error("window exhausted at step {k}: {found} admissible candidate(s) with |a| <= {window}")]
    WindowExhausted { k: usize, window: i64, found: usize },

    /// A post-step oracle audit failed.
    #[error("audit failed after step {k}: {failures}")]
    AuditFailed { k: usize, failures: String },

    /// A parameter is outside the supported range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A file or textual document could not be parsed.
    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
