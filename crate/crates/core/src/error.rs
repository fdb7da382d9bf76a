use thiserror::Error;

/// Errors raised by set algebra, function construction and the checkers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid interval: {0}")]
    InvalidInterval(String),

    #[error("set {set} is not contained in {domain}")]
    NotContained { set: String, domain: String },

    #[error("point {0} lies outside the domain")]
    OutsideDomain(f64),

    #[error("invalid expression: {0}")]
    InvalidExpr(String),

    #[error("invalid piecewise function: {0}")]
    InvalidFunction(String),

    #[error("functions are defined on different domains")]
    DomainMismatch,

    #[error("piece refinement produced {pieces} pieces (cap {cap})")]
    PieceCap { pieces: usize, cap: usize },

    #[error("invalid sequence template at n = {n}: {reason}")]
    InvalidTemplate { n: u64, reason: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unknown gallery item {0:?}")]
    UnknownGallery(String),

    #[error("gallery item {0} has no closed-form profile")]
    NoClosedForm(String),

    #[error("internal consistency check failed: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
