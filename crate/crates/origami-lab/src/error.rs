use thiserror::Error;

/// Coarse error category, used by callers that need a machine-readable
/// classification (e.g. process exit codes).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    BadInput,
    Budget,
    Internal,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("not a permutation: {0}")]
    NotAPermutation(String),

    #[error("surface is disconnected: squares {missing:?} unreachable from square 1")]
    Disconnected { missing: Vec<usize> },

    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),

    #[error("reducedness inconclusive at length cap {cap}: lattice index {index} so far")]
    Inconclusive { cap: f64, index: u64 },

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("empty shell: no elements with displacement in ({lo}, {hi}]")]
    EmptyShell { lo: f64, hi: f64 },

    #[error("insufficient growth: only {points} orbit points, need {required}")]
    InsufficientGrowth { points: usize, required: usize },

    #[error("element {0} is not in the Veech group of this surface")]
    NotInVeechGroup(String),

    #[error("cutoff {0} too large: distance queries support cutoff <= 1/2")]
    CutoffTooLarge(f64),

    #[error("radius {radius} exceeds injectivity bound {bound} at the target center")]
    RadiusTooLarge { radius: f64, bound: f64 },

    #[error("sparse support exceeded cap {cap} during averaged-operator application")]
    SupportExplosion { cap: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("integer overflow in exact matrix arithmetic")]
    Overflow,
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::NotAPermutation(_)
            | Error::Disconnected { .. }
            | Error::Parse(_)
            | Error::InvalidInput(_)
            | Error::CutoffTooLarge(_)
            | Error::RadiusTooLarge { .. }
            | Error::NotInVeechGroup(_)
            | Error::EmptyShell { .. }
            | Error::Inconclusive { .. } => ErrorCategory::BadInput,
            Error::BudgetExceeded(_)
            | Error::SupportExplosion { .. }
            | Error::InsufficientGrowth { .. } => ErrorCategory::Budget,
            Error::InternalInconsistency(_) | Error::Overflow => ErrorCategory::Internal,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
