use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EssError {
    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("zero variance: autocorrelation is undefined")]
    ZeroVariance,

    #[error("invalid IACT {0}: must be strictly positive")]
    InvalidIact(f64),

    #[error("too few batches: {batches} (need at least 2)")]
    TooFewBatches { batches: usize },

    #[error("fitted AR model is too close to a unit root (|1 - sum(phi)| = {0:e})")]
    NearUnitRoot(f64),

    #[error("value {0} outside the open interval (0, 1)")]
    Domain(f64),

    #[error("nonstationary AR(1) coefficient a = {0} (need |a| < 1)")]
    Nonstationary(f64),

    #[error("chain too short: {len} samples, need at least {min}")]
    TooShort { len: usize, min: usize },

    #[error("chains in a set must share a common length ({expected} != {found})")]
    RaggedChains { expected: usize, found: usize },

    #[error("all chains are constant: within-chain variance is zero")]
    ConstantChains,
}

pub type Result<T> = std::result::Result<T, EssError>;
