use crate::gnormal::TestKind;

/// Errors shared across the library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid variance band: sigma_lower={lower}, sigma_upper={upper} (need 0 < lower <= upper < inf)")]
    InvalidBand { lower: f64, upper: f64 },

    #[error("significance level must lie in (0, 0.5), got {0}")]
    InvalidAlpha(f64),

    #[error("probability argument must lie in (0, 1), got {0}")]
    InvalidProbability(f64),

    #[error("need at least {required} observations, got {actual}")]
    InsufficientData { required: usize, actual: usize },

    #[error("block length {block_length} out of range for {n} observations (need 2 <= m <= n)")]
    InvalidBlockLength { block_length: usize, n: usize },

    #[error("subsample count {k} must be >= 1 and divide the data length {n} with blocks of length >= 2")]
    InvalidSubsampleCount { k: usize, n: usize },

    #[error("operation is not defined for test kind {0}")]
    UnsupportedKind(TestKind),

    #[error("constant strategy sigma {sigma} lies outside the band [{lower}, {upper}]")]
    SigmaOutsideBand { sigma: f64, lower: f64, upper: f64 },

    #[error("horizon n={n} exceeds the exact dynamic-programming limit of {max}")]
    HorizonTooLarge { n: usize, max: usize },

    #[error("unstable explicit scheme: dt={dt} exceeds the bound dx^2/sigma_upper^2 = {bound}")]
    UnstableGrid { dt: f64, bound: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("simulation config invalid: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
