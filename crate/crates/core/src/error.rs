use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    FileUnreadable {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("row {row}: {message}")]
    ParseFailure { row: usize, message: String },
    #[error("row {row}: price must be finite and strictly positive")]
    NonPositivePrice { row: usize },
    #[error("series has {len} observations, at least 2 are required")]
    TooShort { len: usize },
    #[error("empty series set")]
    EmptySet,
    #[error("horizon {horizon} must satisfy 1 <= h < {len}")]
    HorizonTooLarge { horizon: usize, len: usize },
    #[error("window {window} exceeds series length {len}")]
    WindowTooLarge { window: usize, len: usize },
    #[error("window {window} is below the minimum of {min}")]
    WindowTooSmall { window: usize, min: usize },
    #[error("series coincides with its moving average everywhere")]
    DegenerateSeries,
    #[error("partition contains no complete cluster")]
    EmptyPartition,
    #[error("fit needs at least {need} support points, found {have}")]
    InsufficientSupport { have: usize, need: usize },
    #[error("entropy curve is empty")]
    EmptyCurve,
    #[error("fewer than 2 moving-average windows inside [{n_min}, {n_max}]")]
    RangeTooNarrow { n_min: usize, n_max: usize },
    #[error("every series is maximally heterogeneous, 1 - MIX sums to zero")]
    AllMaximallyHeterogeneous,
    #[error("asset panel needs at least 2 rows of equal width")]
    TooFewRows,
    #[error("portfolio variance is zero")]
    ZeroVariancePortfolio,
    #[error("Hurst exponent {0} is outside (0, 1)")]
    InvalidHurst(f64),
    #[error("variance method needs at least 4 usable scales, found {0}")]
    InsufficientScales(usize),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("I/O failure on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("serialization failure: {0}")]
    Serialization(#[from] serde_json::Error),
    #[error("output directory does not match its manifest: {0}")]
    CorruptOutput(String),
}

impl Error {
    /// Process exit code reported by the command-line front end. Every variant
    /// has its own code; 1 is reserved for unclassified failures and 2 for
    /// command-line usage errors.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::InvalidConfig(_) => 3,
            Error::FileUnreadable { .. } => 4,
            Error::ParseFailure { .. } => 5,
            Error::NonPositivePrice { .. } => 6,
            Error::TooShort { .. } => 7,
            Error::EmptySet => 8,
            Error::HorizonTooLarge { .. } => 9,
            Error::WindowTooLarge { .. } => 10,
            Error::WindowTooSmall { .. } => 11,
            Error::DegenerateSeries => 12,
            Error::EmptyPartition => 13,
            Error::InsufficientSupport { .. } => 14,
            Error::EmptyCurve => 15,
            Error::RangeTooNarrow { .. } => 16,
            Error::AllMaximallyHeterogeneous => 17,
            Error::TooFewRows => 18,
            Error::ZeroVariancePortfolio => 19,
            Error::InvalidHurst(_) => 20,
            Error::InsufficientScales(_) => 21,
            Error::Io { .. } => 22,
            Error::Serialization(_) => 23,
            Error::CorruptOutput(_) => 24,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
