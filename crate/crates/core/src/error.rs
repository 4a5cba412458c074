use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", content = "detail")]
pub enum Error {
    #[error("invalid angle vector: {0}")]
    InvalidAngles(String),

    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),

    #[error("unknown metric `{0}`")]
    UnknownMetric(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("degenerate spectrum: minimum eigenvalue gap {gap:e} is below {threshold:e}")]
    DegenerateSpectrum { gap: f64, threshold: f64 },

    #[error("eigenvalue {0:e} too small: the volume element diverges")]
    Divergent(f64),

    #[error("metric {metric} is not supported on the {surface} stratum: its volume element diverges there")]
    UnsupportedStratum { metric: String, surface: String },

    #[error("tangential boundary root: |d det(PT)/d theta3| = {0:e}")]
    TangentialRoot(f64),

    #[error("need at least 2 replications, got {0}")]
    TooFewReplications(usize),

    #[error("sequence index {index} exceeds capacity {capacity}")]
    IndexOverflow { index: u64, capacity: u64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("no finite target for {0}")]
    NoTarget(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
