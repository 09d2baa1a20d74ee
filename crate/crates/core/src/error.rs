use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("shift j={j} equals L/2 for L={lift}; the code decouples into L/2 disjoint copies")]
    DegenerateShift { j: usize, lift: usize },
    #[error("circulant inputs disagree on lift size ({0} vs {1})")]
    LiftMismatch(usize, usize),
    #[error("hz * hx^T is nonzero; not a CSS code")]
    NotCss,
    #[error("syndrome is not in the column space of the check matrix")]
    InconsistentSyndrome,
    #[error("search guard exceeded: {0}")]
    GuardExceeded(String),
    #[error("edge coloring needs {0} colors, more than the allowed 6")]
    TooManyColors(usize),
    #[error("{0}")]
    Unsupported(String),
    #[error("gate check failed: {0}")]
    GateCheck(String),
    #[error("no crossing found: {0}")]
    NoCrossing(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
