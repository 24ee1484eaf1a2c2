use thiserror::Error;

/// Errors produced anywhere in the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("lattice mismatch: {left:?} vs {right:?}")]
    LatticeMismatch { left: [usize; 3], right: [usize; 3] },

    #[error("grid size mismatch: expected {expected} samples, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("negative time {0}")]
    NegativeTime(f64),

    #[error("negative decay rate ({0}, {1})")]
    NegativeRate(f64, f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("mode {mode:?} is not resolved by lattice {dims:?}; need at least {required:?}")]
    Unresolved {
        mode: [i64; 3],
        dims: [usize; 3],
        required: [usize; 3],
    },

    #[error("plane wave atoms are not divergence free (k.v = {0})")]
    NotDivergenceFree(f64),

    #[error("time grid is empty")]
    EmptyGrid,

    #[error("blow-up guard tripped: |u|_inf = {norm:e} at t = {t}")]
    BlowUp { t: f64, norm: f64 },

    #[error("parameter constraints violated: {0}")]
    ConstraintViolation(String),

    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("bad snapshot file: {0}")]
    Snapshot(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
