use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid box: lower bound exceeds upper bound on axis {axis}")]
    InvertedBox { axis: usize },

    #[error("region exceeds the box-count limit of {limit}")]
    TooManyBoxes { limit: usize },

    #[error("sequence exceeds the point cap of {cap}")]
    CapExceeded { cap: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("not enough points for block j={j}: short by {deficit}")]
    InsufficientPoints { j: u64, deficit: u64 },

    #[error("feasible set became empty at step {step}")]
    EmptyFeasibleSet { step: usize },

    #[error("internal consistency failure: {0}")]
    Internal(String),

    #[error("sequence not dense enough: {0}")]
    NotDenseEnough(String),

    #[error("moving-map hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("no crossing found; best displacement {best}")]
    CrossingNotFound { best: f64 },

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }
}
