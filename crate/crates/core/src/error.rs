use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("object `{0}` has no assigned point")]
    MissingAssignment(String),

    #[error("could not place object {object} after {retries} redraws; the (u, l) gap is too wide for the sampling region")]
    GenerationBudgetExceeded { object: usize, retries: usize },

    #[error("the similarity graph is not connected")]
    NotConnected,

    #[error("instance does not have complete information ({missing} unlabeled pairs)")]
    IncompleteInformation { missing: usize },

    #[error("pseudoregular partition needs more than {cap} parts")]
    PartBudgetExceeded { cap: usize },

    #[error("partitions are defined over different ground sets")]
    GroundSetMismatch,

    #[error("grid needs more than {budget} points")]
    PointBudgetExceeded { budget: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("graph has no vertices")]
    EmptyGraph,

    #[error("canonical tree has {vertices:.3e} vertices, above the cap of {cap}")]
    SizeBudgetExceeded { vertices: f64, cap: usize },

    #[error("oracle needs {needed:.3e} evaluations, above the cap of {cap}")]
    OracleBudgetExceeded { needed: f64, cap: u64 },

    #[error("invalid metric: {0}")]
    InvalidMetric(String),

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("thresholds u={u} and l={l} cannot be represented exactly on a common scale")]
    ThresholdRange { u: f64, l: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Parse(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
