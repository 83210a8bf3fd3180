use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("schema error at row {row}, column `{column}`: {message}")]
    Schema {
        row: usize,
        column: String,
        message: String,
    },

    #[error("invalid schema: {0}")]
    InvalidSchema(String),

    #[error("dataset is empty after ingestion")]
    EmptyDataset,

    #[error("invalid intent: {0}")]
    InvalidIntent(String),

    #[error("degenerate intent: {0}")]
    DegenerateIntent(String),

    /// The attacker's confidence cannot be pushed below `lambda` even when
    /// the whole space is published.
    #[error("no published intent reaches lambda={lambda}; best attainable confidence is {floor}")]
    Infeasible { lambda: f64, floor: f64 },

    #[error("expansion exceeded {0} iterations")]
    IterationLimit(usize),

    #[error("every dimension is saturated; no expansion candidate remains")]
    NoCandidate,

    #[error("{method}: no feasible purchase set found")]
    NoFeasibleAllocation { method: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid operation: {0}")]
    InvalidOperation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable tag, used in CLI error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Schema { .. } => "schema",
            Error::InvalidSchema(_) => "invalid_schema",
            Error::EmptyDataset => "empty_dataset",
            Error::InvalidIntent(_) => "invalid_intent",
            Error::DegenerateIntent(_) => "degenerate_intent",
            Error::Infeasible { .. } => "infeasible",
            Error::IterationLimit(_) => "iteration_limit",
            Error::NoCandidate => "no_candidate",
            Error::NoFeasibleAllocation { .. } => "no_feasible_allocation",
            Error::Config(_) => "config",
            Error::InvalidOperation(_) => "invalid_operation",
            Error::Io(_) => "io",
            Error::Csv(_) => "csv",
            Error::Json(_) => "json",
        }
    }
}
