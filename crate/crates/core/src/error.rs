use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("symbol {symbol:?} is not in the alphabet of {context}")]
    Alphabet { symbol: char, context: String },
    #[error("core length {len} exceeds the configured maximum {max}")]
    ResourceBound { len: usize, max: usize },
    #[error("malformed machine: {0}")]
    MalformedMachine(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("head is not supersafe: {0}")]
    NotSupersafe(String),
    #[error("incomplete witness: {0}")]
    IncompleteWitness(String),
    #[error("degenerate measurement: every outcome has probability below 1e-12")]
    DegenerateMeasurement,
    #[error("configuration error: {0}")]
    Configuration(String),
    #[error("space budget exceeded: {0}")]
    SpaceBudget(String),
    #[error("chain is not absorbing: {0}")]
    NotAbsorbing(String),
    #[error("convention violation: {0}")]
    Convention(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
