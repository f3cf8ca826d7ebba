use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("design matrix is singular or ill-conditioned (rcond = {rcond:e})")]
    SingularDesign { rcond: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("weight at index {index} is not a positive finite number ({value})")]
    NonPositiveWeight { index: usize, value: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("input is empty")]
    EmptyInput,

    #[error("variable `{0}` is declared parent-driven but no driver values were supplied")]
    MissingDriver(String),

    #[error("residual vector has zero variance")]
    ZeroVariance,

    #[error("insufficient samples: n = {n}, conditioning size = {k} leaves no degrees of freedom")]
    InsufficientSamples { n: usize, k: usize },

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("invalid degrees of freedom: {0}")]
    InvalidDof(f64),

    #[error("quantile level must lie in (0, 1), got {0}")]
    InvalidQuantile(f64),

    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("cannot place {m} edges on {d} nodes")]
    TooManyEdges { d: usize, m: usize },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid SCM specification: {0}")]
    InvalidSpec(String),

    #[error("graphs have different node sets")]
    NodeSetMismatch,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid expert knowledge for key `{key}`: {reason}")]
    Knowledge { key: String, reason: String },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: u64, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
