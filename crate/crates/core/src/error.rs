use thiserror::Error;

/// Errors produced across the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed version `{0}`: {1}")]
    MalformedVersion(String, String),

    #[error("malformed range `{0}`: {1}")]
    MalformedRange(String, String),

    #[error("unsupported constraint `{0}`: {1}")]
    UnsupportedConstraint(String, String),

    #[error("range `{0}` is satisfiable by no version")]
    EmptyRange(String),

    #[error("missing file: {0}")]
    MissingFile(String),

    #[error("schema mismatch in {file}: {detail}")]
    SchemaMismatch { file: String, detail: String },

    #[error("unknown package `{0}`")]
    UnknownPackage(String),

    #[error("package `{name}` has {total} classifiable dependents, need at least 2")]
    InsufficientDependents { name: String, total: usize },

    #[error("dataset has {0} rows, need at least {1}")]
    TooFewRows(usize, usize),

    #[error("AUC undefined: truth contains a single class")]
    SingleClassTruth,

    #[error("feature vector has {got} values, expected {expected}")]
    FeatureArity { got: usize, expected: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
