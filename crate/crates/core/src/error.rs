use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("missing column: {0}")]
    MissingColumn(String),
    #[error("unparseable cell at row {row}, column {column}: {value:?}")]
    UnparseableCell {
        row: usize,
        column: String,
        value: String,
    },
    #[error("file contains no header row")]
    EmptyFile,
    #[error("dataset has no rows")]
    EmptyDataset,
    #[error("invalid count: {0}")]
    InvalidCount(String),
    #[error("column set mismatch: {0}")]
    ColumnMismatch(String),
    #[error("duplicate column name: {0}")]
    DuplicateColumn(String),
    #[error("duplicate source row id: {0}")]
    DuplicateRowId(u64),
    #[error("schema error at line {line}: {message}")]
    Schema { line: usize, message: String },

    #[error("unknown column: {0}")]
    UnknownColumn(String),
    #[error("tolerance must be non-negative, got {0}")]
    NegativeTolerance(f64),
    #[error("invalid interval for {column}: [{lo}, {hi}]")]
    InvalidInterval { column: String, lo: f64, hi: f64 },

    #[error("bounds are empty")]
    EmptyBounds,
    #[error("target has no active dimensions")]
    EmptyTarget,
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("non-finite input at position {0}")]
    NonFiniteInput(usize),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("training diverged at epoch {epoch}")]
    NonFiniteLoss { epoch: usize },
    #[error("evaluation set is empty")]
    EmptyEvaluationSet,
    #[error("unknown axis: {0}")]
    UnknownAxis(String),
    #[error("need at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("invalid training config: {0}")]
    InvalidConfig(String),
    #[error("corrupt model file: {0}")]
    CorruptModelFile(String),
    #[error("unsupported model file version {found} (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },

    #[error("unknown dataset: {0}")]
    UnknownDataset(String),
    #[error("unknown session: {0}")]
    UnknownSession(String),
    #[error("surrogate model not loaded")]
    ModelNotLoaded,
    #[error("unknown row id: {0}")]
    UnknownRow(u64),
    #[error("port {0} is already in use")]
    PortInUse(u16),

    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable variant name, used as the machine-readable error code in API
    /// responses.
    pub fn code(&self) -> &'static str {
        match self {
            Error::MissingColumn { .. } => "MissingColumn",
            Error::UnparseableCell { .. } => "UnparseableCell",
            Error::EmptyFile => "EmptyFile",
            Error::EmptyDataset => "EmptyDataset",
            Error::InvalidCount { .. } => "InvalidCount",
            Error::ColumnMismatch { .. } => "ColumnMismatch",
            Error::DuplicateColumn { .. } => "DuplicateColumn",
            Error::DuplicateRowId { .. } => "DuplicateRowId",
            Error::Schema { .. } => "Schema",
            Error::UnknownColumn { .. } => "UnknownColumn",
            Error::NegativeTolerance { .. } => "NegativeTolerance",
            Error::InvalidInterval { .. } => "InvalidInterval",
            Error::EmptyBounds => "EmptyBounds",
            Error::EmptyTarget => "EmptyTarget",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::NonFiniteInput { .. } => "NonFiniteInput",
            Error::ShapeMismatch { .. } => "ShapeMismatch",
            Error::NonFiniteLoss { .. } => "NonFiniteLoss",
            Error::EmptyEvaluationSet => "EmptyEvaluationSet",
            Error::UnknownAxis { .. } => "UnknownAxis",
            Error::TooFewSamples { .. } => "TooFewSamples",
            Error::InvalidConfig { .. } => "InvalidConfig",
            Error::CorruptModelFile { .. } => "CorruptModelFile",
            Error::VersionMismatch { .. } => "VersionMismatch",
            Error::UnknownDataset { .. } => "UnknownDataset",
            Error::UnknownSession { .. } => "UnknownSession",
            Error::ModelNotLoaded => "ModelNotLoaded",
            Error::UnknownRow { .. } => "UnknownRow",
            Error::PortInUse { .. } => "PortInUse",
            Error::Io { .. } => "Io",
            Error::Csv { .. } => "Csv",
            Error::Json { .. } => "Json",
        }
    }
}
