//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by any stage of the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// A rule or mapping table failed validation at load time.
    #[error("invalid table: {0}")]
    InvalidTable(String),
    /// A corpus with zero documents was passed to a fitting operation.
    #[error("empty corpus")]
    EmptyCorpus,
    /// Not enough rows (or per-class rows) for the requested fit.
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    /// Requested cluster or fold count exceeds what the data supports.
    #[error("invalid k: {0}")]
    InvalidK(String),
    /// Matrix dimensions do not line up.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    /// NaN or infinity encountered in an input matrix.
    #[error("non-finite value in input")]
    NonFiniteInput,
    /// Training labels contain a single class.
    #[error("degenerate labels: only one class present")]
    DegenerateLabels,
    /// A feature value was negative where counts are required.
    #[error("negative feature value at row {row}, column {col}")]
    NegativeFeature { row: usize, col: usize },
    /// Pasting sample size exceeds the number of rows.
    #[error("invalid sample size: {requested} requested, {rows} rows available")]
    InvalidSampleSize { requested: usize, rows: usize },
    /// ROC is undefined without both a positive and a negative example.
    #[error("ROC undefined: labels contain a single class")]
    UndefinedRoc,
    /// Threshold tuning cannot reach the requested target.
    #[error("target unreachable: best achievable value is {best}")]
    TargetUnreachable { best: f64 },
    /// A required column is missing from the dataset header.
    #[error("missing column: {0}")]
    MissingColumn(String),
    /// A label string has no entry in the label map.
    #[error("unmappable label {label:?} at row {row}")]
    UnmappableLabel { row: usize, label: String },
    /// The input file is not valid UTF-8.
    #[error("malformed UTF-8 at row {row}")]
    MalformedUtf8 { row: usize },
    /// Two dataset rows share a document id.
    #[error("duplicate document id: {0}")]
    DuplicateDocId(String),
    /// Train/test fraction outside (0, 1).
    #[error("invalid fraction: {0} (must be in (0, 1))")]
    InvalidFraction(f64),
    /// A persisted model declares a schema this build does not understand.
    #[error("unknown schema version: {0}")]
    UnknownSchema(u32),
    /// A persisted model could not be parsed.
    #[error("corrupt model: {0}")]
    CorruptModel(String),
    /// Configuration value out of range or inconsistent.
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
