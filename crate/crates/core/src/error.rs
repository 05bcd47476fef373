use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Mismatched vector/matrix dimensions.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// Input violates a documented precondition.
    #[error("invalid input: {0}")]
    Validation(String),

    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative numerical method failed to converge.
    #[error("numerical failure: {0}")]
    Numeric(String),

    /// A requested target is outside the attainable range.
    #[error("infeasible target: {0}")]
    Feasibility(String),

    /// Index outside the valid range.
    #[error("index out of range: {0}")]
    Index(String),

    /// Malformed tabular input (headers, schema).
    #[error("format error: {0}")]
    Format(String),

    /// A cell of a tabular input failed to parse or validate.
    #[error("row {row}, column {column}: {detail}")]
    Cell {
        row: usize,
        column: String,
        detail: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
