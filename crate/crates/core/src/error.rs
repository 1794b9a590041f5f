use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid element: {0}")]
    InvalidElement(String),

    #[error("grid mismatch: operands live on different cell grids")]
    GridMismatch,

    #[error("support of {support} cells exceeds the cap of {cap}")]
    SupportTooLarge { support: usize, cap: usize },

    #[error("contract violated: {0}")]
    Contract(String),

    #[error("bit selector has length {got}, expected {expected}")]
    SelectorLength { got: usize, expected: usize },

    #[error("grid too coarse: smallest cell-level image norm {min_norm} at cell {cell} does not beat {threshold}")]
    GridTooCoarse {
        cell: usize,
        min_norm: f64,
        threshold: f64,
    },

    #[error("non-finite value produced by {0}")]
    Numeric(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("rounding residual {residual} exceeds the guaranteed bound {bound}")]
    BoundViolated { residual: f64, bound: f64 },

    #[error("malformed input: {0}")]
    Malformed(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Malformed(e.to_string())
    }
}
