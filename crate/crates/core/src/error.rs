use thiserror::Error;

/// Errors raised by the grid-based convex-analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("function `{0}` is improper (no finite value)")]
    Improper(String),

    #[error("non-finite sample in `{label}` at index {index}")]
    NonFiniteSample { label: String, index: usize },

    #[error("value -inf reached at {point}: {context}")]
    NegativeInfinity { point: String, context: String },

    #[error("map `{map}` is not lattice-compatible: {detail}")]
    Incompatible { map: String, detail: String },

    #[error("point {0} is not on the grid")]
    OffGrid(String),

    #[error("dual grid too narrow on axis {axis}: slope {slope} outside [{lo}, {hi}]")]
    DualGridTooNarrow {
        axis: usize,
        slope: f64,
        lo: f64,
        hi: f64,
    },

    #[error("size cap exceeded: {what} needs {needed}, cap is {cap}")]
    SizeCap {
        what: String,
        needed: usize,
        cap: usize,
    },

    #[error("empty input: {0}")]
    Empty(String),

    #[error("function `{0}` is not convex-closed on its grid")]
    NonConvex(String),

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
