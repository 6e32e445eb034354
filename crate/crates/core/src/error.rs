use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown register `{0}`")]
    UnknownRegister(String),

    #[error("duplicate register `{0}`")]
    DuplicateRegister(String),

    #[error("register `{0}` must have width >= 1")]
    ZeroWidth(String),

    #[error("value {value} does not fit in {width} bit(s) of `{what}`")]
    ValueOutOfRange { what: String, value: u64, width: u32 },

    #[error("width mismatch for {what}: expected {expected}, got {got}")]
    WidthMismatch {
        what: String,
        expected: u64,
        got: u64,
    },

    #[error("incomplete table: expected {expected} entries, got {got}")]
    IncompleteTable { expected: usize, got: usize },

    #[error("table is not a permutation: value {0} appears twice")]
    NotPermutation(u64),

    #[error("qubit cap exceeded: {detail} = {needed} > cap {cap}")]
    CapExceeded { needed: u32, cap: u32, detail: String },

    #[error("register `{register}` is entangled with the rest (purity {purity:.12})")]
    Entangled { register: String, purity: f64 },

    #[error("reduced density matrix needs at least one kept register")]
    EmptyKeep,

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("enumeration of {count} items exceeds limit {limit}")]
    EnumerationLimit { count: u128, limit: u128 },

    #[error("invalid width {width} for {what} (allowed {min}..={max})")]
    InvalidWidth {
        what: &'static str,
        width: u32,
        min: u32,
        max: u32,
    },

    #[error("message must be non-empty")]
    EmptyMessage,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
