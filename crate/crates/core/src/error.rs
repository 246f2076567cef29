use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("field size q = {q} must exceed the node count n = {n}")]
    FieldTooSmall { q: u32, n: usize },
    #[error("inverse of zero in GF({0})")]
    ZeroInverse(u32),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("operands live in different fields (GF({0}) vs GF({1}))")]
    FieldMismatch(u32, u32),
    #[error("index out of range: {0}")]
    OutOfRange(String),
    #[error("subset sizes differ ({0} vs {1})")]
    SizeMismatch(usize, usize),
    #[error("matrix is singular")]
    Singular,
    #[error("linear system is inconsistent")]
    Inconsistent,
    #[error("expected {expected} symbols, got {got}")]
    WrongSymbolCount { expected: usize, got: usize },
    #[error("cell ({row}, column {col}) is read before it is filled")]
    UnfilledCell { row: usize, col: usize },
    #[error("insufficient shares: need {needed}, got {got}")]
    InsufficientShares { needed: usize, got: usize },
    #[error("node {0} appears more than once")]
    DuplicateNode(usize),
    #[error("node {0} cannot help repair itself")]
    SelfRepair(usize),
    #[error("repair packet targets node {got}, expected {expected}")]
    WrongTarget { expected: usize, got: usize },
}
