use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Code(#[from] detcode::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("not a shard file (bad magic)")]
    BadMagic,
    #[error("unsupported shard format version {0}")]
    BadVersion(u32),
    #[error("shard is truncated or has trailing bytes: {0}")]
    BadLength(String),
    #[error("invalid shard header: {0}")]
    BadHeader(String),
    #[error("shards disagree on {0}")]
    HeaderMismatch(&'static str),
    #[error("insufficient shards: need {needed}, got {got}")]
    InsufficientShards { needed: usize, got: usize },
    #[error("repair needs exactly {needed} helpers, got {got}")]
    HelperCount { needed: usize, got: usize },
    #[error("node {0} cannot be its own helper")]
    FailedAmongHelpers(usize),
    #[error("node {0} appears more than once")]
    DuplicateNode(usize),
    #[error("these parameters leave no room for data")]
    NoCapacity,
    #[error("input of {0} bytes does not fit the 32-bit length field")]
    TooLarge(usize),
    #[error("bad range {0:?}")]
    BadRange(String),
}
