use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LsmError {
    #[error("batch size must be a power of two >= 2, got {0}")]
    InvalidConfig(usize),

    #[error("expected a batch of {expected} entries, got {actual}")]
    BatchSizeMismatch { expected: usize, actual: usize },

    #[error("key {0} is outside the supported domain [0, 2^31 - 2]")]
    KeyOutOfDomain(u32),

    #[error("cannot pad an empty batch")]
    EmptyBatch,

    #[error("input length {len} is not a multiple of batch size {batch_size}")]
    SizeNotMultipleOfBatch { len: usize, batch_size: usize },

    #[error("bulk build accepts insert entries only")]
    BulkBuildRequiresInserts,

    #[error("invalid range: k1 {k1} > k2 {k2}")]
    InvalidRange { k1: u32, k2: u32 },

    #[error("invalid workload spec: {0}")]
    SpecInvalid(String),

    #[error("dump parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, LsmError>;
