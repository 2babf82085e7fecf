use thiserror::Error;

/// Crate-wide error type. Invalid inputs and malformed assets are reported
/// as typed errors; internal invariant violations panic instead.
#[derive(Debug, Error)]
pub enum Error {
    #[error("asset checksum mismatch for {name}: expected {expected}, got {actual}")]
    ChecksumMismatch {
        name: String,
        expected: String,
        actual: String,
    },

    #[error("malformed asset {name}: {reason}")]
    MalformedAsset { name: String, reason: String },

    #[error("base graph dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("duplicate base graph entry at ({row}, {col})")]
    DuplicateEntry { row: usize, col: usize },

    #[error("lifting size {z} is not in the table for this base graph")]
    InvalidLiftingSize { z: usize },

    #[error("base graph violates the encoder partition: {0}")]
    PartitionInvalid(String),

    #[error("core parity block is singular over GF(2)")]
    SingularMatrix,

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("unknown config key `{0}`")]
    UnknownConfigKey(String),

    #[error("unknown MCS index {0}")]
    UnknownMcs(u8),

    #[error("covariance matrix is not Hermitian")]
    NotHermitian,

    #[error("too few pilots for interpolation: {0}")]
    TooFewPilots(usize),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
