use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed record: {0}")]
    Malformed(String),

    #[error("duplicate dimension index {0}")]
    DuplicateIndex(u32),

    #[error("zero weight at dimension {0}")]
    ZeroWeight(u32),

    #[error("dimension index {0} out of range")]
    IndexOutOfRange(u64),

    #[error("weight {0} out of range")]
    WeightOutOfRange(u64),

    #[error("descriptor has too many entries or its squared norm overflows")]
    DescriptorTooLarge,

    #[error("duplicate descriptor id {0}")]
    DuplicateId(u64),

    #[error("line {line}: {source}")]
    Line {
        line: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid threshold {0:?}: expected a decimal in (0, 1]")]
    InvalidThreshold(String),

    /// Jaccard similarity is undefined when both operands are empty, and an
    /// empty query matches nothing.
    #[error("empty descriptor: similarity is undefined")]
    EmptyDescriptor,

    #[error("position {index} out of range for length {len}")]
    OutOfRange { index: usize, len: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("not an index file (bad magic)")]
    BadMagic,

    #[error("unsupported index format version {found} (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },

    #[error("index file truncated")]
    Truncated,

    #[error("index file checksum mismatch")]
    Checksum,

    #[error("corrupt index file: {0}")]
    Corrupt(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn at_line(self, line: usize) -> Error {
        Error::Line {
            line,
            source: Box::new(self),
        }
    }
}
