use thiserror::Error;

/// Errors raised by the geometry, parsing, reward and dataset layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid world {dim_x}x{dim_y}x{dim_z}: every dimension must be at least 1")]
    InvalidWorld { dim_x: u32, dim_y: u32, dim_z: u32 },

    #[error("unknown brick dimension {h}x{w}")]
    UnknownDimension { h: u32, w: u32 },

    #[error("malformed brick line: {0}")]
    MalformedLine(String),

    #[error("malformed point token: {0}")]
    MalformedPointToken(String),

    #[error("coordinate ({x},{y},{z}) lies outside the world")]
    OutOfWorldCoordinate { x: u64, y: u64, z: u64 },

    #[error("grid dimensions {found} do not match {expected}")]
    DimensionMismatch {
        expected: crate::WorldConfig,
        found: crate::WorldConfig,
    },

    #[error("cannot aggregate an empty sample list")]
    EmptyInput,

    #[error("structure is not a valid training layout: {0}")]
    InfeasibleStructure(String),

    #[error(transparent)]
    Codec(#[from] CodecError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Failures decoding a `target_voxels` string.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum CodecError {
    #[error("invalid base64: {0}")]
    BadBase64(String),

    #[error("invalid zlib stream: {0}")]
    BadCompression(String),

    #[error("decoded {found} bytes, expected {expected}")]
    BadLength { expected: usize, found: usize },

    #[error("byte {index} has value {value}, expected 0 or 1")]
    BadValue { index: usize, value: u8 },
}
