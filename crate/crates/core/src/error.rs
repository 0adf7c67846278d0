use alloc::string::String;

/// Errors raised by the HDC kernels and the pipeline.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HdcError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected} bits, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// A segment that should carry exactly one 1-bit carries `ones` of them.
    #[error("malformed atomic hypervector: segment {segment} has {ones} one-bits")]
    MalformedAtomic { segment: usize, ones: u32 },

    #[error("training data: {0}")]
    TrainingData(String),

    #[error("invalid state: {0}")]
    InvalidState(String),
}

pub type Result<T, E = HdcError> = core::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> HdcError {
    HdcError::InvalidArgument(msg.into())
}

pub(crate) fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(HdcError::DimensionMismatch { expected, found })
    }
}
