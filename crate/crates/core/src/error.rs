use thiserror::Error;

/// Errors raised by constellation, labeling and analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("constellation size {0} is invalid: must be even and at least 2")]
    InvalidSize(usize),

    #[error("constellation size {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("constellation size {size} must be a multiple of 4 for {what}")]
    NotMultipleOfFour { size: usize, what: &'static str },

    #[error("constellation size {size} exceeds the supported maximum {max} for {what}")]
    TooLarge {
        size: usize,
        max: usize,
        what: &'static str,
    },

    #[error("constellation points must be finite and strictly increasing")]
    NotIncreasing,

    #[error("pattern index {index} is not a valid length-{size} pattern: {reason}")]
    InvalidPattern {
        index: u64,
        size: usize,
        reason: &'static str,
    },

    #[error("invalid labeling: {0}")]
    InvalidLabeling(String),

    #[error("unknown labeling name `{0}`")]
    UnknownLabeling(String),

    #[error("labeling {name} is not defined for {size}-point constellations")]
    UnsupportedLabeling { name: &'static str, size: usize },

    #[error("bit position {position} is out of range 1..={bits}")]
    BitPositionOutOfRange { position: usize, bits: usize },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("SNR must be positive and finite, got {0}")]
    InvalidSnr(f64),

    #[error("no sign change of the L-value for threshold k = {k} at SNR {snr}")]
    NoSignChange { k: usize, snr: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
