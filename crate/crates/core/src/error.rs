use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid degree {degree}: {reason}")]
    InvalidDegree { degree: usize, reason: &'static str },

    #[error("slot {slot}: expected dimension {expected}, found {found}")]
    DimensionMismatch { slot: usize, expected: usize, found: usize },

    #[error("expected {expected} arguments, found {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("slot {0} is not part of the form")]
    InvalidSlot(usize),

    #[error("slot signatures differ between sum terms")]
    SignatureMismatch,

    #[error("product factors share slot {0}")]
    OverlappingSlots(usize),

    #[error("invalid shift by {offset} on a slot of dimension {dim}")]
    InvalidShift { offset: usize, dim: usize },

    #[error("index {index} out of range for dimension {dim} (slot {slot})")]
    IndexOutOfRange { slot: usize, index: usize, dim: usize },

    #[error("too large: {count} terms exceeds the limit of {limit}")]
    TooLarge { count: u128, limit: u128 },

    #[error("invalid exponent {value}: {reason}")]
    InvalidExponent { value: f64, reason: &'static str },

    #[error("linear functional is identically zero")]
    ZeroFunctional,

    #[error("integer coefficient overflow")]
    Overflow,

    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
}
