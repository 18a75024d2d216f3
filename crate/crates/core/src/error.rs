use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("value {value} does not fit in {width} binary digits")]
    BitOverflow { value: u64, width: u32 },

    #[error("bitstring width {width} exceeds the supported maximum of {max}")]
    WidthTooLarge { width: u32, max: u32 },

    #[error("bitstring widths differ in coordinate {coordinate}: {left} vs {right}")]
    WidthMismatch {
        coordinate: usize,
        left: u32,
        right: u32,
    },

    #[error("tuples have different coordinate counts: {left} vs {right}")]
    ArityMismatch { left: usize, right: usize },

    #[error("rank {rank} outside 1..={unique}")]
    RankOutOfRange { rank: u64, unique: u64 },

    #[error("input sequence is empty")]
    EmptyInput,

    #[error("dimension index {index} out of range for {dims} dimensions")]
    DimensionOutOfRange { index: usize, dims: usize },

    #[error("dimension count must be at least 1")]
    ZeroDimensions,

    #[error("point {id} has {found} coordinates, expected {expected}")]
    CoordinateArity { id: u64, expected: usize, found: usize },

    #[error("point {id} has a non-finite coordinate")]
    NonFiniteCoordinate { id: u64 },

    #[error("duplicate point id {0}")]
    DuplicateId(u64),

    #[error("point {id} is listed with the wrong role")]
    RoleMismatch { id: u64 },

    #[error("pipeline configured for the {configured} variant but invoked as {invoked}")]
    VariantMismatch {
        configured: &'static str,
        invoked: &'static str,
    },

    #[error("fast path requested but the monoid has no order under which combining never decreases")]
    FastPathUnavailable,
}
