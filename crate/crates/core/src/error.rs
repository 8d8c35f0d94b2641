use thiserror::Error;

use crate::matrix::Axis;

/// Errors raised anywhere in the coding, decoding and simulation pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus {0} is not prime")]
    NotPrime(u64),

    #[error("operands belong to different fields (p = {left} and p = {right})")]
    FieldMismatch { left: u64, right: u64 },

    #[error("division by zero{}", .index.map(|i| format!(" at index {i}")).unwrap_or_default())]
    DivisionByZero { index: Option<usize> },

    #[error("field of size {p} has fewer than {needed} distinct evaluation points")]
    FieldTooSmall { p: u64, needed: u64 },

    #[error("dimension {dimension} is not divisible into {parts} equal parts")]
    PartitionError { dimension: usize, parts: usize },

    #[error("blocks do not conform for {axis:?} assembly: {detail}")]
    AssemblyError { axis: Axis, detail: String },

    #[error("dimension mismatch: {0}")]
    DimError(String),

    #[error("interpolation nodes are not pairwise distinct")]
    DuplicateNodes,

    #[error("realization has {available} machines but at least {required} are required")]
    InsufficientMachines { available: usize, required: usize },

    #[error("realization count {count} exceeds the enumeration cap {cap}")]
    EnumerationTooLarge { count: u128, cap: u128 },

    #[error("group {group} received fewer than the required results for decoding")]
    DecodeThresholdNotMet { group: usize },

    #[error("machine {machine} is missing inputs: {detail}")]
    IncompleteInputs { machine: usize, detail: String },

    #[error("unknown scheme or cost row `{0}`")]
    UnknownScheme(String),

    #[error("invalid system parameters: {0}")]
    InvalidParams(String),

    #[error("invalid configuration: {0}")]
    ConfigError(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
