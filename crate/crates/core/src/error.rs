use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("elements must be strictly increasing (violated at position {0})")]
    NotStrictlyIncreasing(usize),

    #[error("negative element {0} in an unsigned set")]
    NegativeElement(i64),

    #[error("vector entry at index {0} has a zero value")]
    ZeroValue(i64),

    #[error("value {value} exceeds the configured bound {bound}")]
    ValueOverflow { value: u128, bound: u64 },

    #[error("arithmetic overflow: {0}")]
    Overflow(&'static str),

    #[error("instance has no output after normalization")]
    EmptyAfterNormalize,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("work budget exhausted")]
    BudgetExceeded,

    #[error("call is already {0}")]
    CallNotRunning(&'static str),

    #[error("promise violated at level {level}: {reason}")]
    PromiseViolated { level: u32, reason: String },

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
