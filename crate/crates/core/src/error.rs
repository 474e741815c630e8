use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("word length {len} exceeds the maximum of {max}")]
    WordTooLong { len: u32, max: u32 },
    #[error("invalid word digit {0:?}")]
    InvalidDigit(char),
    #[error("prefix length {prefix} out of range for word of length {len}")]
    PrefixOutOfRange { prefix: u32, len: u32 },
    #[error("word lengths differ: {0} vs {1}")]
    LengthMismatch(u32, u32),
    #[error("depth cap exceeded: requested depth {requested}, cap {cap}")]
    DepthCap { requested: u32, cap: u32 },
    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: String, hi: String },
    #[error("invalid fraction {0:?}")]
    InvalidFraction(String),
    #[error("admissibility violated: {0}")]
    Admissibility(String),
    #[error("construction failed: {0}")]
    Construction(String),
    #[error("point {0} lies outside the unit interval")]
    Domain(f64),
    #[error("parameter out of range: {0}")]
    Parameter(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("trajectory too short: need {needed} points, have {have}")]
    TrajectoryTooShort { needed: usize, have: usize },
    #[error("internal consistency check failed: {0}")]
    Consistency(String),
}

pub type Result<T> = core::result::Result<T, Error>;
