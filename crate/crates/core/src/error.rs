use thiserror::Error;

use crate::model::UserId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown user {0}")]
    UnknownUser(UserId),

    #[error("similarity of user {0} with itself is undefined")]
    SameUser(UserId),

    #[error("line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },

    #[error("{0}")]
    Io(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("community is empty")]
    EmptyCommunity,

    #[error("no assignments at or before timestamp {0}")]
    EmptyAfterFilter(u64),

    #[error("distribution is empty")]
    EmptyDistribution,

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("design matrix is rank deficient ({0} usable points)")]
    RankDeficient(usize),

    #[error("{0} is outside the domain of the function")]
    Domain(f64),

    #[error("threshold {0} is outside [0, 1)")]
    ThresholdOutOfRange(String),

    #[error("cannot parse threshold {0:?}")]
    BadThreshold(String),

    #[error("user {0} has no neighbors")]
    NoNeighbors(UserId),

    #[error("trace spans a single timestamp; at least two windows are required")]
    SpanTooShort,

    #[error("window {window} exceeds trajectory length {steps}")]
    WindowTooLarge { window: usize, steps: usize },
}
