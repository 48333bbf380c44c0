use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("gamma must exceed 1, got {0}")]
    GammaDomain(String),
    #[error("malformed gamma literal {0:?}")]
    GammaParse(String),
    #[error("no boundary above 1 for S_{k}(x) = {h} (need h > k)")]
    BoundaryDomain { k: u32, h: u64 },
    #[error("invalid gap sequence: {0}")]
    InvalidSequence(String),
    #[error("prefix {0} is not realized by any gamma > 1")]
    UnrealizablePrefix(String),
    #[error("empty interval: lower endpoint is not below upper endpoint")]
    EmptyInterval,
    #[error("output not sorted for sequence {sequence} on trial {trial}")]
    Unsorted { sequence: String, trial: u64 },
    #[error("search step {step}: {reason}")]
    Search { step: usize, reason: String },
    #[error("config: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
