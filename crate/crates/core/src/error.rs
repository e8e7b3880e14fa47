use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed election input. Lines are 1-based; JSON errors report the
    /// line within the JSON document.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid election: {0}")]
    InvalidElection(String),

    /// A rule string, step function, or rule parameter is out of range.
    #[error("invalid rule or parameter: {0}")]
    InvalidSpec(String),

    /// The instance exceeds the limit of an exact search and no
    /// specialized path applies.
    #[error("instance too large: {0}")]
    Capacity(String),

    #[error("score is undefined for the empty committee")]
    EmptyCommittee,

    /// Raised by the type-count program when no nonempty committee
    /// satisfies the required number of voters.
    #[error("no nonempty committee meets the requirement")]
    Infeasible,
}

pub type Result<T> = std::result::Result<T, Error>;
