//! Winner determination for approval elections in which the committee
//! size is not fixed in advance.
//!
//! An [`Election`] collects approval ballots over a candidate set. Each
//! rule scores every committee (any subset of the candidates) and the
//! winners are the committees with the best score; because committees of
//! all sizes compete, different rules settle on very different sizes.
//! [`rules::evaluate`] answers queries against a parsed [`RuleSpec`],
//! while [`experiments`] samples random elections and reports how large
//! the winning committees get.

mod bitset;

pub mod error;
pub mod experiments;
pub mod model;
pub mod rules;
pub mod scoring;
pub mod solvers;

pub use bitset::BitSet;
pub use error::{Error, Result};
pub use model::{CandidateSet, Election, VoterSet};
pub use rules::{Objective, RuleSpec, ScoreValue, WinnerResult};
