//! Constructive embedding algorithms. Every success is re-verified against
//! the host before it is returned.

pub mod dense;
pub mod drc;
pub mod lovasz;
pub mod rga;
pub mod transfer;
pub mod wheel;

use std::fmt;

/// One-sided result of a greedy or randomized algorithm. A failure names
/// the stage that starved; it is never a proof of nonexistence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome<T> {
    Success(T),
    Failure(Failure),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub stage: &'static str,
    pub detail: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.stage, self.detail)
    }
}

impl<T> Outcome<T> {
    pub fn fail(stage: &'static str, detail: impl Into<String>) -> Self {
        Outcome::Failure(Failure { stage, detail: detail.into() })
    }

    pub fn success(self) -> Option<T> {
        match self {
            Outcome::Success(t) => Some(t),
            Outcome::Failure(_) => None,
        }
    }

    pub fn is_success(&self) -> bool {
        matches!(self, Outcome::Success(_))
    }

    pub fn failure(&self) -> Option<&Failure> {
        match self {
            Outcome::Success(_) => None,
            Outcome::Failure(f) => Some(f),
        }
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Outcome<U> {
        match self {
            Outcome::Success(t) => Outcome::Success(f(t)),
            Outcome::Failure(e) => Outcome::Failure(e),
        }
    }
}
