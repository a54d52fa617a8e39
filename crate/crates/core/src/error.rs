use thiserror::Error;

use crate::graded::Degree;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("not a permutation: {0:?}")]
    NotAPermutation(Vec<usize>),
    #[error("inhomogeneous element: degrees {first} and {second}")]
    Inhomogeneous { first: Degree, second: Degree },
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),
    #[error("degree {degree} exceeds truncation {truncation}")]
    DegreeOverflow { degree: Degree, truncation: Degree },
    #[error("truncation {truncation} too low: degree {needed} is required")]
    TruncationTooLow { needed: Degree, truncation: Degree },
    #[error("generator `{generator}` has degree {found}; {expected}")]
    BadDegree {
        generator: String,
        found: Degree,
        expected: String,
    },
    #[error("element is not a cycle")]
    NotACycle,
    #[error("not a boundary")]
    NotABoundary,
    #[error("negative degrees are not supported here")]
    NegativeDegree,
    #[error("undecided: {0}")]
    Undecided(String),
    #[error("refused: {0}")]
    Refused(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("family is not invertible: {0}")]
    NotInvertible(String),
    #[error("{line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
