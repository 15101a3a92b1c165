use thiserror::Error;

use crate::index::MultiIndex;

#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero in Q(ζ₅)")]
    DivisionByZero,

    #[error("scaling factor must be a unit of Z/5, got 0")]
    ZeroScaling,

    #[error("not a permutation of 0..5: {0:?}")]
    InvalidPermutation(Vec<usize>),

    #[error("matrix is not admissible: {0}")]
    NotAdmissible(String),

    #[error("digits {0:?} do not form an element of the index set")]
    InvalidIndex(Vec<i64>),

    #[error("generator index {0} out of range 0..5")]
    InvalidGenerator(usize),

    #[error("point does not lie on X: coordinate sum is {0}, expected 0")]
    PointOffHyperplane(String),

    #[error("point has all coordinates zero")]
    ZeroPoint,

    #[error("cohomological degree {0} outside 0..=3")]
    CohomologyDegree(i64),

    #[error("polynomial of degree {0} given where degree <= 1 is required")]
    DegreeTooLarge(usize),

    #[error("malformed structure table: {0}")]
    MalformedTable(String),

    #[error("associativity violated at a={a}, b={b}, c={c}")]
    AssociativityViolation {
        a: MultiIndex,
        b: MultiIndex,
        c: MultiIndex,
    },

    #[error("operation budget exceeded: {needed} checks requested, budget is {budget}")]
    BudgetExceeded { needed: u64, budget: u64 },

    #[error("{0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
