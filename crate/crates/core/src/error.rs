use num_bigint::BigUint;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(BigUint),

    #[error("{0} is beyond the range of the deterministic primality test")]
    PrimeOutOfRange(BigUint),

    #[error("exponent must be at least 1")]
    ZeroExponent,

    #[error("a group needs at least one cyclic factor")]
    EmptyStructure,

    #[error("factors must be sorted by prime, then by exponent")]
    UnsortedFactors,

    #[error("operands belong to different groups")]
    StructureMismatch,

    #[error("expected {expected} coordinates, got {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("coordinate {index} = {value} is not reduced modulo {modulus}")]
    CoordinateOutOfRange {
        index: usize,
        value: BigUint,
        modulus: BigUint,
    },

    #[error("operation requires a p-group for p = {0}")]
    NotAPGroup(BigUint),

    #[error("operation requires a single-prime group, found {0} primes")]
    MixedPrimeGroup(usize),

    #[error("operation is undefined for the identity element")]
    IdentityElement,

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("group of order {size} exceeds the enumeration budget of {max}")]
    BudgetExceeded { size: BigUint, max: u64 },

    #[error("search examined more than {0} candidate tuples")]
    CandidateBudgetExceeded(u64),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
