use thiserror::Error;

/// Errors raised by the operator library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeneoError {
    #[error("finite set must have at least one element")]
    EmptySet,
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("carrier mismatch: expected size {expected}, found {found}")]
    CarrierMismatch { expected: usize, found: usize },
    #[error("group closure exceeded {limit} elements")]
    GroupTooLarge { limit: usize },
    #[error("inconsistent homomorphism: {0}")]
    InconsistentHomomorphism(String),
    #[error("function space has {size} elements, above the guard of {guard}")]
    DomainTooLarge { size: u128, guard: u128 },
    #[error("matrix is not row-stochastic within tolerance {tol}")]
    NotStochastic { tol: f64 },
    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: String, found: String },
    #[error("rows of a nonnegative part have unequal sums ({first} vs {other})")]
    UnequalRowSums { first: f64, other: f64 },
    #[error("matrix has a negative entry where a nonnegative one is required")]
    NegativeEntry,
    #[error("matrix is not equivariant with respect to the given homomorphism")]
    NotEquivariant,
    #[error("T(G) does not act transitively on the target set; use split_by_target_orbits")]
    NotTransitive,
    #[error("measure is not invariant under the twisted action")]
    NotPermutant,
    #[error("total variation {total_variation} disagrees with operator norm {operator_norm}")]
    NormIdentityViolated {
        total_variation: f64,
        operator_norm: f64,
    },
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("({0}, {1}) is not a unit vector modulo {2}")]
    NotUnitVector(u32, u32, u32),
    #[error("function family is not invariant under the twisted action")]
    InvarianceViolation,
    #[error("wrong setting: {0}")]
    WrongSetting(String),
    #[error("noise level {0} is outside [0, 1]")]
    LevelOutOfRange(f64),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, GeneoError>;
