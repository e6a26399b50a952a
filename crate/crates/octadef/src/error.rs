use num_bigint::BigInt;
use thiserror::Error;

/// Error type shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("denominator {q} is not square-free; run the square-free reduction first")]
    NotSquareFree { q: BigInt },

    #[error("{what} guard exceeded: needs {needed}, limit is {limit}")]
    GuardExceeded {
        what: &'static str,
        needed: String,
        limit: String,
    },

    #[error("the unit octahedron is not admissible for this lattice")]
    NotAdmissible,

    #[error("columns are dependent mod {p}")]
    DependentColumns { p: u64 },

    #[error("generator {index} does not belong to the lattice")]
    NotInLattice { index: usize },

    /// The covering set fails the rank hypothesis for some prime, so no
    /// basis completion is certified. A legitimate outcome for
    /// caller-supplied covering sets.
    #[error("covering set misses a maximal independent column set mod {p} (restricted rank {found} < {required})")]
    HypothesisFailure {
        p: u64,
        found: usize,
        required: usize,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("cannot factor {0}: outside the built-in factorizer's range")]
    FactorRange(String),

    #[error("sampling filter infeasible: {0}")]
    SamplingInfeasible(String),

    #[error("invalid input: {0}")]
    Parse(String),

    /// A theorem-guaranteed property failed to hold. Always indicates a bug,
    /// never a property of the input.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
