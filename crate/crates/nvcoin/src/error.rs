use thiserror::Error;

/// Errors produced by the exact kernels, group arithmetic and the oracle.
#[derive(Debug, Error)]
pub enum Error {
    #[error("not a sublattice: {0}")]
    NotASublattice(String),
    #[error("quotient has infinite index")]
    InfiniteIndex,
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("elements belong to different groups: {0}")]
    GroupMismatch(String),
    #[error("image of a lattice refinement element is not a pure translation")]
    ImageNotTranslation,
    #[error("semidirect elements have different arity")]
    ArityMismatch,
    #[error("class enumeration requires a torus target")]
    TargetHasHolonomy,
    #[error("branch {0} is degenerate: det(G - M_{0}) = 0")]
    DegenerateBranch(usize),
    #[error("map is not equivariant: {0}")]
    NotEquivariant(String),
    #[error("map is not n-valued: {0}")]
    NotNValued(String),
    #[error("formula produced a non-integral value: {0}")]
    NonIntegralResult(String),
    #[error("cross-check mismatch: {0}")]
    MismatchDetected(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
