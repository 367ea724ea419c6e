use thiserror::Error;

/// Errors raised by table validation, group construction and the various builders.
#[derive(Debug, Error)]
pub enum Error {
    #[error("table is not square or contains out-of-range entries")]
    BadShape,
    #[error("row or column {0} is not a permutation")]
    NotLatin(usize),
    #[error("element 0 is not a two-sided identity")]
    NoIdentity,
    #[error("subloop is not normal")]
    NotNormal,
    #[error("subset is not a subloop")]
    NotSubloop,
    #[error("permutations have mismatched degrees")]
    DegreeMismatch,
    #[error("image list is not a bijection")]
    NotBijection,
    #[error("group too large to enumerate: order {0}")]
    TooLarge(String),
    #[error("action is not a homomorphism into Aut K: {0}")]
    BadAction(String),
    #[error("cocycle is not normalized: {0}")]
    BadCocycle(String),
    #[error("kernel is not contained in the nucleus")]
    KernelNotNuclear,
    #[error("kernel is not a normal subloop")]
    KernelNotNormal,
    #[error("section map is not a normalized transversal")]
    BadSection,
    #[error("the two actions do not commute")]
    ActionsDoNotCommute,
    #[error("subgroup chain invariant violated: {0}")]
    ChainViolation(String),
    #[error("mu is not normalized on the identity coset")]
    NotNormalizedMu,
    #[error("nilpotency classes do not match the required pattern: {0}")]
    ClassMismatch(String),
    #[error("element is not a central involution")]
    NotCentralInvolution,
    #[error("coset structure unsuitable for block descent: {0}")]
    BadCosetStructure(String),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
