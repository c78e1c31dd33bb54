//! Error taxonomy shared across the crate.

use thiserror::Error;

#[derive(Error, Debug, Clone)]
pub enum Error {
    /// Group construction input is malformed (ragged matrices, bad orders,
    /// non-symmetrizable Cartan data, irrational entries on the exact
    /// backend, ...).
    #[error("invalid group specification: {0}")]
    InvalidSpec(String),

    /// The Gram matrix signature does not match the declared geometry.
    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),

    /// A supplied vector is lightlike where a definite sign was required.
    #[error("lightlike vector: {0}")]
    LightlikeVector(String),

    /// Element-level query outside the enumerated horizon.
    #[error("element not enumerated within horizon {horizon}")]
    NotEnumerated { horizon: usize },

    /// A matrix claimed to be a group element is not one.
    #[error("not a group element: {0}")]
    NotInGroup(String),

    /// The chamber is not simplicial, so coordinate tests do not apply.
    #[error("non-simplicial chamber: {0}")]
    NonSimplicialChamber(String),

    /// A point violates the model-surface constraint of a distance query.
    #[error("model violation: {0}")]
    ModelViolation(String),

    /// Solver input lies outside the dual cone.
    #[error("input not in the dual cone: {0}")]
    NotInDualCone(String),

    /// A solver found no tile or more than one where exactly one is promised.
    #[error("uniqueness violation: {0}")]
    UniquenessViolation(String),

    /// Exhaustive search found nothing (affine lattice scan, fixed points).
    #[error("not found: {0}")]
    NotFound(String),

    /// A documented precondition was violated by the caller.
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    /// Word-length or lattice budget ran out before an answer was reached.
    #[error("budget exhausted: {0}")]
    BudgetExhausted(String),

    /// Operation requires a regular element.
    #[error("element not regular: {0}")]
    NotRegular(String),

    /// Operation applied to a group of the wrong geometry class.
    #[error("geometry mismatch: {0}")]
    GeometryMismatch(String),

    /// A fixed-point search only found solutions on the boundary.
    #[error("no interior fixed point; boundary candidates: {candidates:?}")]
    NoInteriorFixedPoint { candidates: Vec<String> },
}

pub type Result<T> = std::result::Result<T, Error>;
