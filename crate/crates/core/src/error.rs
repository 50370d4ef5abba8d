//! Error type shared across the library.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("a path needs at least one breakpoint")]
    EmptyPath,

    #[error("consecutive breakpoints {index} and {} coincide", index + 1)]
    DegenerateSegment { index: usize },

    #[error("location out of range: segment {segment} of a path with {segments} segment(s)")]
    LocationOutOfRange { segment: usize, segments: usize },

    #[error("location fraction must lie in [0, 1]")]
    FractionOutOfRange,

    #[error("subpath endpoints are reversed")]
    ReversedLocations,

    #[error("word letters {index} and {} do not compose (endpoint mismatch)", index + 1)]
    NotComposable { index: usize },

    #[error("operation requires a nontrivial path")]
    TrivialPath,

    #[error("path {index} is self-intersecting")]
    SelfIntersecting { index: usize },

    #[error("subject path is independent of the comparison set (witness exists)")]
    IndependentSubject,

    #[error("edge list is not a hyph: edge {index} has no free point against its predecessors")]
    NotAHyph { index: usize },

    #[error("edge count {edges} does not match value count {values}")]
    ValueCountMismatch { edges: usize, values: usize },

    #[error("prescription conditions violated: {reason}")]
    PrescriptionInvalid { reason: String },

    #[error("group backend mismatch")]
    BackendMismatch,

    #[error("cannot enumerate a Lie group backend")]
    LieEnumeration,

    #[error("group element is not valid for its backend: {reason}")]
    InvalidElement { reason: String },

    #[error("factorization through the hyph does not exist along edge images")]
    FactorizationFailed,

    #[error("word does not trace a closed loop through the hyph")]
    LoopNotClosed,

    #[error("indicator set for edge {index} is empty")]
    EmptyIndicator { index: usize },

    #[error("function is not invariant under the probed gauge transforms")]
    InvarianceProbeFailed,

    #[error("internal invariant violated: {reason}")]
    InternalInvariant { reason: String },
}
