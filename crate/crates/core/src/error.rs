use thiserror::Error;

/// Errors raised across the crate. Indices in messages are 1-based.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("sign vector length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("ground set size {0} is outside the supported range 1..=64")]
    UnsupportedSize(usize),

    #[error("index {index} is outside the ground set [1, {n}]")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("covector set has not passed axiom validation")]
    Unverified,

    #[error("covector {0} is not a member of the set")]
    NotAMember(String),

    #[error("duplicate covector {0}")]
    Duplicate(String),

    #[error("anchor {anchor} has sign 0 at fixed index {index}")]
    AnchorZeroAtFixed { anchor: String, index: usize },

    #[error("{0} is not a tope")]
    NotATope(String),

    #[error("{0} is a tope; its weight is undefined")]
    WeightOfTope(String),

    #[error("covector {0} has no zero coordinate in the free index set")]
    NoAdmissibleIndex(String),

    #[error("boundary of tope {tope} at index {index} has no unique maximum")]
    NonUniqueBoundary { tope: String, index: usize },

    #[error("odd boundary count {count} for covector {covector} at index {index}")]
    OddBoundaryCount {
        covector: String,
        index: usize,
        count: usize,
    },

    #[error("multiplicity of {covector} differs between index {first} ({first_value}) and index {other} ({other_value})")]
    MultiplicityDisagreement {
        covector: String,
        first: usize,
        first_value: usize,
        other: usize,
        other_value: usize,
    },

    #[error("loops present at indices {0:?}")]
    Loops(Vec<usize>),

    #[error("fiber has no topes")]
    EmptyFiber,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("polynomials live in different variable spaces")]
    VarSpaceMismatch,

    #[error("exponent overflow")]
    ExponentOverflow,

    #[error("inexact polynomial division")]
    InexactDivision,

    #[error("division by the zero polynomial")]
    DivisionByZero,

    #[error("symbolic determinant of {topes} topes exceeds the limit of {limit}; use randomized mode or force symbolic")]
    SizeGuard { topes: usize, limit: usize },

    #[error("invalid wiring diagram: {0}")]
    InvalidDiagram(String),

    #[error("invalid arrangement: {0}")]
    InvalidArrangement(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
