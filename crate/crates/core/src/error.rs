use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("not primitive: {0}")]
    NotPrimitive(String),
    #[error("the zero vector has no primitive representative")]
    ZeroVector,
    #[error("sublattice is not saturated")]
    NotSaturated,
    #[error("polar duality needs the origin inside the polyhedron")]
    OriginNotContained,
    #[error("polyhedron is unbounded")]
    Unbounded,
    #[error("polyhedron is not full-dimensional")]
    NotFullDimensional,
    #[error("invalid fan: {0}")]
    InvalidFan(String),
    #[error("invalid contraction: {0}")]
    InvalidContraction(String),
    #[error("invalid pair: {0}")]
    InvalidPair(String),
    #[error("not R-Cartier on maximal cone {0}")]
    NotCartier(usize),
    #[error("-(K+B+D) is not nef over the base")]
    NotNef,
    #[error("vector {0} is not in the support of the fan")]
    NotInSupport(String),
    #[error("base has dimension 0; use a global mld variant")]
    ZeroDimensionalBase,
    #[error("pair is not generalized log canonical")]
    NotGlc,
    #[error("minimal log discrepancy over the central fiber is not positive")]
    MldNotPositive,
    #[error("functional is zero")]
    ZeroFunctional,
    #[error("threshold is unbounded: {0}")]
    UnboundedThreshold(String),
    #[error("width bound violated: {0}")]
    WidthBoundViolated(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("level {level}: {check} failed: {detail}")]
    LemmaViolation {
        level: usize,
        check: String,
        detail: String,
    },
    #[error("descent failed: {0}")]
    DescentFailed(String),
    #[error("parse error at {field}: {detail}")]
    Parse { field: String, detail: String },
}

pub(crate) fn dim_check(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
