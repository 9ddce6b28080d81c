use thiserror::Error;

/// Errors raised by the geometric routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("degree overflow: {left} + {right} exceeds 7")]
    DegreeOverflow { left: usize, right: usize },

    #[error("form degree {0} is outside 0..=7")]
    InvalidDegree(usize),

    #[error("expected a form of degree {expected}, got degree {got}")]
    WrongDegree { expected: &'static str, got: usize },

    #[error("interior product of a 0-form is undefined")]
    InteriorOfScalar,

    #[error("not a G2 structure: {0}")]
    NotG2Structure(String),

    #[error("metric is not positive definite")]
    NotPositiveDefinite,

    #[error("point is not on the unit sphere (|p| - 1 = {0:e})")]
    NotUnit(f64),

    #[error("vector is not tangent (normal component {0:e})")]
    NotTangent(f64),

    #[error("tangent vectors are based at different points")]
    BaseMismatch,

    #[error("degenerate frame: {0}")]
    DegenerateFrame(String),

    #[error("finite-difference step must be positive, got {0}")]
    NonPositiveStep(f64),

    #[error("immersion degenerate at the requested parameter")]
    DegenerateImmersion,

    #[error("formula requires minimality (tr A = {0:e})")]
    NotMinimal(f64),

    #[error("k out of range: {0} (expected 1..=5)")]
    KOutOfRange(i64),

    #[error("unknown example surface: {0:?}")]
    UnknownExample(String),

    #[error("degenerate field pair, choose independent generators")]
    DegenerateFieldPair,

    #[error("grid touches the singular locus of the chart: {0}")]
    GridOutsideRegion(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, GeomError>;
