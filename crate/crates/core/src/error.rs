use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("height must be positive and finite, got {0}")]
    InvalidHeight(f64),

    #[error("non-finite coordinate in {0}")]
    NonFinite(&'static str),

    #[error("height {0:e} is below 1e-300; inverting it risks overflow")]
    HeightUnderflow(f64),

    #[error("value must be positive, got {0}")]
    NotPositive(f64),

    #[error(
        "function evaluated to a negative value {value} (wrap the expression in pos(...) to clamp)"
    )]
    NegativeValue { value: f64 },

    #[error("undefined arithmetic ({0})")]
    Undefined(&'static str),

    #[error("syntax error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    #[error("`{name}` at offset {offset} expects {expected} argument(s), found {found}")]
    Arity {
        name: String,
        expected: String,
        found: usize,
        offset: usize,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("normal vector (zeta, delta) must be nonzero")]
    ZeroNormal,

    #[error("matrix is not symmetric")]
    NotSymmetric,

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("ellipsoid is not contained in the open upper half space (u^2 * schur = {0})")]
    ContainmentViolated(f64),

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("function is not differentiable at the requested point")]
    NotDifferentiable,

    #[error("no Hessian callback is available for this function")]
    HessianUnavailable,

    #[error("point lies outside the effective domain of the function")]
    OutsideDomain,

    #[error("perspective decreases from {from} to {to} between v={v} and v={v_next}; retry in global mode")]
    NonMonotonePerspective {
        v: f64,
        v_next: f64,
        from: f64,
        to: f64,
    },

    #[error("strictness condition violated: (grad f(x), -1)^T (x, f(x)) = {0} is not negative")]
    StrictnessViolated(f64),

    #[error("normal vector pairing (zeta, delta)^T (x, u) = {0} is not positive")]
    DegenerateNormal(f64),

    #[error("operation requires upper radial operands")]
    RadialityRequired,

    #[error("operation supports upper transforms only")]
    UnsupportedSense,

    #[error("set does not contain the origin")]
    OriginNotInSet,

    #[error("value is zero or infinite where a finite positive value is needed")]
    InfiniteValue,

    #[error("gradient norm {0:e} is not zero; point is not stationary")]
    NotStationary(f64),

    #[error(
        "iteration budget exhausted after {iterations} iterations (gradient norm {grad_norm:e})"
    )]
    BudgetExhausted {
        iterations: usize,
        grad_norm: f64,
        best: Box<crate::optimize::DualSolution>,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("schema violation: {0}")]
    Schema(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
