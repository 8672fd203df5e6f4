use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unknown distribution family `{0}`")]
    UnknownFamily(String),

    #[error("invalid parameter for {family}: {reason}")]
    InvalidParameter { family: String, reason: String },

    #[error("quadratic coefficients must not all vanish")]
    DegenerateQuadratic,

    #[error("distribution `{0}` carries no quadratic")]
    MissingQuadratic(String),

    #[error("quadratic fit is rank deficient ({points} usable grid points)")]
    RankDeficient { points: usize },

    #[error("derivative order {k} exceeds declared maximum {max}")]
    OrderTooLarge { k: usize, max: usize },

    #[error("expression error: {0}")]
    Expression(String),

    #[error("integrand is not finite at x = {x}")]
    NonFiniteIntegrand { x: f64 },

    #[error("error bracket {bracket:e} exceeds ceiling {ceiling:e}")]
    BracketTooLarge { bracket: f64, ceiling: f64 },

    #[error("support truncation did not reach tolerance {tol:e} within {terms} terms")]
    TruncationLimit { tol: f64, terms: usize },

    #[error("distribution `{0}` has no sampler")]
    NoSampler(String),

    #[error("singular coefficient at order k = {k}: factor (1 - {j}·δ) vanishes")]
    SingularCoefficient { k: usize, j: usize },

    #[error("g_{} = {label} fails the class {class} condition at order k = {k}", function + 1)]
    ClassFailure {
        function: usize,
        label: String,
        k: usize,
        class: String,
    },

    #[error("E|X|^{moment} is not finite")]
    MomentsDiverge { moment: usize },

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("matrix order {0} exceeds the supported maximum of 64")]
    MatrixTooLarge(usize),

    #[error("matrix is not symmetric (asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("Jacobi iteration did not converge (off-diagonal residual {residual:e})")]
    EigenNonConvergence { residual: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("document error: {0}")]
    Document(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
