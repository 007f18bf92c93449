use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid operator: {0}")]
    InvalidOperator(String),

    #[error("rank-deficient constraint matrix: pivot {pivot:e} below {threshold:e}")]
    RankDeficient { pivot: f64, threshold: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("denominator {value:e} is not positive (component {component}) at x = {x:?}")]
    DenominatorViolation {
        component: usize,
        value: f64,
        x: Vec<f64>,
    },

    #[error("non-finite {what} at iteration {iteration}")]
    NonFinite {
        what: &'static str,
        iteration: usize,
    },

    #[error("reference point is not a fixed point: residual {residual:e} > {tol:e}")]
    InvalidReferencePoint { residual: f64, tol: f64 },

    #[error("misuse: {0}")]
    Misuse(String),

    #[error("invalid spec: {0}")]
    InvalidSpec(String),

    #[error("metric domain error: {0}")]
    MetricDomain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("instance format error at line {line}: {msg}")]
    Format { line: usize, msg: String },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short stable identifier of the variant, used in CLI diagnostics.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidOperator(_) => "invalid_operator",
            Error::RankDeficient { .. } => "rank_deficient",
            Error::Domain(_) => "domain",
            Error::DenominatorViolation { .. } => "denominator_violation",
            Error::NonFinite { .. } => "non_finite",
            Error::InvalidReferencePoint { .. } => "invalid_reference_point",
            Error::Misuse(_) => "misuse",
            Error::InvalidSpec(_) => "invalid_spec",
            Error::MetricDomain(_) => "metric_domain",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::Format { .. } => "format",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
        }
    }
}
