use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("denominator is the zero polynomial")]
    ZeroDenominator,
    #[error("{0}: iteration did not converge")]
    ConvergenceFailure(String),
    #[error("point {0} is not a pole")]
    NotAPole(String),
    #[error("contour radius {radius} too large: another pole lies at distance {distance}")]
    ContourTooLarge { radius: f64, distance: f64 },
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("map is constant")]
    ConstantMap,
    #[error("candidate values {a} and {b} are {distance:e} apart, within 10x the value tolerance {tol:e}")]
    TolTooCoarse {
        a: String,
        b: String,
        distance: f64,
        tol: f64,
    },
    #[error("value {value} is attained at {witness}, which lies inside the punctured sphere")]
    NotOmitted { value: String, witness: String },
    #[error("invalid Weierstrass data: {0}")]
    InvalidData(String),
    #[error("metric is singular at {0}")]
    MetricSingular(String),
    #[error("invalid parameters for {family}: {predicate}")]
    InvalidParams { family: String, predicate: String },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("structural check failed: {0}")]
    StructuralViolation(String),
    #[error("configuration error: {0}")]
    ConfigError(String),
    #[error("period condition fails: max |Im Res| = {max_im:e}")]
    PeriodFailure { max_im: f64 },
    #[error("integration path passes within {distance:e} of a pole at {pole}")]
    PathThroughPole { pole: String, distance: f64 },
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable snake_case name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::ZeroDenominator => "zero_denominator",
            Error::ConvergenceFailure(_) => "convergence_failure",
            Error::NotAPole(_) => "not_a_pole",
            Error::ContourTooLarge { .. } => "contour_too_large",
            Error::NonFinite(_) => "non_finite",
            Error::Degenerate(_) => "degenerate",
            Error::ConstantMap => "constant_map",
            Error::TolTooCoarse { .. } => "tol_too_coarse",
            Error::NotOmitted { .. } => "not_omitted",
            Error::InvalidData(_) => "invalid_data",
            Error::MetricSingular(_) => "metric_singular",
            Error::InvalidParams { .. } => "invalid_params",
            Error::Unsupported(_) => "unsupported",
            Error::StructuralViolation(_) => "structural_violation",
            Error::ConfigError(_) => "config_error",
            Error::PeriodFailure { .. } => "period_failure",
            Error::PathThroughPole { .. } => "path_through_pole",
            Error::Parse(_) => "parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
