use std::path::PathBuf;

use thiserror::Error;

use crate::model::CoefficientSource;
use crate::solver::DeflectionField;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the library can report.
///
/// Each variant maps onto a stable upper-case code (see [`Error::code`]) that
/// the command-line front end prints as `error[<CODE>]: <message>`.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("no {coefficient_source} coefficients for aspect ratio {ratio}")]
    UnsupportedRatio { ratio: f64, coefficient_source: CoefficientSource },

    #[error("load-deflection law is not monotone (linear coefficient {linear} Pa/m); compressive films are outside the membrane model")]
    NonMonotoneModel { linear: f64 },

    #[error("need at least 3 usable samples, found {found}")]
    TooFewPoints { found: usize },

    #[error("all abscissae are identical; slope is undefined")]
    DegenerateAbscissa,

    #[error("aspect ratios {square} and {rect} differ by less than 0.5; no sensitivity to Poisson's ratio")]
    ShapeTooSimilar { square: f64, rect: f64 },

    #[error("membrane with aspect ratio {ratio} is not square within 2%")]
    NotSquare { ratio: f64 },

    #[error("slope-ratio residual has the same sign at both ends of [{lo}, {hi}]")]
    NoRootInBracket { lo: f64, hi: f64 },

    #[error("{count} layers have an unknown property; exactly one is required")]
    MultipleUnknowns { count: usize },

    #[error("unknown layer '{name}' has zero thickness")]
    ZeroUnknownThickness { name: String },

    #[error("layer '{name}' has no property value")]
    MissingValue { name: String },

    #[error("membrane solve did not converge after {} iterations (relative residual {:.3e})", .field.iterations, .field.residual_norm)]
    NotConverged { field: Box<DeflectionField> },

    #[error("cubic fit of solver response is poor (relative residual {residual:.3e} > 1%)")]
    PoorFit { residual: f64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unknown unit '{0}'")]
    Unit(String),

    #[error("line {line}: duplicate pressure {pressure} Pa")]
    Monotonicity { line: usize, pressure: f64 },

    #[error("unknown membrane label '{0}'")]
    UnknownLabel(String),

    #[error("{failed} of {total} Monte-Carlo draws failed (more than 10%)")]
    TooManyFailedDraws { failed: usize, total: usize },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },

    #[error("{0}")]
    Usage(String),
}

impl Error {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "INVALID_INPUT",
            Error::UnsupportedRatio { .. } => "UNSUPPORTED_RATIO",
            Error::NonMonotoneModel { .. } => "NON_MONOTONE_MODEL",
            Error::TooFewPoints { .. } => "TOO_FEW_POINTS",
            Error::DegenerateAbscissa => "DEGENERATE_ABSCISSA",
            Error::ShapeTooSimilar { .. } => "SHAPE_TOO_SIMILAR",
            Error::NotSquare { .. } => "NOT_SQUARE",
            Error::NoRootInBracket { .. } => "NO_ROOT_IN_BRACKET",
            Error::MultipleUnknowns { .. } => "MULTIPLE_UNKNOWNS",
            Error::ZeroUnknownThickness { .. } => "ZERO_UNKNOWN_THICKNESS",
            Error::MissingValue { .. } => "MISSING_VALUE",
            Error::NotConverged { .. } => "NOT_CONVERGED",
            Error::PoorFit { .. } => "POOR_FIT",
            Error::Parse { .. } => "PARSE",
            Error::Unit(_) => "UNIT",
            Error::Monotonicity { .. } => "MONOTONICITY",
            Error::UnknownLabel(_) => "UNKNOWN_LABEL",
            Error::TooManyFailedDraws { .. } => "MONTE_CARLO",
            Error::Io { .. } => "IO",
            Error::Json { .. } => "JSON",
            Error::Usage(_) => "USAGE",
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
