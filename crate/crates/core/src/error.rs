use thiserror::Error;

/// Errors raised by the constructions in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite input {0}")]
    NonFinite(f64),

    #[error("points {0} and {1} coincide")]
    CoincidentPoints(f64, f64),

    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    #[error("configuration is not positively cyclically ordered")]
    NotInBaseComponent,

    #[error("invalid simplex point: {0}")]
    InvalidSimplex(String),

    #[error("{k} does not divide {n}")]
    NotADivisor { n: usize, k: usize },

    #[error("degenerate finite-difference step {0}")]
    DegenerateStep(f64),

    #[error("non-positive lift derivative {value} at t = {t}")]
    NonPositiveDerivative { t: f64, value: f64 },

    #[error("failed to bracket a root: {0}")]
    NoBracket(String),

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("degenerate critical point at t = {t} (second derivative {second_derivative})")]
    NonMorse { t: f64, second_derivative: f64 },

    #[error("map has no exceptional values")]
    NoExceptionalValues,

    #[error("exceptional values are not normalized to a/n")]
    NotNormalized,

    #[error("critical point kinds do not alternate")]
    NonAlternatingWord,

    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: i64, right: i64 },

    #[error("diffeomorphism does not fix the exceptional values: {0}")]
    NotInDcr(String),

    #[error("diffeomorphism does not permute the exceptional values")]
    DoesNotPermute,

    #[error("no global compatible field: {n} exceptional values (odd)")]
    ParityObstruction { n: usize },

    #[error("point {x} lies outside the domain of patch {patch}")]
    OutsidePatch { patch: String, x: f64 },

    #[error("point {0} lies on an exceptional level")]
    OnExceptionalLevel(f64),

    #[error("step size underflow at t = {t} (h = {h})")]
    StepUnderflow { t: f64, h: f64 },

    #[error("successful shifts {0:?} do not form a subgroup")]
    NotASubgroup(Vec<usize>),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Process exit code for this error: 1 for bad input, 2 for numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::DegenerateStep(_)
            | Error::NonPositiveDerivative { .. }
            | Error::NoBracket(_)
            | Error::NoConvergence(_)
            | Error::NonAlternatingWord
            | Error::OutsidePatch { .. }
            | Error::StepUnderflow { .. }
            | Error::NotASubgroup(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
