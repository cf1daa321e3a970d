use thiserror::Error;

use crate::multivalue::Complex;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point {t} is not in the time scale")]
    PointNotInScale { t: f64 },
    #[error("window [{s}, {t}] is not bounded by finitely many scattered points")]
    UnboundedWindow { s: f64, t: f64 },
    #[error("point {t} is a scattered endpoint of the time scale; the operation needs the kappa-restricted scale")]
    KappaBoundary { t: f64 },
    #[error("invalid time scale: {0}")]
    InvalidScale(String),

    #[error("logarithm of zero")]
    LogOfZero,
    #[error("division by zero")]
    DivisionByZero,

    #[error("1 + h*z vanishes (h = {h}, z = {z}){}", fmt_at(*at))]
    NotRegressive { h: f64, z: Complex, at: Option<f64> },
    #[error("1 - h*z vanishes (h = {h}, z = {z}){}", fmt_at(*at))]
    NotNuRegressive { h: f64, z: Complex, at: Option<f64> },
    #[error("h*z = +-2 (h = {h}, z = {z}){}", fmt_at(*at))]
    CayleyNotRegressive { h: f64, z: Complex, at: Option<f64> },
    #[error("eta-cylinder undefined (eta = {eta}, h = {h}, z = {z}){}", fmt_at(*at))]
    EtaNotRegressive {
        eta: f64,
        h: f64,
        z: Complex,
        at: Option<f64>,
    },

    #[error("adaptive quadrature did not converge on [{a}, {b}]")]
    QuadratureFailure { a: f64, b: f64 },
    #[error("integrand is not finite at {t}")]
    NonFiniteIntegrand { t: f64 },
    #[error("function value |p({t})| = {modulus} is below the nonvanishing guard")]
    NonvanishingViolation { t: f64, modulus: f64 },
    #[error("the time scale does not contain 1")]
    OneNotInScale,

    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown function `{name}` at byte {offset}")]
    UnknownFunction { name: String, offset: usize },
    #[error("expression nesting deeper than {limit}")]
    DepthExceeded { limit: usize },
    #[error("evaluation outside the domain: {0}")]
    EvalDomain(String),
    #[error("evaluation produced a non-finite value")]
    NonFinite,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

fn fmt_at(at: Option<f64>) -> String {
    match at {
        Some(t) => format!(" at t = {t}"),
        None => String::new(),
    }
}

impl Error {
    /// Short machine-readable tag, used in CLI error objects.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::PointNotInScale { .. } => "PointNotInScale",
            Error::UnboundedWindow { .. } => "UnboundedWindow",
            Error::KappaBoundary { .. } => "KappaBoundary",
            Error::InvalidScale(_) => "InvalidScale",
            Error::LogOfZero => "LogOfZero",
            Error::DivisionByZero => "DivisionByZero",
            Error::NotRegressive { .. } => "NotRegressive",
            Error::NotNuRegressive { .. } => "NotNuRegressive",
            Error::CayleyNotRegressive { .. } => "CayleyNotRegressive",
            Error::EtaNotRegressive { .. } => "EtaNotRegressive",
            Error::QuadratureFailure { .. } => "QuadratureFailure",
            Error::NonFiniteIntegrand { .. } => "NonFiniteIntegrand",
            Error::NonvanishingViolation { .. } => "NonvanishingViolation",
            Error::OneNotInScale => "OneNotInScale",
            Error::Syntax { .. } => "SyntaxError",
            Error::UnknownFunction { .. } => "UnknownFunction",
            Error::DepthExceeded { .. } => "DepthExceeded",
            Error::EvalDomain(_) => "EvalDomain",
            Error::NonFinite => "NonFinite",
            Error::InvalidConfig(_) => "InvalidConfig",
        }
    }

    /// True for errors caused by malformed input rather than by the numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::PointNotInScale { .. }
                | Error::InvalidScale(_)
                | Error::Syntax { .. }
                | Error::UnknownFunction { .. }
                | Error::DepthExceeded { .. }
                | Error::InvalidConfig(_)
                | Error::OneNotInScale
        )
    }

    /// Attach the offending scale point to a regressivity failure.
    pub(crate) fn at_point(self, t: f64) -> Self {
        match self {
            Error::NotRegressive { h, z, .. } => Error::NotRegressive { h, z, at: Some(t) },
            Error::NotNuRegressive { h, z, .. } => Error::NotNuRegressive { h, z, at: Some(t) },
            Error::CayleyNotRegressive { h, z, .. } => Error::CayleyNotRegressive { h, z, at: Some(t) },
            Error::EtaNotRegressive { eta, h, z, .. } => Error::EtaNotRegressive {
                eta,
                h,
                z,
                at: Some(t),
            },
            other => other,
        }
    }
}
