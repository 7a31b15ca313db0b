use thiserror::Error;

use crate::properize::DescentCertificate;

/// Errors produced by distribution construction, scoring and Bayes act search.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("distribution has no Lebesgue density")]
    NoDensity,

    #[error("grid does not cover the distribution's mass: {0}")]
    UnboundedSupport(String),

    #[error("rule not applicable: {0}")]
    IncompatibleRule(String),

    #[error("degenerate forecast: {0}")]
    DegenerateForecast(String),

    #[error("weight function has zero mass under the forecast")]
    WeightMassZero,

    #[error("quadrature did not reach tolerance {tol:e} within {panels} panels")]
    QuadratureFailure { tol: f64, panels: usize },

    #[error("search budget of {0} evaluations exhausted")]
    BudgetExceeded(usize),

    #[error("no Bayes act exists: {}", .0.direction)]
    NoBayesAct(Box<DescentCertificate>),

    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("closed form {closed} disagrees with compositional value {composed}")]
    Inconsistent { closed: f64, composed: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
