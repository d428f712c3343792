use thiserror::Error;

use crate::solver::SolverTrace;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("exponential moment diverges: {0}")]
    DivergentMoment(String),

    #[error("quadrature budget exceeded on [{lower}, {upper}]: {reason}")]
    QuadratureBudgetExceeded {
        lower: f64,
        upper: f64,
        reason: String,
    },

    #[error("degenerate premium: m * g'(0+) = {0} must exceed 1")]
    DegeneratePremium(f64),

    #[error("root bracket failure at x = {x}: {reason}")]
    BracketFailure { x: f64, reason: String },

    #[error("fixed-point iteration did not converge after {} iterations", .0.iterations.len())]
    NoConvergence(Box<SolverTrace>),

    #[error("inadmissible indemnity at x = {x}: I(x) = {value} violates 0 <= I(x) <= x")]
    InadmissibleIndemnity { x: f64, value: f64 },

    #[error("no root: {0}")]
    NoRoot(String),

    #[error("search budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid premium function: {0}")]
    InvalidPremium(String),

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
}
