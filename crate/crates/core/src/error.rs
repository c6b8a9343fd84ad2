use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("grid mismatch: {left} vs {right}")]
    GridMismatch { left: String, right: String },

    #[error("lagrangian evaluation is not finite while perturbing {slot}[{index}] at t = {t}")]
    NonFinite { slot: &'static str, index: usize, t: f64 },

    #[error("analytic partial {slot}[{index}] disagrees with finite differences: {analytic} vs {numeric}")]
    PartialMismatch {
        slot: &'static str,
        index: usize,
        analytic: f64,
        numeric: f64,
    },

    #[error("solver did not converge after {iterations} iterations (residual sup-norm {residual})")]
    NonConvergence {
        iterations: usize,
        residual: f64,
        trace: Vec<crate::varproblem::TraceEntry>,
    },

    #[error("normal equations are singular at damping {damping}; increase the regularization weight")]
    Singular { damping: f64 },

    #[error("rank-deficient system: {0}")]
    RankDeficient(String),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
