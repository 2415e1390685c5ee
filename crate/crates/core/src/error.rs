use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("bracket expansion failed: H stays below {target} up to t = {t_max:e}")]
    BracketExpansion { target: f64, t_max: f64 },

    #[error("flux {flux} at r = {radius} exceeds the range of g (sup g = {sup_g})")]
    FluxOutOfRange { radius: f64, flux: f64, sup_g: f64 },

    #[error("state dropped below zero at r = {radius}")]
    NegativeState { radius: f64 },

    #[error("no sign change of the boundary miss on [{lo}, {hi}] (misses {miss_lo}, {miss_hi})")]
    NoSignChange {
        lo: f64,
        hi: f64,
        miss_lo: f64,
        miss_hi: f64,
    },

    #[error("quadrature failed: {0}")]
    Quadrature(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("no negative direction found for eps in [{eps_min}, {eps_max}] (smallest Q = {q_min})")]
    Exhausted { eps_min: f64, eps_max: f64, q_min: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors caused by bad input rather than a numerical breakdown.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_) | Error::Domain(_) | Error::Precondition(_) | Error::Json(_)
        )
    }
}
