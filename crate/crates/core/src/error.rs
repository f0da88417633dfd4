use thiserror::Error;

/// Errors raised by the estimation and simulation routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("insufficient data: need {needed}, have {have}")]
    InsufficientData { needed: usize, have: usize },

    #[error("non-finite value at t={t}: {context}")]
    NonFinite { t: i64, context: String },

    #[error("model is not AR-regular at t={t}: companion products still {norm:.3e} after {steps} steps (tol {tol:.1e})")]
    NotArRegular { t: i64, steps: usize, norm: f64, tol: f64 },

    #[error("model is not MA-regular (non-invertible MA curve): {0}")]
    NotInvertible(String),

    #[error("prediction requires symmetric innovations (beta = 0), got beta = {0}")]
    AsymmetricInnovations(f64),

    #[error("truncation error {bound:.3e} exceeds tolerance {tol:.1e}")]
    Truncation { bound: f64, tol: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
