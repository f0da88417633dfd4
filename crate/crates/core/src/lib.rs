#![allow(clippy::neg_cmp_op_on_partial_ord)]
//! Simulation and estimation for locally stationary ARMA processes driven by
//! alpha-stable innovations.
//!
//! * [`stable`]: stable laws, exact sampling and characteristic functions.
//! * [`tvarma`]: the time-varying ARMA model, path simulation, Green's
//!   functions, MA(inf) weights, marginal laws and forecasting.
//! * [`auxfit`]: the Student-t auxiliary model fitted by conditional likelihood.
//! * [`indirect`]: indirect inference binding the two models.
//! * [`whittle`]: blocked Whittle estimation on local periodograms.
//! * [`analysis`]: Monte Carlo harness and residual diagnostics.

pub mod analysis;
pub mod auxfit;
pub mod curve;
pub mod error;
pub mod indirect;
pub mod optim;
pub mod params;
pub mod rng;
pub mod scenario;
pub mod stable;
pub mod tvarma;
pub mod whittle;

pub use error::{Error, Result};
