use serde::{Deserialize, Serialize};

use super::invert::innovations_on_grid;
use super::weights::{ma_weights, DEFAULT_TRUNCATION, DEFAULT_WEIGHT_TOL};
use super::TvArmaModel;
use crate::error::{Error, Result};

/// Minimum-dispersion forecasts for horizons `1..=h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forecast {
    pub point: Vec<f64>,
    /// Dispersion `sigma^alpha` of each forecast error.
    pub dispersion: Vec<f64>,
}

/// Forecasts `X_{n+1}, ..., X_{n+h}` from the observed `x = X_1..X_n` on the
/// rescaled horizon `T = n + h`.
///
/// The predictor keeps the MA(inf) terms of innovations already observed,
/// `sum_j a_{n+l,T}(j+l) e_{n-j}`; its error dispersion is
/// `sigma^alpha sum_{j<l} |a_{n+l,T}(j)|^alpha`. Only defined for symmetric
/// innovations.
pub fn predict(model: &TvArmaModel, x: &[f64], horizon: usize) -> Result<Forecast> {
    let inn = model.innovation();
    if inn.beta != 0.0 {
        return Err(Error::AsymmetricInnovations(inn.beta));
    }
    if horizon == 0 {
        return Err(Error::InvalidParameter("forecast horizon must be at least 1".into()));
    }
    let n = x.len();
    let len = n + horizon;
    let e = innovations_on_grid(model, x, len)?;
    let scale = inn.sigma.powf(inn.alpha);

    let mut point = Vec::with_capacity(horizon);
    let mut dispersion = Vec::with_capacity(horizon);
    for l in 1..=horizon {
        let w = ma_weights(model, (n + l) as i64, len, DEFAULT_TRUNCATION + l, DEFAULT_WEIGHT_TOL)?;
        let a = &w.weights;
        let terms = (a.len() - l).min(n);
        let forecast: f64 = (0..terms).map(|j| a[j + l] * e[n - 1 - j]).sum();
        let disp: f64 = a[..l].iter().map(|v| v.abs().powf(inn.alpha)).sum::<f64>() * scale;
        point.push(forecast);
        dispersion.push(disp);
    }
    Ok(Forecast { point, dispersion })
}
