//! Residual diagnostics for heavy-tailed fits.

use std::f64::consts::FRAC_2_PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::stats::{central_moments, jarque_bera};
use crate::error::{Error, Result};
use crate::stable::{cached_cdf, EmpiricalCdf, StableParams};
use crate::tvarma::{innovations_from_path, TvArmaModel};

/// Smallest sample accepted by [`residual_moments`].
pub const MIN_MOMENT_SAMPLE: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualMoments {
    pub n: usize,
    pub mean: f64,
    pub skewness: f64,
    /// Non-excess (Gaussian = 3).
    pub kurtosis: f64,
    pub jarque_bera: f64,
    pub p_value: f64,
}

pub fn residual_moments(e: &[f64]) -> Result<ResidualMoments> {
    if e.len() < MIN_MOMENT_SAMPLE {
        return Err(Error::InsufficientData { needed: MIN_MOMENT_SAMPLE, have: e.len() });
    }
    let (mean, m2, m3, m4) = central_moments(e);
    if !(m2 > 0.0) {
        return Err(Error::Degenerate("residuals have zero variance".into()));
    }
    let skewness = m3 / m2.powf(1.5);
    let kurtosis = m4 / (m2 * m2);
    let (jb, p) = jarque_bera(e.len(), skewness, kurtosis);
    Ok(ResidualMoments { n: e.len(), mean, skewness, kurtosis, jarque_bera: jb, p_value: p })
}

/// Stabilized probability plot: `r_i = (2/pi) asin(sqrt((i - 1/2)/n))`
/// against `s_i = (2/pi) asin(sqrt(F(y_(i))))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PpPlot {
    pub r: Vec<f64>,
    pub s: Vec<f64>,
    pub max_deviation: f64,
}

impl PpPlot {
    /// `r,s` rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "r,s")?;
        for (r, s) in self.r.iter().zip(&self.s) {
            writeln!(out, "{r},{s}")?;
        }
        Ok(())
    }
}

/// Stabilized p-p plot of `e` under `params`, using the cached reference CDF.
pub fn stabilized_pp(e: &[f64], params: &StableParams) -> Result<PpPlot> {
    stabilized_pp_with(e, &cached_cdf(params))
}

pub fn stabilized_pp_with(e: &[f64], cdf: &EmpiricalCdf) -> Result<PpPlot> {
    if e.is_empty() {
        return Err(Error::InsufficientData { needed: 1, have: 0 });
    }
    if e.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("residuals must be finite".into()));
    }
    let mut y = e.to_vec();
    y.sort_by(f64::total_cmp);
    let n = y.len() as f64;
    let r: Vec<f64> = (1..=y.len()).map(|i| FRAC_2_PI * ((i as f64 - 0.5) / n).sqrt().asin()).collect();
    let s: Vec<f64> = y.iter().map(|&v| FRAC_2_PI * cdf.eval(v).sqrt().asin()).collect();
    let max_deviation = r.iter().zip(&s).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(PpPlot { r, s, max_deviation })
}

/// `V(h) = sum_t (x_{t+h} - x_t)^2 / (2 (n - h))` for `h = 1..=max_lag`.
pub fn variogram(x: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    if max_lag == 0 || max_lag >= x.len() {
        return Err(Error::InvalidParameter(format!(
            "max lag must be in 1..{} for {} observations",
            x.len(),
            x.len()
        )));
    }
    Ok((1..=max_lag)
        .map(|h| {
            let ss: f64 = x.windows(h + 1).map(|w| (w[h] - w[0]).powi(2)).sum();
            ss / (2.0 * (x.len() - h) as f64)
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitErrors {
    pub mse: f64,
    pub rmse: f64,
    pub mae: f64,
}

/// MSE, RMSE and MAE of a set of prediction errors.
pub fn error_metrics(errors: &[f64]) -> Result<FitErrors> {
    if errors.is_empty() {
        return Err(Error::InsufficientData { needed: 1, have: 0 });
    }
    let n = errors.len() as f64;
    let mse = errors.iter().map(|e| e * e).sum::<f64>() / n;
    let mae = errors.iter().map(|e| e.abs()).sum::<f64>() / n;
    Ok(FitErrors { mse, rmse: mse.sqrt(), mae })
}

/// One-step in-sample prediction errors `gamma(t/T) e_t` of a fitted model.
pub fn one_step_errors(model: &TvArmaModel, x: &[f64]) -> Result<Vec<f64>> {
    let e = innovations_from_path(model, x)?;
    let n = x.len() as f64;
    Ok(e.iter().enumerate().map(|(i, v)| model.gamma().eval((i + 1) as f64 / n) * v).collect())
}

pub fn fit_errors(model: &TvArmaModel, x: &[f64]) -> Result<FitErrors> {
    error_metrics(&one_step_errors(model, x)?)
}
