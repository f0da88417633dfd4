//! One-sided Green's functions and the MA(inf) coefficients `a_{t,T}(j)`.

use serde::{Deserialize, Serialize};

use super::TvArmaModel;
use crate::error::{Error, Result};
use crate::stable::StableParams;

pub const DEFAULT_TRUNCATION: usize = 200;
pub const DEFAULT_WEIGHT_TOL: f64 = 1e-10;
/// Largest truncation error accepted by [`marginal_law`].
pub const MARGINAL_TRUNCATION_TOL: f64 = 1e-6;

/// Row vector `e_1' C(u_t) C(u_{t-1}) ... ` propagated one companion matrix
/// at a time; after `m` steps its first entry is `g(t, t - m)`.
struct GreenRow<'a> {
    model: &'a TvArmaModel,
    t: i64,
    len: f64,
    step: usize,
    row: Vec<f64>,
    coeffs: Vec<f64>,
}

impl<'a> GreenRow<'a> {
    fn new(model: &'a TvArmaModel, t: i64, len: usize) -> Self {
        let mut row = vec![0.0; model.p().max(1)];
        row[0] = 1.0;
        Self { model, t, len: len as f64, step: 0, row, coeffs: vec![0.0; model.p()] }
    }

    fn value(&self) -> f64 {
        if self.model.p() == 0 && self.step > 0 {
            0.0
        } else {
            self.row[0]
        }
    }

    fn norm(&self) -> f64 {
        if self.model.p() == 0 && self.step > 0 {
            return 0.0;
        }
        self.row.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Multiplies by the companion matrix at time `t - step` (row-vector form).
    fn advance(&mut self) {
        let p = self.model.p();
        if p > 0 {
            let u = (self.t - self.step as i64) as f64 / self.len;
            for (c, curve) in self.coeffs.iter_mut().zip(self.model.ar()) {
                *c = curve.eval(u);
            }
            let r0 = self.row[0];
            for k in 0..p - 1 {
                self.row[k] = -r0 * self.coeffs[k] + self.row[k + 1];
            }
            self.row[p - 1] = -r0 * self.coeffs[p - 1];
        }
        self.step += 1;
    }
}

/// `g(t, s)`: the (1,1) entry of the ordered product of companion matrices
/// `C((t - l)/T)`, `l = 0..t-s-1`, of the AR operator. Zero for `s > t`.
pub fn green_function(model: &TvArmaModel, t: i64, s: i64, len: usize) -> Result<f64> {
    if len == 0 {
        return Err(Error::InvalidParameter("series length must be positive".into()));
    }
    if s > t {
        return Ok(0.0);
    }
    if let Some(last) = model.ar().last() {
        for l in 0..(t - s) {
            let u = (t - l) as f64 / len as f64;
            if last.eval(u) == 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "highest-order AR coefficient vanishes at u = {u}; companion matrix is singular"
                )));
            }
        }
    }
    let mut row = GreenRow::new(model, t, len);
    for _ in 0..(t - s) {
        row.advance();
    }
    Ok(row.value())
}

/// Truncated MA(inf) weights `a_{t,T}(0..=J)` at a fixed time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaWeights {
    pub t: i64,
    pub len: usize,
    pub weights: Vec<f64>,
    /// Geometric-extrapolation estimate of `sum_{j > J} |a_{t,T}(j)|`.
    pub truncation_error_bound: f64,
}

impl MaWeights {
    pub fn truncation(&self) -> usize {
        self.weights.len() - 1
    }

    /// `sum_j |a(j)|^delta` with `delta = min(1, alpha)`.
    pub fn abs_power_sum(&self, alpha: f64) -> f64 {
        let delta = alpha.min(1.0);
        self.weights.iter().map(|a| a.abs().powf(delta)).sum()
    }
}

/// `a_{t,T}(j) = gamma((t-j)/T) sum_{k=0..min(j,q)} b_k((t-j+k)/T) g(t, t-j+k)`
/// for `j = 0..=truncation`.
///
/// Fails with [`Error::NotArRegular`] when the companion products have not
/// decayed below `tol` within `truncation` steps.
pub fn ma_weights(
    model: &TvArmaModel,
    t: i64,
    len: usize,
    truncation: usize,
    tol: f64,
) -> Result<MaWeights> {
    if len == 0 {
        return Err(Error::InvalidParameter("series length must be positive".into()));
    }
    let q = model.q();
    let n = len as f64;
    let mut row = GreenRow::new(model, t, len);
    let mut green = Vec::with_capacity(truncation + 1);
    let mut norms = Vec::with_capacity(truncation + 1);
    for m in 0..=truncation {
        if m > 0 {
            row.advance();
        }
        green.push(row.value());
        norms.push(row.norm());
    }
    let decayed = norms.iter().any(|&v| v < tol);
    if !decayed {
        return Err(Error::NotArRegular { t, steps: truncation, norm: norms[truncation], tol });
    }

    let mut weights = Vec::with_capacity(truncation + 1);
    for j in 0..=truncation {
        let g = model.gamma().eval((t - j as i64) as f64 / n);
        let mut acc = 0.0;
        for k in 0..=q.min(j) {
            let s = t - j as i64 + k as i64;
            let b = if k == 0 { 1.0 } else { model.ma()[k - 1].eval(s as f64 / n) };
            acc += b * green[j - k];
        }
        weights.push(g * acc);
    }

    let truncation_error_bound = tail_estimate(model, &norms, n, t);
    Ok(MaWeights { t, len, weights, truncation_error_bound })
}

/// Extrapolates the decay of the companion-product norms geometrically and
/// scales by the largest MA-times-scale factor along the tail.
fn tail_estimate(model: &TvArmaModel, norms: &[f64], n: f64, t: i64) -> f64 {
    let last = *norms.last().expect("non-empty");
    if last == 0.0 {
        return 0.0;
    }
    let j = norms.len() - 1;
    let window = 10.min(j);
    let earlier = norms[j - window];
    let ratio = if earlier > 0.0 && window > 0 {
        (last / earlier).powf(1.0 / window as f64)
    } else {
        1.0
    };
    if !(ratio < 1.0) {
        return f64::INFINITY;
    }
    let u = ((t - j as i64) as f64 / n).max(0.0);
    let ma_mass: f64 = 1.0 + model.ma().iter().map(|c| c.eval(u).abs()).sum::<f64>();
    let gamma_max = (0..=20)
        .map(|i| model.gamma().eval(i as f64 / 20.0).abs())
        .fold(0.0f64, f64::max);
    ma_mass * gamma_max * last * ratio / (1.0 - ratio)
}

/// Stable law of `sum_j a(j) eps_{t-j}` for i.i.d. innovations: scale
/// `sigma (sum |a|^alpha)^(1/alpha)` and skewness
/// `beta sum sign(a)|a|^alpha / sum |a|^alpha`.
pub fn marginal_law(weights: &MaWeights, innovation: &StableParams) -> Result<StableParams> {
    if !(weights.truncation_error_bound <= MARGINAL_TRUNCATION_TOL) {
        return Err(Error::Truncation {
            bound: weights.truncation_error_bound,
            tol: MARGINAL_TRUNCATION_TOL,
        });
    }
    weighted_sum_law(&weights.weights, innovation)
}

/// Exact law of a finite weighted sum of i.i.d. `innovation` draws.
pub fn weighted_sum_law(weights: &[f64], innovation: &StableParams) -> Result<StableParams> {
    let alpha = innovation.alpha;
    let mut mass = 0.0;
    let mut signed = 0.0;
    for &a in weights {
        let m = a.abs().powf(alpha);
        mass += m;
        signed += a.signum() * m;
    }
    if !(mass > 0.0) {
        return Err(Error::Degenerate("all weights are zero".into()));
    }
    let sigma = innovation.sigma * mass.powf(1.0 / alpha);
    let beta = (innovation.beta * signed / mass).clamp(-1.0, 1.0);
    let mu = innovation.mu * weights.iter().sum::<f64>();
    StableParams::new(alpha, beta, sigma, mu)
}
