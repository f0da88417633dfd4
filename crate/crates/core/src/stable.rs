//! Alpha-stable laws in the `S_alpha(sigma, beta, mu)` parametrization:
//! characteristic function, exact sampling from uniform/exponential pairs,
//! a regression-type characteristic-function estimator and simulated CDFs.

use std::collections::HashMap;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};
use std::io::Write;
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{derive_seed, rng_from_seed};

/// Indices closer than this to 1 use the `alpha = 1` formulas.
pub const ALPHA_ONE_TOL: f64 = 1e-8;

/// Innovation scale that makes the `alpha = 2` law standard normal.
pub const INNOVATION_SIGMA: f64 = FRAC_1_SQRT_2;

fn is_alpha_one(alpha: f64) -> bool {
    (alpha - 1.0).abs() < ALPHA_ONE_TOL
}

/// Parameters `(alpha, beta, sigma, mu)` of a stable law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableParams {
    pub alpha: f64,
    pub beta: f64,
    pub sigma: f64,
    pub mu: f64,
}

impl StableParams {
    /// Validates the parameters. `beta` is reset to 0 when `alpha = 2`,
    /// where it has no effect on the law.
    pub fn new(alpha: f64, beta: f64, sigma: f64, mu: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(Error::InvalidParameter(format!("alpha = {alpha} outside (0, 2]")));
        }
        if !(-1.0..=1.0).contains(&beta) {
            return Err(Error::InvalidParameter(format!("beta = {beta} outside [-1, 1]")));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!("sigma = {sigma} must be positive")));
        }
        if !mu.is_finite() {
            return Err(Error::InvalidParameter(format!("mu = {mu} must be finite")));
        }
        let beta = if alpha == 2.0 { 0.0 } else { beta };
        Ok(Self { alpha, beta, sigma, mu })
    }

    /// Standard law `S_alpha(1, beta, 0)`.
    pub fn standard(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(alpha, beta, 1.0, 0.0)
    }

    /// Innovation law `S_alpha(1/sqrt(2), beta, 0)` of the tvARMA model.
    pub fn innovation(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(alpha, beta, INNOVATION_SIGMA, 0.0)
    }

    /// Maps a standard draw `X ~ S_alpha(1, beta, 0)` onto this law.
    #[inline]
    pub fn standardize(&self, x: f64) -> f64 {
        if is_alpha_one(self.alpha) {
            self.sigma * x + 2.0 / PI * self.beta * self.sigma * self.sigma.ln() + self.mu
        } else {
            self.sigma * x + self.mu
        }
    }

    fn cache_key(&self) -> [u64; 4] {
        [
            self.alpha.to_bits(),
            self.beta.to_bits(),
            self.sigma.to_bits(),
            self.mu.to_bits(),
        ]
    }
}

/// Characteristic function `E[exp(i theta X)]`.
pub fn char_fn(params: &StableParams, theta: f64) -> Complex64 {
    let StableParams { alpha, beta, sigma, mu } = *params;
    if theta == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let abs = theta.abs();
    let sign = theta.signum();
    let exponent = if is_alpha_one(alpha) {
        let scale = sigma * abs;
        Complex64::new(-scale, -scale * beta * 2.0 / PI * sign * abs.ln() + mu * theta)
    } else {
        let scale = (sigma * abs).powf(alpha);
        let skew = if alpha == 2.0 { 0.0 } else { beta * sign * (PI * alpha / 2.0).tan() };
        Complex64::new(-scale, scale * skew + mu * theta)
    };
    exponent.exp()
}

/// Precomputed constants for mapping `(U, W)` pairs onto `S_alpha(1, beta, 0)`.
#[derive(Debug, Clone, Copy)]
pub struct StandardStable {
    alpha: f64,
    beta: f64,
    shift: f64,
    scale: f64,
    inv_alpha: f64,
    tail_exp: f64,
}

impl StandardStable {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        let p = StableParams::standard(alpha, beta)?;
        let (alpha, beta) = (p.alpha, p.beta);
        let (shift, scale) = if is_alpha_one(alpha) || alpha == 2.0 {
            (0.0, 1.0)
        } else {
            let t = beta * (PI * alpha / 2.0).tan();
            (t.atan() / alpha, (1.0 + t * t).powf(1.0 / (2.0 * alpha)))
        };
        Ok(Self {
            alpha,
            beta,
            shift,
            scale,
            inv_alpha: 1.0 / alpha,
            tail_exp: (1.0 - alpha) / alpha,
        })
    }

    /// Transforms `U ~ Uniform(-pi/2, pi/2)` and `W ~ Exp(1)` into a draw.
    #[inline]
    pub fn transform(&self, u: f64, w: f64) -> f64 {
        let cos_u = u.cos();
        if is_alpha_one(self.alpha) {
            let tilt = FRAC_PI_2 + self.beta * u;
            2.0 / PI * (tilt * u.tan() - self.beta * ((FRAC_PI_2 * w * cos_u) / tilt).ln())
        } else if self.alpha == 2.0 {
            2.0 * w.sqrt() * u.sin()
        } else {
            let a = self.alpha * (u + self.shift);
            self.scale * a.sin() / cos_u.powf(self.inv_alpha)
                * ((u - a).cos() / w).powf(self.tail_exp)
        }
    }

    /// Draws the `(U, W)` pair, redrawing the probability-zero cases
    /// `cos U = 0` and `W = 0`.
    pub fn draw_uniform_exp<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64) {
        loop {
            let u: f64 = rng.random_range(-FRAC_PI_2..FRAC_PI_2);
            let w: f64 = Exp1.sample(rng);
            if u.cos() > 0.0 && w > 0.0 {
                return (u, w);
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let (u, w) = Self::draw_uniform_exp(rng);
        self.transform(u, w)
    }
}

/// One draw from `S_alpha(1, beta, 0)`.
pub fn sample_standard<R: Rng + ?Sized>(alpha: f64, beta: f64, rng: &mut R) -> Result<f64> {
    Ok(StandardStable::new(alpha, beta)?.sample(rng))
}

/// One draw from `S_alpha(sigma, beta, mu)`.
pub fn sample<R: Rng + ?Sized>(params: &StableParams, rng: &mut R) -> f64 {
    let std = StandardStable::new(params.alpha, params.beta).expect("validated params");
    params.standardize(std.sample(rng))
}

/// `n` independent draws from `params`.
pub fn sample_n<R: Rng + ?Sized>(params: &StableParams, n: usize, rng: &mut R) -> Vec<f64> {
    let std = StandardStable::new(params.alpha, params.beta).expect("validated params");
    (0..n).map(|_| params.standardize(std.sample(rng))).collect()
}

/// Mean of `exp(i theta x)` over a sample.
pub fn empirical_char_fn(sample: &[f64], theta: f64) -> Complex64 {
    let (mut re, mut im) = (0.0, 0.0);
    for &x in sample {
        let (s, c) = (theta * x).sin_cos();
        re += c;
        im += s;
    }
    let n = sample.len() as f64;
    Complex64::new(re / n, im / n)
}

fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] * (1.0 - frac) + sorted[hi] * frac
}

fn ols_slope_intercept(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

const ECF_GRID_POINTS: usize = 10;
const ECF_PASSES: usize = 2;

/// Regression-type estimator on the log of the empirical characteristic
/// function. The sample is standardized by its median and interquartile
/// range, fitted on a 10-point grid in `(0, 1]`, restandardized with the
/// fitted scale and location, and refitted.
pub fn ecf_estimate(sample: &[f64]) -> Result<StableParams> {
    if sample.len() < 200 {
        return Err(Error::InsufficientData { needed: 200, have: sample.len() });
    }
    if sample.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter("sample contains non-finite values".into()));
    }
    let mut sorted = sample.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let median = quantile_sorted(&sorted, 0.5);
    let mut scale = (quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25)) / 2.0;
    if scale <= 0.0 {
        scale = sample.iter().map(|x| (x - median).abs()).sum::<f64>() / sample.len() as f64;
    }
    if scale <= 0.0 {
        return Err(Error::Degenerate("all sample values are identical".into()));
    }

    let grid: Vec<f64> = (1..=ECF_GRID_POINTS).map(|k| k as f64 / ECF_GRID_POINTS as f64).collect();
    let mut loc = median;
    let mut alpha = 2.0;
    let mut beta = 0.0;
    let mut y = vec![0.0; sample.len()];
    for _ in 0..ECF_PASSES {
        for (yi, &xi) in y.iter_mut().zip(sample) {
            *yi = (xi - loc) / scale;
        }
        let phis: Vec<Complex64> = grid.iter().map(|&t| empirical_char_fn(&y, t)).collect();

        let mut lx = Vec::with_capacity(grid.len());
        let mut ly = Vec::with_capacity(grid.len());
        for (&t, phi) in grid.iter().zip(&phis) {
            let m2 = phi.norm_sqr();
            if m2 > 0.0 && m2 < 1.0 {
                lx.push(t.ln());
                ly.push((-m2.ln()).ln());
            }
        }
        let (slope, intercept) = if lx.len() >= 2 {
            ols_slope_intercept(&lx, &ly)
        } else {
            None
        }
        .ok_or_else(|| Error::Degenerate("characteristic-function regression is degenerate".into()))?;
        alpha = slope.clamp(0.1, 2.0);
        let sigma_std = (intercept.exp() / 2.0).powf(1.0 / alpha);

        // arg phi(t) = mu t + beta sigma^alpha tan(pi alpha / 2) t^alpha
        let args: Vec<f64> = phis.iter().map(|p| p.im.atan2(p.re)).collect();
        let skew_scale = if is_alpha_one(alpha) {
            None
        } else {
            let tan = (PI * alpha / 2.0).tan();
            if tan.abs() < 1e-2 {
                None
            } else {
                Some(sigma_std.powf(alpha) * tan)
            }
        };
        let mu_std;
        match skew_scale {
            Some(k) => {
                let g: Vec<f64> = grid.iter().map(|&t| k * t.powf(alpha)).collect();
                let (mut stt, mut stg, mut sgg, mut sta, mut sga) = (0.0, 0.0, 0.0, 0.0, 0.0);
                for i in 0..grid.len() {
                    stt += grid[i] * grid[i];
                    stg += grid[i] * g[i];
                    sgg += g[i] * g[i];
                    sta += grid[i] * args[i];
                    sga += g[i] * args[i];
                }
                let det = stt * sgg - stg * stg;
                if det.abs() > 1e-14 * stt * sgg {
                    mu_std = (sta * sgg - sga * stg) / det;
                    beta = ((sga * stt - sta * stg) / det).clamp(-1.0, 1.0);
                } else {
                    mu_std = sta / stt;
                    beta = 0.0;
                }
            }
            None => {
                let stt: f64 = grid.iter().map(|t| t * t).sum();
                let sta: f64 = grid.iter().zip(&args).map(|(t, a)| t * a).sum();
                mu_std = sta / stt;
                beta = 0.0;
            }
        }
        loc += mu_std * scale;
        scale *= sigma_std;
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::Degenerate("fitted scale is not positive".into()));
        }
    }
    StableParams::new(alpha, if alpha == 2.0 { 0.0 } else { beta }, scale, loc)
}

/// Simulation-defined CDF: a sorted reference sample interpolated linearly
/// through the points `(x_(i), (i - 1/2) / n)`.
#[derive(Debug, Clone)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

pub const DEFAULT_CDF_REFERENCE: usize = 1_000_000;
const CDF_SEED: u64 = 0x5AB1_E5EE_D000_0001;

impl EmpiricalCdf {
    pub fn from_sample(mut sample: Vec<f64>) -> Self {
        sample.sort_by(|a, b| a.total_cmp(b));
        Self { sorted: sample }
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.sorted.len();
        if n == 0 || x.is_nan() {
            return f64::NAN;
        }
        if x < self.sorted[0] {
            return 0.0;
        }
        if x > self.sorted[n - 1] {
            return 1.0;
        }
        let idx = self.sorted.partition_point(|&v| v <= x);
        // sorted[idx - 1] <= x < sorted[idx]
        let nf = n as f64;
        if idx >= n {
            return (n as f64 - 0.5) / nf;
        }
        let (x0, x1) = (self.sorted[idx - 1], self.sorted[idx]);
        let (p0, p1) = ((idx as f64 - 0.5) / nf, (idx as f64 + 0.5) / nf);
        if x1 > x0 {
            p0 + (p1 - p0) * (x - x0) / (x1 - x0)
        } else {
            p0
        }
    }

    /// Two-column CSV `value,cdf`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "value,cdf")?;
        let nf = self.sorted.len() as f64;
        for (i, v) in self.sorted.iter().enumerate() {
            writeln!(out, "{},{}", v, (i as f64 + 0.5) / nf)?;
        }
        Ok(())
    }
}

/// Reference CDF of `params` from `n_ref` draws with a seed derived from the
/// parameters, so the table is a pure function of its arguments.
pub fn empirical_cdf(params: &StableParams, n_ref: usize) -> Result<EmpiricalCdf> {
    if n_ref < 100_000 {
        return Err(Error::InsufficientData { needed: 100_000, have: n_ref });
    }
    let key = params.cache_key();
    let mut rng = rng_from_seed(derive_seed(CDF_SEED, &[key[0], key[1], key[2], key[3], n_ref as u64]));
    Ok(EmpiricalCdf::from_sample(sample_n(params, n_ref, &mut rng)))
}

type CdfCache = RwLock<HashMap<[u64; 4], Arc<EmpiricalCdf>>>;

fn cdf_cache() -> &'static CdfCache {
    static CACHE: OnceLock<CdfCache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Default-size reference CDF, built once per parameter set and shared.
pub fn cached_cdf(params: &StableParams) -> Arc<EmpiricalCdf> {
    let key = params.cache_key();
    if let Some(cdf) = cdf_cache().read().expect("cdf cache poisoned").get(&key) {
        return Arc::clone(cdf);
    }
    let built = Arc::new(empirical_cdf(params, DEFAULT_CDF_REFERENCE).expect("default size is valid"));
    let mut guard = cdf_cache().write().expect("cdf cache poisoned");
    Arc::clone(guard.entry(key).or_insert(built))
}
