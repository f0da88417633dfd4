//! Auxiliary tvARMA model with Student-t innovations, fitted by conditional
//! likelihood.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::curve::{curves_stable_on_grid, CoeffCurve};
use crate::error::{Error, Result};
use crate::optim::{NelderMead, TracePoint};
use crate::params::{to_coords, to_params, CurveLayout, ModelTemplate, ParamVector, Transform};
use crate::tvarma::CHECK_GRID;

/// Degrees of freedom used when the stable index is known.
pub const FIXED_NU: f64 = 3.0;
/// Search range of a free `nu`.
pub const NU_RANGE: (f64, f64) = (0.2, 50.0);
/// Free `nu` estimates above this are reported as effectively Gaussian.
pub const NU_GAUSSIAN_FLAG: f64 = 49.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NuMode {
    Fixed(f64),
    Free,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuxModelSpec {
    pub layout: CurveLayout,
    pub nu: NuMode,
}

impl AuxModelSpec {
    /// Same skeleton as the model of interest; `nu` is free exactly when
    /// `alpha` is, so both parameter vectors have the same length.
    pub fn mirror(template: &ModelTemplate) -> Self {
        let nu = if template.alpha_free() { NuMode::Free } else { NuMode::Fixed(FIXED_NU) };
        Self { layout: template.layout.clone(), nu }
    }

    pub fn nu_free(&self) -> bool {
        matches!(self.nu, NuMode::Free)
    }

    pub fn names(&self) -> Vec<String> {
        self.layout.names(self.nu_free().then_some("nu"))
    }

    pub fn n_params(&self) -> usize {
        self.layout.n_params(self.nu_free())
    }

    pub fn transforms(&self) -> Vec<Transform> {
        let (lo, hi) = NU_RANGE;
        self.layout.transforms(self.nu_free().then_some(Transform::Bounded { lo, hi }))
    }

    /// `nu` at `lambda`.
    pub fn nu_of(&self, lambda: &[f64]) -> f64 {
        match self.nu {
            NuMode::Fixed(v) => v,
            NuMode::Free => lambda[self.layout.n_curve()],
        }
    }
}

/// Per-time coefficient tables of the AM at one parameter value on a grid of
/// length `len`.
#[derive(Debug, Clone)]
pub struct AuxEvaluator {
    p: usize,
    q: usize,
    len: usize,
    ar: Vec<f64>,
    ma: Vec<f64>,
    inv_gamma: Vec<f64>,
    sum_log_gamma: f64,
    half_nu1: f64,
    inv_nu: f64,
    /// `-log` of the t density normalizing constant.
    log_norm: f64,
}

impl AuxEvaluator {
    /// Fails with [`Error::InvalidParameter`] outside the feasible region:
    /// `nu` outside its range, a nonpositive scale curve, or local AR/MA
    /// polynomials with roots on or inside the unit circle.
    pub fn new(spec: &AuxModelSpec, lambda: &[f64], len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::InsufficientData { needed: 1, have: 0 });
        }
        let s = spec.layout.split(lambda, spec.nu_free())?;
        let nu = spec.nu_of(lambda);
        if !(nu > 0.0) || (spec.nu_free() && !(nu >= NU_RANGE.0 && nu <= NU_RANGE.1)) {
            return Err(Error::InvalidParameter(format!("nu = {nu} outside the feasible range")));
        }
        if lambda.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite parameter".into()));
        }
        if !(s.gamma.min_on_unit(CHECK_GRID) > 0.0) {
            return Err(Error::InvalidParameter("scale curve not positive on [0, 1]".into()));
        }
        if !curves_stable_on_grid(&s.ar, CHECK_GRID, 1.0) || !curves_stable_on_grid(&s.ma, CHECK_GRID, 1.0) {
            return Err(Error::InvalidParameter("local AR/MA polynomial not stable/invertible".into()));
        }
        Ok(Self::tabulate(&s.ar, &s.ma, &s.gamma, nu, len))
    }

    fn tabulate(ar_c: &[CoeffCurve], ma_c: &[CoeffCurve], gamma: &CoeffCurve, nu: f64, len: usize) -> Self {
        let (p, q) = (ar_c.len(), ma_c.len());
        let n = len as f64;
        let mut ar = Vec::with_capacity(len * p);
        let mut ma = Vec::with_capacity(len * q);
        let mut inv_gamma = Vec::with_capacity(len);
        let mut sum_log_gamma = 0.0;
        for t in 1..=len {
            let u = t as f64 / n;
            ar.extend(ar_c.iter().map(|c| c.eval(u)));
            for (k, c) in ma_c.iter().enumerate() {
                ma.push(c.eval(u) * gamma.eval((t as f64 - (k + 1) as f64) / n));
            }
            let g = gamma.eval(u);
            inv_gamma.push(1.0 / g);
            sum_log_gamma += g.ln();
        }
        let log_norm = ln_gamma(nu / 2.0) - ln_gamma((nu + 1.0) / 2.0) + 0.5 * (nu * std::f64::consts::PI).ln();
        Self { p, q, len, ar, ma, inv_gamma, sum_log_gamma, half_nu1: 0.5 * (nu + 1.0), inv_nu: 1.0 / nu, log_norm }
    }

    /// Sum over `t` of `-log f(X_t | past)` for one series of length `len`.
    /// `eta` is scratch space for the standardized residuals.
    pub fn series_loss(&self, x: &[f64], eta: &mut Vec<f64>) -> Result<f64> {
        if x.len() != self.len {
            return Err(Error::InvalidParameter(format!("series length {} differs from {}", x.len(), self.len)));
        }
        let (p, q) = (self.p, self.q);
        eta.clear();
        eta.resize(self.len, 0.0);
        let mut acc_log = 0.0;
        let mut prod = 1.0;
        for i in 0..self.len {
            let mut acc = x[i];
            let ar = &self.ar[i * p..i * p + p];
            for j in 1..=p.min(i) {
                acc += ar[j - 1] * x[i - j];
            }
            let ma = &self.ma[i * q..i * q + q];
            for k in 1..=q.min(i) {
                acc -= ma[k - 1] * eta[i - k];
            }
            let e = acc * self.inv_gamma[i];
            if !e.is_finite() {
                return Err(Error::NonFinite { t: i as i64 + 1, context: "auxiliary residual recursion overflowed".into() });
            }
            eta[i] = e;
            // one logarithm per block of factors; all factors are >= 1
            prod *= 1.0 + e * e * self.inv_nu;
            if i % 8 == 7 || prod > 1e200 {
                acc_log += prod.ln();
                prod = 1.0;
            }
        }
        acc_log += prod.ln();
        Ok(self.len as f64 * self.log_norm + self.half_nu1 * acc_log + self.sum_log_gamma)
    }
}

/// Mean negative conditional log-likelihood per observation over one or
/// more series of equal length (pre-sample values zero).
pub fn neg_cond_loglik<S: AsRef<[f64]>>(spec: &AuxModelSpec, lambda: &[f64], data: &[S]) -> Result<f64> {
    let len = check_stack(data)?;
    let ev = AuxEvaluator::new(spec, lambda, len)?;
    let mut eta = Vec::with_capacity(len);
    let mut total = 0.0;
    for x in data {
        total += ev.series_loss(x.as_ref(), &mut eta)?;
    }
    let value = total / (data.len() * len) as f64;
    if !value.is_finite() {
        return Err(Error::NonFinite { t: 0, context: "auxiliary log-likelihood".into() });
    }
    Ok(value)
}

fn check_stack<S: AsRef<[f64]>>(data: &[S]) -> Result<usize> {
    let first = data.first().ok_or(Error::InsufficientData { needed: 1, have: 0 })?;
    let len = first.as_ref().len();
    if len == 0 {
        return Err(Error::InsufficientData { needed: 1, have: 0 });
    }
    if data.iter().any(|x| x.as_ref().len() != len) {
        return Err(Error::InvalidParameter("stacked series must share one length".into()));
    }
    Ok(len)
}

/// Fitted auxiliary parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuxFit {
    pub params: ParamVector,
    pub objective: f64,
    pub converged: bool,
    pub iterations: usize,
    pub evaluations: usize,
    /// Free `nu` ran into the upper end of its range.
    pub effectively_gaussian: bool,
    /// Best point per optimizer iteration, in parameter coordinates.
    pub trace: Vec<TracePoint>,
}

/// Optimizer settings used for fits on observed data.
pub fn default_optimizer() -> NelderMead {
    NelderMead { max_iter: 2000, xtol: 1e-7, ftol: 1e-12, initial_step: 0.1, restarts: 1 }
}

/// Starting point for a cold fit: zero dynamics, a robust scale
/// (`median |x| / 0.765`, the median of `|t_3|`) and `nu = 3`.
pub fn initial_guess<S: AsRef<[f64]>>(spec: &AuxModelSpec, data: &[S]) -> Result<Vec<f64>> {
    check_stack(data)?;
    let mut abs: Vec<f64> = data.iter().flat_map(|x| x.as_ref().iter().map(|v| v.abs())).collect();
    let mid = abs.len() / 2;
    let (_, median, _) = abs.select_nth_unstable_by(mid, f64::total_cmp);
    let scale = (*median / 0.765).max(1e-8);
    let mut v = vec![0.0; spec.layout.n_curve()];
    if spec.nu_free() {
        v.push(FIXED_NU);
    }
    v.push(scale);
    v.extend(std::iter::repeat_n(0.0, spec.layout.gamma_degree));
    Ok(v)
}

/// Minimizes the stacked objective from `init`. Non-convergence within the
/// budget is reported through [`AuxFit::converged`].
pub fn fit<S: AsRef<[f64]> + Sync>(
    spec: &AuxModelSpec,
    data: &[S],
    init: &[f64],
    optimizer: &NelderMead,
) -> Result<AuxFit> {
    // validates the stack and the starting point
    neg_cond_loglik(spec, init, data)?;
    let len = data[0].as_ref().len();
    let transforms = spec.transforms();
    let mut eta = Vec::with_capacity(len);
    let denom = (data.len() * len) as f64;
    let objective = |z: &[f64]| -> f64 {
        let lambda = to_params(&transforms, z);
        let Ok(ev) = AuxEvaluator::new(spec, &lambda, len) else {
            return f64::INFINITY;
        };
        let mut total = 0.0;
        for x in data {
            match ev.series_loss(x.as_ref(), &mut eta) {
                Ok(v) => total += v,
                Err(_) => return f64::INFINITY,
            }
        }
        total / denom
    };
    let m = optimizer.minimize(objective, &to_coords(&transforms, init));
    let values = to_params(&transforms, &m.x);
    let effectively_gaussian = spec.nu_free() && spec.nu_of(&values) > NU_GAUSSIAN_FLAG;
    let trace = m
        .trace
        .into_iter()
        .map(|p| TracePoint { iteration: p.iteration, f: p.f, x: to_params(&transforms, &p.x) })
        .collect();
    Ok(AuxFit {
        params: ParamVector::new(spec.names(), values)?,
        objective: m.f,
        converged: m.converged,
        iterations: m.iterations,
        evaluations: m.evaluations,
        effectively_gaussian,
        trace,
    })
}

/// Cold fit on observed data from [`initial_guess`].
pub fn fit_data<S: AsRef<[f64]> + Sync>(spec: &AuxModelSpec, data: &[S]) -> Result<AuxFit> {
    let init = initial_guess(spec, data)?;
    fit(spec, data, &init, &default_optimizer())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::AlphaSpec;
    use statrs::distribution::{Continuous, StudentsT};

    fn spec(p: usize, q: usize, nu: NuMode) -> AuxModelSpec {
        AuxModelSpec { layout: CurveLayout::uniform(p, q, 1, 0), nu }
    }

    #[test]
    fn white_noise_spec_scores_raw_density() {
        let s = AuxModelSpec { layout: CurveLayout::uniform(0, 0, 0, 0), nu: NuMode::Fixed(3.0) };
        let x = [0.3, -1.5, 2.2, 0.0, 7.0];
        let t3 = StudentsT::new(0.0, 1.0, 3.0).unwrap();
        let expect = -x.iter().map(|v| t3.ln_pdf(*v)).sum::<f64>() / x.len() as f64;
        let got = neg_cond_loglik(&s, &[1.0], &[x]).unwrap();
        assert!((got - expect).abs() < 1e-12);
        // a scale multiplies the t variate
        let t3s = StudentsT::new(0.0, 2.0, 3.0).unwrap();
        let expect = -x.iter().map(|v| t3s.ln_pdf(*v)).sum::<f64>() / x.len() as f64;
        assert!((neg_cond_loglik(&s, &[2.0], &[x]).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn tvar1_conditional_density_by_hand() {
        let s = spec(1, 0, NuMode::Fixed(4.0));
        let x = [0.5, -0.2, 1.1, 0.4];
        let lambda = [-0.3, 0.8, 1.5];
        let t4 = StudentsT::new(0.0, 1.5, 4.0).unwrap();
        let mut expect = -t4.ln_pdf(x[0]);
        for i in 1..4 {
            let u = (i + 1) as f64 / 4.0;
            expect -= t4.ln_pdf(x[i] + (-0.3 + 0.8 * u) * x[i - 1]);
        }
        let got = neg_cond_loglik(&s, &lambda, &[x]).unwrap();
        assert!((got - expect / 4.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_points_are_rejected() {
        let s = spec(1, 1, NuMode::Free);
        let x = vec![vec![0.1; 10]];
        assert!(neg_cond_loglik(&s, &[0.0, 0.0, 0.5, 0.8, 3.0, 1.0], &x).is_err());
        assert!(neg_cond_loglik(&s, &[0.0, 0.0, 0.0, 0.0, 0.1, 1.0], &x).is_err());
        assert!(neg_cond_loglik(&s, &[0.0, 0.0, 0.0, 0.0, 3.0, -1.0], &x).is_err());
        assert!(neg_cond_loglik(&s, &[0.0, 0.0, 0.0, 0.0, 3.0, 1.0], &x).is_ok());
    }

    #[test]
    fn mirror_matches_template_dimension() {
        let t = ModelTemplate { layout: CurveLayout::uniform(1, 1, 1, 0), alpha: AlphaSpec::Free, beta: 0.0 };
        let a = AuxModelSpec::mirror(&t);
        assert_eq!(a.n_params(), t.n_params());
        assert_eq!(a.names()[4], "nu");
        let t = ModelTemplate { alpha: AlphaSpec::Known(1.9), ..t };
        assert_eq!(AuxModelSpec::mirror(&t).nu, NuMode::Fixed(3.0));
    }

    #[test]
    fn stacking_identical_copies_leaves_the_fit_unchanged() {
        let s = spec(1, 0, NuMode::Fixed(3.0));
        let x: Vec<f64> = (0..80).map(|i| ((i * 37 % 11) as f64 - 5.0) / 3.0).collect();
        let one = fit(&s, std::slice::from_ref(&x), &[0.0, 0.0, 1.0], &default_optimizer()).unwrap();
        let three = fit(&s, &[x.clone(), x.clone(), x], &[0.0, 0.0, 1.0], &default_optimizer()).unwrap();
        for (a, b) in one.params.values.iter().zip(&three.params.values) {
            assert!((a - b).abs() < 1e-6);
        }
    }
}
