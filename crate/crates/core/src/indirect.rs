//! Indirect inference: match auxiliary fits on observed and simulated data.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::auxfit::{self, AuxModelSpec};
use crate::curve::local_coeffs;
use crate::error::{Error, Result};
use crate::optim::{NelderMead, TracePoint};
use crate::params::{to_coords, to_params, ModelTemplate, ParamVector, ALPHA_RANGE};
use crate::rng::{derive_seed, rng_from_seed};
use crate::stable::{StableParams, StandardStable};
use crate::tvarma::{Filter, TvArmaModel, CHECK_GRID, DEFAULT_BURN_IN};

/// Objective value assigned to infeasible or explosive candidates, before
/// the distance-to-feasibility term is added.
pub const PENALTY: f64 = 1e12;
/// Starting tail index when it is estimated.
pub const DEFAULT_ALPHA0: f64 = 1.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndirectConfig {
    /// Simulated paths per candidate (`S`).
    pub paths: usize,
    pub burn_in: usize,
    /// Row-major weighting matrix; identity when absent.
    pub omega: Option<Vec<f64>>,
    /// Master seed of the frozen innovation streams.
    pub seed: u64,
    /// Outer search over the model parameters.
    pub optimizer: NelderMead,
    /// Auxiliary fits on simulated paths (warm-started at the data fit).
    pub inner: NelderMead,
    pub alpha0: f64,
}

impl IndirectConfig {
    pub fn new(paths: usize, seed: u64) -> Self {
        Self {
            paths,
            burn_in: DEFAULT_BURN_IN,
            omega: None,
            seed,
            optimizer: NelderMead { max_iter: 500, xtol: 1e-4, ftol: 1e-10, initial_step: 0.1, restarts: 0 },
            inner: NelderMead { max_iter: 1000, xtol: 1e-7, ftol: 1e-12, initial_step: 0.02, restarts: 0 },
            alpha0: DEFAULT_ALPHA0,
        }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if self.paths == 0 {
            return Err(Error::InvalidParameter("need at least one simulated path".into()));
        }
        if let Some(w) = &self.omega {
            if w.len() != dim * dim || w.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidParameter(format!("omega must be a finite {dim}x{dim} matrix")));
            }
        }
        if !(self.alpha0 > ALPHA_RANGE.0 && self.alpha0 <= ALPHA_RANGE.1) {
            return Err(Error::InvalidParameter(format!("alpha0 = {} outside (0.2, 2]", self.alpha0)));
        }
        Ok(())
    }

    /// Seeds of the `S` frozen streams.
    pub fn path_seeds(&self) -> Vec<u64> {
        (0..self.paths as u64).map(|s| derive_seed(self.seed, &[s])).collect()
    }
}

/// Frozen uniform/exponential pairs for `S` paths; candidate innovations are
/// deterministic transforms of them, so the binding is a smooth function of
/// the parameters (common random numbers).
#[derive(Debug, Clone)]
pub struct Binder {
    template: ModelTemplate,
    aux: AuxModelSpec,
    len: usize,
    burn_in: usize,
    uw: Vec<Vec<(f64, f64)>>,
    /// Innovations for a known tail index, transformed once.
    fixed_eps: Option<Vec<Vec<f64>>>,
    inner: NelderMead,
}

impl Binder {
    pub fn new(cfg: &IndirectConfig, template: &ModelTemplate, aux: &AuxModelSpec, len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::InvalidParameter("series length must be positive".into()));
        }
        if template.n_params() != aux.n_params() {
            return Err(Error::InvalidParameter(format!(
                "model has {} parameters but the auxiliary model has {}",
                template.n_params(),
                aux.n_params()
            )));
        }
        cfg.validate(template.n_params())?;
        let need = cfg.burn_in + template.layout.q() + len;
        let uw: Vec<Vec<(f64, f64)>> = cfg
            .path_seeds()
            .into_iter()
            .map(|seed| {
                let mut rng = rng_from_seed(seed);
                (0..need).map(|_| StandardStable::draw_uniform_exp(&mut rng)).collect()
            })
            .collect();
        let mut binder = Self {
            template: template.clone(),
            aux: aux.clone(),
            len,
            burn_in: cfg.burn_in,
            uw,
            fixed_eps: None,
            inner: cfg.inner.clone(),
        };
        if let crate::params::AlphaSpec::Known(alpha) = template.alpha {
            binder.fixed_eps = Some(binder.transform_all(alpha)?);
        }
        Ok(binder)
    }

    fn transform_all(&self, alpha: f64) -> Result<Vec<Vec<f64>>> {
        let law = StableParams::innovation(alpha, self.template.beta)?;
        let std = StandardStable::new(law.alpha, law.beta)?;
        Ok(self
            .uw
            .iter()
            .map(|path| path.iter().map(|&(u, w)| law.standardize(std.transform(u, w))).collect())
            .collect())
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Builds the model at `theta` and checks feasibility: tail index in
    /// (0.2, 2], positive scale curve, locally stationary AR and locally
    /// invertible MA polynomials.
    pub fn model(&self, theta: &[f64]) -> Result<TvArmaModel> {
        let model = self.template.build(theta)?;
        let alpha = model.innovation().alpha;
        if !(alpha > ALPHA_RANGE.0 && alpha <= ALPHA_RANGE.1) {
            return Err(Error::InvalidParameter(format!("alpha = {alpha} outside (0.2, 2]")));
        }
        if !model.locally_stationary() || !model.locally_invertible() {
            return Err(Error::InvalidParameter("local AR/MA polynomial not stable/invertible".into()));
        }
        Ok(model)
    }

    /// The `S` simulated paths at `theta`.
    pub fn paths(&self, theta: &[f64]) -> Result<Vec<Vec<f64>>> {
        let model = self.model(theta)?;
        let transformed;
        let eps = match &self.fixed_eps {
            Some(e) => e,
            None => {
                transformed = self.transform_all(model.innovation().alpha)?;
                &transformed
            }
        };
        let filter = Filter::new(&model, self.len, self.burn_in);
        let mut work = Vec::new();
        eps.iter()
            .map(|e| {
                let mut out = Vec::with_capacity(self.len);
                filter.run_into(e, &mut work, &mut out)?;
                Ok(out)
            })
            .collect()
    }

    /// `lambda_S(theta)`: stacked auxiliary fit on the simulated paths,
    /// started from `init` (normally the fit on the observed data).
    pub fn binding(&self, theta: &[f64], init: &[f64]) -> Result<Vec<f64>> {
        let paths = self.paths(theta)?;
        let fit = auxfit::fit(&self.aux, &paths, init, &self.inner)?;
        Ok(fit.params.values)
    }
}

/// `(a - b)' Omega (a - b)`.
pub fn quadratic_form(a: &[f64], b: &[f64], omega: Option<&[f64]>) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    match omega {
        None => d.iter().map(|v| v * v).sum(),
        Some(w) => {
            let n = d.len();
            (0..n).map(|i| d[i] * (0..n).map(|j| w[i * n + j] * d[j]).sum::<f64>()).sum()
        }
    }
}

/// Nonnegative measure of how far `theta` is from the feasible region; zero
/// inside. Root violations are measured by the excess of the local
/// coefficient l1-norm over one.
pub fn distance_to_box(template: &ModelTemplate, theta: &[f64]) -> f64 {
    let Ok(split) = template.layout.split(theta, template.alpha_free()) else {
        return f64::MAX;
    };
    let mut d = 0.0;
    if let Some(a) = split.extra {
        d += (ALPHA_RANGE.0 - a).max(0.0) + (a - ALPHA_RANGE.1).max(0.0);
    }
    d += (-split.gamma.min_on_unit(CHECK_GRID)).max(0.0);
    let m = CHECK_GRID - 1;
    for curves in [&split.ar, &split.ma] {
        let worst = (0..=m)
            .map(|i| local_coeffs(curves, i as f64 / m as f64).iter().map(|c| c.abs()).sum::<f64>())
            .fold(0.0f64, f64::max);
        d += (worst - 1.0).max(0.0);
    }
    if d.is_finite() {
        d
    } else {
        f64::MAX
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndirectResult {
    pub theta: ParamVector,
    /// Auxiliary fit on the observed series.
    pub lambda: ParamVector,
    /// Auxiliary fit on the simulated paths at `theta`.
    pub lambda_sim: ParamVector,
    pub objective: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
    pub aux_converged: bool,
    /// Free `nu` of the data fit reached the upper end of its range.
    pub nu_effectively_gaussian: bool,
    pub seed: u64,
    pub path_seeds: Vec<u64>,
    pub wall_time: Option<f64>,
    pub trace: Vec<TracePoint>,
}

/// Starting point: the auxiliary estimate copied onto the matching curve
/// and scale coordinates, with `alpha0` in the tail-index slot.
pub fn default_theta0(template: &ModelTemplate, aux: &AuxModelSpec, lambda: &[f64], alpha0: f64) -> Vec<f64> {
    let n_curve = template.layout.n_curve();
    let mut theta = lambda[..n_curve].to_vec();
    if template.alpha_free() {
        theta.push(alpha0);
    }
    let skip = n_curve + aux.nu_free() as usize;
    theta.extend_from_slice(&lambda[skip..]);
    theta
}

/// Estimates a model with known tail index.
pub fn estimate(
    x: &[f64],
    cfg: &IndirectConfig,
    template: &ModelTemplate,
    aux: &AuxModelSpec,
    theta0: Option<&[f64]>,
) -> Result<IndirectResult> {
    if template.alpha_free() {
        return Err(Error::InvalidParameter("free alpha: use estimate_unknown_alpha".into()));
    }
    run(x, cfg, template, aux, theta0)
}

/// Estimates a model whose tail index is free, with `nu` free in the
/// auxiliary model.
pub fn estimate_unknown_alpha(
    x: &[f64],
    cfg: &IndirectConfig,
    template: &ModelTemplate,
    aux: &AuxModelSpec,
    theta0: Option<&[f64]>,
) -> Result<IndirectResult> {
    if !template.alpha_free() || !aux.nu_free() {
        return Err(Error::InvalidParameter("unknown-alpha estimation needs free alpha and free nu".into()));
    }
    run(x, cfg, template, aux, theta0)
}

fn run(
    x: &[f64],
    cfg: &IndirectConfig,
    template: &ModelTemplate,
    aux: &AuxModelSpec,
    theta0: Option<&[f64]>,
) -> Result<IndirectResult> {
    let started = Instant::now();
    let binder = Binder::new(cfg, template, aux, x.len())?;
    let data_fit = auxfit::fit_data(aux, &[x])?;
    let lambda = data_fit.params.values.clone();
    let theta0 = match theta0 {
        Some(t) => t.to_vec(),
        None => default_theta0(template, aux, &lambda, cfg.alpha0),
    };
    binder.model(&theta0)?;

    let transforms = template.transforms();
    let omega = cfg.omega.as_deref();
    let objective = |z: &[f64]| -> f64 {
        let theta = to_params(&transforms, z);
        match binder.binding(&theta, &lambda) {
            Ok(sim) => quadratic_form(&lambda, &sim, omega),
            Err(_) => PENALTY + distance_to_box(template, &theta),
        }
    };
    let m = cfg.optimizer.minimize(objective, &to_coords(&transforms, &theta0));
    let theta = to_params(&transforms, &m.x);
    let lambda_sim = binder.binding(&theta, &lambda)?;
    let trace = m
        .trace
        .into_iter()
        .map(|p| TracePoint { iteration: p.iteration, f: p.f, x: to_params(&transforms, &p.x) })
        .collect();
    Ok(IndirectResult {
        theta: ParamVector::new(template.names(), theta)?,
        lambda: data_fit.params,
        lambda_sim: ParamVector::new(aux.names(), lambda_sim)?,
        objective: m.f,
        iterations: m.iterations,
        evaluations: m.evaluations,
        converged: m.converged && m.f < PENALTY,
        aux_converged: data_fit.converged,
        nu_effectively_gaussian: data_fit.effectively_gaussian,
        seed: cfg.seed,
        path_seeds: cfg.path_seeds(),
        wall_time: Some(started.elapsed().as_secs_f64()),
        trace,
    })
}
