//! Blocked Whittle estimation from local periodograms.

use std::f64::consts::PI;
use std::io::Write;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::curve::{curves_stable_on_grid, CoeffCurve};
use crate::error::{Error, Result};
use crate::optim::NelderMead;
use crate::params::{to_coords, to_params, CurveLayout, ParamVector};
use crate::tvarma::CHECK_GRID;

/// Fits whose local AR/MA roots come within this factor of the unit circle
/// are flagged as boundary solutions.
pub const BOUNDARY_RADIUS: f64 = 0.995;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BweConfig {
    pub block_len: usize,
    pub shift: usize,
}

impl BweConfig {
    /// `N = floor(T^0.8)` and `shift = floor(0.2 N)`.
    pub fn for_len(len: usize) -> Self {
        let block_len = (len as f64).powf(0.8).floor() as usize;
        let shift = ((0.2 * block_len as f64).floor() as usize).max(1);
        Self { block_len, shift }
    }

    pub fn validate(&self, len: usize) -> Result<()> {
        if self.block_len < 3 || self.block_len > len || self.shift == 0 {
            return Err(Error::InvalidParameter(format!(
                "block length {} / shift {} invalid for {len} observations",
                self.block_len, self.shift
            )));
        }
        Ok(())
    }

    /// `M = floor((T - N) / shift) + 1`.
    pub fn n_blocks(&self, len: usize) -> usize {
        (len - self.block_len) / self.shift + 1
    }

    /// Zero-based start index of every block.
    pub fn starts(&self, len: usize) -> Vec<usize> {
        (0..self.n_blocks(len)).map(|m| m * self.shift).collect()
    }

    /// Rescaled midpoint of the block starting at zero-based `start`.
    pub fn midpoint(&self, start: usize, len: usize) -> f64 {
        // block covers times start+1 ..= start+N
        (start as f64 + (self.block_len as f64 + 1.0) / 2.0) / len as f64
    }

    /// Fourier frequencies `2 pi k / N`, `k = 1..=(N-1)/2`.
    pub fn frequencies(&self) -> Vec<f64> {
        let n = self.block_len;
        (1..=(n - 1) / 2).map(|k| 2.0 * PI * k as f64 / n as f64).collect()
    }
}

/// Mean-removed periodogram `|sum x_t e^{-i l t}|^2 / (2 pi N)` of one block.
pub fn local_periodogram(block: &[f64]) -> Vec<f64> {
    let n = block.len();
    let mean = block.iter().sum::<f64>() / n as f64;
    let mut buf: Vec<Complex64> = block.iter().map(|v| Complex64::new(v - mean, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let norm = 2.0 * PI * n as f64;
    (1..=(n - 1) / 2).map(|k| buf[k].norm_sqr() / norm).collect()
}

/// Periodograms of all blocks of a series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockPeriodograms {
    pub midpoints: Vec<f64>,
    pub frequencies: Vec<f64>,
    /// `values[m][k]`.
    pub values: Vec<Vec<f64>>,
}

impl BlockPeriodograms {
    pub fn new(x: &[f64], cfg: &BweConfig) -> Result<Self> {
        cfg.validate(x.len())?;
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(cfg.block_len);
        let norm = 2.0 * PI * cfg.block_len as f64;
        let nfreq = (cfg.block_len - 1) / 2;
        let starts = cfg.starts(x.len());
        let mut values = Vec::with_capacity(starts.len());
        let mut buf = vec![Complex64::new(0.0, 0.0); cfg.block_len];
        for &s in &starts {
            let block = &x[s..s + cfg.block_len];
            let mean = block.iter().sum::<f64>() / block.len() as f64;
            for (b, v) in buf.iter_mut().zip(block) {
                *b = Complex64::new(v - mean, 0.0);
            }
            fft.process(&mut buf);
            values.push((1..=nfreq).map(|k| buf[k].norm_sqr() / norm).collect());
        }
        Ok(Self {
            midpoints: starts.iter().map(|&s| cfg.midpoint(s, x.len())).collect(),
            frequencies: cfg.frequencies(),
            values,
        })
    }

    /// `block,frequency,value` rows (blocks numbered from 1).
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "block,frequency,value")?;
        for (m, row) in self.values.iter().enumerate() {
            for (l, v) in self.frequencies.iter().zip(row) {
                writeln!(out, "{},{l},{v}", m + 1)?;
            }
        }
        Ok(())
    }
}

/// `gamma(u)^2 / (2 pi) |1 + sum b_k(u) e^{-ik l}|^2 / |1 + sum a_j(u) e^{-ij l}|^2`.
pub fn spectral_density(ar: &[CoeffCurve], ma: &[CoeffCurve], gamma: &CoeffCurve, u: f64, lambda: f64) -> f64 {
    let poly = |curves: &[CoeffCurve]| {
        let mut z = Complex64::new(1.0, 0.0);
        for (j, c) in curves.iter().enumerate() {
            z += Complex64::from_polar(c.eval(u), -((j + 1) as f64) * lambda);
        }
        z.norm_sqr()
    };
    let g = gamma.eval(u);
    g * g / (2.0 * PI) * poly(ma) / poly(ar)
}

/// Blocked Whittle objective at one parameter value.
#[derive(Debug, Clone)]
pub struct BweObjective<'a> {
    layout: &'a CurveLayout,
    pg: &'a BlockPeriodograms,
    /// `cos(j l_k)`, `sin(j l_k)` for `j = 1..=max(p, q)`.
    trig: Vec<(f64, f64)>,
    order: usize,
}

impl<'a> BweObjective<'a> {
    pub fn new(layout: &'a CurveLayout, pg: &'a BlockPeriodograms) -> Self {
        let order = layout.p().max(layout.q());
        let trig = pg
            .frequencies
            .iter()
            .flat_map(|&l| (1..=order).map(move |j| ((j as f64 * l).cos(), (j as f64 * l).sin())))
            .collect();
        Self { layout, pg, trig, order }
    }

    /// Mean over blocks and frequencies of `log f + I / f`; `+inf` outside
    /// the feasible region (nonpositive scale, nonstationary AR or
    /// noninvertible MA on the grid).
    pub fn value(&self, theta: &[f64]) -> f64 {
        let Ok(s) = self.layout.split(theta, false) else {
            return f64::INFINITY;
        };
        if !(s.gamma.min_on_unit(CHECK_GRID) > 0.0)
            || !curves_stable_on_grid(&s.ar, CHECK_GRID, 1.0)
            || !curves_stable_on_grid(&s.ma, CHECK_GRID, 1.0)
        {
            return f64::INFINITY;
        }
        let mut total = 0.0;
        let mut a = vec![0.0; s.ar.len()];
        let mut b = vec![0.0; s.ma.len()];
        for (m, &u) in self.pg.midpoints.iter().enumerate() {
            for (c, curve) in a.iter_mut().zip(&s.ar) {
                *c = curve.eval(u);
            }
            for (c, curve) in b.iter_mut().zip(&s.ma) {
                *c = curve.eval(u);
            }
            let g = s.gamma.eval(u);
            let level = g * g / (2.0 * PI);
            for (k, i_val) in self.pg.values[m].iter().enumerate() {
                let trig = &self.trig[k * self.order..(k + 1) * self.order];
                let f = level * transfer(&b, trig) / transfer(&a, trig);
                total += f.ln() + i_val / f;
            }
        }
        let count = self.pg.midpoints.len() * self.pg.frequencies.len();
        total / count as f64
    }
}

/// `|1 + sum c_j e^{-i j l}|^2` from tabulated `(cos, sin)` of `j l`.
#[inline]
fn transfer(c: &[f64], trig: &[(f64, f64)]) -> f64 {
    let (mut re, mut im) = (1.0, 0.0);
    for (v, (cs, sn)) in c.iter().zip(trig) {
        re += v * cs;
        im -= v * sn;
    }
    re * re + im * im
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BweFit {
    pub params: ParamVector,
    pub objective: f64,
    /// False when the budget ran out or the solution sits at the
    /// stationarity / invertibility boundary.
    pub converged: bool,
    pub at_boundary: bool,
    pub iterations: usize,
    pub blocks: usize,
}

pub fn default_optimizer() -> NelderMead {
    NelderMead { max_iter: 2000, xtol: 1e-7, ftol: 1e-12, initial_step: 0.1, restarts: 1 }
}

/// Zero dynamics and the white-noise scale `sqrt(2 pi mean I)`.
pub fn initial_guess(layout: &CurveLayout, pg: &BlockPeriodograms) -> Vec<f64> {
    let count = pg.values.iter().map(Vec::len).sum::<usize>().max(1);
    let mean = pg.values.iter().flatten().sum::<f64>() / count as f64;
    let mut v = vec![0.0; layout.n_curve()];
    v.push((2.0 * PI * mean).sqrt().max(1e-8));
    v.extend(std::iter::repeat_n(0.0, layout.gamma_degree));
    v
}

/// Minimizes the blocked Whittle objective over curve and scale
/// coefficients.
pub fn bwe_fit(
    x: &[f64],
    layout: &CurveLayout,
    cfg: &BweConfig,
    init: Option<&[f64]>,
    optimizer: &NelderMead,
) -> Result<BweFit> {
    let pg = BlockPeriodograms::new(x, cfg)?;
    let objective = BweObjective::new(layout, &pg);
    let init = match init {
        Some(v) => v.to_vec(),
        None => initial_guess(layout, &pg),
    };
    if !objective.value(&init).is_finite() {
        return Err(Error::InvalidParameter("initial point is infeasible".into()));
    }
    let transforms = layout.transforms(None);
    let m = optimizer.minimize(|z| objective.value(&to_params(&transforms, z)), &to_coords(&transforms, &init));
    let theta = to_params(&transforms, &m.x);
    let s = layout.split(&theta, false)?;
    let at_boundary = !curves_stable_on_grid(&s.ar, CHECK_GRID, BOUNDARY_RADIUS)
        || !curves_stable_on_grid(&s.ma, CHECK_GRID, BOUNDARY_RADIUS);
    Ok(BweFit {
        params: ParamVector::new(layout.names(None), theta)?,
        objective: m.f,
        converged: m.converged && !at_boundary,
        at_boundary,
        iterations: m.iterations,
        blocks: pg.midpoints.len(),
    })
}
