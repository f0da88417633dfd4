use rand::Rng;

use super::TvArmaModel;
use crate::error::{Error, Result};
use crate::stable::{sample_n, StableParams};

pub const DEFAULT_BURN_IN: usize = 500;

/// Number of innovations consumed by a path of length `len` after `burn_in`
/// warm-up steps: times `-burn_in - q + 1 ..= len`.
pub fn innovations_needed(model: &TvArmaModel, len: usize, burn_in: usize) -> usize {
    burn_in + model.q() + len
}

pub fn draw_innovations<R: Rng + ?Sized>(innovation: &StableParams, n: usize, rng: &mut R) -> Vec<f64> {
    sample_n(innovation, n, rng)
}

/// Coefficient tables of a model on a fixed time grid, reusable across many
/// innovation streams.
///
/// Row `r` holds the coefficients at time `t = r` for `1 <= r <= len`; row 0
/// holds the values frozen at `u = 0`, used for every `t <= 0`.
#[derive(Debug, Clone)]
pub struct Filter {
    p: usize,
    q: usize,
    len: usize,
    burn_in: usize,
    ar: Vec<f64>,
    ma: Vec<f64>,
}

impl Filter {
    pub fn new(model: &TvArmaModel, len: usize, burn_in: usize) -> Self {
        let (p, q) = (model.p(), model.q());
        let n = len as f64;
        let mut ar = Vec::with_capacity((len + 1) * p);
        let mut ma = Vec::with_capacity((len + 1) * (q + 1));
        for r in 0..=len {
            let u = r as f64 / n;
            ar.extend(model.ar().iter().map(|c| c.eval(u)));
            for k in 0..=q {
                let b = if k == 0 { 1.0 } else { model.ma()[k - 1].eval(u) };
                let g = model.gamma().eval((r as f64 - k as f64) / n);
                ma.push(b * g);
            }
        }
        Self { p, q, len, burn_in, ar, ma }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn innovations_needed(&self) -> usize {
        self.burn_in + self.q + self.len
    }

    /// Runs the recursion over `eps` (times `-burn_in - q + 1 ..= len`) and
    /// writes `X_1..X_len` into `out`. `work` is scratch space.
    pub fn run_into(&self, eps: &[f64], work: &mut Vec<f64>, out: &mut Vec<f64>) -> Result<()> {
        let need = self.innovations_needed();
        if eps.len() != need {
            return Err(Error::InvalidParameter(format!(
                "expected {need} innovations, got {}",
                eps.len()
            )));
        }
        let (p, q) = (self.p, self.q);
        let steps = self.burn_in + self.len;
        work.clear();
        work.resize(steps, 0.0);
        for i in 0..steps {
            // time t = i + 1 - burn_in
            let t = i as i64 + 1 - self.burn_in as i64;
            let row = t.max(0) as usize;
            let ar = &self.ar[row * p..row * p + p];
            let ma = &self.ma[row * (q + 1)..(row + 1) * (q + 1)];
            // eps index of time t is i + q
            let mut acc = 0.0;
            for k in 0..=q {
                acc += ma[k] * eps[i + q - k];
            }
            for j in 1..=p.min(i) {
                acc -= ar[j - 1] * work[i - j];
            }
            work[i] = acc;
        }
        out.clear();
        out.extend_from_slice(&work[self.burn_in..]);
        if let Some(pos) = out.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                t: pos as i64 + 1,
                context: "simulated path diverged (explosive coefficient curve)".into(),
            });
        }
        Ok(())
    }

    pub fn run(&self, eps: &[f64]) -> Result<Vec<f64>> {
        let mut work = Vec::new();
        let mut out = Vec::new();
        self.run_into(eps, &mut work, &mut out)?;
        Ok(out)
    }
}

/// Simulates `X_1..X_len`. Innovations for times `-burn_in - q + 1 ..= len`
/// are drawn in time order; the warm-up runs with coefficients frozen at
/// `u = 0` from a zero pre-sample.
pub fn simulate<R: Rng + ?Sized>(
    model: &TvArmaModel,
    len: usize,
    burn_in: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if len == 0 {
        return Err(Error::InvalidParameter("series length must be positive".into()));
    }
    let eps = draw_innovations(model.innovation(), innovations_needed(model, len, burn_in), rng);
    Filter::new(model, len, burn_in).run(&eps)
}

/// Like [`simulate`] but with caller-supplied innovations; useful for
/// round-trip checks and common-random-number designs.
pub fn simulate_with_innovations(
    model: &TvArmaModel,
    len: usize,
    burn_in: usize,
    eps: &[f64],
) -> Result<Vec<f64>> {
    Filter::new(model, len, burn_in).run(eps)
}
