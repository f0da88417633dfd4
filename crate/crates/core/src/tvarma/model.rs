use serde::{Deserialize, Serialize};

use crate::curve::{curves_stable_on_grid, CoeffCurve};
use crate::error::{Error, Result};
use crate::stable::{StableParams, INNOVATION_SIGMA};

/// Number of nodes used for positivity and root checks on [0, 1].
pub const CHECK_GRID: usize = 201;

/// tvARMA(p, q) with stable innovations:
///
/// `sum_{j=0..p} a_j(t/T) X_{t-j} = sum_{k=0..q} b_k(t/T) gamma((t-k)/T) eps_{t-k}`
///
/// with `a_0 = b_0 = 1` and `eps ~ S_alpha(1/sqrt(2), beta, 0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TvArmaModel {
    ar: Vec<CoeffCurve>,
    ma: Vec<CoeffCurve>,
    gamma: CoeffCurve,
    innovation: StableParams,
}

impl TvArmaModel {
    pub fn new(
        ar: Vec<CoeffCurve>,
        ma: Vec<CoeffCurve>,
        gamma: CoeffCurve,
        alpha: f64,
        beta: f64,
    ) -> Result<Self> {
        let innovation = StableParams::innovation(alpha, beta)?;
        let min_gamma = gamma.min_on_unit(CHECK_GRID);
        if !(min_gamma > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "scale curve must be positive on [0, 1], minimum is {min_gamma}"
            )));
        }
        let all_finite = ar
            .iter()
            .chain(&ma)
            .chain(std::iter::once(&gamma))
            .all(|c| c.coeffs().iter().all(|v| v.is_finite()));
        if !all_finite {
            return Err(Error::InvalidParameter("curve coefficients must be finite".into()));
        }
        Ok(Self { ar, ma, gamma, innovation })
    }

    /// Same structure with a different innovation law. `sigma` and `mu`
    /// are fixed at `1/sqrt(2)` and 0.
    pub fn with_innovation(&self, innovation: StableParams) -> Result<Self> {
        if innovation.sigma != INNOVATION_SIGMA || innovation.mu != 0.0 {
            return Err(Error::InvalidParameter(
                "innovation law must have sigma = 1/sqrt(2) and mu = 0".into(),
            ));
        }
        Ok(Self { innovation, ..self.clone() })
    }

    pub fn p(&self) -> usize {
        self.ar.len()
    }

    pub fn q(&self) -> usize {
        self.ma.len()
    }

    pub fn ar(&self) -> &[CoeffCurve] {
        &self.ar
    }

    pub fn ma(&self) -> &[CoeffCurve] {
        &self.ma
    }

    pub fn gamma(&self) -> &CoeffCurve {
        &self.gamma
    }

    pub fn innovation(&self) -> &StableParams {
        &self.innovation
    }

    /// Local AR polynomials have their roots outside the unit circle on [0, 1].
    pub fn locally_stationary(&self) -> bool {
        curves_stable_on_grid(&self.ar, CHECK_GRID, 1.0)
    }

    /// Local MA polynomials have their roots outside the unit circle on [0, 1].
    pub fn locally_invertible(&self) -> bool {
        curves_stable_on_grid(&self.ma, CHECK_GRID, 1.0)
    }

    /// `a_j(u)` for `j = 1..=p`.
    pub fn ar_at(&self, u: f64) -> Vec<f64> {
        self.ar.iter().map(|c| c.eval(u)).collect()
    }

    /// `b_k(u)` for `k = 1..=q`.
    pub fn ma_at(&self, u: f64) -> Vec<f64> {
        self.ma.iter().map(|c| c.eval(u)).collect()
    }
}
