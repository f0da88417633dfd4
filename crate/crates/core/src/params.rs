//! Named parameter vectors, curve layouts and optimizer transforms.

use serde::{Deserialize, Serialize};

use crate::curve::CoeffCurve;
use crate::error::{Error, Result};
use crate::tvarma::TvArmaModel;

/// Parameter values with stable names, e.g. `ar1_0`, `ar1_1`, `alpha`, `gamma`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamVector {
    pub names: Vec<String>,
    pub values: Vec<f64>,
}

impl ParamVector {
    pub fn new(names: Vec<String>, values: Vec<f64>) -> Result<Self> {
        if names.len() != values.len() {
            return Err(Error::InvalidParameter(format!(
                "{} names for {} values",
                names.len(),
                values.len()
            )));
        }
        Ok(Self { names, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.names.iter().position(|n| n == name).map(|i| self.values[i])
    }
}

/// Map between an unconstrained optimizer coordinate `z` and a parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Transform {
    Identity,
    /// `x = exp(z)`.
    Log,
    /// `x = lo + (hi - lo) / (1 + exp(-z))`.
    Bounded { lo: f64, hi: f64 },
}

impl Transform {
    pub fn to_param(self, z: f64) -> f64 {
        match self {
            Transform::Identity => z,
            Transform::Log => z.exp(),
            Transform::Bounded { lo, hi } => lo + (hi - lo) / (1.0 + (-z).exp()),
        }
    }

    /// Inverse map; values on or outside a bound are pulled slightly inside.
    pub fn to_coord(self, x: f64) -> f64 {
        match self {
            Transform::Identity => x,
            Transform::Log => x.max(1e-300).ln(),
            Transform::Bounded { lo, hi } => {
                let eps = 1e-9 * (hi - lo);
                let p = ((x - lo) / (hi - lo)).clamp(eps, 1.0 - eps);
                (p / (1.0 - p)).ln()
            }
        }
    }
}

pub fn to_params(transforms: &[Transform], z: &[f64]) -> Vec<f64> {
    transforms.iter().zip(z).map(|(t, &v)| t.to_param(v)).collect()
}

pub fn to_coords(transforms: &[Transform], x: &[f64]) -> Vec<f64> {
    transforms.iter().zip(x).map(|(t, &v)| t.to_coord(v)).collect()
}

/// Polynomial degrees of the AR, MA and scale curves of a tvARMA skeleton.
///
/// Parameters are laid out as AR curve coefficients (lag-major), MA curve
/// coefficients, an optional extra scalar (`alpha` or `nu`), then the scale
/// curve coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveLayout {
    pub ar_degrees: Vec<usize>,
    pub ma_degrees: Vec<usize>,
    pub gamma_degree: usize,
}

/// A parameter vector split back into curves.
#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub ar: Vec<CoeffCurve>,
    pub ma: Vec<CoeffCurve>,
    pub extra: Option<f64>,
    pub gamma: CoeffCurve,
}

impl CurveLayout {
    /// Every curve of the same degree.
    pub fn uniform(p: usize, q: usize, degree: usize, gamma_degree: usize) -> Self {
        Self { ar_degrees: vec![degree; p], ma_degrees: vec![degree; q], gamma_degree }
    }

    pub fn p(&self) -> usize {
        self.ar_degrees.len()
    }

    pub fn q(&self) -> usize {
        self.ma_degrees.len()
    }

    pub fn n_curve(&self) -> usize {
        self.ar_degrees.iter().chain(&self.ma_degrees).map(|d| d + 1).sum()
    }

    pub fn n_gamma(&self) -> usize {
        self.gamma_degree + 1
    }

    pub fn n_params(&self, extra: bool) -> usize {
        self.n_curve() + extra as usize + self.n_gamma()
    }

    pub fn names(&self, extra: Option<&str>) -> Vec<String> {
        let mut names = Vec::new();
        for (j, d) in self.ar_degrees.iter().enumerate() {
            names.extend((0..=*d).map(|i| format!("ar{}_{i}", j + 1)));
        }
        for (k, d) in self.ma_degrees.iter().enumerate() {
            names.extend((0..=*d).map(|i| format!("ma{}_{i}", k + 1)));
        }
        if let Some(e) = extra {
            names.push(e.to_string());
        }
        if self.gamma_degree == 0 {
            names.push("gamma".into());
        } else {
            names.extend((0..=self.gamma_degree).map(|i| format!("gamma_{i}")));
        }
        names
    }

    pub fn split(&self, values: &[f64], extra: bool) -> Result<Split> {
        let need = self.n_params(extra);
        if values.len() != need {
            return Err(Error::InvalidParameter(format!("expected {need} parameters, got {}", values.len())));
        }
        let mut pos = 0;
        let mut take = |d: usize| {
            let c = CoeffCurve::new(values[pos..pos + d + 1].to_vec());
            pos += d + 1;
            c
        };
        let ar = self.ar_degrees.iter().map(|&d| take(d)).collect();
        let ma = self.ma_degrees.iter().map(|&d| take(d)).collect();
        let ex = if extra {
            let v = values[pos];
            pos += 1;
            Some(v)
        } else {
            None
        };
        let gamma = CoeffCurve::new(values[pos..].to_vec());
        Ok(Split { ar, ma, extra: ex, gamma })
    }

    /// Identity on curve coefficients; log on a constant scale, identity on
    /// a varying one. `extra` is inserted at its slot.
    pub fn transforms(&self, extra: Option<Transform>) -> Vec<Transform> {
        let mut t = vec![Transform::Identity; self.n_curve()];
        t.extend(extra);
        if self.gamma_degree == 0 {
            t.push(Transform::Log);
        } else {
            t.extend(std::iter::repeat_n(Transform::Identity, self.n_gamma()));
        }
        t
    }

    /// Curve and scale coefficients of `model` in layout order (no extra
    /// slot), zero-padding curves of lower degree.
    pub fn flatten(&self, model: &TvArmaModel) -> Result<Vec<f64>> {
        let mut out = Vec::new();
        let fit = |curves: &[CoeffCurve], degrees: &[usize], out: &mut Vec<f64>| -> Result<()> {
            if curves.len() != degrees.len() {
                return Err(Error::InvalidParameter("model orders do not match the layout".into()));
            }
            for (c, &d) in curves.iter().zip(degrees) {
                push_padded(c, d, out)?;
            }
            Ok(())
        };
        fit(model.ar(), &self.ar_degrees, &mut out)?;
        fit(model.ma(), &self.ma_degrees, &mut out)?;
        push_padded(model.gamma(), self.gamma_degree, &mut out)?;
        Ok(out)
    }
}

fn push_padded(c: &CoeffCurve, degree: usize, out: &mut Vec<f64>) -> Result<()> {
    let coeffs = c.coeffs();
    if coeffs.len() > degree + 1 && coeffs[degree + 1..].iter().any(|&v| v != 0.0) {
        return Err(Error::InvalidParameter(format!("curve of degree {} exceeds layout degree {degree}", c.degree())));
    }
    out.extend((0..=degree).map(|i| coeffs.get(i).copied().unwrap_or(0.0)));
    Ok(())
}

/// Stable tail index of the model of interest: fixed or estimated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphaSpec {
    Known(f64),
    Free,
}

/// Lower and upper bounds of a free stable index.
pub const ALPHA_RANGE: (f64, f64) = (0.2, 2.0);

/// Parametric stable tvARMA family: curve layout, tail index (known or free)
/// and a known skewness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelTemplate {
    pub layout: CurveLayout,
    pub alpha: AlphaSpec,
    pub beta: f64,
}

impl ModelTemplate {
    pub fn alpha_free(&self) -> bool {
        matches!(self.alpha, AlphaSpec::Free)
    }

    pub fn names(&self) -> Vec<String> {
        self.layout.names(self.alpha_free().then_some("alpha"))
    }

    pub fn n_params(&self) -> usize {
        self.layout.n_params(self.alpha_free())
    }

    pub fn transforms(&self) -> Vec<Transform> {
        let (lo, hi) = ALPHA_RANGE;
        self.layout.transforms(self.alpha_free().then_some(Transform::Bounded { lo, hi }))
    }

    /// Builds the model at `values` (validated by [`TvArmaModel::new`]).
    pub fn build(&self, values: &[f64]) -> Result<TvArmaModel> {
        let s = self.layout.split(values, self.alpha_free())?;
        let alpha = match self.alpha {
            AlphaSpec::Known(a) => a,
            AlphaSpec::Free => s.extra.expect("free alpha slot"),
        };
        TvArmaModel::new(s.ar, s.ma, s.gamma, alpha, self.beta)
    }

    /// Parameter vector of a model with this structure.
    pub fn params_of(&self, model: &TvArmaModel) -> Result<ParamVector> {
        let flat = self.layout.flatten(model)?;
        let n_curve = self.layout.n_curve();
        let mut values = flat[..n_curve].to_vec();
        if self.alpha_free() {
            values.push(model.innovation().alpha);
        }
        values.extend_from_slice(&flat[n_curve..]);
        ParamVector::new(self.names(), values)
    }
}
