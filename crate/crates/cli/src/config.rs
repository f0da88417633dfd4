//! TOML run configuration.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use tvstable::analysis::{Method, Scenario};
use tvstable::curve::CoeffCurve;
use tvstable::params::{AlphaSpec, CurveLayout, ModelTemplate};
use tvstable::scenario::{preset, STUDY_LENGTHS};
use tvstable::tvarma::{TvArmaModel, DEFAULT_BURN_IN};

use crate::CliError;

pub const SCHEMA: &str = "tvstable/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema: String,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub model: Option<ModelConfig>,
    pub simulate: Option<SimulateConfig>,
    pub estimate: Option<EstimateConfig>,
    pub mc: Option<McConfig>,
    pub predict: Option<PredictConfig>,
    pub diagnose: Option<DiagnoseConfig>,
}

/// A fully specified stable tvARMA model. `ar[j]` and `ma[k]` list the
/// polynomial coefficients of the lag-(j+1) and lag-(k+1) curves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    #[serde(default)]
    pub ar: Vec<Vec<f64>>,
    #[serde(default)]
    pub ma: Vec<Vec<f64>>,
    pub gamma: Vec<f64>,
    pub alpha: f64,
    #[serde(default)]
    pub beta: f64,
}

impl ModelConfig {
    pub fn build(&self) -> Result<TvArmaModel, CliError> {
        let curve = |c: &Vec<f64>, what: &str| {
            if c.is_empty() {
                Err(CliError::Validation(format!("{what} curve needs at least one coefficient")))
            } else {
                Ok(CoeffCurve::new(c.clone()))
            }
        };
        let ar = self.ar.iter().map(|c| curve(c, "AR")).collect::<Result<_, _>>()?;
        let ma = self.ma.iter().map(|c| curve(c, "MA")).collect::<Result<_, _>>()?;
        let gamma = curve(&self.gamma, "scale")?;
        Ok(TvArmaModel::new(ar, ma, gamma, self.alpha, self.beta)?)
    }

    /// Curve degrees as given.
    pub fn layout(&self) -> CurveLayout {
        CurveLayout {
            ar_degrees: self.ar.iter().map(|c| c.len().saturating_sub(1)).collect(),
            ma_degrees: self.ma.iter().map(|c| c.len().saturating_sub(1)).collect(),
            gamma_degree: self.gamma.len().saturating_sub(1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub length: usize,
    #[serde(default = "default_burn_in")]
    pub burn_in: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    Indirect,
    Whittle,
    Auxiliary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateConfig {
    pub input: PathBuf,
    #[serde(default = "default_estimator")]
    pub method: Estimator,
    #[serde(default)]
    pub p: usize,
    #[serde(default)]
    pub q: usize,
    /// Polynomial degree of every AR/MA curve.
    #[serde(default = "one")]
    pub degree: usize,
    #[serde(default)]
    pub gamma_degree: usize,
    /// Known tail index; estimated when absent.
    pub alpha: Option<f64>,
    #[serde(default)]
    pub beta: f64,
    #[serde(default = "default_paths")]
    pub paths: usize,
    #[serde(default = "default_burn_in")]
    pub burn_in: usize,
    pub max_iter: Option<usize>,
    pub theta0: Option<Vec<f64>>,
    pub block_len: Option<usize>,
    pub shift: Option<usize>,
}

impl EstimateConfig {
    pub fn template(&self) -> Result<ModelTemplate, CliError> {
        let alpha = match self.alpha {
            Some(a) if !(a > 0.0 && a <= 2.0) => {
                return Err(CliError::Validation(format!("alpha = {a} outside (0, 2]")));
            }
            Some(a) => AlphaSpec::Known(a),
            None => AlphaSpec::Free,
        };
        if !(-1.0..=1.0).contains(&self.beta) {
            return Err(CliError::Validation(format!("beta = {} outside [-1, 1]", self.beta)));
        }
        if self.paths == 0 {
            return Err(CliError::Validation("paths must be at least 1".into()));
        }
        Ok(ModelTemplate {
            layout: CurveLayout::uniform(self.p, self.q, self.degree, self.gamma_degree),
            alpha,
            beta: self.beta,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McConfig {
    /// One of the preset designs; otherwise `[model]` gives the truth.
    pub preset: Option<String>,
    #[serde(default = "study_lengths")]
    pub lengths: Vec<usize>,
    #[serde(default)]
    pub full_scale: bool,
    pub replications: Option<usize>,
    pub paths: Option<usize>,
    pub burn_in: Option<usize>,
    /// Custom designs only: estimate the tail index.
    #[serde(default)]
    pub estimate_alpha: bool,
    pub methods: Option<Vec<Method>>,
}

impl McConfig {
    /// One scenario per sample size.
    pub fn scenarios(&self, model: Option<&ModelConfig>) -> Result<Vec<Scenario>, CliError> {
        if self.lengths.is_empty() {
            return Err(CliError::Validation("mc.lengths must not be empty".into()));
        }
        let mut out = Vec::new();
        for &len in &self.lengths {
            let mut s = match (&self.preset, model) {
                (Some(name), _) => preset(name, len, self.full_scale)?,
                (None, Some(m)) => custom(m, len, self)?,
                (None, None) => {
                    return Err(CliError::Validation("mc needs a preset or a [model] section".into()));
                }
            };
            if let Some(r) = self.replications {
                s.replications = r;
            }
            if let Some(p) = self.paths {
                s.paths = p;
            }
            if let Some(b) = self.burn_in {
                s.burn_in = b;
            }
            if let Some(m) = &self.methods {
                s.methods = m.clone();
            }
            s.validate()?;
            out.push(s);
        }
        Ok(out)
    }
}

fn custom(m: &ModelConfig, len: usize, cfg: &McConfig) -> Result<Scenario, CliError> {
    let model = m.build()?;
    let template = ModelTemplate {
        layout: m.layout(),
        alpha: if cfg.estimate_alpha { AlphaSpec::Free } else { AlphaSpec::Known(m.alpha) },
        beta: m.beta,
    };
    let truth = template.params_of(&model)?.values;
    let (replications, paths) = if cfg.full_scale {
        tvstable::scenario::FULL_SCALE
    } else {
        tvstable::scenario::REDUCED_SCALE
    };
    let methods = if cfg.estimate_alpha { vec![Method::Indirect] } else { vec![Method::Indirect, Method::Whittle] };
    Ok(Scenario { id: "custom".into(), template, truth, len, replications, paths, burn_in: DEFAULT_BURN_IN, methods })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredictConfig {
    pub input: PathBuf,
    pub horizon: usize,
}

/// How the stabilized p-p plot chooses its reference law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reference {
    /// Innovation law of `[model]`.
    Model,
    /// Stable law fitted to the residuals by the characteristic-function method.
    Fitted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnoseConfig {
    pub input: PathBuf,
    #[serde(default = "default_max_lag")]
    pub max_lag: usize,
    #[serde(default = "default_reference")]
    pub reference: Reference,
    /// Further fitted models scored by one-step error metrics.
    #[serde(default)]
    pub compare: Vec<NamedModel>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedModel {
    pub name: String,
    pub model: ModelConfig,
}

fn default_burn_in() -> usize {
    DEFAULT_BURN_IN
}
fn default_estimator() -> Estimator {
    Estimator::Indirect
}
fn one() -> usize {
    1
}
fn default_paths() -> usize {
    tvstable::scenario::REDUCED_SCALE.1
}
fn study_lengths() -> Vec<usize> {
    STUDY_LENGTHS.to_vec()
}
fn default_max_lag() -> usize {
    50
}
fn default_reference() -> Reference {
    Reference::Model
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Validation(format!("config: {e}")))?;
        if cfg.schema != SCHEMA {
            return Err(CliError::Validation(format!("unsupported schema {:?}; expected {SCHEMA:?}", cfg.schema)));
        }
        Ok(cfg)
    }

    pub fn model(&self) -> Result<&ModelConfig, CliError> {
        self.model.as_ref().ok_or_else(|| CliError::Validation("missing [model] section".into()))
    }
}

pub fn section<'a, T>(s: &'a Option<T>, name: &str) -> Result<&'a T, CliError> {
    s.as_ref().ok_or_else(|| CliError::Validation(format!("missing [{name}] section")))
}
