//! Subcommand implementations.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::json;
use tvstable::analysis::{
    fit_errors, format_shape_table, format_table, residual_moments, run_mc, stabilized_pp, variogram, FitErrors,
};
use tvstable::auxfit::{self, AuxModelSpec, NuMode};
use tvstable::indirect::{self, IndirectConfig};
use tvstable::optim::TracePoint;
use tvstable::params::{AlphaSpec, ModelTemplate};
use tvstable::rng::{derive_seed, rng_from_seed};
use tvstable::stable::ecf_estimate;
use tvstable::tvarma::{innovations_from_path, predict as forecast, simulate as simulate_path};
use tvstable::whittle::{self, BlockPeriodograms, BweConfig};

use crate::config::{section, Estimator, Reference, RunConfig};
use crate::output::{read_series, series_csv, OutputDir};
use crate::{CliError, CommonArgs};

struct Loaded {
    cfg: RunConfig,
    raw: Vec<u8>,
    seed: u64,
    out: PathBuf,
    base: PathBuf,
    verbose: u8,
}

impl Loaded {
    fn new(a: &CommonArgs) -> Result<Self, CliError> {
        let raw = fs::read(&a.config).map_err(|e| CliError::io(&a.config, e))?;
        let text = std::str::from_utf8(&raw).map_err(|_| CliError::Validation("config is not UTF-8".into()))?;
        let cfg = RunConfig::parse(text)?;
        let base = a.config.parent().map(Path::to_path_buf).unwrap_or_default();
        let out = match (&a.out, &cfg.output) {
            (Some(o), _) => o.clone(),
            (None, Some(o)) => base.join(o),
            (None, None) => return Err(CliError::Validation("no output directory (use --out or `output`)".into())),
        };
        let seed = a.seed.unwrap_or(cfg.seed);
        Ok(Self { cfg, raw, seed, out, base, verbose: a.verbose })
    }

    /// Input paths are relative to the configuration file.
    fn input(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base.join(p)
        }
    }

    fn log(&self, msg: impl AsRef<str>) {
        if self.verbose > 0 {
            eprintln!("{}", msg.as_ref());
        }
    }
}

fn trace_csv(trace: &[TracePoint], names: &[String], out: &mut Vec<u8>) -> std::io::Result<()> {
    write!(out, "iteration,objective")?;
    for n in names {
        write!(out, ",{n}")?;
    }
    writeln!(out)?;
    for p in trace {
        write!(out, "{},{}", p.iteration, p.f)?;
        for v in &p.x {
            write!(out, ",{v}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

pub fn simulate(a: &CommonArgs) -> Result<(), CliError> {
    let l = Loaded::new(a)?;
    let model_cfg = l.cfg.model()?;
    let sim = section(&l.cfg.simulate, "simulate")?;
    if sim.length == 0 {
        return Err(CliError::Validation("simulate.length must be positive".into()));
    }
    let model = model_cfg.build()?;
    l.log(format!("simulating {} observations", sim.length));
    let x = simulate_path(&model, sim.length, sim.burn_in, &mut rng_from_seed(l.seed))?;
    let mut out = OutputDir::create(&l.out)?;
    out.write("series.csv", &series_csv(&x))?;
    let details = json!({ "model": model_cfg, "length": sim.length, "burn_in": sim.burn_in });
    out.finish("simulate", l.seed, &l.raw, details)
}

pub fn estimate(a: &CommonArgs) -> Result<(), CliError> {
    let l = Loaded::new(a)?;
    let e = section(&l.cfg.estimate, "estimate")?;
    let template = e.template()?;
    let x = read_series(&l.input(&e.input))?;
    let mut out = OutputDir::create(&l.out)?;
    // residual inversion does not depend on the tail index
    let residual_template = ModelTemplate { alpha: AlphaSpec::Known(2.0), beta: 0.0, ..template.clone() };
    let (converged, curves_and_scale) = match e.method {
        Estimator::Indirect => {
            let aux = AuxModelSpec::mirror(&template);
            let mut icfg = IndirectConfig::new(e.paths, l.seed);
            icfg.burn_in = e.burn_in;
            if let Some(m) = e.max_iter {
                icfg.optimizer.max_iter = m;
            }
            l.log(format!("indirect inference on {} observations, {} parameters", x.len(), template.n_params()));
            let mut res = if template.alpha_free() {
                indirect::estimate_unknown_alpha(&x, &icfg, &template, &aux, e.theta0.as_deref())?
            } else {
                indirect::estimate(&x, &icfg, &template, &aux, e.theta0.as_deref())?
            };
            res.wall_time = None;
            let trace = std::mem::take(&mut res.trace);
            out.write_with("trace.csv", |buf| trace_csv(&trace, &res.theta.names, buf))?;
            out.write_json("result.json", &res)?;
            (res.converged, drop_slot(&res.theta.values, &template))
        }
        Estimator::Whittle => {
            let mut bcfg = BweConfig::for_len(x.len());
            if let Some(n) = e.block_len {
                bcfg.block_len = n;
            }
            if let Some(s) = e.shift {
                bcfg.shift = s;
            }
            let mut opt = whittle::default_optimizer();
            if let Some(m) = e.max_iter {
                opt.max_iter = m;
            }
            let fit = whittle::bwe_fit(&x, &template.layout, &bcfg, e.theta0.as_deref(), &opt)?;
            let pg = BlockPeriodograms::new(&x, &bcfg)?;
            out.write_with("periodogram.csv", |buf| pg.write_csv(buf))?;
            out.write_json("result.json", &fit)?;
            (fit.converged, fit.params.values)
        }
        Estimator::Auxiliary => {
            let nu = if e.alpha.is_some() { NuMode::Fixed(auxfit::FIXED_NU) } else { NuMode::Free };
            let spec = AuxModelSpec { layout: template.layout.clone(), nu };
            let mut fit = auxfit::fit_data(&spec, &[&x])?;
            let trace = std::mem::take(&mut fit.trace);
            out.write_with("trace.csv", |buf| trace_csv(&trace, &fit.params.names, buf))?;
            out.write_json("result.json", &fit)?;
            let mut values = fit.params.values.clone();
            if spec.nu_free() {
                values.remove(template.layout.n_curve());
            }
            (fit.converged, values)
        }
    };
    let fitted = residual_template.build(&curves_and_scale)?;
    match innovations_from_path(&fitted, &x) {
        Ok(res) => out.write("residuals.csv", &series_csv(&res))?,
        Err(err) => l.log(format!("no residuals: {err}")),
    }
    let details = json!({ "method": e.method, "parameters": template.names(), "observations": x.len() });
    out.finish("estimate", l.seed, &l.raw, details)?;
    if converged {
        Ok(())
    } else {
        Err(CliError::Flagged("result written with converged = false".into()))
    }
}

/// Curve and scale coefficients of a model-of-interest vector.
fn drop_slot(theta: &[f64], template: &ModelTemplate) -> Vec<f64> {
    let mut v = theta.to_vec();
    if template.alpha_free() {
        v.remove(template.layout.n_curve());
    }
    v
}

pub fn mc(a: &CommonArgs, jobs: usize) -> Result<(), CliError> {
    let l = Loaded::new(a)?;
    let m = section(&l.cfg.mc, "mc")?;
    let scenarios = m.scenarios(l.cfg.model.as_ref())?;
    let mut out = OutputDir::create(&l.out)?;
    let mut results = Vec::new();
    for s in &scenarios {
        l.log(format!("{}: T = {}, R = {}, S = {}", s.id, s.len, s.replications, s.paths));
        let res = run_mc(s, derive_seed(l.seed, &[s.len as u64]), jobs)?;
        for method in ["indirect", "auxiliary", "whittle"] {
            if res.aggregate(method).is_some() {
                out.write_with(&format!("rows_{method}_T{}.csv", s.len), |buf| res.write_rows_csv(method, buf))?;
            }
        }
        out.write_json(&format!("result_T{}.json", s.len), &res)?;
        results.push(res);
    }
    let unknown_alpha = scenarios[0].template.alpha_free();
    out.write("table.txt", format_table(&results, unknown_alpha).as_bytes())?;
    out.write("shape_table.txt", format_shape_table(&results, unknown_alpha).as_bytes())?;
    let details = json!({ "scenarios": scenarios });
    out.finish("mc", l.seed, &l.raw, details)
}

pub fn predict(a: &CommonArgs) -> Result<(), CliError> {
    let l = Loaded::new(a)?;
    let model_cfg = l.cfg.model()?;
    let p = section(&l.cfg.predict, "predict")?;
    if p.horizon == 0 {
        return Err(CliError::Validation("predict.horizon must be at least 1".into()));
    }
    let model = model_cfg.build()?;
    let x = read_series(&l.input(&p.input))?;
    let f = forecast(&model, &x, p.horizon)?;
    let mut out = OutputDir::create(&l.out)?;
    out.write_with("forecast.csv", |buf| {
        writeln!(buf, "horizon,forecast,dispersion")?;
        for (h, (v, d)) in f.point.iter().zip(&f.dispersion).enumerate() {
            writeln!(buf, "{},{v},{d}", h + 1)?;
        }
        Ok(())
    })?;
    let details = json!({ "model": model_cfg, "horizon": p.horizon, "observations": x.len() });
    out.finish("predict", l.seed, &l.raw, details)
}

pub fn diagnose(a: &CommonArgs) -> Result<(), CliError> {
    let l = Loaded::new(a)?;
    let model_cfg = l.cfg.model()?;
    let d = section(&l.cfg.diagnose, "diagnose")?;
    let model = model_cfg.build()?;
    let x = read_series(&l.input(&d.input))?;
    let e = innovations_from_path(&model, &x)?;
    let moments = residual_moments(&e)?;
    let law = match d.reference {
        Reference::Model => *model.innovation(),
        Reference::Fitted => ecf_estimate(&e)?,
    };
    let pp = stabilized_pp(&e, &law)?;
    let diff: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let v_diff = variogram(&diff, d.max_lag)?;
    let v_res = variogram(&e, d.max_lag)?;

    let mut scored: Vec<(String, FitErrors)> = vec![("model".into(), fit_errors(&model, &x)?)];
    for c in &d.compare {
        scored.push((c.name.clone(), fit_errors(&c.model.build()?, &x)?));
    }

    let mut out = OutputDir::create(&l.out)?;
    out.write("residuals.csv", &series_csv(&e))?;
    out.write_with("pp.csv", |buf| pp.write_csv(buf))?;
    out.write_with("variogram.csv", |buf| {
        writeln!(buf, "lag,differenced,residuals")?;
        for (h, (a, b)) in v_diff.iter().zip(&v_res).enumerate() {
            writeln!(buf, "{},{a},{b}", h + 1)?;
        }
        Ok(())
    })?;
    out.write_with("fit_errors.csv", |buf| {
        writeln!(buf, "model,mse,rmse,mae")?;
        for (name, m) in &scored {
            writeln!(buf, "{name},{},{},{}", m.mse, m.rmse, m.mae)?;
        }
        Ok(())
    })?;
    out.write_json(
        "diagnostics.json",
        &json!({ "moments": moments, "reference": law, "pp_max_deviation": pp.max_deviation }),
    )?;
    out.finish("diagnose", l.seed, &l.raw, json!({ "model": model_cfg, "observations": x.len() }))
}
