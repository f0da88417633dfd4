//! Monte Carlo replication harness.

use std::fmt::Write as _;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::Summary;
use crate::auxfit::AuxModelSpec;
use crate::error::{Error, Result};
use crate::indirect::{self, IndirectConfig};
use crate::params::{ModelTemplate, ParamVector};
use crate::rng::{derive_seed, rng_from_seed};
use crate::tvarma::simulate;
use crate::whittle::{self, BweConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Indirect,
    Whittle,
}

/// One Monte Carlo design: a true model, sample size and estimators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub id: String,
    pub template: ModelTemplate,
    /// True parameters in the template's layout.
    pub truth: Vec<f64>,
    pub len: usize,
    pub replications: usize,
    pub paths: usize,
    pub burn_in: usize,
    pub methods: Vec<Method>,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::InvalidParameter("replications must be at least 1".into()));
        }
        if self.len == 0 {
            return Err(Error::InvalidParameter("series length must be positive".into()));
        }
        if self.methods.contains(&Method::Indirect) && self.paths == 0 {
            return Err(Error::InvalidParameter("indirect estimation needs at least one path".into()));
        }
        if self.methods.contains(&Method::Whittle) {
            BweConfig::for_len(self.len).validate(self.len)?;
        }
        self.template.build(&self.truth)?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateRow {
    pub values: Vec<f64>,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Replication {
    pub index: usize,
    pub data_seed: u64,
    pub indirect: Option<EstimateRow>,
    /// Auxiliary fit on the observed series (step one of the indirect run).
    pub auxiliary: Option<EstimateRow>,
    pub whittle: Option<EstimateRow>,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodAggregate {
    pub method: String,
    pub names: Vec<String>,
    pub summaries: Vec<Summary>,
    /// Rows entering the summaries.
    pub included: usize,
    pub non_converged: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McResult {
    pub scenario: String,
    pub len: usize,
    pub replications: usize,
    pub paths: usize,
    pub master_seed: u64,
    pub truth: ParamVector,
    pub rows: Vec<Replication>,
    pub aggregates: Vec<MethodAggregate>,
}

/// Runs every replication (in parallel on up to `jobs` threads; 0 uses all
/// cores) and aggregates. Replication `r` draws its data from seed
/// `derive_seed(master, [r, 0])` and its frozen simulation streams from
/// `derive_seed(master, [r, 1])`, so results do not depend on `jobs`.
pub fn run_mc(scenario: &Scenario, master_seed: u64, jobs: usize) -> Result<McResult> {
    scenario.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    let rows: Vec<Replication> = pool.install(|| {
        (0..scenario.replications)
            .into_par_iter()
            .map(|r| replicate(scenario, master_seed, r))
            .collect()
    });
    let truth = ParamVector::new(scenario.template.names(), scenario.truth.clone())?;
    let aggregates = aggregate(scenario, &rows);
    Ok(McResult {
        scenario: scenario.id.clone(),
        len: scenario.len,
        replications: scenario.replications,
        paths: scenario.paths,
        master_seed,
        truth,
        rows,
        aggregates,
    })
}

fn replicate(scenario: &Scenario, master: u64, r: usize) -> Replication {
    let data_seed = derive_seed(master, &[r as u64, 0]);
    let mut rep = Replication { index: r, data_seed, indirect: None, auxiliary: None, whittle: None, failures: vec![] };
    let model = scenario.template.build(&scenario.truth).expect("validated scenario");
    let x = match simulate(&model, scenario.len, scenario.burn_in, &mut rng_from_seed(data_seed)) {
        Ok(x) => x,
        Err(e) => {
            rep.failures.push(format!("simulate: {e}"));
            return rep;
        }
    };
    for method in &scenario.methods {
        match method {
            Method::Indirect => {
                let mut cfg = IndirectConfig::new(scenario.paths, derive_seed(master, &[r as u64, 1]));
                cfg.burn_in = scenario.burn_in;
                let aux = AuxModelSpec::mirror(&scenario.template);
                let res = if scenario.template.alpha_free() {
                    indirect::estimate_unknown_alpha(&x, &cfg, &scenario.template, &aux, None)
                } else {
                    indirect::estimate(&x, &cfg, &scenario.template, &aux, None)
                };
                match res {
                    Ok(res) => {
                        rep.indirect = Some(EstimateRow { values: res.theta.values, converged: res.converged });
                        rep.auxiliary = Some(EstimateRow { values: res.lambda.values, converged: res.aux_converged });
                    }
                    Err(e) => rep.failures.push(format!("indirect: {e}")),
                }
            }
            Method::Whittle => {
                let cfg = BweConfig::for_len(scenario.len);
                let opt = whittle::default_optimizer();
                match whittle::bwe_fit(&x, &scenario.template.layout, &cfg, None, &opt) {
                    Ok(fit) => rep.whittle = Some(EstimateRow { values: fit.params.values, converged: fit.converged }),
                    Err(e) => rep.failures.push(format!("whittle: {e}")),
                }
            }
        }
    }
    rep
}

type RowPick = fn(&Replication) -> &Option<EstimateRow>;

/// Per-method summaries. Whittle rows enter only when converged; indirect
/// and auxiliary rows enter whenever the estimator returned.
pub fn aggregate(scenario: &Scenario, rows: &[Replication]) -> Vec<MethodAggregate> {
    let mut out = Vec::new();
    let template = &scenario.template;
    let blocks: [(&str, Vec<String>, RowPick, bool); 3] = [
        ("indirect", template.names(), |r| &r.indirect, false),
        ("auxiliary", AuxModelSpec::mirror(template).names(), |r| &r.auxiliary, false),
        ("whittle", template.layout.names(None), |r| &r.whittle, true),
    ];
    for (method, names, get, converged_only) in blocks {
        let wanted = match method {
            "whittle" => scenario.methods.contains(&Method::Whittle),
            _ => scenario.methods.contains(&Method::Indirect),
        };
        if !wanted {
            continue;
        }
        let present: Vec<&EstimateRow> = rows.iter().filter_map(|r| get(r).as_ref()).collect();
        let failed = rows.len() - present.len();
        let non_converged = present.iter().filter(|e| !e.converged).count();
        let used: Vec<&EstimateRow> = present.into_iter().filter(|e| e.converged || !converged_only).collect();
        let summaries = (0..names.len())
            .map(|j| Summary::of(&used.iter().map(|e| e.values[j]).collect::<Vec<_>>()))
            .collect();
        out.push(MethodAggregate {
            method: method.to_string(),
            names,
            summaries,
            included: used.len(),
            non_converged,
            failed,
        });
    }
    out
}

impl McResult {
    pub fn aggregate(&self, method: &str) -> Option<&MethodAggregate> {
        self.aggregates.iter().find(|a| a.method == method)
    }

    /// Raw rows of one method: `replication,converged,<names>`.
    pub fn write_rows_csv<W: Write>(&self, method: &str, mut out: W) -> std::io::Result<()> {
        let Some(agg) = self.aggregate(method) else {
            return Ok(());
        };
        write!(out, "replication,converged")?;
        for n in &agg.names {
            write!(out, ",{n}")?;
        }
        writeln!(out)?;
        for r in &self.rows {
            let row = match method {
                "indirect" => &r.indirect,
                "auxiliary" => &r.auxiliary,
                _ => &r.whittle,
            };
            if let Some(row) = row {
                write!(out, "{},{}", r.index + 1, row.converged)?;
                for v in &row.values {
                    write!(out, ",{v}")?;
                }
                writeln!(out)?;
            }
        }
        Ok(())
    }
}

fn blocks_for(result: &McResult, unknown_alpha: bool) -> Vec<&MethodAggregate> {
    let order: &[&str] = if unknown_alpha { &["indirect", "auxiliary"] } else { &["indirect", "whittle"] };
    order.iter().filter_map(|m| result.aggregate(m)).collect()
}

fn label(method: &str) -> &str {
    match method {
        "indirect" => "IM",
        "auxiliary" => "AM",
        _ => "BWE",
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.4}")).unwrap_or_else(|| "-".into())
}

/// Table of means with replication SDs in parentheses, one pair of lines
/// per sample size. Known-tail scenarios show the indirect and Whittle
/// blocks; unknown-tail scenarios show the model of interest next to the
/// auxiliary model.
pub fn format_table(results: &[McResult], unknown_alpha: bool) -> String {
    format_with(results, unknown_alpha, |s| (format!("{:.4}", s.mean), format!("({})", fmt_opt(s.se))))
}

/// Kurtosis and skewness in the same layout.
pub fn format_shape_table(results: &[McResult], unknown_alpha: bool) -> String {
    format_with(results, unknown_alpha, |s| (fmt_opt(s.kurtosis), fmt_opt(s.skewness)))
}

fn format_with<F: Fn(&Summary) -> (String, String)>(results: &[McResult], unknown_alpha: bool, cell: F) -> String {
    let mut header = vec!["T".to_string()];
    if let Some(first) = results.first() {
        for b in blocks_for(first, unknown_alpha) {
            header.extend(b.names.iter().map(|n| format!("{}:{n}", label(&b.method))));
        }
    }
    let mut lines = vec![header];
    for res in results {
        let mut top = vec![res.len.to_string()];
        let mut bottom = vec![String::new()];
        for b in blocks_for(res, unknown_alpha) {
            for s in &b.summaries {
                let (a, c) = cell(s);
                top.push(a);
                bottom.push(c);
            }
        }
        lines.push(top);
        lines.push(bottom);
    }
    let cols = lines.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> =
        (0..cols).map(|j| lines.iter().filter_map(|l| l.get(j)).map(String::len).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for l in &lines {
        let cells: Vec<String> = l
            .iter()
            .enumerate()
            .map(|(j, c)| if j == 0 { format!("{c:<w$}", w = widths[j]) } else { format!("{c:>w$}", w = widths[j]) })
            .collect();
        let _ = writeln!(out, "{}", cells.join("  ").trim_end());
    }
    out
}
