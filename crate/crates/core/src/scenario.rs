//! Preset Monte Carlo designs of the simulation study.

use crate::analysis::{Method, Scenario};
use crate::error::{Error, Result};
use crate::params::{AlphaSpec, CurveLayout, ModelTemplate};
use crate::tvarma::DEFAULT_BURN_IN;

/// Desk-scale replications and simulated paths.
pub const REDUCED_SCALE: (usize, usize) = (200, 50);
/// Replications and simulated paths of the original study.
pub const FULL_SCALE: (usize, usize) = (1000, 100);
/// Sample sizes of the original study.
pub const STUDY_LENGTHS: [usize; 3] = [500, 1000, 1500];

pub const PRESETS: [&str; 10] =
    ["table1", "table2", "table3", "table4", "table5", "table6", "table7", "table8", "table9", "table10"];

/// Known-tail presets (table1..table6) compare indirect and Whittle
/// estimates; unknown-tail presets (table7..table10) run indirect inference
/// with a free tail index. Even-numbered tables up to 6 and table10 report
/// the shape statistics of the preceding design and share its scenario.
pub fn preset(name: &str, len: usize, full_scale: bool) -> Result<Scenario> {
    let (replications, paths) = if full_scale { FULL_SCALE } else { REDUCED_SCALE };
    let known = |p, q, alpha, beta| ModelTemplate {
        layout: CurveLayout::uniform(p, q, 1, 0),
        alpha: AlphaSpec::Known(alpha),
        beta,
    };
    let free = |p, q, gamma_degree, beta| ModelTemplate {
        layout: CurveLayout::uniform(p, q, 1, gamma_degree),
        alpha: AlphaSpec::Free,
        beta,
    };
    let both = vec![Method::Indirect, Method::Whittle];
    let im = vec![Method::Indirect];
    let (id, template, truth, methods) = match name {
        "table1" | "table2" => ("table1", known(1, 0, 1.9, 0.9), vec![-0.3, 0.8, 1.0], both),
        "table3" | "table4" => ("table3", known(0, 1, 1.1, -0.2), vec![0.35, -0.6, 1.2], both),
        "table5" | "table6" => ("table5", known(1, 1, 1.8, 0.3), vec![-0.4, 0.1, 0.1, 0.3, 1.0], both),
        "table7" => ("table7", free(1, 0, 1, 0.0), vec![0.35, -0.6, 1.4, 0.5, 0.1], im),
        "table8" => ("table8", free(0, 1, 0, 0.2), vec![-0.35, 0.4, 1.75, 0.7], im),
        "table9" | "table10" => ("table9", free(1, 1, 0, 0.0), vec![-0.2, -0.4, 0.2, 0.3, 1.3, 1.1], im),
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown preset {other:?}; expected one of {}",
                PRESETS.join(", ")
            )))
        }
    };
    Ok(Scenario {
        id: id.into(),
        template,
        truth,
        len,
        replications,
        paths,
        burn_in: DEFAULT_BURN_IN,
        methods,
    })
}
