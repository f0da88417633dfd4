//! Monte Carlo harness and residual diagnostics.

mod diagnostics;
mod mc;
mod stats;

pub use diagnostics::{
    error_metrics, fit_errors, one_step_errors, residual_moments, stabilized_pp, stabilized_pp_with, variogram,
    FitErrors, PpPlot, ResidualMoments, MIN_MOMENT_SAMPLE,
};
pub use mc::{
    aggregate, format_shape_table, format_table, run_mc, EstimateRow, McResult, Method, MethodAggregate, Replication,
    Scenario,
};
pub use stats::{central_moments, jarque_bera, ks_critical_1pct, ks_two_sample, Summary};
