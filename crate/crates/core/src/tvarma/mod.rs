//! Time-varying ARMA processes with stable innovations.

mod invert;
mod model;
mod predict;
mod simulate;
mod weights;

pub use invert::{check_ma_regular, innovations_from_path, innovations_on_grid, invert_unchecked, MA_DECAY_TOL};
pub use model::{TvArmaModel, CHECK_GRID};
pub use predict::{predict, Forecast};
pub use simulate::{
    draw_innovations, innovations_needed, simulate, simulate_with_innovations, Filter, DEFAULT_BURN_IN,
};
pub use weights::{
    green_function, ma_weights, marginal_law, weighted_sum_law, MaWeights, DEFAULT_TRUNCATION,
    DEFAULT_WEIGHT_TOL, MARGINAL_TRUNCATION_TOL,
};
