//! Upper Minkowski dimension of sampled graphs and rational-time checks.
//!
//! [`box_count`] counts `ε × ε` cells met by a polyline graph column by
//! column. [`fit_dimension`] fits `log N(E, ε)` against `log(1/ε)`.
//! [`talbot_snapshot`] evaluates the free flow at rational multiples of
//! `2π` in exact modular arithmetic. [`dimension_of_solution`] applies the
//! estimator to a gauged solution and to its Duhamel part.

pub mod boxcount;
pub mod calibration;
pub mod error;
pub mod estimate;
pub mod solution;
pub mod talbot;

pub use boxcount::{box_count, GraphSamples, MIN_SAMPLES, RESOLUTION_GUARD};
pub use calibration::{square_wave, step_data, weierstrass, weierstrass_dimension, weierstrass_holder};
pub use error::DimensionError;
pub use estimate::{dyadic_ladder, estimate_dimension, fit_dimension, DimensionEstimate, MIN_LADDER, TRIMMED};
pub use solution::{
    dimension_band, dimension_of_solution, field_dimension, field_graphs, gauged_state_at, DimensionBand,
    PartDimensions, SolutionDimension,
};
pub use talbot::{rational_translate, talbot_check, talbot_snapshot, TalbotCheck, TALBOT_MODULUS};
