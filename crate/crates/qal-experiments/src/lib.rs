//! Measurable consequences of the smoothing and Strichartz estimates.
//!
//! [`smoothing_report`] measures how much smoother the gauged Duhamel
//! difference `ũ − W_tu₀` is than the data. [`strichartz_probe`] measures
//! the ratio `‖W_t f‖_{L⁸_{x,t}}/‖f‖_{H^{a+}}` along a ladder of
//! truncations.

pub mod error;
pub mod fit;
pub mod smoothing;
pub mod strichartz;

pub use error::ExperimentError;
pub use fit::{default_window, fit_tail, least_squares, TailFit};
pub use smoothing::{
    duhamel_difference, epsilon_ceiling, smoothing_report, smoothing_report_with_progress, AmplitudeScaling,
    LadderPoint, SeedSmoothing, SmoothingConfig, SmoothingFlag, SmoothingReport, TailSample, TimeSample,
    DEFAULT_RESIDUAL_THRESHOLD, STRICHARTZ_LOSS, WELL_POSEDNESS_THRESHOLD,
};
pub use strichartz::{
    dirichlet_kernel, l8_space_time_norm, single_mode, strichartz_probe, strichartz_ratio, L8Norm, RatioLadder,
    RatioSample, StrichartzProbe, BOUNDED_SPREAD, DEFAULT_TIME_POINTS, MAX_TIME_POINTS, RANDOM_DATA_REGULARITY,
    REFINEMENT_TOLERANCE, REGULARITY_MARGIN, STRICHARTZ_EXPONENT,
};
