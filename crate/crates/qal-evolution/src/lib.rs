//! Pseudospectral time integration of the fifth-order KdV family
//!
//! ```text
//! u_t − ∂_x⁵u + α∂_x(u³) + β∂_x(u_x)² + γ∂_x(u u_xx) = 0
//! ```
//!
//! on the torus. [`solve`] runs an integrating-factor RK4 scheme with
//! zero-padded products and records `K(t)` at every step for the gauge.
//! [`oracle_solve`] integrates the same Galerkin system by direct
//! convolution with an adaptive high-order method and serves as the
//! reference for small `N`. [`energy_balance`] checks the `L²` balance law
//! along a trajectory.

pub mod energy;
pub mod error;
pub mod kernel;
pub mod oracle;
pub mod params;
pub mod stepper;
pub mod trajectory;

pub use energy::{energy_balance, energy_flux, energy_rate, EnergyBalance};
pub use error::EvolutionError;
pub use kernel::{nonlinearity, NonlinearKernel};
pub use oracle::{
    convolution_nonlinearity, oracle_solve, oracle_solve_with_tolerance, ORACLE_MAX_TRUNCATION, ORACLE_TOLERANCE,
};
pub use params::{Dealias, EquationParams, Preset, SolverConfig, MAX_DEFAULT_DT, MIN_TRUNCATION};
pub use stepper::{step, IfRk4};
pub use trajectory::{solve, Aborted, Diagnostic, RunStatus, SolveError, Trajectory, Variable, MEAN_TOLERANCE};

/// Double-precision coefficients.
pub type Params64 = EquationParams<f64>;
/// Double-precision configuration.
pub type Config64 = SolverConfig<f64>;
/// Double-precision trajectory.
pub type Trajectory64 = Trajectory<f64>;
