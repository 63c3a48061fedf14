//! The `L²` balance law `d/dt ∫u²/2 = (β − γ/2) ∫u_x³`.
//!
//! The cubic term and the dispersion do not change `∫u²`. The quadratic
//! terms contribute `β∫u_x³` and `−(γ/2)∫u_x³`, so the toy equation has
//! `d/dt ∫u²/2 = −∫u_x³` and the integrable family `γ = 2β` conserves
//! `∫u²`.

use num_complex::Complex;
use qal_gauge::dispersion;
use qal_spectral::{Real, SpectralField};
use serde::{Deserialize, Serialize};

use crate::kernel::{to_half, NonlinearKernel};
use crate::params::EquationParams;
use crate::trajectory::Trajectory;

/// Both sides of the balance law at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct EnergyBalance<T: Real> {
    /// Time.
    pub t: T,
    /// `Re Σ conj(û) · û_t` from the full right-hand side.
    pub rate: T,
    /// `(β − γ/2) ∫u_x³` by quadrature on the padded grid.
    pub flux: T,
}

impl<T: Real> EnergyBalance<T> {
    /// `|rate − flux|`.
    pub fn defect(&self) -> T {
        (self.rate - self.flux).abs()
    }
}

/// `d/dt ∫u²/2 = Re Σ_n conj û(n) (in⁵û(n) + N(u)(n))`, evaluated from the
/// spectral right-hand side.
pub fn energy_rate<T: Real>(u: &SpectralField<T>, p: &EquationParams<T>) -> T {
    let half = to_half(u);
    let mut rhs = vec![Complex::new(T::zero(), T::zero()); half.len()];
    NonlinearKernel::new(u.n_max()).evaluate(&half, p, &mut rhs);
    let two = T::lit(2.0);
    let mut total = (half[0].conj() * rhs[0]).re;
    for (n, (c, r)) in half.iter().zip(&rhs).enumerate().skip(1) {
        let linear = Complex::new(T::zero(), T::lit(dispersion(n as i64))) * c;
        total = total + two * (c.conj() * (linear + r)).re;
    }
    total
}

/// `(β − γ/2) ∫u_x³` with the normalized measure, by quadrature on a grid
/// that integrates the cubic exactly.
pub fn energy_flux<T: Real>(u: &SpectralField<T>, p: &EquationParams<T>) -> T {
    let half = to_half(u);
    let mut kernel = NonlinearKernel::new(u.n_max());
    let (_, ux, _) = kernel.samples(&half);
    let mean_cube = ux.iter().map(|&d| d * d * d).fold(T::zero(), |a, b| a + b) / T::of_usize(ux.len());
    p.energy_factor() * mean_cube
}

/// Both sides of the balance law at every snapshot of a solution trajectory.
pub fn energy_balance<T: Real>(traj: &Trajectory<T>) -> Vec<EnergyBalance<T>> {
    traj.times
        .iter()
        .zip(&traj.snapshots)
        .map(|(&t, u)| EnergyBalance {
            t,
            rate: energy_rate(u, &traj.params),
            flux: energy_flux(u, &traj.params),
        })
        .collect()
}
