//! Integrating-factor Runge–Kutta 4 in the interaction variable.

use num_complex::Complex;
use qal_gauge::dispersion;
use qal_spectral::{Real, SpectralField};

use crate::error::EvolutionError;
use crate::kernel::{from_half, to_half, NonlinearKernel};
use crate::params::EquationParams;

/// Fixed-step IFRK4 integrator for `û_t = in⁵û + N(û)`.
///
/// With `E_h = e^{in⁵h}` the step is the classical RK4 applied to
/// `v = E_{−t}u`, written in `u`:
///
/// ```text
/// k1 = h N(u)
/// k2 = h N(E_{h/2}(u + k1/2))
/// k3 = h N(E_{h/2}u + k2/2)
/// k4 = h N(E_h u + E_{h/2} k3)
/// u' = E_h u + (E_h k1 + 2E_{h/2}(k2 + k3) + k4)/6
/// ```
///
/// The linear part is propagated exactly, so the free equation is solved to
/// roundoff for any `h`. The state is the half spectrum `c(0..=N)`, so every
/// step is exactly Hermitian and the mean slot is untouched.
#[derive(Debug, Clone)]
pub struct IfRk4<T: Real> {
    params: EquationParams<T>,
    h: T,
    half_phase: Vec<Complex<T>>,
    full_phase: Vec<Complex<T>>,
    kernel: NonlinearKernel<T>,
    k: [Vec<Complex<T>>; 4],
    stage: Vec<Complex<T>>,
}

fn phases<T: Real>(n_max: usize, t: f64) -> Vec<Complex<T>> {
    (0..=n_max as i64)
        .map(|n| {
            let theta = t * dispersion(n);
            Complex::new(T::lit(theta.cos()), T::lit(theta.sin()))
        })
        .collect()
}

impl<T: Real> IfRk4<T> {
    /// Integrator for truncation `n_max` with step `h`.
    pub fn new(n_max: usize, params: EquationParams<T>, h: T) -> Self {
        let zero = vec![Complex::new(T::zero(), T::zero()); n_max + 1];
        Self {
            params,
            h,
            half_phase: phases(n_max, 0.5 * h.as_f64()),
            full_phase: phases(n_max, h.as_f64()),
            kernel: NonlinearKernel::new(n_max),
            k: [zero.clone(), zero.clone(), zero.clone(), zero.clone()],
            stage: zero,
        }
    }

    /// Step size.
    pub fn step_size(&self) -> T {
        self.h
    }

    /// Advances the half spectrum `u` by one step in place.
    pub fn advance(&mut self, u: &mut [Complex<T>]) {
        let h = self.h;
        let half = T::lit(0.5);
        let sixth = T::one() / T::lit(6.0);
        let third = T::one() / T::lit(3.0);
        let linear = self.params.is_linear();
        if linear {
            u.iter_mut().zip(&self.full_phase).for_each(|(c, e)| *c = *c * e);
            return;
        }
        let [k1, k2, k3, k4] = &mut self.k;
        let stage = &mut self.stage;
        let (eh, ef) = (&self.half_phase, &self.full_phase);

        self.kernel.evaluate(u, &self.params, k1);
        k1.iter_mut().for_each(|z| *z = z.scale(h));

        for n in 0..u.len() {
            stage[n] = eh[n] * (u[n] + k1[n].scale(half));
        }
        self.kernel.evaluate(stage, &self.params, k2);
        k2.iter_mut().for_each(|z| *z = z.scale(h));

        for n in 0..u.len() {
            stage[n] = eh[n] * u[n] + k2[n].scale(half);
        }
        self.kernel.evaluate(stage, &self.params, k3);
        k3.iter_mut().for_each(|z| *z = z.scale(h));

        for n in 0..u.len() {
            stage[n] = ef[n] * u[n] + eh[n] * k3[n];
        }
        self.kernel.evaluate(stage, &self.params, k4);
        k4.iter_mut().for_each(|z| *z = z.scale(h));

        for n in 0..u.len() {
            u[n] = ef[n] * (u[n] + k1[n].scale(sixth)) + eh[n] * (k2[n] + k3[n]).scale(third) + k4[n].scale(sixth);
        }
    }
}

/// One IFRK4 step of size `dt` applied to a real field.
///
/// The field is read through its nonnegative modes. Fails when the result
/// is not finite.
pub fn step<T: Real>(u: &SpectralField<T>, p: &EquationParams<T>, dt: T) -> Result<SpectralField<T>, EvolutionError> {
    if !p.is_finite() {
        return Err(EvolutionError::Config("non-finite equation coefficients".into()));
    }
    if !(dt.is_finite()) {
        return Err(EvolutionError::Config(format!("non-finite step {dt}")));
    }
    let mut half = to_half(u);
    IfRk4::new(u.n_max(), *p, dt).advance(&mut half);
    if half.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
        return Err(EvolutionError::NonFinite { time: dt.as_f64() });
    }
    Ok(from_half(&half))
}
