//! Dealiased evaluation of the nonlinear term on the half spectrum.

use num_complex::Complex;
use qal_spectral::{transform_size, GridBuffers, Real, SpectralField, SpectralGrid};

use crate::params::EquationParams;

/// Reusable workspace for `−∂_x(αu³ + βu_x² + γu u_xx)`.
///
/// Fields are passed as their nonnegative half `c(0..=N)`; the negative
/// modes are implied by conjugation, so results are exactly real. One
/// complex inverse transform carries `u + iu_x`, a second carries `u_xx`,
/// and one forward transform returns the flux. The grid has at least
/// `2(2N+1)` points, enough to leave modes `|n| ≤ N` of a cubic product
/// free of aliasing.
#[derive(Debug, Clone)]
pub struct NonlinearKernel<T: Real> {
    n_max: usize,
    grid: SpectralGrid<T>,
    packed: GridBuffers<T>,
    second: GridBuffers<T>,
}

impl<T: Real> NonlinearKernel<T> {
    /// Workspace for truncation `n_max` on the default padded grid.
    pub fn new(n_max: usize) -> Self {
        let grid = SpectralGrid::with_size(transform_size(n_max));
        let packed = grid.buffers();
        let second = grid.buffers();
        Self {
            n_max,
            grid,
            packed,
            second,
        }
    }

    /// Truncation radius.
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Number of grid points.
    pub fn grid_size(&self) -> usize {
        self.grid.size()
    }

    /// Physical samples of `u`, `u_x` and `u_xx` for the half spectrum.
    pub fn samples(&mut self, half: &[Complex<T>]) -> (Vec<T>, Vec<T>, Vec<T>) {
        self.synthesize(half);
        let u = self.packed.data.iter().map(|z| z.re).collect();
        let ux = self.packed.data.iter().map(|z| z.im).collect();
        let uxx = self.second.data.iter().map(|z| z.re).collect();
        (u, ux, uxx)
    }

    fn synthesize(&mut self, half: &[Complex<T>]) {
        let size = self.grid.size();
        let zero = Complex::new(T::zero(), T::zero());
        self.packed.data.iter_mut().for_each(|z| *z = zero);
        self.second.data.iter_mut().for_each(|z| *z = zero);
        self.packed.data[0] = Complex::new(half[0].re, T::zero());
        for (n, &c) in half.iter().enumerate().skip(1) {
            let nf = T::of_usize(n);
            let cc = c.conj();
            self.packed.data[n] = c.scale(T::one() - nf);
            self.packed.data[size - n] = cc.scale(T::one() + nf);
            let w = -(nf * nf);
            self.second.data[n] = c.scale(w);
            self.second.data[size - n] = cc.scale(w);
        }
        self.grid.inverse_in_place(&mut self.packed);
        self.grid.inverse_in_place(&mut self.second);
    }

    /// Writes the half spectrum of `−∂_x(αu³ + βu_x² + γu u_xx)` into `out`.
    ///
    /// `out[0]`, the mean slot, is exactly zero.
    pub fn evaluate(&mut self, half: &[Complex<T>], p: &EquationParams<T>, out: &mut [Complex<T>]) {
        self.synthesize(half);
        for (z, w) in self.packed.data.iter_mut().zip(&self.second.data) {
            let (u, ux, uxx) = (z.re, z.im, w.re);
            let flux = p.alpha * u * u * u + p.beta * ux * ux + p.gamma * u * uxx;
            *z = Complex::new(flux, T::zero());
        }
        self.grid.forward_in_place(&mut self.packed);
        let inv = T::one() / T::of_usize(self.grid.size());
        out[0] = Complex::new(T::zero(), T::zero());
        for (n, o) in out.iter_mut().enumerate().skip(1) {
            let f = self.packed.data[n].scale(inv);
            let k = T::of_usize(n);
            *o = Complex::new(k * f.im, -(k * f.re));
        }
    }
}

/// The nonlinear term `−α∂_x(u³) − β∂_x(u_x)² − γ∂_x(u u_xx)` of a real
/// field, dealiased by zero padding.
///
/// The input is read through its nonnegative modes, which is exact for a
/// Hermitian field. The output is Hermitian with zero mean.
pub fn nonlinearity<T: Real>(u: &SpectralField<T>, p: &EquationParams<T>) -> SpectralField<T> {
    let n_max = u.n_max();
    let half: Vec<Complex<T>> = (0..=n_max as i64).map(|n| u.coeff(n)).collect();
    let mut out = vec![Complex::new(T::zero(), T::zero()); n_max + 1];
    NonlinearKernel::new(n_max).evaluate(&half, p, &mut out);
    from_half(&out)
}

/// Real field from its nonnegative half; the mean's imaginary part is dropped.
pub(crate) fn from_half<T: Real>(half: &[Complex<T>]) -> SpectralField<T> {
    let n_max = half.len() - 1;
    let mut f = SpectralField::zeros(n_max);
    f.set(0, Complex::new(half[0].re, T::zero()));
    for (n, &c) in half.iter().enumerate().skip(1) {
        f.set_real_pair(n as i64, c);
    }
    f
}

/// Nonnegative half `c(0..=N)` of a field.
pub(crate) fn to_half<T: Real>(f: &SpectralField<T>) -> Vec<Complex<T>> {
    (0..=f.n_max() as i64).map(|n| f.coeff(n)).collect()
}
