//! Uniform sample grids and the FFT plumbing between coefficients and samples.

use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::SpectralError;
use crate::field::SpectralField;
use crate::scalar::Real;

/// Smallest grid length for truncation `N`: `2(2N+1)` rounded up to a
/// 5-smooth length so the FFT stays on fast radices.
///
/// Twice the bare Nyquist length leaves room for products of up to three
/// fields without wrap-around.
pub fn transform_size(n_max: usize) -> usize {
    next_smooth(2 * (2 * n_max + 1))
}

/// Smallest integer `≥ n` whose prime factors are all in `{2, 3, 5}`.
pub fn next_smooth(n: usize) -> usize {
    let mut m = n.max(1);
    loop {
        let mut r = m;
        for p in [2, 3, 5] {
            while r % p == 0 {
                r /= p;
            }
        }
        if r == 1 {
            return m;
        }
        m += 1;
    }
}

/// FFT plans for one grid length.
///
/// Samples live at `x_j = 2πj/M`. Synthesis evaluates `Σ c(n) e^{inx_j}`
/// and analysis divides the forward transform by `M`, so a round trip is
/// the identity on fields with `2N < M`.
#[derive(Clone)]
pub struct SpectralGrid<T: Real> {
    size: usize,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
}

impl<T: Real> std::fmt::Debug for SpectralGrid<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralGrid").field("size", &self.size).finish()
    }
}

/// Reusable buffers for allocation-free transforms on a [`SpectralGrid`].
#[derive(Debug, Clone)]
pub struct GridBuffers<T> {
    /// Physical samples or spectral workspace of grid length.
    pub data: Vec<Complex<T>>,
    scratch: Vec<Complex<T>>,
}

impl<T: Real> SpectralGrid<T> {
    /// Grid of the default length for truncation `n_max`.
    pub fn for_truncation(n_max: usize) -> Self {
        Self::with_size(transform_size(n_max))
    }

    /// Grid with an explicit number of sample points.
    pub fn with_size(size: usize) -> Self {
        let size = size.max(1);
        let mut planner = FftPlanner::new();
        Self {
            size,
            forward: planner.plan_fft_forward(size),
            inverse: planner.plan_fft_inverse(size),
        }
    }

    /// Number of sample points `M`.
    pub fn size(&self) -> usize {
        self.size
    }

    /// Allocates buffers sized for this grid.
    pub fn buffers(&self) -> GridBuffers<T> {
        let scratch_len = self
            .forward
            .get_inplace_scratch_len()
            .max(self.inverse.get_inplace_scratch_len());
        GridBuffers {
            data: vec![Complex::new(T::zero(), T::zero()); self.size],
            scratch: vec![Complex::new(T::zero(), T::zero()); scratch_len],
        }
    }

    /// Sample positions `x_j = 2πj/M`.
    pub fn points(&self) -> Vec<T> {
        let h = T::lit(2.0 * std::f64::consts::PI / self.size as f64);
        (0..self.size).map(|j| T::of_usize(j) * h).collect()
    }

    fn check_resolves(&self, n_max: usize) -> Result<(), SpectralError> {
        if 2 * n_max >= self.size {
            Err(SpectralError::GridTooSmall { size: self.size, n_max })
        } else {
            Ok(())
        }
    }

    /// Scatters coefficients ordered `n = -N..=N` into `buf.data` and
    /// synthesizes samples in place.
    pub fn synthesize_into(&self, coeffs: &[Complex<T>], buf: &mut GridBuffers<T>) -> Result<(), SpectralError> {
        let n_max = coeffs.len() / 2;
        self.check_resolves(n_max)?;
        let zero = Complex::new(T::zero(), T::zero());
        buf.data.iter_mut().for_each(|z| *z = zero);
        for (i, c) in coeffs.iter().enumerate() {
            let n = i as i64 - n_max as i64;
            buf.data[self.slot(n)] = *c;
        }
        self.inverse.process_with_scratch(&mut buf.data, &mut buf.scratch);
        Ok(())
    }

    /// Transforms the samples held in `buf.data` in place and gathers the
    /// normalized coefficients for `n = -N..=N` into `out`.
    pub fn analyze_into(&self, buf: &mut GridBuffers<T>, out: &mut [Complex<T>]) -> Result<(), SpectralError> {
        let n_max = out.len() / 2;
        self.check_resolves(n_max)?;
        self.forward.process_with_scratch(&mut buf.data, &mut buf.scratch);
        let inv = T::one() / T::of_usize(self.size);
        for (i, o) in out.iter_mut().enumerate() {
            let n = i as i64 - n_max as i64;
            *o = buf.data[self.slot(n)].scale(inv);
        }
        Ok(())
    }

    /// Unnormalized inverse transform `Σ_k d(k) e^{2πijk/M}` of `buf.data`
    /// in place, for callers that fill the spectral buffer themselves.
    pub fn inverse_in_place(&self, buf: &mut GridBuffers<T>) {
        self.inverse.process_with_scratch(&mut buf.data, &mut buf.scratch);
    }

    /// Unnormalized forward transform `Σ_j d(j) e^{−2πijk/M}` of `buf.data`
    /// in place.
    pub fn forward_in_place(&self, buf: &mut GridBuffers<T>) {
        self.forward.process_with_scratch(&mut buf.data, &mut buf.scratch);
    }

    /// Index of frequency `n` in an unshifted FFT buffer.
    pub fn slot(&self, n: i64) -> usize {
        n.rem_euclid(self.size as i64) as usize
    }

    /// Complex samples of a field on this grid.
    pub fn synthesize(&self, f: &SpectralField<T>) -> Result<Vec<Complex<T>>, SpectralError> {
        let mut buf = self.buffers();
        self.synthesize_into(f.coeffs(), &mut buf)?;
        Ok(buf.data)
    }

    /// Real samples of a field; the imaginary parts are discarded.
    pub fn synthesize_real(&self, f: &SpectralField<T>) -> Result<Vec<T>, SpectralError> {
        Ok(self.synthesize(f)?.into_iter().map(|z| z.re).collect())
    }

    /// Coefficients `n = -N..=N` of grid samples.
    pub fn analyze(&self, samples: &[Complex<T>], n_max: usize) -> Result<SpectralField<T>, SpectralError> {
        if samples.len() != self.size {
            return Err(SpectralError::LengthMismatch {
                n_max,
                expected: self.size,
                got: samples.len(),
            });
        }
        let mut buf = self.buffers();
        buf.data.copy_from_slice(samples);
        let mut out = vec![Complex::new(T::zero(), T::zero()); 2 * n_max + 1];
        self.analyze_into(&mut buf, &mut out)?;
        SpectralField::new(n_max, out)
    }

    /// Coefficients of real samples.
    pub fn analyze_real(&self, samples: &[T], n_max: usize) -> Result<SpectralField<T>, SpectralError> {
        let z: Vec<Complex<T>> = samples.iter().map(|&x| Complex::new(x, T::zero())).collect();
        self.analyze(&z, n_max)
    }

    /// Grid mean of `|u(x_j)|²`, the discrete side of Parseval.
    pub fn mean_square(&self, f: &SpectralField<T>) -> Result<T, SpectralError> {
        let samples = self.synthesize(f)?;
        let sum = samples.iter().map(|z| z.norm_sqr()).fold(T::zero(), |a, b| a + b);
        Ok(sum / T::of_usize(self.size))
    }
}
