//! Dense truncated Fourier representation of a real periodic field.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::SpectralError;
use crate::scalar::Real;

/// Fourier coefficients `c(n)` for `n = -N..=N` of a field on the torus.
///
/// The slot `n = 0` holds the mean. Integrals use the normalized measure
/// `dx/(2π)`, so `u(x) = Σ c(n) e^{inx}` and Plancherel reads
/// `mean |u|² = Σ |c(n)|²`.
///
/// Hermitian symmetry `c(-n) = conj c(n)` is not enforced on construction
/// because intermediate products in the solver are allowed to break it
/// transiently; [`SpectralField::validate_hermitian`] checks it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real", try_from = "FieldJson", into = "FieldJson")]
pub struct SpectralField<T: Real> {
    n_max: usize,
    coeffs: Vec<Complex<T>>,
}

impl<T: Real> SpectralField<T> {
    /// Builds a field from coefficients ordered `n = -N..=N`.
    pub fn new(n_max: usize, coeffs: Vec<Complex<T>>) -> Result<Self, SpectralError> {
        if n_max < 1 {
            return Err(SpectralError::InvalidTruncation { min: 1, got: n_max });
        }
        let expected = 2 * n_max + 1;
        if coeffs.len() != expected {
            return Err(SpectralError::LengthMismatch {
                n_max,
                expected,
                got: coeffs.len(),
            });
        }
        let field = Self { n_max, coeffs };
        field.check_finite()?;
        Ok(field)
    }

    /// The zero field with truncation radius `n_max` (clamped to at least 1).
    pub fn zeros(n_max: usize) -> Self {
        let n_max = n_max.max(1);
        Self {
            n_max,
            coeffs: vec![Complex::new(T::zero(), T::zero()); 2 * n_max + 1],
        }
    }

    /// Builds a field by evaluating `f(n)` for every `n = -N..=N`.
    pub fn from_fn(n_max: usize, mut f: impl FnMut(i64) -> Complex<T>) -> Self {
        let mut field = Self::zeros(n_max);
        let n_max = field.n_max as i64;
        for n in -n_max..=n_max {
            field.coeffs[(n + n_max) as usize] = f(n);
        }
        field
    }

    /// Builds a real field from its nonnegative-frequency half.
    ///
    /// `half[k]` is `c(k)` for `k = 0..=N`; negative modes are filled by
    /// conjugation and the imaginary part of the mean is discarded.
    pub fn from_half_spectrum(half: &[Complex<T>]) -> Result<Self, SpectralError> {
        if half.len() < 2 {
            return Err(SpectralError::InvalidTruncation {
                min: 1,
                got: half.len().saturating_sub(1),
            });
        }
        let n_max = half.len() - 1;
        let mut field = Self::zeros(n_max);
        field.set(0, Complex::new(half[0].re, T::zero()));
        for (k, c) in half.iter().enumerate().skip(1) {
            field.set_real_pair(k as i64, *c);
        }
        field.check_finite()?;
        Ok(field)
    }

    /// Truncation radius `N`.
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Coefficients ordered `n = -N..=N`.
    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    /// Mutable access to the coefficients ordered `n = -N..=N`.
    pub fn coeffs_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.coeffs
    }

    /// Consumes the field and returns its coefficient vector.
    pub fn into_coeffs(self) -> Vec<Complex<T>> {
        self.coeffs
    }

    /// Coefficient `c(n)`; zero outside the stored range.
    pub fn coeff(&self, n: i64) -> Complex<T> {
        let n_max = self.n_max as i64;
        if n.abs() > n_max {
            Complex::new(T::zero(), T::zero())
        } else {
            self.coeffs[(n + n_max) as usize]
        }
    }

    /// Overwrites `c(n)`. Panics when `|n| > N`.
    pub fn set(&mut self, n: i64, value: Complex<T>) {
        let n_max = self.n_max as i64;
        assert!(n.abs() <= n_max, "mode {n} outside truncation {n_max}");
        self.coeffs[(n + n_max) as usize] = value;
    }

    /// Sets `c(n) = value` and `c(-n) = conj value` for `n ≠ 0`.
    pub fn set_real_pair(&mut self, n: i64, value: Complex<T>) {
        self.set(n, value);
        self.set(-n, value.conj());
    }

    /// The mean slot `c(0)`.
    pub fn mean(&self) -> Complex<T> {
        self.coeff(0)
    }

    /// Largest `|c(-n) - conj c(n)|` over all modes, with `|Im c(0)|` included.
    pub fn hermitian_defect(&self) -> T {
        let n_max = self.n_max as i64;
        (0..=n_max)
            .map(|n| (self.coeff(-n) - self.coeff(n).conj()).norm())
            .fold(T::zero(), T::max)
    }

    /// Fails when the field is not real to within `tol`.
    pub fn validate_hermitian(&self, tol: T) -> Result<(), SpectralError> {
        let defect = self.hermitian_defect();
        if defect > tol || defect.is_nan() {
            Err(SpectralError::NotHermitian {
                defect: defect.as_f64(),
            })
        } else {
            Ok(())
        }
    }

    /// Projects onto the nearest real field by averaging each mode with the
    /// conjugate of its mirror.
    pub fn symmetrized(&self) -> Self {
        let half = T::lit(0.5);
        Self::from_fn(self.n_max, |n| (self.coeff(n) + self.coeff(-n).conj()).scale(half))
    }

    /// Sobolev norm `(Σ ⟨n⟩^{2s} |c(n)|²)^{1/2}` with `⟨n⟩ = (1+n²)^{1/2}`.
    pub fn sobolev_norm(&self, s: T) -> T {
        self.weighted_sum_sq(|n| sobolev_weight_sq(n, s)).sqrt()
    }

    /// `Σ w(n) |c(n)|²` for a caller-supplied weight.
    pub fn weighted_sum_sq(&self, mut w: impl FnMut(i64) -> T) -> T {
        let n_max = self.n_max as i64;
        (-n_max..=n_max)
            .map(|n| w(n) * self.coeff(n).norm_sqr())
            .fold(T::zero(), |a, b| a + b)
    }

    /// Zeroes every mode with `|n| > m`, keeping the truncation radius.
    pub fn project_modes(&self, m: usize) -> Result<Self, SpectralError> {
        if m < 1 || m > self.n_max {
            return Err(SpectralError::ProjectionRadius { m, n_max: self.n_max });
        }
        let m = m as i64;
        Ok(self.map_modes(|n, c| {
            if n.abs() > m {
                Complex::new(T::zero(), T::zero())
            } else {
                c
            }
        }))
    }

    /// Returns a copy with the mean slot cleared.
    pub fn mean_zero(&self) -> Self {
        let mut out = self.clone();
        out.set(0, Complex::new(T::zero(), T::zero()));
        out
    }

    /// Re-expresses the field at a different truncation radius, padding with
    /// zeros or dropping modes as needed.
    pub fn resized(&self, n_max: usize) -> Self {
        Self::from_fn(n_max, |n| self.coeff(n))
    }

    /// Applies `f(n, c(n))` to every mode.
    pub fn map_modes(&self, mut f: impl FnMut(i64, Complex<T>) -> Complex<T>) -> Self {
        Self::from_fn(self.n_max, |n| f(n, self.coeff(n)))
    }

    /// Multiplies every coefficient by a real factor.
    pub fn scaled(&self, factor: T) -> Self {
        self.map_modes(|_, c| c.scale(factor))
    }

    /// Mode-wise difference `self - other`.
    pub fn sub(&self, other: &Self) -> Result<Self, SpectralError> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Mode-wise sum `self + other`.
    pub fn add(&self, other: &Self) -> Result<Self, SpectralError> {
        self.zip_with(other, |a, b| a + b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex<T>, Complex<T>) -> Complex<T>) -> Result<Self, SpectralError> {
        if self.n_max != other.n_max {
            return Err(SpectralError::TruncationMismatch {
                left: self.n_max,
                right: other.n_max,
            });
        }
        Ok(Self {
            n_max: self.n_max,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| f(*a, *b)).collect(),
        })
    }

    /// Largest coefficient-wise distance `max_n |a(n) - b(n)|` over the union
    /// of both ranges.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        let n_max = self.n_max.max(other.n_max) as i64;
        (-n_max..=n_max)
            .map(|n| (self.coeff(n) - other.coeff(n)).norm())
            .fold(T::zero(), T::max)
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> T {
        self.coeffs.iter().map(|c| c.norm()).fold(T::zero(), T::max)
    }

    /// Whether every coefficient is finite.
    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    fn check_finite(&self) -> Result<(), SpectralError> {
        let n_max = self.n_max as i64;
        match self.coeffs.iter().position(|c| !(c.re.is_finite() && c.im.is_finite())) {
            Some(i) => Err(SpectralError::NonFinite { n: i as i64 - n_max }),
            None => Ok(()),
        }
    }

    /// Converts the scalar type, for example to compare `f32` and `f64` runs.
    pub fn cast<U: Real>(&self) -> SpectralField<U> {
        SpectralField {
            n_max: self.n_max,
            coeffs: self
                .coeffs
                .iter()
                .map(|c| Complex::new(U::lit(c.re.as_f64()), U::lit(c.im.as_f64())))
                .collect(),
        }
    }

    /// Serializes to `{"N": int, "coeffs": [[re, im], ...]}` ordered `n = -N..=N`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(FieldJson::from_field(self)).unwrap_or(serde_json::Value::Null)
    }

    /// Serializes to a compact JSON string.
    pub fn to_json_string(&self) -> String {
        self.to_json().to_string()
    }

    /// Parses the JSON field format.
    pub fn from_json_str(text: &str) -> Result<Self, SpectralError> {
        let raw: FieldJson = serde_json::from_str(text).map_err(|e| SpectralError::Json(e.to_string()))?;
        raw.into_field()
    }

    /// Parses an already decoded JSON value in the field format.
    pub fn from_json_value(value: &serde_json::Value) -> Result<Self, SpectralError> {
        let raw: FieldJson = serde_json::from_value(value.clone()).map_err(|e| SpectralError::Json(e.to_string()))?;
        raw.into_field()
    }
}

/// `⟨n⟩^{2s} = (1+n²)^s`.
pub fn sobolev_weight_sq<T: Real>(n: i64, s: T) -> T {
    (T::one() + T::of_i64(n) * T::of_i64(n)).powf(s)
}

#[derive(Serialize, Deserialize)]
struct FieldJson {
    #[serde(rename = "N")]
    n: usize,
    coeffs: Vec<[f64; 2]>,
}

impl FieldJson {
    fn from_field<T: Real>(f: &SpectralField<T>) -> Self {
        Self {
            n: f.n_max,
            coeffs: f.coeffs.iter().map(|c| [c.re.as_f64(), c.im.as_f64()]).collect(),
        }
    }

    fn into_field<T: Real>(self) -> Result<SpectralField<T>, SpectralError> {
        let coeffs = self
            .coeffs
            .into_iter()
            .map(|[re, im]| Complex::new(T::lit(re), T::lit(im)))
            .collect();
        SpectralField::new(self.n, coeffs)
    }
}

impl<T: Real> From<SpectralField<T>> for FieldJson {
    fn from(f: SpectralField<T>) -> Self {
        Self::from_field(&f)
    }
}

impl<T: Real> TryFrom<FieldJson> for SpectralField<T> {
    type Error = SpectralError;

    fn try_from(raw: FieldJson) -> Result<Self, Self::Error> {
        raw.into_field()
    }
}
