//! Sampled `K(t)` series and its running integral.

use num_complex::Complex;
use qal_spectral::Real;
use serde::{Deserialize, Serialize};

use crate::GaugeError;

/// Largest real part accepted in a `K` sample.
pub const K_REAL_TOLERANCE: f64 = 1e-13;

/// Purely imaginary samples `K(t_i)` with the running integral `∫₀^{t_i} K`.
///
/// Only imaginary parts are stored. The samples are usually a subset of a
/// finer integration grid: [`GaugeRecorder`] integrates every step and keeps
/// the marked ones, so the stored integral is always the fine-grid value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real", try_from = "PhaseJson", into = "PhaseJson")]
pub struct GaugePhase<T: Real> {
    times: Vec<T>,
    k_imag: Vec<T>,
    cumulative: Vec<T>,
}

impl<T: Real> Default for GaugePhase<T> {
    fn default() -> Self {
        Self {
            times: Vec::new(),
            k_imag: Vec::new(),
            cumulative: Vec::new(),
        }
    }
}

impl<T: Real> GaugePhase<T> {
    /// Integrates `K` over exactly the given samples and keeps all of them.
    pub fn from_samples(times: &[T], k: &[Complex<T>]) -> Result<Self, GaugeError> {
        if times.len() != k.len() {
            return Err(GaugeError::InvalidPhase(format!(
                "{} times but {} K samples",
                times.len(),
                k.len()
            )));
        }
        let mut recorder = GaugeRecorder::new();
        for (&t, &kv) in times.iter().zip(k) {
            recorder.push(t, kv)?;
            recorder.mark();
        }
        Ok(recorder.finish())
    }

    /// [`GaugePhase::from_samples`] with the imaginary parts of `K` given.
    pub fn from_imaginary(times: &[T], k_imag: &[T]) -> Result<Self, GaugeError> {
        let k: Vec<Complex<T>> = k_imag.iter().map(|&y| Complex::new(T::zero(), y)).collect();
        Self::from_samples(times, &k)
    }

    /// Reassembles a phase from stored arrays, checking their shape.
    pub fn from_parts(times: Vec<T>, k_imag: Vec<T>, cumulative: Vec<T>) -> Result<Self, GaugeError> {
        if times.len() != k_imag.len() || times.len() != cumulative.len() {
            return Err(GaugeError::InvalidPhase(format!(
                "array lengths differ: {} times, {} K samples, {} integrals",
                times.len(),
                k_imag.len(),
                cumulative.len()
            )));
        }
        let finite = |v: &[T]| v.iter().all(|x| x.is_finite());
        if !(finite(&times) && finite(&k_imag) && finite(&cumulative)) {
            return Err(GaugeError::InvalidPhase("non-finite entry".into()));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(GaugeError::InvalidPhase("times must increase strictly".into()));
        }
        Ok(Self {
            times,
            k_imag,
            cumulative,
        })
    }

    /// Number of samples.
    pub fn len(&self) -> usize {
        self.times.len()
    }

    /// Whether no sample is recorded.
    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Sample times.
    pub fn times(&self) -> &[T] {
        &self.times
    }

    /// Imaginary parts of the samples `K(t_i)`.
    pub fn k_imag(&self) -> &[T] {
        &self.k_imag
    }

    /// The samples `K(t_i)` as complex numbers.
    pub fn k_samples(&self) -> Vec<Complex<T>> {
        self.k_imag.iter().map(|&y| Complex::new(T::zero(), y)).collect()
    }

    /// Imaginary parts of the running integral `∫₀^{t_i} K`.
    pub fn cumulative(&self) -> &[T] {
        &self.cumulative
    }

    /// Running integral at sample `i` as a complex number.
    pub fn cumulative_k(&self, i: usize) -> Result<Complex<T>, GaugeError> {
        Ok(Complex::new(T::zero(), self.cumulative_at(i)?))
    }

    /// Imaginary part of the running integral at sample `i`.
    pub fn cumulative_at(&self, i: usize) -> Result<T, GaugeError> {
        self.cumulative.get(i).copied().ok_or(GaugeError::IndexOutOfRange {
            index: i,
            len: self.cumulative.len(),
        })
    }

    /// Index of the sample whose time is closest to `t`.
    pub fn nearest_index(&self, t: T) -> Option<usize> {
        let pos = self.times.partition_point(|&s| s < t);
        [pos.checked_sub(1), Some(pos)]
            .into_iter()
            .flatten()
            .filter(|&i| i < self.times.len())
            .min_by(|&a, &b| {
                let da = (self.times[a] - t).abs();
                let db = (self.times[b] - t).abs();
                da.partial_cmp(&db).unwrap_or(std::cmp::Ordering::Equal)
            })
    }
}

/// Streaming integrator of `K` along a time grid.
///
/// Every step is pushed; [`GaugeRecorder::mark`] keeps the latest sample in
/// the output. The running integral is the composite Simpson rule over
/// panel pairs. At an odd index the final panel is integrated with the
/// quadratic through the last three samples, so every prefix is
/// fourth-order accurate. The prefix at index 1 starts as the trapezoid and
/// is replaced by the first panel of the quadratic through the first three
/// samples once the third arrives. Nonuniform spacing is supported.
#[derive(Debug, Clone)]
pub struct GaugeRecorder<T: Real> {
    count: usize,
    window_t: [T; 3],
    window_f: [T; 3],
    even_prefix: T,
    current: T,
    index_one_slot: Option<usize>,
    out: GaugePhase<T>,
}

impl<T: Real> Default for GaugeRecorder<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Real> GaugeRecorder<T> {
    /// A recorder with no samples.
    pub fn new() -> Self {
        Self {
            count: 0,
            window_t: [T::zero(); 3],
            window_f: [T::zero(); 3],
            even_prefix: T::zero(),
            current: T::zero(),
            index_one_slot: None,
            out: GaugePhase::default(),
        }
    }

    /// Number of samples pushed so far.
    pub fn count(&self) -> usize {
        self.count
    }

    /// Imaginary part of the running integral up to the latest sample.
    pub fn current(&self) -> T {
        self.current
    }

    /// Appends a sample `K(t)`. Times must increase strictly and `K` must be
    /// purely imaginary.
    pub fn push(&mut self, t: T, k: Complex<T>) -> Result<(), GaugeError> {
        if !(k.re.as_f64().abs() <= K_REAL_TOLERANCE) || !k.im.is_finite() {
            return Err(GaugeError::InvalidPhase(format!(
                "K sample {} + {}i is not purely imaginary",
                k.re, k.im
            )));
        }
        if !t.is_finite() {
            return Err(GaugeError::InvalidPhase("non-finite sample time".into()));
        }
        if self.count > 0 && t <= self.window_t[2] {
            return Err(GaugeError::InvalidPhase(format!(
                "sample time {t} does not exceed {}",
                self.window_t[2]
            )));
        }
        self.window_t = [self.window_t[1], self.window_t[2], t];
        self.window_f = [self.window_f[1], self.window_f[2], k.im];
        let i = self.count;
        self.count += 1;
        let [t0, t1, t2] = self.window_t;
        let [f0, f1, f2] = self.window_f;
        self.current = match i {
            0 => T::zero(),
            1 => (t2 - t1) * (f1 + f2) * T::lit(0.5),
            _ if i % 2 == 0 => {
                if let (2, Some(slot)) = (i, self.index_one_slot) {
                    self.out.cumulative[slot] = last_panel(t2 - t1, t1 - t0, f2, f1, f0);
                }
                self.even_prefix + simpson(t1 - t0, t2 - t1, f0, f1, f2)
            }
            _ => self.even_prefix + last_panel(t1 - t0, t2 - t1, f0, f1, f2),
        };
        if i % 2 == 0 {
            self.even_prefix = self.current;
        }
        Ok(())
    }

    /// Keeps the latest pushed sample in the output. Marking the same
    /// sample twice has no effect.
    pub fn mark(&mut self) {
        if self.count == 0 || self.out.times.last() == Some(&self.window_t[2]) {
            return;
        }
        if self.count == 2 {
            self.index_one_slot = Some(self.out.len());
        }
        self.out.times.push(self.window_t[2]);
        self.out.k_imag.push(self.window_f[2]);
        self.out.cumulative.push(self.current);
    }

    /// The marked samples.
    pub fn finish(self) -> GaugePhase<T> {
        self.out
    }
}

/// Simpson's rule over two panels of widths `h0` (left) and `h1` (right),
/// written for arbitrary widths.
fn simpson<T: Real>(h0: T, h1: T, f0: T, f1: T, f2: T) -> T {
    let two = T::lit(2.0);
    let s = h0 + h1;
    s / T::lit(6.0) * ((two - h1 / h0) * f0 + s * s / (h0 * h1) * f1 + (two - h0 / h1) * f2)
}

/// Integral over the right panel `[t1, t2]` of the quadratic through three
/// samples, with left width `h0 = t1 − t0` and right width `h1 = t2 − t1`.
/// Reversing the arguments gives the integral over the left panel.
fn last_panel<T: Real>(h0: T, h1: T, f0: T, f1: T, f2: T) -> T {
    let six = T::lit(6.0);
    let three = T::lit(3.0);
    let s = h0 + h1;
    let w0 = -(h1 * h1 * h1) / (six * h0 * s);
    let w1 = h1 * (h1 + three * h0) / (six * h0);
    let w2 = h1 * (T::lit(2.0) * h1 + three * h0) / (six * s);
    w0 * f0 + w1 * f1 + w2 * f2
}

#[derive(Serialize, Deserialize)]
struct PhaseJson {
    times: Vec<f64>,
    k_imag: Vec<f64>,
    cumulative: Vec<f64>,
}

impl<T: Real> From<GaugePhase<T>> for PhaseJson {
    fn from(p: GaugePhase<T>) -> Self {
        let wide = |v: &[T]| v.iter().map(|x| x.as_f64()).collect();
        Self {
            times: wide(&p.times),
            k_imag: wide(&p.k_imag),
            cumulative: wide(&p.cumulative),
        }
    }
}

impl<T: Real> TryFrom<PhaseJson> for GaugePhase<T> {
    type Error = GaugeError;

    fn try_from(raw: PhaseJson) -> Result<Self, Self::Error> {
        let narrow = |v: Vec<f64>| v.into_iter().map(T::lit).collect();
        Self::from_parts(narrow(raw.times), narrow(raw.k_imag), narrow(raw.cumulative))
    }
}
