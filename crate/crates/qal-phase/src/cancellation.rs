//! Exact symmetric-sum cancellations over frequency hyperplanes.
//!
//! Each [`CancellationKind`] is a multilinear form
//! `Σ_{t on the hyperplane} w(t) Π_i f_i(t_i)` with an explicit rational
//! weight. Sums run over nonzero frequencies `|t_i| ≤ N`; the mean mode is
//! excluded, as for the mean-zero data the normal form acts on.
//!
//! Fields are rescaled to Gaussian integers by a common denominator and
//! terms are accumulated per weight denominator in checked `i128`, spilling
//! to big integers on overflow. The buckets are combined exactly at the end.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, ToPrimitive, Zero};
use qal_spectral::{Real, SpectralField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::PhaseError;
use crate::ExactComplex;

/// External frequency used by [`CancellationKind::HPairing`].
pub const H_PAIRING_EXTERNAL_FREQUENCY: i64 = 200;

/// Separation factor in the restriction `n^4 ≥ 8^4·max|n_i|^5`.
const H_PAIRING_SEPARATION: i64 = 8;

/// The vanishing sums, each a multilinear form on a hyperplane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CancellationKind {
    /// `Σ_{n_1+n_2+n_4=0} f(n_1)f(n_2)f(n_4)/(n_1 n_4)`.
    InvN1N4,
    /// `Σ_{n_1+n_2+n_4=0} (3n_2+6n_4)/(n_1 n_4)·f(n_1)f(n_2)f(n_4)`.
    Affine,
    /// `Σ_{n_2+n_3+n_4=0} (1/n_2 + 1/(n_2+n_3))·f(n_2)f(n_3)f(n_4)`.
    A1A3,
    /// `Σ_{n_2+n_3+n_4=0} (n_2+n_3+n_4)/(n_2(n_2+n_3))·f(n_2)f(n_3)f(n_4)`.
    A2A3Sq,
    /// `Σ_{n_2+n_3=0} p(n_2) f(n_2)f(n_3)` with the odd polynomial
    /// `p(x) = x^5 − 3x^3 + 2x`.
    OddParity,
    /// `Σ_{n_1+n_2+n_4+n_5=0} f(n_1)f(n_2)f(n_4)f(n_5)/(n_1 (n_4+n_5) n_4)`
    /// over `n_4+n_5 ≠ 0` and `n^4 ≥ 8^4·max|n_r|^5` for the external
    /// frequency `n`. Grouping by `j = n_4+n_5` gives `Σ_j A(−j)A(j)/j`.
    HPairing,
}

impl CancellationKind {
    /// All six kinds.
    pub const ALL: [CancellationKind; 6] = [
        CancellationKind::InvN1N4,
        CancellationKind::Affine,
        CancellationKind::A1A3,
        CancellationKind::A2A3Sq,
        CancellationKind::OddParity,
        CancellationKind::HPairing,
    ];

    /// Number of field slots in the multilinear form.
    pub fn arity(&self) -> usize {
        match self {
            CancellationKind::OddParity => 2,
            CancellationKind::HPairing => 4,
            _ => 3,
        }
    }

    /// Stable lowercase name used in reports.
    pub fn name(&self) -> &'static str {
        match self {
            CancellationKind::InvN1N4 => "inv_n1n4",
            CancellationKind::Affine => "affine",
            CancellationKind::A1A3 => "a1a3",
            CancellationKind::A2A3Sq => "a2a3sq",
            CancellationKind::OddParity => "odd_parity",
            CancellationKind::HPairing => "h_pairing",
        }
    }

    /// Whether the weight is zero at every point of the summation domain.
    ///
    /// The A2A3SQ numerator `n_2+n_3+n_4` vanishes on `n_2+n_3+n_4 = 0`, so
    /// its sum is zero for any slots and has no symmetry-breaking control.
    pub fn vanishes_pointwise(&self) -> bool {
        matches!(self, CancellationKind::A2A3Sq)
    }
}

/// Truncated Fourier coefficients with exact rational real and imaginary parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalField {
    n_max: usize,
    coeffs: Vec<ExactComplex>,
}

fn zero_c() -> ExactComplex {
    Complex::new(BigRational::zero(), BigRational::zero())
}

impl RationalField {
    /// The zero field.
    pub fn zeros(n_max: usize) -> Self {
        Self {
            n_max,
            coeffs: vec![zero_c(); 2 * n_max + 1],
        }
    }

    /// Builds a field from coefficients ordered `n = −N..=N`.
    pub fn new(n_max: usize, coeffs: Vec<ExactComplex>) -> Result<Self, PhaseError> {
        if coeffs.len() != 2 * n_max + 1 {
            return Err(PhaseError::TruncationMismatch(2 * n_max + 1, coeffs.len()));
        }
        Ok(Self { n_max, coeffs })
    }

    /// Exact conversion of a floating-point field; every finite float is a
    /// dyadic rational.
    pub fn from_field<T: Real>(f: &SpectralField<T>) -> Result<Self, PhaseError> {
        let n_max = f.n_max();
        let mut out = Self::zeros(n_max);
        for n in -(n_max as i64)..=n_max as i64 {
            let z = f.coeff(n);
            let re = BigRational::from_f64(z.re.as_f64()).ok_or(PhaseError::NotRational { n })?;
            let im = BigRational::from_f64(z.im.as_f64()).ok_or(PhaseError::NotRational { n })?;
            out.set(n, Complex::new(re, im));
        }
        Ok(out)
    }

    /// A seeded Hermitian field whose coefficients have numerators in
    /// `[−1000, 1000]` and denominators in `1..=12`.
    pub fn random_hermitian(n_max: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let draw = |rng: &mut ChaCha8Rng| {
            BigRational::new(
                BigInt::from(rng.random_range(-1000i64..=1000)),
                BigInt::from(rng.random_range(1i64..=12)),
            )
        };
        let mut f = Self::zeros(n_max);
        let mean = draw(&mut rng);
        f.set(0, Complex::new(mean, BigRational::zero()));
        for n in 1..=n_max as i64 {
            let z = Complex::new(draw(&mut rng), draw(&mut rng));
            f.set(-n, z.conj());
            f.set(n, z);
        }
        f
    }

    /// Truncation radius `N`.
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// `f(n)`, zero outside the truncation.
    pub fn coeff(&self, n: i64) -> ExactComplex {
        if n.unsigned_abs() as usize > self.n_max {
            zero_c()
        } else {
            self.coeffs[(n + self.n_max as i64) as usize].clone()
        }
    }

    /// Sets `f(n)` for `|n| ≤ N`; other indices are ignored.
    pub fn set(&mut self, n: i64, value: ExactComplex) {
        if n.unsigned_abs() as usize <= self.n_max {
            let i = (n + self.n_max as i64) as usize;
            self.coeffs[i] = value;
        }
    }

    /// Whether `f(−n) = conj f(n)` for every `n`.
    pub fn is_hermitian(&self) -> bool {
        (0..=self.n_max as i64).all(|n| self.coeff(-n) == self.coeff(n).conj())
    }

    /// First `n ≥ 0` where Hermitian symmetry fails.
    pub fn hermitian_violation(&self) -> Option<i64> {
        (0..=self.n_max as i64).find(|&n| self.coeff(-n) != self.coeff(n).conj())
    }

    /// A copy with `delta` added to the single mode `n`, which breaks
    /// Hermitian symmetry unless `delta` is compensated at `−n`.
    pub fn perturbed(&self, n: i64, delta: ExactComplex) -> Self {
        let mut out = self.clone();
        let z = out.coeff(n) + delta;
        out.set(n, z);
        out
    }
}

/// `Σ w(t) f(t_1)…f(t_p)` for one field in every slot.
pub fn cancellation_sum(kind: CancellationKind, f: &RationalField) -> Result<ExactComplex, PhaseError> {
    let slots = vec![f; kind.arity()];
    cancellation_multilinear(kind, &slots)
}

/// The multilinear form with a separate field in each slot.
///
/// All fields must share one truncation radius.
pub fn cancellation_multilinear(kind: CancellationKind, slots: &[&RationalField]) -> Result<ExactComplex, PhaseError> {
    if slots.len() != kind.arity() {
        return Err(PhaseError::Arity {
            symbol: kind.name().to_string(),
            expected: kind.arity(),
            got: slots.len(),
        });
    }
    let n_max = slots[0].n_max;
    if let Some(s) = slots.iter().find(|s| s.n_max != n_max) {
        return Err(PhaseError::TruncationMismatch(n_max, s.n_max));
    }
    let scaled = Scaled::new(slots);
    let mut acc = Accumulator::default();
    let nm = n_max as i64;
    let nonzero = |x: i64| x != 0 && x.abs() <= nm;
    match kind {
        CancellationKind::InvN1N4 | CancellationKind::Affine | CancellationKind::A1A3 | CancellationKind::A2A3Sq => {
            for a in -nm..=nm {
                for b in -nm..=nm {
                    let c = -a - b;
                    if !(nonzero(a) && nonzero(b) && nonzero(c)) {
                        continue;
                    }
                    let (num, den) = match kind {
                        CancellationKind::InvN1N4 => (1, a * c),
                        CancellationKind::Affine => (3 * b + 6 * c, a * c),
                        CancellationKind::A1A3 => (2 * a + b, a * (a + b)),
                        _ => (a + b + c, a * (a + b)),
                    };
                    acc.add(num, den, &scaled, &[a, b, c]);
                }
            }
        }
        CancellationKind::OddParity => {
            for a in -nm..=nm {
                if a != 0 {
                    acc.add(odd_poly(a), 1, &scaled, &[a, -a]);
                }
            }
        }
        CancellationKind::HPairing => {
            let n = H_PAIRING_EXTERNAL_FREQUENCY;
            let radius = h_pairing_radius(n).min(nm);
            let ok = |x: i64| x != 0 && x.abs() <= radius;
            for n1 in -radius..=radius {
                for n2 in -radius..=radius {
                    for n4 in -radius..=radius {
                        let n5 = -n1 - n2 - n4;
                        let j = n4 + n5;
                        if !(ok(n1) && ok(n2) && ok(n4) && ok(n5)) || j == 0 {
                            continue;
                        }
                        acc.add(1, n1 * j * n4, &scaled, &[n1, n2, n4, n5]);
                    }
                }
            }
        }
    }
    Ok(acc.finish(&scaled.common_den, kind.arity()))
}

/// The control for [`CancellationKind`]: the multilinear form with the
/// first slot replaced by `f` perturbed by `delta` on mode `n`, the other
/// slots keeping `f`.
///
/// The cancellations come from slot permutations that preserve the weight
/// up to sign, so breaking the equality of the slots breaks them. Breaking
/// only the Hermitian symmetry of a field used in every slot does not.
pub fn slot_broken_control(
    kind: CancellationKind,
    f: &RationalField,
    n: i64,
    delta: ExactComplex,
) -> Result<ExactComplex, PhaseError> {
    let g = f.perturbed(n, delta);
    let mut slots = vec![f; kind.arity()];
    slots[0] = &g;
    cancellation_multilinear(kind, &slots)
}

/// `p(x) = x^5 − 3x^3 + 2x`.
fn odd_poly(x: i64) -> i64 {
    x.pow(5) - 3 * x.pow(3) + 2 * x
}

/// Largest `m` with `n^4 ≥ 8^4·m^5`.
pub fn h_pairing_radius(n: i64) -> i64 {
    let n4 = (n as i128).pow(4);
    let s4 = (H_PAIRING_SEPARATION as i128).pow(4);
    let mut m = 0i64;
    while s4 * ((m + 1) as i128).pow(5) <= n4 {
        m += 1;
    }
    m
}

/// Slot fields rescaled to Gaussian integers by a common denominator.
struct Scaled {
    n_max: i64,
    common_den: BigInt,
    big: Vec<Vec<(BigInt, BigInt)>>,
    small: Option<Vec<Vec<(i128, i128)>>>,
}

impl Scaled {
    fn new(slots: &[&RationalField]) -> Self {
        let mut common_den = BigInt::one();
        for s in slots {
            for z in &s.coeffs {
                common_den = common_den.lcm(z.re.denom()).lcm(z.im.denom());
            }
        }
        let scale = |x: &BigRational| (x * &common_den).to_integer();
        let big: Vec<Vec<(BigInt, BigInt)>> = slots
            .iter()
            .map(|s| s.coeffs.iter().map(|z| (scale(&z.re), scale(&z.im))).collect())
            .collect();
        let small = big
            .iter()
            .map(|v| {
                v.iter()
                    .map(|(a, b)| Some((a.to_i128()?, b.to_i128()?)))
                    .collect::<Option<Vec<_>>>()
            })
            .collect::<Option<Vec<_>>>();
        Self {
            n_max: slots[0].n_max as i64,
            common_den,
            big,
            small,
        }
    }

    fn index(&self, n: i64) -> usize {
        (n + self.n_max) as usize
    }
}

#[derive(Default)]
struct Bucket {
    small: (i128, i128),
    big: (BigInt, BigInt),
}

impl Bucket {
    fn add_small(&mut self, re: i128, im: i128) {
        match (self.small.0.checked_add(re), self.small.1.checked_add(im)) {
            (Some(a), Some(b)) => self.small = (a, b),
            _ => self.add_big(BigInt::from(re), BigInt::from(im)),
        }
    }

    fn add_big(&mut self, re: BigInt, im: BigInt) {
        self.big.0 += re;
        self.big.1 += im;
    }

    fn total(self) -> (BigInt, BigInt) {
        (
            self.big.0 + BigInt::from(self.small.0),
            self.big.1 + BigInt::from(self.small.1),
        )
    }
}

/// Per-denominator sums of `num·Π g_i(t_i)`.
#[derive(Default)]
struct Accumulator {
    buckets: BTreeMap<i128, Bucket>,
}

fn cmul(a: (i128, i128), b: (i128, i128)) -> Option<(i128, i128)> {
    let re = a.0.checked_mul(b.0)?.checked_sub(a.1.checked_mul(b.1)?)?;
    let im = a.0.checked_mul(b.1)?.checked_add(a.1.checked_mul(b.0)?)?;
    Some((re, im))
}

fn cmul_big(a: &(BigInt, BigInt), b: &(BigInt, BigInt)) -> (BigInt, BigInt) {
    (&a.0 * &b.0 - &a.1 * &b.1, &a.0 * &b.1 + &a.1 * &b.0)
}

impl Accumulator {
    fn add(&mut self, num: i64, den: i64, s: &Scaled, t: &[i64]) {
        debug_assert!(den != 0);
        let (num, den) = if den < 0 { (-num, -den) } else { (num, den) };
        if num == 0 {
            return;
        }
        let bucket = self.buckets.entry(den as i128).or_default();
        let fast = s.small.as_ref().and_then(|small| {
            let mut p = (num as i128, 0i128);
            for (slot, &n) in t.iter().enumerate() {
                p = cmul(p, small[slot][s.index(n)])?;
            }
            Some(p)
        });
        match fast {
            Some((re, im)) => bucket.add_small(re, im),
            None => {
                let mut p = (BigInt::from(num), BigInt::zero());
                for (slot, &n) in t.iter().enumerate() {
                    p = cmul_big(&p, &s.big[slot][s.index(n)]);
                }
                bucket.add_big(p.0, p.1);
            }
        }
    }

    fn finish(self, common_den: &BigInt, arity: usize) -> ExactComplex {
        let scale = common_den.pow(arity as u32);
        let mut re = BigRational::zero();
        let mut im = BigRational::zero();
        for (den, bucket) in self.buckets {
            let (a, b) = bucket.total();
            let d = BigInt::from(den) * &scale;
            re += BigRational::new(a, d.clone());
            im += BigRational::new(b, d);
        }
        Complex::new(re, im)
    }
}

/// Whether an exact complex value is zero.
pub fn is_exact_zero(z: &ExactComplex) -> bool {
    z.re.is_zero() && z.im.is_zero()
}

/// Magnitude of an exact complex value as a float, for reporting.
pub fn exact_abs_f64(z: &ExactComplex) -> f64 {
    let re = z.re.to_f64().unwrap_or(f64::INFINITY);
    let im = z.im.to_f64().unwrap_or(f64::INFINITY);
    re.hypot(im).abs()
}
