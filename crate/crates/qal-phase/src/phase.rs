//! The phase function `Φ_p = (Σ n_i)^5 − Σ n_i^5` and its closed forms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::PhaseError;
use crate::tuple::{sorted_by_magnitude, FreqTuple};

/// Exact value of `Φ_p` on a tuple.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PhaseValue(pub BigInt);

impl PhaseValue {
    /// The underlying integer.
    pub fn value(&self) -> &BigInt {
        &self.0
    }

    /// `m^5 ≡ m (mod 30)` for every integer, so every phase is a multiple of 30.
    pub fn is_multiple_of_30(&self) -> bool {
        (&self.0 % BigInt::from(30)).is_zero()
    }
}

impl From<BigInt> for PhaseValue {
    fn from(v: BigInt) -> Self {
        Self(v)
    }
}

fn pow5(x: i64) -> BigInt {
    let b = BigInt::from(x);
    let sq = &b * &b;
    &sq * &sq * b
}

/// `Φ_p` on arbitrary integers, zero entries included. Used for merged
/// tuples and tail sums where a component may vanish.
pub fn phi_raw(entries: &[i64]) -> BigInt {
    if let Some(v) = phi_i128(entries) {
        return BigInt::from(v);
    }
    let n: i64 = entries.iter().sum();
    entries.iter().fold(pow5(n), |acc, &x| acc - pow5(x))
}

/// `Φ_p` in 128-bit arithmetic, or `None` on overflow.
pub fn phi_i128(entries: &[i64]) -> Option<i128> {
    let p5 = |x: i64| -> Option<i128> {
        let x = x as i128;
        let sq = x.checked_mul(x)?;
        sq.checked_mul(sq)?.checked_mul(x)
    };
    let n: i64 = entries.iter().try_fold(0i64, |a, &x| a.checked_add(x))?;
    entries.iter().try_fold(p5(n)?, |acc, &x| acc.checked_sub(p5(x)?))
}

/// `Φ_p(t)`.
pub fn phi(t: &FreqTuple) -> PhaseValue {
    PhaseValue(phi_raw(t.entries()))
}

/// Closed form `Φ_2(n_1, n_2) = (5/2)·n·n_1·n_2·(n² + n_1² + n_2²)`.
pub fn phi2_factored(n1: i64, n2: i64) -> BigInt {
    let (a, b) = (BigInt::from(n1), BigInt::from(n2));
    let n = &a + &b;
    let q = &n * &n + &a * &a + &b * &b;
    halve(BigInt::from(5) * n * a * b * q)
}

/// Closed form `Φ_3 = (5/2)(n_1+n_2)(n_2+n_3)(n_1+n_3)(n² + n_1² + n_2² + n_3²)`.
pub fn phi3_factored(n1: i64, n2: i64, n3: i64) -> BigInt {
    let (a, b, c) = (BigInt::from(n1), BigInt::from(n2), BigInt::from(n3));
    let n = &a + &b + &c;
    let q = &n * &n + &a * &a + &b * &b + &c * &c;
    halve(BigInt::from(5) * (&a + &b) * (&b + &c) * (&a + &c) * q)
}

fn halve(x: BigInt) -> BigInt {
    let (q, r) = x.div_rem(&BigInt::from(2));
    debug_assert!(r.is_zero(), "closed form must be even before halving");
    q
}

/// Tail sums `ñ_i = Σ_{j ≥ i} n_j` (1-based, so `ñ_1 = n`).
pub fn tail_sums(entries: &[i64]) -> Vec<i64> {
    let mut out = vec![0; entries.len()];
    let mut acc = 0;
    for i in (0..entries.len()).rev() {
        acc += entries[i];
        out[i] = acc;
    }
    out
}

/// Splits `Φ_p` as `Φ_3(n_1, n_2, ñ_3) + Σ_{j=3}^{p-1} Φ_2(n_j, ñ_{j+1})`
/// using the entries in the order given.
///
/// The identity holds for every ordering; the lower bounds built on it use
/// the decreasing-magnitude order, which [`telescope_decompose_sorted`]
/// applies first. Requires `p ≥ 4` and `ñ_3 ≠ 0`.
pub fn telescope_decompose(t: &FreqTuple) -> Result<Vec<PhaseValue>, PhaseError> {
    decompose_entries(t.entries())
}

/// [`telescope_decompose`] after reordering by decreasing magnitude.
pub fn telescope_decompose_sorted(t: &FreqTuple) -> Result<Vec<PhaseValue>, PhaseError> {
    decompose_entries(&sorted_by_magnitude(t.entries()))
}

fn decompose_entries(e: &[i64]) -> Result<Vec<PhaseValue>, PhaseError> {
    let p = e.len();
    if p < 4 {
        return Err(PhaseError::TooShort { min: 4, got: p });
    }
    let tails = tail_sums(e);
    if tails[2] == 0 {
        return Err(PhaseError::DegenerateTail {
            index: 3,
            tuple: e.to_vec(),
        });
    }
    let mut parts = Vec::with_capacity(p - 2);
    parts.push(PhaseValue(phi_raw(&[e[0], e[1], tails[2]])));
    for j in 2..p - 1 {
        parts.push(PhaseValue(phi_raw(&[e[j], tails[j + 1]])));
    }
    Ok(parts)
}
