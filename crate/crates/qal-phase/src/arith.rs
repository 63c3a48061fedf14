//! Exact integer arithmetic with a 128-bit fast path.
//!
//! Symbol formulas are written once against [`Ring`] and evaluated first in
//! checked `i128`; any overflow poisons the result and the caller retries in
//! `BigInt`.

use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

/// Integer arithmetic needed by the symbol formulas.
pub(crate) trait Ring:
    Clone + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn int(x: i64) -> Self;
    /// `None` when the value is not representable (overflowed fast path).
    fn is_zero_checked(&self) -> Option<bool>;
    /// `Some(|self| ≥ |other|)` when both values are representable.
    fn abs_ge(&self, other: &Self) -> Option<bool>;
    fn into_big(self) -> Option<BigInt>;
}

/// Checked `i128` whose overflow state propagates through every operation.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Ck(pub Option<i128>);

impl Add for Ck {
    type Output = Ck;
    fn add(self, o: Ck) -> Ck {
        Ck(self.0.zip(o.0).and_then(|(a, b)| a.checked_add(b)))
    }
}

impl Sub for Ck {
    type Output = Ck;
    fn sub(self, o: Ck) -> Ck {
        Ck(self.0.zip(o.0).and_then(|(a, b)| a.checked_sub(b)))
    }
}

impl Mul for Ck {
    type Output = Ck;
    fn mul(self, o: Ck) -> Ck {
        Ck(self.0.zip(o.0).and_then(|(a, b)| a.checked_mul(b)))
    }
}

impl Neg for Ck {
    type Output = Ck;
    fn neg(self) -> Ck {
        Ck(self.0.and_then(i128::checked_neg))
    }
}

impl Ring for Ck {
    fn int(x: i64) -> Self {
        Ck(Some(x as i128))
    }
    fn is_zero_checked(&self) -> Option<bool> {
        self.0.map(|v| v == 0)
    }
    fn abs_ge(&self, other: &Self) -> Option<bool> {
        let (a, b) = self.0.zip(other.0)?;
        Some(a.unsigned_abs() >= b.unsigned_abs())
    }
    fn into_big(self) -> Option<BigInt> {
        self.0.map(BigInt::from)
    }
}

impl Ring for BigInt {
    fn int(x: i64) -> Self {
        BigInt::from(x)
    }
    fn is_zero_checked(&self) -> Option<bool> {
        Some(self.is_zero())
    }
    fn abs_ge(&self, other: &Self) -> Option<bool> {
        Some(self.abs() >= other.abs())
    }
    fn into_big(self) -> Option<BigInt> {
        Some(self)
    }
}

/// `(Σ t)^5 − Σ t^5` in the ring.
pub(crate) fn phi_r<R: Ring>(t: &[R]) -> R {
    let p5 = |x: &R| {
        let sq = x.clone() * x.clone();
        sq.clone() * sq * x.clone()
    };
    let n = t.iter().cloned().fold(R::int(0), |a, b| a + b);
    t.iter().fold(p5(&n), |acc, x| acc - p5(x))
}

/// `x² + y²`.
pub(crate) fn sq_sum<R: Ring>(x: &R, y: &R) -> R {
    x.clone() * x.clone() + y.clone() * y.clone()
}
