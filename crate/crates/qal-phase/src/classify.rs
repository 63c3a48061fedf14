//! Resonance classification and the large-phase property `P_k`.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::PhaseError;
use crate::phase::phi_raw;
use crate::tuple::FreqTuple;

/// Threshold `c` of the large-phase property `|Φ_k| ≥ c·max|n_i|^4`.
///
/// The decomposition constants are free; one value is fixed here and used
/// by every indicator so sweeps are reproducible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseThreshold {
    /// Numerator of `c`.
    pub num: u64,
    /// Denominator of `c`.
    pub den: u64,
}

impl PhaseThreshold {
    /// The threshold `c = num/den`.
    pub const fn new(num: u64, den: u64) -> Self {
        Self { num, den }
    }

    /// `c` as an exact rational.
    pub fn as_rational(&self) -> BigRational {
        BigRational::new(BigInt::from(self.num), BigInt::from(self.den))
    }

    /// Whether `|phase| ≥ c·max_abs^4`.
    pub fn admits(&self, phase: &BigInt, max_abs: u64) -> bool {
        let lhs = magnitude(phase) * BigInt::from(self.den);
        let m = BigInt::from(max_abs);
        let m2 = &m * &m;
        lhs >= BigInt::from(self.num) * &m2 * &m2
    }
}

impl Default for PhaseThreshold {
    fn default() -> Self {
        DEFAULT_THRESHOLD
    }
}

/// Project-wide large-phase threshold `c = 1`.
pub const DEFAULT_THRESHOLD: PhaseThreshold = PhaseThreshold::new(1, 1);

/// Separation factor standing in for `≫` in resonant-approximation domains.
pub const SEPARATION: i64 = 8;

fn magnitude(x: &BigInt) -> BigInt {
    if x.sign() == num_bigint::Sign::Minus {
        -x
    } else {
        x.clone()
    }
}

/// The large-phase property `P_k(t)`: `|Φ_k(t)| ≥ c·max|t_i|^4`.
///
/// Entries may be zero (merged or tail frequencies). The all-zero tuple
/// fails the property since its phase vanishes.
pub fn large_phase(entries: &[i64], c: PhaseThreshold) -> bool {
    let max_abs = entries.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0);
    if max_abs == 0 {
        return false;
    }
    c.admits(&phi_raw(entries), max_abs)
}

/// The fixed disjoint decomposition of tuple space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ResonanceCase {
    /// Some `n_i = n`; `witness` is the smallest such 1-based index.
    Resonant { witness: usize },
    /// The two largest-magnitude entries cancel (only for `p ≥ 4`).
    PairCancellation,
    /// `|Φ_p| ≥ c·(n_1*)^4`.
    LargePhase,
    /// None of the above; several entries are comparable to the largest.
    MidCascade,
}

/// [`classify_with`] at the default threshold.
pub fn classify(t: &FreqTuple) -> Result<ResonanceCase, PhaseError> {
    classify_with(t, DEFAULT_THRESHOLD)
}

/// Returns the first matching case in the order Resonant, PairCancellation,
/// LargePhase, MidCascade. Requires `p ≥ 3`.
pub fn classify_with(t: &FreqTuple, c: PhaseThreshold) -> Result<ResonanceCase, PhaseError> {
    if t.len() < 3 {
        return Err(PhaseError::TooShort { min: 3, got: t.len() });
    }
    if let Some(&witness) = t.resonant_indices().first() {
        return Ok(ResonanceCase::Resonant { witness });
    }
    if t.len() >= 4 && t.has_top_pair_cancellation() {
        return Ok(ResonanceCase::PairCancellation);
    }
    if large_phase(t.entries(), c) {
        return Ok(ResonanceCase::LargePhase);
    }
    Ok(ResonanceCase::MidCascade)
}

/// The quantity that must stay bounded below on MidCascade tuples:
/// `n_3*/n_1*` for `p = 3` and `(n_3*)^4·n_4*/(n_1*)^4` for `p ≥ 4`.
pub fn cascade_ratio(t: &FreqTuple) -> BigRational {
    let top = BigInt::from(t.star(1));
    let third = BigInt::from(t.star(3));
    if t.len() == 3 {
        BigRational::new(third, top)
    } else {
        let fourth = BigInt::from(t.star(4));
        let t2 = &third * &third;
        let top2 = &top * &top;
        BigRational::new(&t2 * &t2 * fourth, &top2 * &top2)
    }
}
