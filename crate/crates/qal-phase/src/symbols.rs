//! Exact evaluation of the normal-form multipliers.
//!
//! Every symbol is a rational function of the frequencies, possibly times
//! characteristic functions of large-phase sets `P_k` or of a resonance
//! `n = n_i`. Indicators are evaluated first: an inactive indicator gives the
//! value 0 even where the rational part would be undefined. An active symbol
//! with a vanishing denominator is a [`PhaseError::Domain`].

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arith::{phi_r, sq_sum, Ck, Ring};
use crate::classify::{PhaseThreshold, DEFAULT_THRESHOLD};
use crate::error::PhaseError;
use crate::tuple::FreqTuple;

/// Identifier of a multiplier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SymbolId {
    /// `m_D1` on 4-tuples, with indicator `P_3(n_1+n_2, n_3, n_4)`.
    MD1,
    /// `m_D2` on 4-tuples, with indicator `P_3(n_1, n_2, n_3+n_4)`.
    MD2,
    /// `m_D1·χ_{n=n_i}` for `i ∈ {1, 2}`.
    MA(u8),
    /// `m_D2·χ_{n=n_i}` for `i ∈ {3, 4}`.
    MB(u8),
    /// `n(n_1²+n_2²)/Φ_2(n_1, n_2)` on pairs.
    MR1,
    /// The trilinear resonant multiplier on triples, with indicator `P_3`.
    MR2,
    /// `m_A^ℓ` on 5-tuples for `1 ≤ ℓ ≤ 4`: `m_D2` of the merged 4-tuple
    /// times `(n_ℓ+n_{ℓ+1})(n_ℓ²+n_{ℓ+1}²)/Φ_4(merged)`, with indicator
    /// `P_4(merged)`.
    MAl(u8),
    /// The resonant polynomial
    /// `H_{ℓ,j} = 125 n^12 (Σ_{r≥2, r≠k} n_r)(Σ_{r≥3, r≠k} n_r)(n_k+n_{k+1}−n)`
    /// with `k = ℓ+j−1`, for `ℓ ∈ {3, 4}` and `j ∈ {1, 2}`.
    H { l: u8, j: u8 },
    /// `H_{ℓ,j}` with its last factor replaced by `n_ℓ+n_{ℓ+1}−n`, the
    /// merged pair of `m_A^ℓ`. Agrees with `H_{ℓ,1}` and is defined for
    /// `(ℓ, j) = (4, 2)`.
    HMerged { l: u8, j: u8 },
    /// `Ψ = (n + 3n_2 + 6n_4)/(25 n_1 n_4)` on 4-tuples.
    Psi,
}

impl SymbolId {
    /// Every identifier with valid auxiliary indices.
    pub fn all() -> Vec<SymbolId> {
        let mut v = vec![
            SymbolId::MD1,
            SymbolId::MD2,
            SymbolId::MA(1),
            SymbolId::MA(2),
            SymbolId::MB(3),
            SymbolId::MB(4),
            SymbolId::MR1,
            SymbolId::MR2,
        ];
        v.extend((1..=4).map(SymbolId::MAl));
        for l in 3..=4 {
            for j in 1..=2 {
                v.push(SymbolId::H { l, j });
                v.push(SymbolId::HMerged { l, j });
            }
        }
        v.push(SymbolId::Psi);
        v
    }

    /// Number of frequencies the symbol takes.
    pub fn arity(&self) -> usize {
        match self {
            SymbolId::MR1 => 2,
            SymbolId::MR2 => 3,
            SymbolId::MD1 | SymbolId::MD2 | SymbolId::MA(_) | SymbolId::MB(_) | SymbolId::Psi => 4,
            SymbolId::MAl(_) | SymbolId::H { .. } | SymbolId::HMerged { .. } => 5,
        }
    }

    fn check_aux(&self) -> Result<(), String> {
        let ok = match *self {
            SymbolId::MA(i) => (1..=2).contains(&i),
            SymbolId::MB(i) => (3..=4).contains(&i),
            SymbolId::MAl(l) => (1..=4).contains(&l),
            SymbolId::H { l, j } | SymbolId::HMerged { l, j } => (3..=4).contains(&l) && (1..=2).contains(&j),
            _ => true,
        };
        if ok {
            Ok(())
        } else {
            Err(format!("auxiliary index out of range in {self}"))
        }
    }
}

impl fmt::Display for SymbolId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymbolId::MD1 => write!(f, "m_D1"),
            SymbolId::MD2 => write!(f, "m_D2"),
            SymbolId::MA(i) => write!(f, "m_A{i}"),
            SymbolId::MB(i) => write!(f, "m_B{i}"),
            SymbolId::MR1 => write!(f, "m_R1"),
            SymbolId::MR2 => write!(f, "m_R2"),
            SymbolId::MAl(l) => write!(f, "m_Al{l}"),
            SymbolId::H { l, j } => write!(f, "H_{l}_{j}"),
            SymbolId::HMerged { l, j } => write!(f, "Hm_{l}_{j}"),
            SymbolId::Psi => write!(f, "Psi"),
        }
    }
}

impl FromStr for SymbolId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SymbolId::all()
            .into_iter()
            .find(|id| id.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown symbol '{s}'"))
    }
}

/// An exact symbol value together with the state of its indicators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolValue {
    /// The exact rational value; zero when the indicator is inactive.
    pub value: BigRational,
    /// Conjunction of every attached characteristic function.
    pub indicator_active: bool,
}

/// An unreduced fraction `num/den` with `den ≠ 0`, for bulk sweeps where
/// normalising every value would dominate the cost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawSymbol {
    /// Numerator.
    pub num: BigInt,
    /// Nonzero denominator.
    pub den: BigInt,
    /// Conjunction of every attached characteristic function.
    pub indicator_active: bool,
}

impl RawSymbol {
    /// The reduced rational value.
    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.num.clone(), self.den.clone())
    }

    /// Floating-point approximation of `|num/den|`.
    pub fn abs_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        let n = self.num.to_f64().unwrap_or(f64::INFINITY).abs();
        let d = self.den.to_f64().unwrap_or(f64::INFINITY).abs();
        n / d
    }
}

/// [`eval_symbol_with`] at the default threshold.
pub fn eval_symbol(id: SymbolId, t: &FreqTuple) -> Result<SymbolValue, PhaseError> {
    eval_symbol_with(id, t, DEFAULT_THRESHOLD)
}

/// Evaluates a symbol exactly, with `P_k` indicators at threshold `c`.
pub fn eval_symbol_with(id: SymbolId, t: &FreqTuple, c: PhaseThreshold) -> Result<SymbolValue, PhaseError> {
    let raw = eval_raw(id, t.entries(), c)?;
    Ok(SymbolValue {
        value: raw.to_rational(),
        indicator_active: raw.indicator_active,
    })
}

/// Evaluates a symbol on raw integer entries without reducing the result.
///
/// Entries may be zero; symbols whose rational part then degenerates report
/// a domain error as usual.
pub fn eval_raw(id: SymbolId, e: &[i64], c: PhaseThreshold) -> Result<RawSymbol, PhaseError> {
    if e.len() != id.arity() {
        return Err(PhaseError::Arity {
            symbol: id.to_string(),
            expected: id.arity(),
            got: e.len(),
        });
    }
    id.check_aux().map_err(|reason| domain(id, e, reason))?;
    let out = match evaluate::<Ck>(id, e, c) {
        Some(out) => out,
        None => evaluate::<BigInt>(id, e, c).expect("big integers do not overflow"),
    };
    match out {
        Outcome::Inactive => Ok(RawSymbol {
            num: BigInt::zero(),
            den: BigInt::from(1),
            indicator_active: false,
        }),
        Outcome::Value { num, den } => Ok(RawSymbol {
            num,
            den,
            indicator_active: true,
        }),
        Outcome::Undefined(reason) => Err(domain(id, e, reason.to_string())),
    }
}

fn domain(id: SymbolId, e: &[i64], reason: String) -> PhaseError {
    PhaseError::Domain {
        symbol: id.to_string(),
        tuple: e.to_vec(),
        reason,
    }
}

enum Outcome {
    Inactive,
    Value { num: BigInt, den: BigInt },
    Undefined(&'static str),
}

/// Intermediate result in the evaluation ring.
enum Part<R> {
    Inactive,
    Frac(R, R),
    Undefined(&'static str),
}

fn evaluate<R: Ring>(id: SymbolId, e: &[i64], c: PhaseThreshold) -> Option<Outcome> {
    let part = symbol_part::<R>(id, e, c)?;
    Some(match part {
        Part::Inactive => Outcome::Inactive,
        Part::Undefined(r) => Outcome::Undefined(r),
        Part::Frac(num, den) => {
            if den.is_zero_checked()? {
                Outcome::Undefined("denominator vanishes")
            } else {
                Outcome::Value {
                    num: num.into_big()?,
                    den: den.into_big()?,
                }
            }
        }
    })
}

/// `P_k(t)` in the ring: `|Φ_k(t)|·den ≥ num·max|t_i|^4`.
fn large_phase_r<R: Ring>(t: &[R], raw: &[i64], c: PhaseThreshold) -> Option<bool> {
    let m = raw.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0);
    if m == 0 {
        return Some(false);
    }
    let lhs = phi_r(t) * R::int(c.den as i64);
    let mr = R::int(m as i64);
    let m2 = mr.clone() * mr;
    let rhs = R::int(c.num as i64) * m2.clone() * m2;
    lhs.abs_ge(&rhs)
}

fn lift<R: Ring>(e: &[i64]) -> Vec<R> {
    e.iter().map(|&x| R::int(x)).collect()
}

fn sum_r<R: Ring>(t: &[R]) -> R {
    t.iter().cloned().fold(R::int(0), |a, b| a + b)
}

fn md1<R: Ring>(e: &[i64], c: PhaseThreshold) -> Option<Part<R>> {
    let a_raw = e[0] + e[1];
    if !large_phase_r(&lift::<R>(&[a_raw, e[2], e[3]]), &[a_raw, e[2], e[3]], c)? {
        return Some(Part::Inactive);
    }
    let t = lift::<R>(e);
    let n = sum_r(&t);
    let a = t[0].clone() + t[1].clone();
    let b = t[2].clone() + t[3].clone();
    let num = n * sq_sum(&a, &b) * b.clone() * sq_sum(&t[2], &t[3]) * a.clone() * sq_sum(&t[0], &t[1]);
    let den = phi_r(&[a.clone(), b]) * phi_r(&[a, t[2].clone(), t[3].clone()]);
    Some(Part::Frac(num, den))
}

fn md2<R: Ring>(e: &[i64], c: PhaseThreshold) -> Option<Part<R>> {
    let c_raw = e[2] + e[3];
    if !large_phase_r(&lift::<R>(&[e[0], e[1], c_raw]), &[e[0], e[1], c_raw], c)? {
        return Some(Part::Inactive);
    }
    let t = lift::<R>(e);
    let n = sum_r(&t);
    let cc = t[2].clone() + t[3].clone();
    let r = t[1].clone() + cc.clone();
    let num = n * sq_sum(&t[0], &r) * r.clone() * sq_sum(&t[1], &cc) * cc.clone() * sq_sum(&t[2], &t[3]);
    let den = phi_r(&[t[0].clone(), r]) * phi_r(&[t[0].clone(), t[1].clone(), cc]);
    Some(Part::Frac(num, den))
}

fn mr1<R: Ring>(e: &[i64]) -> Part<R> {
    let t = lift::<R>(e);
    let n = sum_r(&t);
    Part::Frac(n * sq_sum(&t[0], &t[1]), phi_r(&t))
}

fn mr2<R: Ring>(e: &[i64], c: PhaseThreshold) -> Option<Part<R>> {
    let t = lift::<R>(e);
    if !large_phase_r(&t, e, c)? {
        return Some(Part::Inactive);
    }
    let n = sum_r(&t);
    let s = t[1].clone() + t[2].clone();
    let num = n * sq_sum(&t[0], &s) * s.clone() * sq_sum(&t[1], &t[2]);
    let den = phi_r(&[t[0].clone(), s]) * phi_r(&t);
    Some(Part::Frac(num, den))
}

fn merged(e: &[i64], l: usize) -> Vec<i64> {
    let mut m = Vec::with_capacity(e.len() - 1);
    m.extend_from_slice(&e[..l - 1]);
    m.push(e[l - 1] + e[l]);
    m.extend_from_slice(&e[l + 1..]);
    m
}

fn mal<R: Ring>(e: &[i64], l: usize, c: PhaseThreshold) -> Option<Part<R>> {
    let m = merged(e, l);
    if m.contains(&0) {
        return Some(Part::Undefined("merged frequency vanishes"));
    }
    let mr = lift::<R>(&m);
    if !large_phase_r(&mr, &m, c)? {
        return Some(Part::Inactive);
    }
    let (num, den) = match md2::<R>(&m, c)? {
        Part::Frac(num, den) => (num, den),
        other => return Some(other),
    };
    let a = R::int(e[l - 1]);
    let b = R::int(e[l]);
    let factor = (a.clone() + b.clone()) * sq_sum(&a, &b);
    Some(Part::Frac(num * factor, den * phi_r(&mr)))
}

fn h_poly<R: Ring>(e: &[i64], l: usize, j: usize, merged_factor: bool) -> Part<R> {
    let k = l + j - 1;
    let last = if merged_factor { l } else { k };
    if last + 1 > e.len() {
        return Part::Undefined("index n_{k+1} beyond the tuple");
    }
    let t = lift::<R>(e);
    let n = sum_r(&t);
    let s1 = (2..=5)
        .filter(|&r| r != k)
        .fold(R::int(0), |acc, r| acc + t[r - 1].clone());
    let s2 = (3..=5)
        .filter(|&r| r != k)
        .fold(R::int(0), |acc, r| acc + t[r - 1].clone());
    let third = t[last - 1].clone() + t[last].clone() - n.clone();
    let n2 = n.clone() * n;
    let n4 = n2.clone() * n2;
    let n12 = n4.clone() * n4.clone() * n4;
    Part::Frac(R::int(125) * n12 * s1 * s2 * third, R::int(1))
}

fn symbol_part<R: Ring>(id: SymbolId, e: &[i64], c: PhaseThreshold) -> Option<Part<R>> {
    let n: i64 = e.iter().sum();
    match id {
        SymbolId::MD1 => md1(e, c),
        SymbolId::MD2 => md2(e, c),
        SymbolId::MA(i) => {
            if e[i as usize - 1] != n {
                Some(Part::Inactive)
            } else {
                md1(e, c)
            }
        }
        SymbolId::MB(i) => {
            if e[i as usize - 1] != n {
                Some(Part::Inactive)
            } else {
                md2(e, c)
            }
        }
        SymbolId::MR1 => Some(mr1(e)),
        SymbolId::MR2 => mr2(e, c),
        SymbolId::MAl(l) => mal(e, l as usize, c),
        SymbolId::H { l, j } => Some(h_poly(e, l as usize, j as usize, false)),
        SymbolId::HMerged { l, j } => Some(h_poly(e, l as usize, j as usize, true)),
        SymbolId::Psi => {
            let t = lift::<R>(e);
            let num = R::int(n) + R::int(3) * t[1].clone() + R::int(6) * t[3].clone();
            let den = R::int(25) * t[0].clone() * t[3].clone();
            Some(Part::Frac(num, den))
        }
    }
}
