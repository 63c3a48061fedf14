//! Dyadic-shell sweeps of `|symbol| / bound` over admissible tuples.
//!
//! For each bound the admissible tuples of a shell `2^k ≤ n_1* < 2^{k+1}`
//! are either enumerated or sampled uniformly, and the exact maximum ratio
//! is recorded with a witness tuple. Sampling draws from a structured
//! superset and rejects; the superset is chosen so that every admissible
//! tuple has exactly one representation, which keeps the draw uniform.
//!
//! Work is split into fixed chunks, each with its own named random stream,
//! and chunk maxima are merged in chunk order. Results therefore do not
//! depend on the number of threads.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use qal_spectral::stream_rng;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cancellation::h_pairing_radius;
use crate::classify::{PhaseThreshold, DEFAULT_THRESHOLD, SEPARATION};
use crate::error::PhaseError;
use crate::symbols::{eval_raw, RawSymbol, SymbolId};

/// The bounds that can be swept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundId {
    /// `|m_D1| ≤ C·max(n_1², n_2²)/max(|n_1+n_2|, |n_3|, |n_4|)²` on
    /// nonresonant tuples.
    NonresonantD1,
    /// `|m_D2| ≤ C·max(n_3², n_4²)/(|n_1|·max(|n_1|, |n_2|, |n_3+n_4|))` on
    /// nonresonant tuples.
    NonresonantD2,
    /// `|m_A1| ≤ C·n_2*/|n|` on `n_1 = n`, `|n| ≥ 8·n_2*`.
    ResonantA1,
    /// `|m_B3 + Ψ| ≤ C·max(n_2², n_4²)/|n|` on `n_3 = n`, `|n| ≥ 8·n_2*`,
    /// with `Ψ = (n + 3n_2 + 6n_4)/(25 n_1 n_4)` as displayed.
    ResonantB3,
    /// The same bound with the affine part of `Ψ` taken from the exact
    /// expansion of `m_B3`: `(n + n_2 + 2n_4)/(25 n_1 n_4)`.
    ResonantB3Expanded,
    /// `|m_D1| ≤ C` on pair-cancellation tuples.
    PairCancelD1,
    /// `|m_D2| ≤ C·n_2*` on pair-cancellation tuples.
    PairCancelD2,
    /// `|m_A^ℓ − 1/H_{ℓ,j}| ≤ C·n_2*/|n|` on `n_{ℓ+j−1} = n`,
    /// `|n| ≥ 8·(n_2*)^{5/4}`, as displayed.
    FinalResonance { l: u8, j: u8 },
    /// `|m_A^ℓ + n^12/Hm_{ℓ,j}| ≤ C·n_2*/|n|` on the same domain, where
    /// `Hm` takes its last factor from the merged pair (see
    /// [`SymbolId::HMerged`]). This is the leading term of the exact
    /// expansion of `m_A^ℓ` in `n`.
    FinalResonanceExpanded { l: u8, j: u8 },
    /// `|m_A^ℓ| ≤ C·n_2*/|n|` for `ℓ ∈ {1, 2}` on the same domain.
    FinalResonanceLow { l: u8, j: u8 },
}

impl BoundId {
    /// The bounds whose shell maxima are expected to saturate.
    pub fn criterion_bounds() -> Vec<BoundId> {
        let mut v = vec![
            BoundId::NonresonantD1,
            BoundId::NonresonantD2,
            BoundId::ResonantB3,
            BoundId::PairCancelD1,
            BoundId::PairCancelD2,
        ];
        for (l, j) in [(3, 1), (3, 2), (4, 1), (4, 2)] {
            v.push(BoundId::FinalResonance { l, j });
        }
        v
    }

    /// Every sweepable bound.
    pub fn all() -> Vec<BoundId> {
        let mut v = vec![
            BoundId::NonresonantD1,
            BoundId::NonresonantD2,
            BoundId::ResonantA1,
            BoundId::ResonantB3,
            BoundId::ResonantB3Expanded,
            BoundId::PairCancelD1,
            BoundId::PairCancelD2,
        ];
        for (l, j) in [(3, 1), (3, 2), (4, 1), (4, 2)] {
            v.push(BoundId::FinalResonance { l, j });
            v.push(BoundId::FinalResonanceExpanded { l, j });
        }
        for (l, j) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
            v.push(BoundId::FinalResonanceLow { l, j });
        }
        v
    }

    fn space(&self, lo: i64, hi: i64) -> Space {
        match *self {
            BoundId::NonresonantD1 | BoundId::NonresonantD2 => Space::Box { p: 4, lo, hi },
            BoundId::ResonantA1 => Space::Anchored {
                p: 4,
                pos: 0,
                lo,
                hi,
                radius: Radius::Linear,
            },
            BoundId::ResonantB3 | BoundId::ResonantB3Expanded => Space::Anchored {
                p: 4,
                pos: 2,
                lo,
                hi,
                radius: Radius::Linear,
            },
            BoundId::PairCancelD1 | BoundId::PairCancelD2 => Space::Pair { lo, hi },
            BoundId::FinalResonance { l, j }
            | BoundId::FinalResonanceExpanded { l, j }
            | BoundId::FinalResonanceLow { l, j } => Space::Anchored {
                p: 5,
                pos: (l + j - 2) as usize,
                lo,
                hi,
                radius: Radius::FourFifths,
            },
        }
    }
}

impl fmt::Display for BoundId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundId::NonresonantD1 => write!(f, "nonresonant_d1"),
            BoundId::NonresonantD2 => write!(f, "nonresonant_d2"),
            BoundId::ResonantA1 => write!(f, "resonant_a1"),
            BoundId::ResonantB3 => write!(f, "resonant_b3"),
            BoundId::ResonantB3Expanded => write!(f, "resonant_b3_expanded"),
            BoundId::PairCancelD1 => write!(f, "pair_cancel_d1"),
            BoundId::PairCancelD2 => write!(f, "pair_cancel_d2"),
            BoundId::FinalResonance { l, j } => write!(f, "final_resonance_{l}_{j}"),
            BoundId::FinalResonanceExpanded { l, j } => write!(f, "final_resonance_expanded_{l}_{j}"),
            BoundId::FinalResonanceLow { l, j } => write!(f, "final_resonance_low_{l}_{j}"),
        }
    }
}

impl FromStr for BoundId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BoundId::all()
            .into_iter()
            .find(|b| b.to_string() == s)
            .ok_or_else(|| format!("unknown bound '{s}'"))
    }
}

/// Sweep parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    /// Root seed for the sampled shells.
    pub seed: u64,
    /// Admissible-tuple budget per shell; shells with at most this many
    /// admissible tuples are enumerated.
    pub budget: u64,
    /// Largest superset that may be enumerated to settle whether a shell
    /// fits in the budget.
    pub enumerate_cap: u64,
    /// Large-phase threshold for the symbol indicators.
    pub threshold: PhaseThreshold,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            budget: 1_000_000,
            enumerate_cap: 50_000_000,
            threshold: DEFAULT_THRESHOLD,
        }
    }
}

/// How a shell was covered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    /// Every admissible tuple was evaluated.
    Exhaustive,
    /// A seeded uniform sample of admissible tuples was evaluated, and
    /// each chunk maximum was then improved by a local ascent within the
    /// shell.
    Sampled,
}

/// Exact maximum over one frequency shell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShellReport {
    /// Smallest `n_1*` in the shell.
    pub lo: i64,
    /// Largest `n_1*` in the shell.
    pub hi: i64,
    /// Enumeration or sampling.
    pub mode: SweepMode,
    /// Size of the structured superset the shell was drawn from.
    pub superset_size: u64,
    /// Number of admissible tuples evaluated.
    pub evaluated: u64,
    /// Exact maximum ratio as `numerator/denominator`, absent if the shell
    /// has no admissible tuple.
    pub max_ratio: Option<String>,
    /// The maximum as a float.
    pub max_ratio_f64: Option<f64>,
    /// A tuple attaining the maximum.
    pub witness: Option<Vec<i64>>,
}

/// All shells of one bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundSweep {
    /// The bound swept.
    pub bound: String,
    /// Sweep parameters.
    pub config: SweepConfig,
    /// Shell reports by increasing `n_1*`.
    pub shells: Vec<ShellReport>,
}

impl BoundSweep {
    /// The report for the shell starting at `lo`.
    pub fn shell(&self, lo: i64) -> Option<&ShellReport> {
        self.shells.iter().find(|s| s.lo == lo)
    }
}

/// `|a − b| / max(a, b)` for two shell maxima, `None` if either is missing
/// or both vanish.
pub fn relative_spread(a: &ShellReport, b: &ShellReport) -> Option<f64> {
    let (x, y) = (a.max_ratio_f64?, b.max_ratio_f64?);
    let m = x.max(y);
    (m > 0.0).then(|| (x - y).abs() / m)
}

/// Sweeps every dyadic shell `2^k ≤ n_1* < 2^{k+1}` with `2^k ≤ m_max`.
pub fn bound_ratio_sweep(bound: BoundId, m_max: i64, cfg: &SweepConfig) -> Result<BoundSweep, PhaseError> {
    if m_max < 16 {
        return Err(PhaseError::Sweep(format!("M must be at least 16, got {m_max}")));
    }
    let mut shells = Vec::new();
    let mut lo = 1i64;
    while lo <= m_max {
        shells.push(sweep_range(bound, lo, 2 * lo - 1, cfg));
        lo *= 2;
    }
    Ok(BoundSweep {
        bound: bound.to_string(),
        config: *cfg,
        shells,
    })
}

/// Sweeps the single shell starting at `lo = 2^k`.
pub fn sweep_shell(bound: BoundId, k: u32, cfg: &SweepConfig) -> ShellReport {
    let lo = 1i64 << k;
    sweep_range(bound, lo, 2 * lo - 1, cfg)
}

/// Exhaustive maximum over all admissible tuples with `n_1* ≤ limit`.
pub fn exhaustive_max(bound: BoundId, limit: i64, cfg: &SweepConfig) -> ShellReport {
    let space = bound.space(1, limit);
    let best = enumerate(bound, &space, cfg.threshold);
    finish(1, limit, SweepMode::Exhaustive, space.superset_size(), best)
}

fn sweep_range(bound: BoundId, lo: i64, hi: i64, cfg: &SweepConfig) -> ShellReport {
    let space = bound.space(lo, hi);
    let size = space.superset_size();
    let exhaustive = if size <= cfg.budget {
        true
    } else if size <= cfg.enumerate_cap {
        let est = pilot_estimate(bound, &space, cfg, size);
        est <= cfg.budget as f64
    } else {
        false
    };
    if exhaustive {
        let best = enumerate(bound, &space, cfg.threshold);
        finish(lo, hi, SweepMode::Exhaustive, size, best)
    } else {
        let best = sample(bound, &space, cfg, lo);
        finish(lo, hi, SweepMode::Sampled, size, best)
    }
}

const PILOT_DRAWS: u64 = 20_000;
const CHUNK: u64 = 10_000;
const MAX_ATTEMPTS_PER_ADMISSIBLE: u64 = 1_000;

fn pilot_estimate(bound: BoundId, space: &Space, cfg: &SweepConfig, size: u64) -> f64 {
    let mut rng = stream_rng(cfg.seed, &format!("pilot/{bound}/{}", space.lo()));
    let hits = (0..PILOT_DRAWS)
        .filter(|_| {
            space
                .draw(&mut rng)
                .is_some_and(|t| evaluate(bound, &t, cfg.threshold).is_some())
        })
        .count();
    size as f64 * hits as f64 / PILOT_DRAWS as f64
}

fn sample(bound: BoundId, space: &Space, cfg: &SweepConfig, lo: i64) -> Best {
    let chunks = cfg.budget.div_ceil(CHUNK);
    let results: Vec<Best> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let want = CHUNK.min(cfg.budget - c * CHUNK);
            let mut rng = stream_rng(cfg.seed, &format!("sweep/{bound}/{lo}/{c}"));
            let mut best = Best::default();
            let mut attempts = 0u64;
            while best.count < want && attempts < want * MAX_ATTEMPTS_PER_ADMISSIBLE {
                attempts += 1;
                if let Some(t) = space.draw(&mut rng) {
                    if let Some(r) = evaluate(bound, &t, cfg.threshold) {
                        best.offer(r, &t);
                    }
                }
            }
            climb(bound, space, cfg.threshold, best)
        })
        .collect();
    results.into_iter().fold(Best::default(), Best::merge)
}

/// Steepest ascent over the unit neighbourhood `t + {−1, 0, 1}^p` inside
/// the shell, started from a chunk's sampled maximum. Sampled maxima of
/// thin extremal sets fluctuate between seeds; the climb moves each one to
/// a nearby local maximum so the shell estimate is stable. Climbed tuples
/// are not counted as evaluated samples.
fn climb(bound: BoundId, space: &Space, c: PhaseThreshold, mut best: Best) -> Best {
    const MAX_STEPS: usize = 10_000;
    let Some((mut current, mut at)) = best.max.clone() else {
        return best;
    };
    for _ in 0..MAX_STEPS {
        let mut step: Option<(Ratio, Vec<i64>)> = None;
        product_any(at.len(), -1, 1, |delta| {
            let t: Vec<i64> = at.iter().zip(delta).map(|(a, d)| a + d).collect();
            if t == at || !space.contains(&t) {
                return;
            }
            if let Some(r) = evaluate(bound, &t, c) {
                let target = step.as_ref().map_or(&current, |(s, _)| s);
                if r.exceeds(target) {
                    step = Some((r, t));
                }
            }
        });
        match step {
            Some((r, t)) => {
                current = r;
                at = t;
            }
            None => break,
        }
    }
    best.max = Some((current, at));
    best
}

fn enumerate(bound: BoundId, space: &Space, c: PhaseThreshold) -> Best {
    let outers = space.outer_values();
    let results: Vec<Best> = outers
        .into_par_iter()
        .map(|o| {
            let mut best = Best::default();
            space.for_each_with_outer(o, |t| {
                if let Some(r) = evaluate(bound, t, c) {
                    best.offer(r, t);
                }
            });
            best
        })
        .collect();
    results.into_iter().fold(Best::default(), Best::merge)
}

fn finish(lo: i64, hi: i64, mode: SweepMode, size: u64, best: Best) -> ShellReport {
    let max = best.max.as_ref().map(|(r, _)| r.to_rational());
    ShellReport {
        lo,
        hi,
        mode,
        superset_size: size,
        evaluated: best.count,
        max_ratio: max.as_ref().map(|r| r.to_string()),
        max_ratio_f64: max.as_ref().and_then(|r| r.to_f64()),
        witness: best.max.map(|(_, w)| w),
    }
}

/// Positive ratio `num/den` with a cached float approximation.
#[derive(Debug, Clone)]
struct Ratio {
    num: BigInt,
    den: BigInt,
    approx: f64,
}

impl Ratio {
    fn new(num: BigInt, den: BigInt) -> Self {
        let (num, den) = (num.abs(), den.abs());
        let approx = big_div_f64(&num, &den);
        Self { num, den, approx }
    }

    fn to_rational(&self) -> BigRational {
        BigRational::new(self.num.clone(), self.den.clone())
    }

    fn exceeds(&self, other: &Ratio) -> bool {
        let tol = 1e-9 * self.approx.max(other.approx);
        if self.approx > other.approx + tol {
            return true;
        }
        if self.approx < other.approx - tol {
            return false;
        }
        &self.num * &other.den > &other.num * &self.den
    }
}

fn big_div_f64(num: &BigInt, den: &BigInt) -> f64 {
    let shift = num.bits().max(den.bits()).saturating_sub(900);
    let n = (num >> shift).to_f64().unwrap_or(f64::INFINITY);
    let d = (den >> shift).to_f64().unwrap_or(f64::INFINITY);
    if d == 0.0 {
        f64::INFINITY
    } else {
        n / d
    }
}

#[derive(Debug, Default)]
struct Best {
    count: u64,
    max: Option<(Ratio, Vec<i64>)>,
}

impl Best {
    fn offer(&mut self, r: Ratio, t: &[i64]) {
        self.count += 1;
        let better = match &self.max {
            None => true,
            Some((m, _)) => r.exceeds(m),
        };
        if better {
            self.max = Some((r, t.to_vec()));
        }
    }

    fn merge(mut self, other: Best) -> Best {
        self.count += other.count;
        if let Some((r, w)) = other.max {
            let better = match &self.max {
                None => true,
                Some((m, _)) => r.exceeds(m),
            };
            if better {
                self.max = Some((r, w));
            }
        }
        self
    }
}

/// How far the non-anchored entries may reach for a given `|n|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Radius {
    /// `n_2* ≤ |n|/8`.
    Linear,
    /// `8^4·(n_2*)^5 ≤ n^4`.
    FourFifths,
}

impl Radius {
    fn of(&self, n: i64) -> i64 {
        match self {
            Radius::Linear => n.abs() / SEPARATION,
            Radius::FourFifths => h_pairing_radius(n.abs()),
        }
    }
}

/// Structured supersets of the admissible tuples of a shell.
#[derive(Debug, Clone, Copy)]
enum Space {
    /// Nonzero entries in `[−hi, hi]^p` with `max|t_i| ≥ lo`.
    Box { p: usize, lo: i64, hi: i64 },
    /// `t_pos = n` with `lo ≤ |n| ≤ hi` and the other entries nonzero,
    /// bounded by the radius of `n` and summing to zero. The last free
    /// entry is determined by the others.
    Anchored {
        p: usize,
        pos: usize,
        lo: i64,
        hi: i64,
        radius: Radius,
    },
    /// 4-tuples containing `m, −m` with `lo ≤ |m| ≤ hi` at the first
    /// cancelling top pair and two nonzero entries with magnitude `≤ |m|`.
    Pair { lo: i64, hi: i64 },
}

const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

impl Space {
    fn contains(&self, t: &[i64]) -> bool {
        match *self {
            Space::Box { p, lo, hi } => {
                t.len() == p && t.iter().all(|&x| x != 0 && x.abs() <= hi) && t.iter().any(|x| x.abs() >= lo)
            }
            Space::Anchored { p, pos, lo, hi, radius } => {
                let n = t[pos];
                if t.len() != p || n.abs() < lo || n.abs() > hi {
                    return false;
                }
                let l = radius.of(n);
                let others = t.iter().enumerate().filter(|&(i, _)| i != pos);
                t.iter().sum::<i64>() == n && others.clone().all(|(_, &x)| x != 0 && x.abs() <= l)
            }
            Space::Pair { lo, hi } => match first_top_pair(t) {
                Some((i, _)) => t.len() == 4 && t.iter().all(|&x| x != 0) && (lo..=hi).contains(&t[i].abs()),
                None => false,
            },
        }
    }

    fn lo(&self) -> i64 {
        match *self {
            Space::Box { lo, .. } | Space::Anchored { lo, .. } | Space::Pair { lo, .. } => lo,
        }
    }

    fn superset_size(&self) -> u64 {
        match *self {
            Space::Box { p, lo, hi } => {
                let all = (2 * hi as u64).pow(p as u32);
                let inner = (2 * (lo - 1) as u64).pow(p as u32);
                all - inner
            }
            Space::Anchored { p, lo, hi, radius, .. } => {
                let lmax = radius.of(hi) as u64;
                2 * (hi - lo + 1) as u64 * (2 * lmax + 1).pow(p as u32 - 2)
            }
            Space::Pair { lo, hi } => 6 * 2 * (hi - lo + 1) as u64 * (2 * hi as u64).pow(2),
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> Option<Vec<i64>> {
        match *self {
            Space::Box { p, lo, hi } => {
                let t: Vec<i64> = (0..p).map(|_| signed_nonzero(rng, hi)).collect();
                (t.iter().map(|x| x.abs()).max()? >= lo).then_some(t)
            }
            Space::Anchored { p, pos, lo, hi, radius } => {
                let n = signed_in(rng, lo, hi);
                let lmax = radius.of(hi);
                let free: Vec<i64> = (0..p - 2).map(|_| rng.random_range(-lmax..=lmax)).collect();
                anchored_tuple(n, &free, pos, radius.of(n))
            }
            Space::Pair { lo, hi } => {
                let (i, j) = PAIRS[rng.random_range(0..6)];
                let m = signed_in(rng, lo, hi);
                let o1 = signed_nonzero(rng, hi);
                let o2 = signed_nonzero(rng, hi);
                pair_tuple(i, j, m, o1, o2)
            }
        }
    }

    fn outer_values(&self) -> Vec<(i64, usize)> {
        match *self {
            Space::Box { hi, .. } => (-hi..=hi).filter(|&x| x != 0).map(|x| (x, 0)).collect(),
            Space::Anchored { lo, hi, .. } => (lo..=hi).flat_map(|x| [(-x, 0), (x, 0)]).collect(),
            Space::Pair { lo, hi } => (0..6)
                .flat_map(|k| (lo..=hi).flat_map(move |x| [(-x, k), (x, k)]))
                .collect(),
        }
    }

    fn for_each_with_outer(&self, (o, k): (i64, usize), mut f: impl FnMut(&[i64])) {
        match *self {
            Space::Box { p, lo, hi } => {
                let mut t = vec![0i64; p];
                t[0] = o;
                product_nonzero(p - 1, -hi, hi, |rest| {
                    t[1..].copy_from_slice(rest);
                    if t.iter().map(|x| x.abs()).max().unwrap_or(0) >= lo {
                        f(&t);
                    }
                });
            }
            Space::Anchored { p, pos, radius, .. } => {
                let l = radius.of(o);
                product_any(p - 2, -l, l, |free| {
                    if let Some(t) = anchored_tuple(o, free, pos, l) {
                        f(&t);
                    }
                });
            }
            Space::Pair { .. } => {
                let (i, j) = PAIRS[k];
                let m = o.abs();
                for o1 in (-m..=m).filter(|&x| x != 0) {
                    for o2 in (-m..=m).filter(|&x| x != 0) {
                        if let Some(t) = pair_tuple(i, j, o, o1, o2) {
                            f(&t);
                        }
                    }
                }
            }
        }
    }
}

fn signed_nonzero(rng: &mut ChaCha8Rng, hi: i64) -> i64 {
    let x = rng.random_range(1..=hi);
    if rng.random::<bool>() {
        x
    } else {
        -x
    }
}

fn signed_in(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> i64 {
    let x = rng.random_range(lo..=hi);
    if rng.random::<bool>() {
        x
    } else {
        -x
    }
}

fn anchored_tuple(n: i64, free: &[i64], pos: usize, l: i64) -> Option<Vec<i64>> {
    if free.iter().any(|&x| x == 0 || x.abs() > l) {
        return None;
    }
    let last = -free.iter().sum::<i64>();
    if last == 0 || last.abs() > l {
        return None;
    }
    let mut t = Vec::with_capacity(free.len() + 2);
    t.extend_from_slice(free);
    t.push(last);
    t.insert(pos, n);
    Some(t)
}

fn pair_tuple(i: usize, j: usize, m: i64, o1: i64, o2: i64) -> Option<Vec<i64>> {
    if o1.abs() > m.abs() || o2.abs() > m.abs() {
        return None;
    }
    let mut t = [0i64; 4];
    t[i] = m;
    t[j] = -m;
    let mut rest = [o1, o2].into_iter();
    for slot in t.iter_mut() {
        if *slot == 0 {
            *slot = rest.next()?;
        }
    }
    (first_top_pair(&t) == Some((i, j))).then(|| t.to_vec())
}

fn first_top_pair(t: &[i64]) -> Option<(usize, usize)> {
    let top = t.iter().map(|x| x.abs()).max()?;
    PAIRS
        .iter()
        .copied()
        .find(|&(i, j)| t[i].abs() == top && t[i] + t[j] == 0)
}

fn product_nonzero(k: usize, lo: i64, hi: i64, mut f: impl FnMut(&[i64])) {
    product_any(k, lo, hi, |v| {
        if v.iter().all(|&x| x != 0) {
            f(v);
        }
    });
}

fn product_any(k: usize, lo: i64, hi: i64, mut f: impl FnMut(&[i64])) {
    if k == 0 {
        f(&[]);
        return;
    }
    if lo > hi {
        return;
    }
    let mut v = vec![lo; k];
    loop {
        f(&v);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if v[i] < hi {
                v[i] += 1;
                for x in v.iter_mut().skip(i + 1) {
                    *x = lo;
                }
                break;
            }
        }
    }
}

fn raw(id: SymbolId, t: &[i64], c: PhaseThreshold) -> Option<RawSymbol> {
    eval_raw(id, t, c).ok().filter(|r| r.indicator_active)
}

fn big(x: i64) -> BigInt {
    BigInt::from(x)
}

fn n2_star(t: &[i64]) -> i64 {
    let mut m: Vec<i64> = t.iter().map(|x| x.abs()).collect();
    m.sort_unstable_by(|a, b| b.cmp(a));
    m[1]
}

/// `|value| / (bnum/bden)` for a symbol value `num/den`.
fn ratio_of(num: BigInt, den: BigInt, bnum: BigInt, bden: BigInt) -> Ratio {
    Ratio::new(num * bden, den * bnum)
}

/// The ratio for an admissible tuple, `None` outside the bound's domain.
fn evaluate(bound: BoundId, t: &[i64], c: PhaseThreshold) -> Option<Ratio> {
    let n: i64 = t.iter().sum();
    let resonant = t.contains(&n);
    match bound {
        BoundId::NonresonantD1 | BoundId::PairCancelD1 => {
            if resonant {
                return None;
            }
            let m = raw(SymbolId::MD1, t, c)?;
            if bound == BoundId::NonresonantD1 {
                let top = t[0].abs().max(t[1].abs());
                let low = (t[0] + t[1]).abs().max(t[2].abs()).max(t[3].abs());
                Some(ratio_of(m.num, m.den, big(top * top), big(low * low)))
            } else {
                Some(ratio_of(m.num, m.den, big(1), big(1)))
            }
        }
        BoundId::NonresonantD2 | BoundId::PairCancelD2 => {
            if resonant {
                return None;
            }
            let m = raw(SymbolId::MD2, t, c)?;
            if bound == BoundId::NonresonantD2 {
                let top = t[2].abs().max(t[3].abs());
                let low = t[0].abs().max(t[1].abs()).max((t[2] + t[3]).abs());
                Some(ratio_of(m.num, m.den, big(top * top), big(t[0].abs() * low)))
            } else {
                Some(ratio_of(m.num, m.den, big(n2_star(t)), big(1)))
            }
        }
        BoundId::ResonantA1 => {
            let m = raw(SymbolId::MA(1), t, c)?;
            Some(ratio_of(m.num, m.den, big(n2_star(t)), big(n.abs())))
        }
        BoundId::ResonantB3 | BoundId::ResonantB3Expanded => {
            let m = raw(SymbolId::MB(3), t, c)?;
            let (n1, n2, n4) = (t[0], t[1], t[3]);
            let affine = if bound == BoundId::ResonantB3 {
                n + 3 * n2 + 6 * n4
            } else {
                n + n2 + 2 * n4
            };
            let pden = big(25 * n1 * n4);
            let num = &m.num * &pden + big(affine) * &m.den;
            let den = m.den * pden;
            let top = n2.abs().max(n4.abs());
            Some(ratio_of(num, den, big(top * top), big(n.abs())))
        }
        BoundId::FinalResonance { l, j } | BoundId::FinalResonanceExpanded { l, j } => {
            let m = raw(SymbolId::MAl(l), t, c)?;
            let (hid, approx_num) = if matches!(bound, BoundId::FinalResonance { .. }) {
                (SymbolId::H { l, j }, big(1))
            } else {
                (SymbolId::HMerged { l, j }, -big(n).pow(12))
            };
            let h = eval_raw(hid, t, c).ok()?;
            if h.num.is_zero() {
                return None;
            }
            let num = &m.num * &h.num - approx_num * &m.den;
            let den = m.den * h.num;
            Some(ratio_of(num, den, big(n2_star(t)), big(n.abs())))
        }
        BoundId::FinalResonanceLow { l, .. } => {
            let m = raw(SymbolId::MAl(l), t, c)?;
            Some(ratio_of(m.num, m.den, big(n2_star(t)), big(n.abs())))
        }
    }
}
