//! Exact pointwise identities and seeded bulk checks.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::PhaseError;
use crate::phase::{phi2_factored, phi3_factored, phi_raw, telescope_decompose_sorted};
use crate::tuple::FreqTuple;

fn frac(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// The two forms of the resonant multiplier bracket.
///
/// Returns `(lhs, rhs)` with
/// `lhs = (n_3² + (n+n_3)²)(n² + n_3²) / (n_3 (n² + n_3² + (n+n_3)²))` and
/// `rhs = (n²+n_3²)/n_3 − n²/(2n_3) + n/2 − (n²n_3 + n n_3²)/(n² + (n+n_3)² + n_3²)`.
/// Requires `n ≠ 0`, `n_3 ≠ 0` and `n + n_3 ≠ 0`.
pub fn verify_resonant_reduction(n: i64, n3: i64) -> Result<(BigRational, BigRational), PhaseError> {
    if n == 0 || n3 == 0 || n + n3 == 0 {
        return Err(PhaseError::IdentityDomain(format!(
            "resonant reduction needs n, n3, n+n3 nonzero (n = {n}, n3 = {n3})"
        )));
    }
    let s = n + n3;
    let quad = n * n + n3 * n3 + s * s;
    let lhs = BigRational::new(
        BigInt::from(n3 * n3 + s * s) * BigInt::from(n * n + n3 * n3),
        BigInt::from(n3) * BigInt::from(quad),
    );
    let rhs = frac(n * n + n3 * n3, n3) - frac(n * n, 2 * n3) + frac(n, 2) - frac(n * n * n3 + n * n3 * n3, quad);
    Ok((lhs, rhs))
}

/// The `±n_3` combination of the single-resonance terms.
///
/// Returns `(lhs, rhs)` with `lhs = n²n_3/Q_+ − n²n_3/Q_−` and
/// `rhs = −4n³n_3²/(Q_+ Q_−)`, where `Q_± = n² + (n ± n_3)² + n_3²`.
/// Requires `n_3 ≠ 0`.
pub fn verify_re1_combination(n: i64, n3: i64) -> Result<(BigRational, BigRational), PhaseError> {
    if n3 == 0 {
        return Err(PhaseError::IdentityDomain("frequency n3 must be nonzero".to_string()));
    }
    let qp = n * n + (n + n3) * (n + n3) + n3 * n3;
    let qm = n * n + (n - n3) * (n - n3) + n3 * n3;
    let lhs = frac(n * n * n3, qp) - frac(n * n * n3, qm);
    let rhs = BigRational::new(
        BigInt::from(-4) * BigInt::from(n).pow(3) * BigInt::from(n3 * n3),
        BigInt::from(qp) * BigInt::from(qm),
    );
    Ok((lhs, rhs))
}

/// Outcome of one bulk identity check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityReport {
    /// Name of the identity.
    pub identity: String,
    /// Number of cases evaluated.
    pub checked: u64,
    /// Number of cases where the two sides differ.
    pub failures: u64,
    /// Seed of the sample, absent for exhaustive checks.
    pub seed: Option<u64>,
    /// First failing input, if any.
    pub first_failure: Option<Vec<i64>>,
}

impl IdentityReport {
    fn new(identity: &str, seed: Option<u64>) -> Self {
        Self {
            identity: identity.to_string(),
            checked: 0,
            failures: 0,
            seed,
            first_failure: None,
        }
    }

    fn record(&mut self, ok: bool, input: &[i64]) {
        self.checked += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(input.to_vec());
            }
        }
    }

    /// Whether every case held.
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.checked > 0
    }
}

/// Checks both closed forms of `Φ_2` and `Φ_3` against the power sums on
/// every pair and triple with entries in `[−bound, bound]`.
pub fn check_factorizations(bound: i64) -> Vec<IdentityReport> {
    let mut two = IdentityReport::new("phi2_factorization", None);
    let mut three = IdentityReport::new("phi3_factorization", None);
    for a in -bound..=bound {
        for b in -bound..=bound {
            two.record(phi_raw(&[a, b]) == phi2_factored(a, b), &[a, b]);
            for c in -bound..=bound {
                three.record(phi_raw(&[a, b, c]) == phi3_factored(a, b, c), &[a, b, c]);
            }
        }
    }
    vec![two, three]
}

/// Checks that the sorted telescoping parts sum to `Φ_p` on `samples`
/// seeded tuples of length `p` with nonzero entries in `[−bound, bound]`.
///
/// Tuples whose sorted third tail sum vanishes are redrawn.
pub fn check_telescoping(p: usize, samples: u64, bound: i64, seed: u64) -> IdentityReport {
    let mut report = IdentityReport::new(&format!("telescoping_p{p}"), Some(seed));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while report.checked < samples {
        let entries: Vec<i64> = (0..p).map(|_| nonzero(&mut rng, bound)).collect();
        let t = FreqTuple::new(entries.clone()).expect("entries are nonzero");
        let parts = match telescope_decompose_sorted(&t) {
            Ok(parts) => parts,
            Err(PhaseError::DegenerateTail { .. }) => continue,
            Err(e) => panic!("unexpected telescoping failure: {e}"),
        };
        let total = parts.iter().fold(BigInt::from(0), |acc, v| acc + &v.0);
        report.record(total == phi_raw(&entries), &entries);
    }
    report
}

/// Checks [`verify_resonant_reduction`] on `samples` seeded pairs with
/// `|n|, |n_3| ≤ bound`, redrawing pairs outside the domain.
pub fn check_resonant_reduction(samples: u64, bound: i64, seed: u64) -> IdentityReport {
    check_pairs("resonant_reduction", samples, bound, seed, verify_resonant_reduction)
}

/// Checks [`verify_re1_combination`] on `samples` seeded pairs with
/// `|n|, |n_3| ≤ bound`, redrawing pairs outside the domain.
pub fn check_re1_combination(samples: u64, bound: i64, seed: u64) -> IdentityReport {
    check_pairs("re1_combination", samples, bound, seed, verify_re1_combination)
}

type PairIdentity = fn(i64, i64) -> Result<(BigRational, BigRational), PhaseError>;

fn check_pairs(name: &str, samples: u64, bound: i64, seed: u64, f: PairIdentity) -> IdentityReport {
    let mut report = IdentityReport::new(name, Some(seed));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while report.checked < samples {
        let n = rng.random_range(-bound..=bound);
        let n3 = rng.random_range(-bound..=bound);
        if let Ok((lhs, rhs)) = f(n, n3) {
            report.record(lhs == rhs, &[n, n3]);
        }
    }
    report
}

fn nonzero(rng: &mut ChaCha8Rng, bound: i64) -> i64 {
    loop {
        let x = rng.random_range(-bound..=bound);
        if x != 0 {
            return x;
        }
    }
}
