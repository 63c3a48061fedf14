//! Integer frequency tuples.

use serde::{Deserialize, Serialize};

use crate::error::PhaseError;

/// A tuple `(n_1, …, n_p)` of nonzero integer frequencies.
///
/// The output frequency is `n = Σ n_i`. The decreasing rearrangement by
/// absolute value gives `n_1* ≥ n_2* ≥ …`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FreqTuple {
    entries: Vec<i64>,
}

impl FreqTuple {
    /// Validates that the tuple has at least two entries, all nonzero.
    pub fn new(entries: impl Into<Vec<i64>>) -> Result<Self, PhaseError> {
        let entries = entries.into();
        if entries.len() < 2 {
            return Err(PhaseError::TooShort {
                min: 2,
                got: entries.len(),
            });
        }
        if let Some(index) = entries.iter().position(|&x| x == 0) {
            return Err(PhaseError::ZeroEntry { index: index + 1 });
        }
        Ok(Self { entries })
    }

    /// The entries in their given order.
    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    /// Number of entries `p`.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// Always false: a valid tuple has at least two entries.
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Output frequency `n = Σ n_i`.
    pub fn total(&self) -> i64 {
        self.entries.iter().sum()
    }

    /// Entries reordered by decreasing absolute value (stable for ties).
    pub fn sorted_by_magnitude(&self) -> Vec<i64> {
        sorted_by_magnitude(&self.entries)
    }

    /// `n_i*`, the `i`-th largest absolute value (1-based).
    pub fn star(&self, i: usize) -> u64 {
        let mut mags: Vec<u64> = self.entries.iter().map(|x| x.unsigned_abs()).collect();
        mags.sort_unstable_by(|a, b| b.cmp(a));
        mags[i - 1]
    }

    /// 1-based indices `i` with `n_i = n`.
    pub fn resonant_indices(&self) -> Vec<usize> {
        let n = self.total();
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, &x)| x == n)
            .map(|(i, _)| i + 1)
            .collect()
    }

    /// Whether a largest-magnitude entry is cancelled by another entry.
    ///
    /// This is the condition `n_1* + n_2* = 0` with ties in the decreasing
    /// rearrangement broken in favour of a cancelling pair.
    pub fn has_top_pair_cancellation(&self) -> bool {
        top_pair_multiplicity(&self.entries) > 0
    }
}

/// Stable decreasing-magnitude rearrangement of arbitrary integers.
pub fn sorted_by_magnitude(entries: &[i64]) -> Vec<i64> {
    let mut out = entries.to_vec();
    out.sort_by_key(|a| std::cmp::Reverse(a.unsigned_abs()));
    out
}

/// Number of unordered index pairs `{i, j}` with `n_i + n_j = 0` and
/// `|n_i| = max_k |n_k|`.
pub fn top_pair_multiplicity(entries: &[i64]) -> usize {
    let top = entries.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0);
    if top == 0 {
        return 0;
    }
    let mut count = 0;
    for i in 0..entries.len() {
        for j in i + 1..entries.len() {
            if entries[i].unsigned_abs() == top && entries[i] + entries[j] == 0 {
                count += 1;
            }
        }
    }
    count
}
