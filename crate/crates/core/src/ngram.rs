//! Gliding n-gram counting, block entropies, and Zipf-like rank tables.
//!
//! A length-N segment yields K = N - n + 1 overlapping n-grams (stride 1).
//! The block entropy is the plug-in Shannon entropy of the empirical n-gram
//! distribution in natural log units, computed per 1000-word segment and
//! averaged. Rank tables are built from full-corpus gliding counts.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::numeric::{from_count, CompensatedSum, Real};
use crate::stats::SegmentView;
use crate::tokenize::WordLengthSeries;

/// An n-gram of word lengths. Inline up to n = 4; counting is exact for any
/// order and any length values.
pub type Gram = SmallVec<[u32; 4]>;

/// Counts and total of the unique n-grams observed in one gliding pass.
#[derive(Debug, Clone)]
pub struct FrequencyTable {
    n: usize,
    counts: HashMap<Gram, u64>,
    total: u64,
}

impl FrequencyTable {
    /// Gram order n.
    pub fn order(&self) -> usize {
        self.n
    }

    /// Total number of n-grams counted (K, summed over passes).
    pub fn total(&self) -> u64 {
        self.total
    }

    /// Number of distinct n-grams observed.
    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    pub fn count(&self, gram: &[u32]) -> u64 {
        self.counts.get(gram).copied().unwrap_or(0)
    }

    /// Probability of a gram: `count / total` exactly; `None` if unobserved.
    pub fn probability<F: Real>(&self, gram: &[u32]) -> Option<F> {
        self.counts
            .get(gram)
            .map(|&c| from_count::<F>(c) / from_count(self.total))
    }

    /// Entries in unspecified order.
    pub fn iter(&self) -> impl Iterator<Item = (&Gram, u64)> {
        self.counts.iter().map(|(g, &c)| (g, c))
    }

    /// Entries sorted by ascending lexicographic gram key; the deterministic
    /// iteration order used for entropy sums and merges.
    pub fn sorted_entries(&self) -> Vec<(&Gram, u64)> {
        let mut entries: Vec<(&Gram, u64)> = self.counts.iter().map(|(g, &c)| (g, c)).collect();
        entries.sort_unstable_by(|a, b| a.0.cmp(b.0));
        entries
    }
}

/// Counts the n-grams of a slice by the gliding procedure: K = len - n + 1
/// overlapping windows of stride 1.
pub fn count_ngrams_slice(values: &[u32], n: usize) -> Result<FrequencyTable> {
    if n == 0 {
        return Err(Error::Config("gram order must be at least 1".into()));
    }
    if n > values.len() {
        return Err(Error::OrderTooLarge {
            n,
            len: values.len(),
        });
    }
    let k = values.len() - n + 1;
    let mut counts: HashMap<Gram, u64> = HashMap::new();
    for window in values.windows(n) {
        *counts.entry(Gram::from_slice(window)).or_insert(0) += 1;
    }
    Ok(FrequencyTable {
        n,
        counts,
        total: k as u64,
    })
}

/// Counts the n-grams of one segment.
pub fn count_ngrams(segment: &SegmentView<'_>, n: usize) -> Result<FrequencyTable> {
    count_ngrams_slice(segment.values, n)
}

/// Plug-in Shannon entropy of the table in nats.
///
/// Terms are summed over grams in ascending key order with compensation, so
/// the value is bit-stable regardless of hash iteration order or thread
/// count. Only observed grams are stored, so p = 0 terms never occur.
pub fn entropy<F: Real>(table: &FrequencyTable) -> Result<F> {
    if table.total == 0 || table.counts.is_empty() {
        return Err(Error::EmptyTable);
    }
    let total = from_count::<F>(table.total);
    let mut acc = CompensatedSum::new();
    for (_, count) in table.sorted_entries() {
        let p = from_count::<F>(count) / total;
        acc.add(p * p.ln());
    }
    let phi = -acc.value();
    // normalize -0.0 from the single-gram case
    Ok(if phi.is_zero() { F::zero() } else { phi })
}

/// Block entropy of order n: per-segment entropies and their mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyResult<F> {
    pub n: usize,
    /// Arithmetic mean of `per_segment`, in nats.
    pub phi: F,
    pub per_segment: Vec<F>,
    pub n_segments: usize,
}

/// Computes the order-n block entropy over 1000-word segments (or the given
/// block length) and averages across segments.
pub fn phi_n<F: Real + Send>(
    series: &WordLengthSeries,
    n: usize,
    block_len: usize,
) -> Result<EntropyResult<F>> {
    let segments = crate::stats::segment(series, block_len)?;
    phi_over_segments(&segments, n)
}

/// Same as [`phi_n`] for pre-built segments; used when segments are shared
/// with other metrics.
pub fn phi_over_segments<F: Real + Send>(
    segments: &[SegmentView<'_>],
    n: usize,
) -> Result<EntropyResult<F>> {
    if segments.is_empty() {
        return Err(Error::NoCompleteSegments {
            len: 0,
            block_len: 0,
        });
    }
    let per_segment: Vec<F> = segments
        .par_iter()
        .map(|seg| entropy(&count_ngrams(seg, n)?))
        .collect::<Result<_>>()?;
    let phi = crate::numeric::compensated_mean(per_segment.iter().copied()).unwrap();
    Ok(EntropyResult {
        n,
        phi,
        per_segment,
        n_segments: segments.len(),
    })
}

/// One row of a Zipf-like rank table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankRow<F> {
    /// 1-based rank.
    pub rank: usize,
    pub gram: Vec<u32>,
    pub probability: F,
}

/// Frequency-ranked n-grams, probabilities nonincreasing with rank.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankTable<F> {
    pub n: usize,
    pub rows: Vec<RankRow<F>>,
}

/// Sorts the table by descending probability; ties break by ascending
/// lexicographic gram key so output is diff-stable.
pub fn rank_table<F: Real>(table: &FrequencyTable) -> Result<RankTable<F>> {
    if table.counts.is_empty() {
        return Err(Error::EmptyTable);
    }
    let mut entries: Vec<(&Gram, u64)> = table.counts.iter().map(|(g, &c)| (g, c)).collect();
    entries.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let total = from_count::<F>(table.total);
    let rows = entries
        .into_iter()
        .enumerate()
        .map(|(i, (gram, count))| RankRow {
            rank: i + 1,
            gram: gram.to_vec(),
            probability: from_count::<F>(count) / total,
        })
        .collect();
    Ok(RankTable { n: table.n, rows })
}
