//! Seeded segment shuffling and the shuffled-baseline correlation metric.
//!
//! Shuffling destroys word ordering while preserving each segment's length
//! multiset, so the entropy gain of the shuffled series over the original,
//! C_n = Phi_n,shuffled - Phi_n, measures the correlations between nearby
//! word lengths. Shuffling is per segment, matching the per-segment entropy
//! averaging, and every shuffle is reproducible from the base seed.
//!
//! The generator is pinned for cross-implementation reproducibility:
//! splitmix64 (Steele, Lea & Flood's published constants) drives a
//! Fisher-Yates pass from the top index down, drawing each bounded index by
//! rejection sampling (reject draws below 2^64 mod bound, then reduce
//! modulo bound). The per-task seed is
//! `base_seed XOR mix64(repeat * 0x9E3779B97F4A7C15 + segment_index)`
//! with `mix64` the splitmix64 finalizer. Reports carry the generator name
//! [`GENERATOR`] so results stay reproducible across implementations.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ngram::{count_ngrams_slice, entropy};
use crate::numeric::{compensated_mean, Real};
use crate::stats::SegmentView;
use crate::tokenize::WordLengthSeries;

/// Name and version of the pinned shuffle algorithm, echoed in reports.
pub const GENERATOR: &str = "splitmix64-fisheryates-v1";

/// splitmix64 stream generator.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        mix64(self.state)
    }

    /// Unbiased draw from `[0, bound)` by rejection: draws below
    /// `2^64 mod bound` are rejected, the rest reduce modulo `bound`.
    pub fn next_below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let v = self.next_u64();
            if v >= threshold {
                return v % bound;
            }
        }
    }
}

/// splitmix64 finalizer; also the documented 64-bit seed-mixing hash.
#[inline]
pub fn mix64(z: u64) -> u64 {
    let z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    let z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for the shuffle of (repeat, segment) derived from the base seed.
#[inline]
pub fn derive_seed(base_seed: u64, repeat: u64, segment_index: u64) -> u64 {
    base_seed ^ mix64(repeat.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(segment_index))
}

/// In-place Fisher-Yates shuffle driven by splitmix64.
pub fn shuffle_in_place(values: &mut [u32], seed: u64) {
    let mut rng = SplitMix64::new(seed);
    for i in (1..values.len()).rev() {
        let j = rng.next_below(i as u64 + 1) as usize;
        values.swap(i, j);
    }
}

/// Returns a seeded permutation of the segment's values. Identical seed,
/// identical output.
pub fn shuffle_segment(segment: &SegmentView<'_>, seed: u64) -> Vec<u32> {
    let mut values = segment.values.to_vec();
    shuffle_in_place(&mut values, seed);
    values
}

/// The correlation metric C_n with its provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationResult<F> {
    pub n: usize,
    /// `phi_shuffled_mean - phi_original` exactly.
    pub c: F,
    pub phi_original: F,
    pub phi_shuffled_mean: F,
    pub repeats: usize,
    pub base_seed: u64,
    /// Pinned shuffle algorithm, see [`GENERATOR`].
    pub generator: String,
}

/// Computes C_n = Phi_n,shuffled - Phi_n.
///
/// For each repeat r and segment s the segment is shuffled with seed
/// `derive_seed(base_seed, r, s)` and its order-n entropy recomputed;
/// shuffled entropies average over segments, then over repeats. Each
/// (repeat, segment) task is independent and the reduction order is fixed,
/// so the result is bit-identical across thread counts.
///
/// n = 1 is allowed for validation: shuffling preserves unigram counts, so
/// C_1 = 0 up to float tolerance.
pub fn c_n<F: Real + Send>(
    series: &WordLengthSeries,
    n: usize,
    block_len: usize,
    repeats: usize,
    base_seed: u64,
) -> Result<CorrelationResult<F>> {
    if repeats < 1 {
        return Err(Error::Config("repeats must be at least 1".into()));
    }
    let segments = crate::stats::segment(series, block_len)?;
    let original = crate::ngram::phi_over_segments::<F>(&segments, n)?;

    let tasks: Vec<(usize, usize)> = (0..repeats)
        .flat_map(|r| (0..segments.len()).map(move |s| (r, s)))
        .collect();
    let entropies: Vec<F> = tasks
        .par_iter()
        .map(|&(r, s)| {
            let seed = derive_seed(base_seed, r as u64, s as u64);
            let shuffled = shuffle_segment(&segments[s], seed);
            entropy(&count_ngrams_slice(&shuffled, n)?)
        })
        .collect::<Result<_>>()?;

    // average over segments within a repeat, then over repeats
    let per_repeat: Vec<F> = entropies
        .chunks(segments.len())
        .map(|chunk| compensated_mean(chunk.iter().copied()).unwrap())
        .collect();
    let phi_shuffled_mean = compensated_mean(per_repeat.iter().copied()).unwrap();

    Ok(CorrelationResult {
        n,
        c: phi_shuffled_mean - original.phi,
        phi_original: original.phi,
        phi_shuffled_mean,
        repeats,
        base_seed,
        generator: GENERATOR.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seg(values: &[u32]) -> SegmentView<'_> {
        SegmentView {
            language: "xx",
            index: 0,
            values,
        }
    }

    #[test]
    fn constant_segment_shuffles_to_itself() {
        let values = [7u32; 64];
        for seed in [0u64, 1, 0xFFFF_FFFF_FFFF_FFFF] {
            assert_eq!(shuffle_segment(&seg(&values), seed), values);
        }
    }

    #[test]
    fn shuffle_preserves_the_multiset() {
        let values: Vec<u32> = (0..500).map(|i| (i * 37 % 11 + 1) as u32).collect();
        for seed in 0..20u64 {
            let mut shuffled = shuffle_segment(&seg(&values), seed);
            shuffled.sort_unstable();
            let mut sorted = values.clone();
            sorted.sort_unstable();
            assert_eq!(shuffled, sorted);
        }
    }

    #[test]
    fn identical_seed_identical_output() {
        let values: Vec<u32> = (1..=100).collect();
        assert_eq!(
            shuffle_segment(&seg(&values), 0xDEAD_BEEF),
            shuffle_segment(&seg(&values), 0xDEAD_BEEF)
        );
        assert_ne!(
            shuffle_segment(&seg(&values), 1),
            shuffle_segment(&seg(&values), 2)
        );
    }

    /// Golden permutations of [1,2,3,4] for seeds 0..=5, frozen from the
    /// first run of the pinned generator; regression fixture for the
    /// splitmix64 + Fisher-Yates contract.
    #[test]
    fn golden_permutations_are_frozen() {
        let expected: [[u32; 4]; 6] = [
            [3, 2, 1, 4],
            [3, 1, 4, 2],
            [1, 2, 4, 3],
            [3, 4, 1, 2],
            [1, 4, 2, 3],
            [1, 4, 2, 3],
        ];
        for (seed, want) in expected.iter().enumerate() {
            let got = shuffle_segment(&seg(&[1, 2, 3, 4]), seed as u64);
            assert_eq!(&got[..], want, "seed {seed}");
        }
    }

    #[test]
    fn splitmix_reference_stream() {
        // test vector from the published splitmix64 reference (seed 1234567)
        let mut rng = SplitMix64::new(1234567);
        assert_eq!(rng.next_u64(), 6457827717110365317);
        assert_eq!(rng.next_u64(), 3203168211198807973);
    }

    #[test]
    fn rejection_draw_is_in_range() {
        let mut rng = SplitMix64::new(77);
        for bound in [1u64, 2, 3, 7, 100, u64::MAX] {
            for _ in 0..50 {
                assert!(rng.next_below(bound) < bound);
            }
        }
    }

    #[test]
    fn c1_is_zero_on_any_input() {
        let values: Vec<u32> = (0..4000).map(|i| ((i * 131 + i / 3) % 14 + 1) as u32).collect();
        let series = WordLengthSeries::new("xx", values);
        let r: CorrelationResult<f64> = c_n(&series, 1, 1000, 5, 12345).unwrap();
        assert!(r.c.abs() < 1e-12, "C_1 = {}", r.c);
        assert_eq!(r.c, r.phi_shuffled_mean - r.phi_original);
    }

    #[test]
    fn alternating_series_has_large_positive_c2() {
        let values: Vec<u32> = (0..5000).map(|i| (i % 2 + 1) as u32).collect();
        let series = WordLengthSeries::new("xx", values);
        let r: CorrelationResult<f64> = c_n(&series, 2, 1000, 10, 7).unwrap();
        // original keeps only the two alternating bigrams
        assert!((r.phi_original - 2.0f64.ln()).abs() < 1e-3, "{}", r.phi_original);
        // shuffled approaches ln 4
        assert!(r.c > 0.5, "C_2 = {}", r.c);
        assert!(r.phi_shuffled_mean < 4.0f64.ln());
    }

    #[test]
    fn repeats_below_one_is_a_config_error() {
        let series = WordLengthSeries::new("xx", vec![1, 2, 1, 2]);
        assert!(matches!(
            c_n::<f64>(&series, 2, 2, 0, 0),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn determinism_across_thread_counts() {
        let values: Vec<u32> = (0..10_000).map(|i| ((i * 7919 + i * i) % 9 + 1) as u32).collect();
        let series = WordLengthSeries::new("xx", values);
        let run = |threads: usize| -> u64 {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            let r: CorrelationResult<f64> =
                pool.install(|| c_n(&series, 2, 1000, 4, 99).unwrap());
            r.c.to_bits()
        };
        assert_eq!(run(1), run(8));
    }
}
