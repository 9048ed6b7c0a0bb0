//! Segmentation, distribution moments, and kernel density estimates.
//!
//! Metrics are computed over consecutive non-overlapping blocks (1000 words
//! by default) and averaged across blocks. Moments follow the population
//! convention: central moments divide by the segment length with no bias
//! correction, skewness is m3/sd^3 and kurtosis m4/sd^4 (non-excess).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ngram::{self, FrequencyTable};
use crate::numeric::{from_len, CompensatedSum, Real};
use crate::tokenize::WordLengthSeries;

/// Borrowed view of one complete block of the series.
#[derive(Debug, Clone, Copy)]
pub struct SegmentView<'a> {
    pub language: &'a str,
    /// 0-based segment number.
    pub index: usize,
    pub values: &'a [u32],
}

/// Mean, standard deviation, skewness, and kurtosis of one segment, or an
/// average over segments.
///
/// On a constant segment the standard deviation is zero and skewness and
/// kurtosis are undefined; they are carried as `None` (serialized as `null`),
/// never as zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSummary<F> {
    pub mean: F,
    pub sd: F,
    pub skewness: Option<F>,
    pub kurtosis: Option<F>,
    /// Number of segments contributing (1 for a single segment).
    pub n_segments: usize,
}

/// Gaussian kernel density estimate sampled on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityCurve<F> {
    pub grid: Vec<F>,
    pub density: Vec<F>,
    pub bandwidth: F,
}

/// Splits the series into `floor(N / block_len)` complete segments; the
/// trailing partial block is discarded. Empty when `N < block_len`.
pub fn segment(series: &WordLengthSeries, block_len: usize) -> Result<Vec<SegmentView<'_>>> {
    if block_len < 2 {
        return Err(Error::Config(format!(
            "block length must be at least 2, got {block_len}"
        )));
    }
    Ok(series
        .values
        .chunks_exact(block_len)
        .enumerate()
        .map(|(index, values)| SegmentView {
            language: &series.language,
            index,
            values,
        })
        .collect())
}

/// Moments of a single segment.
pub fn moments<F: Real>(segment: &SegmentView<'_>) -> Result<MomentSummary<F>> {
    moments_of(segment.values)
}

/// Moments of an arbitrary non-empty slice of word lengths.
///
/// Two-pass computation with compensated sums: mean first, then the central
/// moments m2..m4 with divisor `len`.
pub fn moments_of<F: Real>(values: &[u32]) -> Result<MomentSummary<F>> {
    if values.is_empty() {
        return Err(Error::EmptySeries);
    }
    let n = F::from_usize(values.len()).unwrap();
    let mut sum = CompensatedSum::<F>::new();
    for &v in values {
        sum.add(from_len(v));
    }
    let mean = sum.value() / n;

    let mut m2 = CompensatedSum::new();
    let mut m3 = CompensatedSum::new();
    let mut m4 = CompensatedSum::new();
    for &v in values {
        let d = from_len::<F>(v) - mean;
        let d2 = d * d;
        m2.add(d2);
        m3.add(d2 * d);
        m4.add(d2 * d2);
    }
    let m2 = m2.value() / n;
    let m3 = m3.value() / n;
    let m4 = m4.value() / n;
    let sd = m2.sqrt();

    let (skewness, kurtosis) = if sd.is_zero() {
        (None, None)
    } else {
        (Some(m3 / (sd * sd * sd)), Some(m4 / (m2 * m2)))
    };
    Ok(MomentSummary {
        mean,
        sd,
        skewness,
        kurtosis,
        n_segments: 1,
    })
}

/// Averages per-segment summaries field by field.
///
/// Segments with undefined skewness or kurtosis are excluded from those two
/// averages only; the result's `n_segments` records the full list length.
pub fn average_moments<F: Real>(per_segment: &[MomentSummary<F>]) -> Result<MomentSummary<F>> {
    if per_segment.is_empty() {
        return Err(Error::NoCompleteSegments {
            len: 0,
            block_len: 0,
        });
    }
    let mean = mean_of(per_segment.iter().map(|m| m.mean)).unwrap();
    let sd = mean_of(per_segment.iter().map(|m| m.sd)).unwrap();
    let skewness = mean_of(per_segment.iter().filter_map(|m| m.skewness));
    let kurtosis = mean_of(per_segment.iter().filter_map(|m| m.kurtosis));
    Ok(MomentSummary {
        mean,
        sd,
        skewness,
        kurtosis,
        n_segments: per_segment.len(),
    })
}

fn mean_of<F: Real>(values: impl Iterator<Item = F>) -> Option<F> {
    crate::numeric::compensated_mean(values)
}

/// Full-corpus frequency table of single word lengths (not segmented).
pub fn unigram_distribution(series: &WordLengthSeries) -> Result<FrequencyTable> {
    if series.is_empty() {
        return Err(Error::EmptySeries);
    }
    ngram::count_ngrams_slice(&series.values, 1)
}

/// Gaussian kernel density estimate with Silverman's bandwidth
/// `h = 1.06 * sigma * n^(-1/5)` (sigma the sample standard deviation),
/// evaluated on a uniform grid spanning `[min - 3h, max + 3h]` and normalized
/// so the trapezoidal integral over the grid is exactly 1.
pub fn kde<F: Real>(samples: &[F], grid_size: usize) -> Result<DensityCurve<F>> {
    if samples.len() < 2 {
        return Err(Error::TooFewSamples { got: samples.len() });
    }
    if grid_size < 2 {
        return Err(Error::Config(format!(
            "KDE grid size must be at least 2, got {grid_size}"
        )));
    }
    let n = F::from_usize(samples.len()).unwrap();
    let mean = mean_of(samples.iter().copied()).unwrap();
    let mut ss = CompensatedSum::new();
    for &s in samples {
        let d = s - mean;
        ss.add(d * d);
    }
    let sigma = (ss.value() / (n - F::one())).sqrt();
    if sigma.is_zero() || !sigma.is_finite() {
        return Err(Error::ZeroBandwidth { got: samples.len() });
    }
    let fifth = F::from_f64(-0.2).unwrap();
    let h = F::from_f64(1.06).unwrap() * sigma * n.powf(fifth);

    let (min, max) = samples.iter().fold((samples[0], samples[0]), |(lo, hi), &s| {
        (lo.min(s), hi.max(s))
    });
    let three = F::from_f64(3.0).unwrap();
    let lo = min - three * h;
    let hi = max + three * h;
    let step = (hi - lo) / F::from_usize(grid_size - 1).unwrap();

    let norm = (F::from_f64(2.0 * std::f64::consts::PI).unwrap()).sqrt() * h * n;
    let half = F::from_f64(0.5).unwrap();
    let grid: Vec<F> = (0..grid_size)
        .map(|j| lo + step * F::from_usize(j).unwrap())
        .collect();
    let mut density: Vec<F> = grid
        .iter()
        .map(|&x| {
            let mut acc = CompensatedSum::new();
            for &s in samples {
                let z = (x - s) / h;
                acc.add((-half * z * z).exp());
            }
            acc.value() / norm
        })
        .collect();

    // Renormalize so the trapezoidal integral over the grid is 1 exactly.
    let mut integral = CompensatedSum::new();
    for w in density.windows(2) {
        integral.add(half * step * (w[0] + w[1]));
    }
    let integral = integral.value();
    for d in &mut density {
        *d = *d / integral;
    }
    Ok(DensityCurve {
        grid,
        density,
        bandwidth: h,
    })
}

/// Trapezoidal integral of a density curve over its grid.
pub fn trapezoid<F: Real>(curve: &DensityCurve<F>) -> F {
    let half = F::from_f64(0.5).unwrap();
    let mut acc = CompensatedSum::new();
    for i in 1..curve.grid.len() {
        let dx = curve.grid[i] - curve.grid[i - 1];
        acc.add(half * dx * (curve.density[i] + curve.density[i - 1]));
    }
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn series(values: Vec<u32>) -> WordLengthSeries {
        WordLengthSeries::new("xx", values)
    }

    #[test]
    fn segmentation_drops_the_remainder() {
        let s = series((0..3500).map(|i| (i % 7 + 1) as u32).collect());
        let segs = segment(&s, 1000).unwrap();
        assert_eq!(segs.len(), 3);
        assert!(segs.iter().all(|seg| seg.values.len() == 1000));
        assert_eq!(segs[0].index, 0);
        assert_eq!(segs[2].index, 2);
    }

    #[test]
    fn segmentation_boundaries() {
        assert!(segment(&series(vec![1; 999]), 1000).unwrap().is_empty());
        let s = series(vec![1; 1000]);
        let segs = segment(&s, 1000).unwrap();
        assert_eq!(segs.len(), 1);
        assert_eq!(segs[0].values.len(), 1000);
    }

    #[test]
    fn block_len_below_two_is_a_config_error() {
        let s = series(vec![1, 2, 3]);
        assert!(matches!(segment(&s, 1), Err(Error::Config(_))));
    }

    #[test]
    fn constant_segment_has_undefined_shape() {
        let m: MomentSummary<f64> = moments_of(&[5; 100]).unwrap();
        assert_eq!(m.mean, 5.0);
        assert_eq!(m.sd, 0.0);
        assert!(m.skewness.is_none());
        assert!(m.kurtosis.is_none());
    }

    #[test]
    fn symmetric_segment_has_zero_skewness() {
        let m: MomentSummary<f64> = moments_of(&[1, 2, 3]).unwrap();
        assert_relative_eq!(m.mean, 2.0);
        assert_relative_eq!(m.sd, (2.0f64 / 3.0).sqrt(), max_relative = 1e-15);
        assert_relative_eq!(m.skewness.unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn hand_evaluated_central_moments() {
        // values [1,1,1,5]: deviations (-1,-1,-1,3), m2 = 12/4 = 3,
        // m3 = 24/4 = 6, m4 = 84/4 = 21
        let m: MomentSummary<f64> = moments_of(&[1, 1, 1, 5]).unwrap();
        assert_relative_eq!(m.mean, 2.0);
        assert_relative_eq!(m.sd, 3.0f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(m.skewness.unwrap(), 6.0 / 3.0f64.powf(1.5), max_relative = 1e-15);
        assert_relative_eq!(m.kurtosis.unwrap(), 21.0 / 9.0, max_relative = 1e-15);
    }

    /// Independent two-pass oracle with plain (uncompensated) arithmetic.
    fn oracle_moments(values: &[u32]) -> (f64, f64, f64, f64) {
        let n = values.len() as f64;
        let mean = values.iter().map(|&v| v as f64).sum::<f64>() / n;
        let cm = |p: i32| values.iter().map(|&v| (v as f64 - mean).powi(p)).sum::<f64>() / n;
        let sd = cm(2).sqrt();
        (mean, sd, cm(3) / sd.powi(3), cm(4) / sd.powi(4))
    }

    #[test]
    fn moments_match_two_pass_oracle_on_random_segments() {
        let mut state = 0x1234_5678_9abc_def0u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..50 {
            let len = 100 + (next() % 2000) as usize;
            let values: Vec<u32> = (0..len).map(|_| (next() % 20 + 1) as u32).collect();
            let m: MomentSummary<f64> = moments_of(&values).unwrap();
            let (mean, sd, sk, ku) = oracle_moments(&values);
            assert_relative_eq!(m.mean, mean, max_relative = 1e-10);
            assert_relative_eq!(m.sd, sd, max_relative = 1e-10);
            assert_relative_eq!(m.skewness.unwrap(), sk, max_relative = 1e-10, epsilon = 1e-10);
            assert_relative_eq!(m.kurtosis.unwrap(), ku, max_relative = 1e-10);
            let (sk, ku) = (m.skewness.unwrap(), m.kurtosis.unwrap());
            assert!(ku >= 1.0 + sk * sk - 1e-12, "kurtosis bound: {ku} vs {}", 1.0 + sk * sk);
        }
    }

    #[test]
    fn averaging_one_segment_is_identity() {
        let m: MomentSummary<f64> = moments_of(&[1, 1, 1, 5]).unwrap();
        let avg = average_moments(&[m]).unwrap();
        assert_eq!(avg.mean, m.mean);
        assert_eq!(avg.sd, m.sd);
        assert_eq!(avg.skewness, m.skewness);
        assert_eq!(avg.n_segments, 1);
    }

    #[test]
    fn averaging_two_means() {
        let a: MomentSummary<f64> = moments_of(&[4, 4, 4, 4, 5, 3]).unwrap();
        let b: MomentSummary<f64> = moments_of(&[6, 6, 6, 6, 7, 5]).unwrap();
        let avg = average_moments(&[a, b]).unwrap();
        assert_relative_eq!(avg.mean, 5.0);
        assert_eq!(avg.n_segments, 2);
    }

    #[test]
    fn undefined_segments_are_excluded_from_shape_averages_only() {
        let defined: MomentSummary<f64> = moments_of(&[1, 1, 1, 5]).unwrap();
        let constant: MomentSummary<f64> = moments_of(&[4, 4, 4, 4]).unwrap();
        let avg = average_moments(&[defined, constant]).unwrap();
        assert_relative_eq!(avg.mean, 3.0);
        assert_eq!(avg.skewness, defined.skewness);
        assert_eq!(avg.kurtosis, defined.kurtosis);
        assert_eq!(avg.n_segments, 2);
    }

    #[test]
    fn averaging_nothing_is_an_error() {
        assert!(average_moments::<f64>(&[]).is_err());
    }

    #[test]
    fn average_matches_bruteforce_recomputation() {
        // ten pseudo-random segments; oracle recomputes from raw values
        let mut state = 42u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            state >> 33
        };
        let segments: Vec<Vec<u32>> = (0..10)
            .map(|_| (0..200).map(|_| (next() % 15 + 1) as u32).collect())
            .collect();
        let summaries: Vec<MomentSummary<f64>> = segments
            .iter()
            .map(|v| moments_of(v).unwrap())
            .collect();
        let avg = average_moments(&summaries).unwrap();

        let oracle_mean: f64 = summaries.iter().map(|m| m.mean).sum::<f64>() / 10.0;
        let oracle_sd: f64 = summaries.iter().map(|m| m.sd).sum::<f64>() / 10.0;
        assert_relative_eq!(avg.mean, oracle_mean, max_relative = 1e-12);
        assert_relative_eq!(avg.sd, oracle_sd, max_relative = 1e-12);
    }

    #[test]
    fn unigram_distribution_counts_the_whole_series() {
        let s = series(vec![3, 3, 3]);
        let table = unigram_distribution(&s).unwrap();
        assert_eq!(table.total(), 3);
        assert_eq!(table.count(&[3]), 3);
        assert_relative_eq!(table.probability::<f64>(&[3]).unwrap(), 1.0);

        let s = series(vec![1, 2, 1, 2]);
        let table = unigram_distribution(&s).unwrap();
        assert_relative_eq!(table.probability::<f64>(&[1]).unwrap(), 0.5);
        assert_relative_eq!(table.probability::<f64>(&[2]).unwrap(), 0.5);
        assert!(unigram_distribution(&series(vec![])).is_err());
    }

    #[test]
    fn kde_integrates_to_one_and_peaks_near_the_normal_density() {
        // deterministic Box-Muller standard normal samples
        let mut state = 7u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let samples: Vec<f64> = (0..500)
            .flat_map(|_| {
                let (u1, u2) = (next().max(1e-12), next());
                let r = (-2.0 * u1.ln()).sqrt();
                let t = 2.0 * std::f64::consts::PI * u2;
                [r * t.cos(), r * t.sin()]
            })
            .collect();
        let curve = kde(&samples, 512).unwrap();
        assert_relative_eq!(trapezoid(&curve), 1.0, epsilon = 1e-6);
        // density at the grid point nearest 0 within ±0.05 of 1/sqrt(2π)
        let at_zero = curve
            .grid
            .iter()
            .zip(&curve.density)
            .min_by(|a, b| a.0.abs().partial_cmp(&b.0.abs()).unwrap())
            .map(|(_, &d)| d)
            .unwrap();
        assert!((at_zero - 0.3989).abs() < 0.05, "density at 0: {at_zero}");
    }

    #[test]
    fn kde_of_two_points_is_symmetric() {
        let curve = kde(&[0.0f64, 1.0], 101).unwrap();
        let m = curve.density.len();
        for i in 0..m / 2 {
            assert_relative_eq!(curve.density[i], curve.density[m - 1 - i], max_relative = 1e-9);
        }
    }

    #[test]
    fn kde_rejects_degenerate_input() {
        assert!(matches!(
            kde(&[1.0f64], 64),
            Err(Error::TooFewSamples { got: 1 })
        ));
        assert!(matches!(
            kde(&[2.5f64, 2.5, 2.5], 64),
            Err(Error::ZeroBandwidth { got: 3 })
        ));
    }

    #[test]
    fn moments_work_in_f32_too() {
        let m: MomentSummary<f32> = moments_of(&[1, 2, 3]).unwrap();
        assert!((m.mean - 2.0).abs() < 1e-6);
    }
}
