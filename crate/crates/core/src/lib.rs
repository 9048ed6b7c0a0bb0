//! Word-length statistics for multilingual text corpora.
//!
//! The pipeline converts raw corpus files into per-word letter-count series
//! and computes a comparable metric suite per language:
//!
//! - distribution moments (mean, sd, skewness, kurtosis) over 1000-word
//!   segments, plus Gaussian KDE curves of the per-segment distributions
//! - gliding n-gram block entropies Phi_n (natural log) for n = 1, 2, 3
//! - Zipf-like rank tables of n-gram frequencies
//! - shuffled-baseline correlations C_n = Phi_n,shuffled - Phi_n from
//!   seeded, reproducible per-segment shuffles
//!
//! Metric kernels are generic over the scalar type through
//! [`numeric::Real`]; the pipeline and CLI use the `f64` aliases exported
//! at the crate root. All outputs are deterministic given the configuration,
//! independent of thread count.

pub mod error;
pub mod ingest;
pub mod ngram;
pub mod numeric;
pub mod report;
pub mod shuffle;
pub mod stats;
pub mod tokenize;

pub use error::{Error, Result};
pub use ingest::LanguageCorpus;
pub use tokenize::{TokenizerOptions, WordLengthSeries};

/// f64-backed moment summary used by the pipeline.
pub type MomentSummary = stats::MomentSummary<f64>;
/// f64-backed KDE curve used by the pipeline.
pub type DensityCurve = stats::DensityCurve<f64>;
/// f64-backed block-entropy result used by the pipeline.
pub type EntropyResult = ngram::EntropyResult<f64>;
/// f64-backed rank table used by the pipeline.
pub type RankTable = ngram::RankTable<f64>;
/// f64-backed correlation result used by the pipeline.
pub type CorrelationResult = shuffle::CorrelationResult<f64>;
