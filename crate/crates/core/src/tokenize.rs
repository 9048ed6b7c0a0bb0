//! Text to word-length series conversion.
//!
//! A word is a maximal run of letter grapheme clusters, optionally joined by
//! internal apostrophes or hyphens. Its length is the number of letter
//! clusters it contains: combining marks attach to their base letter and are
//! never counted separately, so composed and decomposed spellings of the same
//! word measure the same. Runs without any letter (numbers, punctuation) are
//! discarded. Case plays no role since lengths are case-independent.

use serde::{Deserialize, Serialize};
use unicode_segmentation::UnicodeSegmentation;

use crate::error::Result;

/// Characters allowed to join letter runs into a single word.
/// U+0027 and U+2019 apostrophes, U+002D hyphen-minus, U+2010 hyphen.
const JOINERS: [&str; 4] = ["'", "\u{2019}", "-", "\u{2010}"];

/// Sequence of per-word letter counts for one language, in reading order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordLengthSeries {
    pub language: String,
    pub values: Vec<u32>,
}

impl WordLengthSeries {
    pub fn new(language: impl Into<String>, values: Vec<u32>) -> Self {
        Self {
            language: language.into(),
            values,
        }
    }

    /// Number of words in the series.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Tokenizer knobs surfaced through config so reproduction tolerance can
/// absorb boundary-rule differences.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenizerOptions {
    /// When set, word lengths are clamped to this value. Disabled by default:
    /// unusually long words (chemical compounds and the like) stay in the data.
    pub max_word_length: Option<u32>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Cluster {
    Letter,
    Joiner,
    Break,
}

fn classify(cluster: &str) -> Cluster {
    // A cluster counts as a letter when its base scalar is alphabetic; any
    // combining marks riding on it belong to the same cluster by definition.
    match cluster.chars().next() {
        Some(c) if c.is_alphabetic() => Cluster::Letter,
        _ if JOINERS.contains(&cluster) => Cluster::Joiner,
        _ => Cluster::Break,
    }
}

/// Splits a line into word tokens.
///
/// Tokens are maximal letter-cluster runs with internal joiners kept, e.g.
/// `"don't stop-gap 42 ..."` yields `["don't", "stop-gap"]`. Leading and
/// trailing joiners are trimmed; runs with no letter are dropped.
pub fn tokenize(line: &str) -> impl Iterator<Item = &str> {
    Tokens {
        line,
        clusters: line.grapheme_indices(true).peekable(),
    }
}

struct Tokens<'a> {
    line: &'a str,
    clusters: std::iter::Peekable<unicode_segmentation::GraphemeIndices<'a>>,
}

impl<'a> Iterator for Tokens<'a> {
    type Item = &'a str;

    fn next(&mut self) -> Option<&'a str> {
        // Seek the first letter cluster; joiners before it are not internal.
        let (start, first) = loop {
            let (idx, cluster) = self.clusters.next()?;
            if classify(cluster) == Cluster::Letter {
                break (idx, cluster);
            }
        };
        // The token ends at the last letter cluster of the run; joiners after
        // it are consumed but trimmed from the slice.
        let mut end = start + first.len();
        while let Some(&(idx, cluster)) = self.clusters.peek() {
            match classify(cluster) {
                Cluster::Letter => {
                    end = idx + cluster.len();
                    self.clusters.next();
                }
                Cluster::Joiner => {
                    self.clusters.next();
                }
                Cluster::Break => break,
            }
        }
        Some(&self.line[start..end])
    }
}

/// Counts the letter grapheme clusters of a token.
///
/// Internal apostrophes, hyphens, and combining marks attached to a base
/// letter do not count: `word_length("don't") == 4`. The token must contain
/// at least one letter; `tokenize` guarantees this for its output.
pub fn word_length(token: &str) -> usize {
    let count = token
        .graphemes(true)
        .filter(|c| classify(c) == Cluster::Letter)
        .count();
    debug_assert!(count >= 1, "word_length called on letterless token {token:?}");
    count
}

/// Builds a [`WordLengthSeries`] from a fallible line stream, preserving
/// token order across the whole stream.
pub fn to_series<I>(lines: I, language: &str, options: &TokenizerOptions) -> Result<WordLengthSeries>
where
    I: IntoIterator<Item = Result<String>>,
{
    let mut values = Vec::new();
    for line in lines {
        let line = line?;
        extend_series(&line, options, &mut values);
    }
    Ok(WordLengthSeries::new(language, values))
}

/// Tokenizes one line and appends its word lengths to `values`.
pub(crate) fn extend_series(line: &str, options: &TokenizerOptions, values: &mut Vec<u32>) {
    for token in tokenize(line) {
        let len = word_length(token).min(u32::MAX as usize) as u32;
        let len = match options.max_word_length {
            Some(cap) => len.min(cap),
            None => len,
        };
        values.push(len);
    }
}
