//! Pipeline orchestration: analyze corpora, compare languages, emit reports.
//!
//! One JSON report per language plus CSVs for moments, rank tables, entropy
//! values, and KDE curves, with a cross-language summary table. Reports echo
//! the full configuration and generator pins, so any figure is reproducible
//! from the report alone. Identical config and corpus give byte-identical
//! outputs regardless of thread count.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{self, LanguageCorpus};
use crate::ngram;
use crate::shuffle;
use crate::stats;
use crate::tokenize::{self, TokenizerOptions};
use crate::{CorrelationResult, DensityCurve, EntropyResult, MomentSummary, RankTable};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Grid resolution for emitted KDE curves.
pub const KDE_GRID_SIZE: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
    Both,
}

impl OutputFormat {
    fn json(self) -> bool {
        matches!(self, OutputFormat::Json | OutputFormat::Both)
    }
    fn csv(self) -> bool {
        matches!(self, OutputFormat::Csv | OutputFormat::Both)
    }
}

impl std::str::FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            "both" => Ok(Self::Both),
            other => Err(format!("unknown format '{other}' (expected json, csv, or both)")),
        }
    }
}

/// Full configuration of one analysis run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub manifest: PathBuf,
    pub out_dir: PathBuf,
    pub block_len: usize,
    pub orders: Vec<usize>,
    pub repeats: usize,
    pub base_seed: u64,
    pub tokenizer: TokenizerOptions,
    pub format: OutputFormat,
}

impl AnalysisConfig {
    pub fn new(manifest: impl Into<PathBuf>, out_dir: impl Into<PathBuf>) -> Self {
        Self {
            manifest: manifest.into(),
            out_dir: out_dir.into(),
            block_len: 1000,
            orders: vec![1, 2, 3],
            repeats: 10,
            base_seed: 0,
            tokenizer: TokenizerOptions::default(),
            format: OutputFormat::Both,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.block_len < 2 {
            return Err(Error::Config(format!(
                "block length must be at least 2, got {}",
                self.block_len
            )));
        }
        if self.orders.is_empty() {
            return Err(Error::Config("at least one gram order is required".into()));
        }
        if let Some(&n) = self.orders.iter().find(|&&n| !(1..=8).contains(&n)) {
            return Err(Error::Config(format!(
                "gram order {n} outside the supported range 1..=8"
            )));
        }
        if self.repeats < 1 {
            return Err(Error::Config("repeats must be at least 1".into()));
        }
        Ok(())
    }

    fn echo(&self) -> ConfigEcho {
        ConfigEcho {
            block_len: self.block_len,
            orders: self.orders.clone(),
            repeats: self.repeats,
            base_seed: self.base_seed,
            max_word_length: self.tokenizer.max_word_length,
            generator: shuffle::GENERATOR.to_string(),
        }
    }
}

/// Knobs echoed into every report for reproducibility.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub block_len: usize,
    pub orders: Vec<usize>,
    pub repeats: usize,
    pub base_seed: u64,
    pub max_word_length: Option<u32>,
    pub generator: String,
}

/// Explains the absence of one metric from a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricError {
    pub metric: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n: Option<usize>,
    pub error: String,
}

/// Canonical file name of an emitted rank table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankTableRef {
    pub n: usize,
    pub file: String,
}

/// All metrics of one language corpus.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LanguageReport {
    pub language: String,
    pub word_count: u64,
    pub tool_version: String,
    pub config: ConfigEcho,
    /// Segment-averaged moments; absent when the series has no complete
    /// segment (then an error record explains why).
    pub moments: Option<MomentSummary>,
    pub segment_moments: Vec<MomentSummary>,
    pub entropies: Vec<EntropyResult>,
    /// For orders >= 2 only.
    pub correlations: Vec<CorrelationResult>,
    pub rank_tables: Vec<RankTableRef>,
    /// One record per metric that could not be computed.
    pub errors: Vec<MetricError>,
}

/// A report together with its emission-only payloads (rank tables are CSV
/// artifacts, KDE curves plot aids; neither is embedded in the JSON).
#[derive(Debug, Clone)]
pub struct LanguageAnalysis {
    pub report: LanguageReport,
    pub rank_tables: Vec<RankTable>,
    /// (metric name, curve) pairs, e.g. ("mean", ...), ("phi_2", ...).
    pub kde_curves: Vec<(String, DensityCurve)>,
}

/// A language whose corpus could not be analyzed at all.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LanguageFailure {
    pub language: String,
    pub error: String,
}

/// Outcome of one analysis run: per-language failures never abort the rest.
#[derive(Debug, Clone)]
pub struct AnalysisRun {
    pub analyses: Vec<LanguageAnalysis>,
    pub failures: Vec<LanguageFailure>,
}

impl AnalysisRun {
    pub fn reports(&self) -> Vec<&LanguageReport> {
        self.analyses.iter().map(|a| &a.report).collect()
    }
}

/// Runs the whole pipeline for every language in the manifest.
///
/// Languages are analyzed in parallel; output order follows the manifest's
/// sorted language codes and is deterministic given the config, including
/// the base seed.
pub fn analyze(config: &AnalysisConfig) -> Result<AnalysisRun> {
    config.validate()?;
    let mut corpora = ingest::load_manifest(&config.manifest)?;
    let outcomes: Vec<std::result::Result<LanguageAnalysis, LanguageFailure>> = corpora
        .par_iter_mut()
        .map(|corpus| {
            analyze_language(corpus, config).map_err(|e| LanguageFailure {
                language: corpus.code.clone(),
                error: e.to_string(),
            })
        })
        .collect();

    let mut run = AnalysisRun {
        analyses: Vec::new(),
        failures: Vec::new(),
    };
    for outcome in outcomes {
        match outcome {
            Ok(a) => run.analyses.push(a),
            Err(f) => run.failures.push(f),
        }
    }
    Ok(run)
}

fn analyze_language(corpus: &mut LanguageCorpus, config: &AnalysisConfig) -> Result<LanguageAnalysis> {
    let lines = ingest::load_corpus(corpus)?;
    let series = tokenize::to_series(lines, &corpus.code, &config.tokenizer)?;
    if series.is_empty() {
        return Err(Error::EmptySeries);
    }
    corpus.word_count = Some(series.len() as u64);

    let mut errors = Vec::new();
    let segments = stats::segment(&series, config.block_len)?;
    let segment_moments: Vec<MomentSummary> = segments
        .iter()
        .map(stats::moments)
        .collect::<Result<_>>()?;
    let moments = match stats::average_moments(&segment_moments) {
        Ok(m) => Some(m),
        Err(e) => {
            errors.push(MetricError {
                metric: "moments".into(),
                n: None,
                error: e.to_string(),
            });
            None
        }
    };

    let mut entropies = Vec::new();
    let mut correlations = Vec::new();
    for &n in &config.orders {
        match ngram::phi_over_segments(&segments, n) {
            Ok(r) => entropies.push(r),
            Err(e) => errors.push(MetricError {
                metric: "entropy".into(),
                n: Some(n),
                error: e.to_string(),
            }),
        }
        if n >= 2 {
            match shuffle::c_n(&series, n, config.block_len, config.repeats, config.base_seed) {
                Ok(r) => correlations.push(r),
                Err(e) => errors.push(MetricError {
                    metric: "correlation".into(),
                    n: Some(n),
                    error: e.to_string(),
                }),
            }
        }
    }

    let mut rank_tables = Vec::new();
    let mut rank_refs = Vec::new();
    for &n in &config.orders {
        match ngram::count_ngrams_slice(&series.values, n).and_then(|t| ngram::rank_table(&t)) {
            Ok(rt) => {
                rank_refs.push(RankTableRef {
                    n,
                    file: format!("{}_rank_n{}.csv", corpus.code, n),
                });
                rank_tables.push(rt);
            }
            Err(e) => errors.push(MetricError {
                metric: "rank_table".into(),
                n: Some(n),
                error: e.to_string(),
            }),
        }
    }

    let report = LanguageReport {
        language: corpus.code.clone(),
        word_count: series.len() as u64,
        tool_version: TOOL_VERSION.to_string(),
        config: config.echo(),
        moments,
        segment_moments,
        entropies,
        correlations,
        rank_tables: rank_refs,
        errors,
    };
    let kde_curves = kde_curves_for(&report);
    Ok(LanguageAnalysis {
        report,
        rank_tables,
        kde_curves,
    })
}

/// Per-segment metric distributions as Gaussian KDE curves. Metrics whose
/// samples are too few or degenerate are skipped; their raw per-segment
/// values are in the report regardless.
fn kde_curves_for(report: &LanguageReport) -> Vec<(String, DensityCurve)> {
    let mut out = Vec::new();
    let moments = &report.segment_moments;
    let columns: [(&str, Vec<f64>); 4] = [
        ("mean", moments.iter().map(|m| m.mean).collect()),
        ("sd", moments.iter().map(|m| m.sd).collect()),
        ("skewness", moments.iter().filter_map(|m| m.skewness).collect()),
        ("kurtosis", moments.iter().filter_map(|m| m.kurtosis).collect()),
    ];
    for (name, samples) in columns {
        if let Ok(curve) = stats::kde(&samples, KDE_GRID_SIZE) {
            out.push((name.to_string(), curve));
        }
    }
    for e in &report.entropies {
        if let Ok(curve) = stats::kde(&e.per_segment, KDE_GRID_SIZE) {
            out.push((format!("phi_{}", e.n), curve));
        }
    }
    out
}

/// Cross-language comparison table with per-column rankings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossLanguageSummary {
    /// Metric column names, e.g. mean, sd, skewness, kurtosis, phi_1, c_2.
    pub columns: Vec<String>,
    /// One row per language, sorted by language code.
    pub rows: Vec<SummaryRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub language: String,
    /// Values aligned with `columns`; `None` when undefined.
    pub values: Vec<Option<f64>>,
    /// Rank 1 marks the largest value of a column; ties resolve by
    /// ascending language code; undefined values rank after defined ones.
    pub ranks: Vec<usize>,
}

/// Builds the comparison table from at least two reports.
pub fn compare_languages(reports: &[&LanguageReport]) -> Result<CrossLanguageSummary> {
    if reports.len() < 2 {
        return Err(Error::Report(format!(
            "comparison needs at least 2 reports, got {}",
            reports.len()
        )));
    }
    let mut orders: Vec<usize> = reports
        .iter()
        .flat_map(|r| r.entropies.iter().map(|e| e.n))
        .collect();
    orders.sort_unstable();
    orders.dedup();
    let mut corr_orders: Vec<usize> = reports
        .iter()
        .flat_map(|r| r.correlations.iter().map(|c| c.n))
        .collect();
    corr_orders.sort_unstable();
    corr_orders.dedup();

    let mut columns = vec![
        "mean".to_string(),
        "sd".to_string(),
        "skewness".to_string(),
        "kurtosis".to_string(),
    ];
    columns.extend(orders.iter().map(|n| format!("phi_{n}")));
    columns.extend(corr_orders.iter().map(|n| format!("c_{n}")));

    let mut rows: Vec<SummaryRow> = reports
        .iter()
        .map(|r| {
            let mut values = vec![
                r.moments.map(|m| m.mean),
                r.moments.map(|m| m.sd),
                r.moments.and_then(|m| m.skewness),
                r.moments.and_then(|m| m.kurtosis),
            ];
            for &n in &orders {
                values.push(r.entropies.iter().find(|e| e.n == n).map(|e| e.phi));
            }
            for &n in &corr_orders {
                values.push(r.correlations.iter().find(|c| c.n == n).map(|c| c.c));
            }
            SummaryRow {
                language: r.language.clone(),
                values,
                ranks: Vec::new(),
            }
        })
        .collect();
    rows.sort_by(|a, b| a.language.cmp(&b.language));

    for col in 0..columns.len() {
        // order: defined values descending, then undefined; ties by code
        let mut order: Vec<usize> = (0..rows.len()).collect();
        order.sort_by(|&a, &b| {
            let (va, vb) = (rows[a].values[col], rows[b].values[col]);
            match (va, vb) {
                (Some(x), Some(y)) => y
                    .partial_cmp(&x)
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then_with(|| rows[a].language.cmp(&rows[b].language)),
                (Some(_), None) => std::cmp::Ordering::Less,
                (None, Some(_)) => std::cmp::Ordering::Greater,
                (None, None) => rows[a].language.cmp(&rows[b].language),
            }
        });
        let mut ranks = vec![0usize; rows.len()];
        for (rank0, &row_idx) in order.iter().enumerate() {
            ranks[row_idx] = rank0 + 1;
        }
        for (row, &rank) in rows.iter_mut().zip(&ranks) {
            row.ranks.push(rank);
        }
    }
    Ok(CrossLanguageSummary { columns, rows })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut f = fs::File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    f.write_all(bytes).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn to_json_pretty<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| Error::Report(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes every report, CSV, and the summary into the output directory.
/// Returns the paths written. File names embed the language code and metric:
/// `el.json`, `el_moments.csv`, `el_rank_n1.csv`, ..., `summary.csv`.
pub fn emit_report(
    run: &AnalysisRun,
    summary: Option<&CrossLanguageSummary>,
    config: &AnalysisConfig,
) -> Result<Vec<PathBuf>> {
    let dir = &config.out_dir;
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.clone(),
        source,
    })?;
    let mut written = Vec::new();
    let mut emit = |name: String, bytes: Vec<u8>| -> Result<()> {
        let path = dir.join(name);
        write_file(&path, &bytes)?;
        written.push(path);
        Ok(())
    };

    for analysis in &run.analyses {
        let code = &analysis.report.language;
        if config.format.json() {
            emit(format!("{code}.json"), to_json_pretty(&analysis.report)?)?;
        }
        if config.format.csv() {
            emit(format!("{code}_moments.csv"), moments_csv(&analysis.report))?;
            emit(format!("{code}_entropy.csv"), entropy_csv(&analysis.report))?;
            for table in &analysis.rank_tables {
                emit(format!("{code}_rank_n{}.csv", table.n), rank_csv(table))?;
            }
            for (metric, curve) in &analysis.kde_curves {
                emit(format!("{code}_kde_{metric}.csv"), kde_csv(curve))?;
            }
        }
    }
    for failure in &run.failures {
        emit(
            format!("{}.error.json", failure.language),
            to_json_pretty(failure)?,
        )?;
    }
    if let Some(summary) = summary {
        if config.format.json() {
            emit("summary.json".to_string(), to_json_pretty(summary)?)?;
        }
        if config.format.csv() {
            emit("summary.csv".to_string(), summary_csv(summary))?;
        }
    }
    Ok(written)
}

fn moments_csv(report: &LanguageReport) -> Vec<u8> {
    let mut out = String::from("segment,mean,sd,skewness,kurtosis\n");
    for (i, m) in report.segment_moments.iter().enumerate() {
        out.push_str(&format!(
            "{i},{},{},{},{}\n",
            m.mean,
            m.sd,
            fmt_opt(m.skewness),
            fmt_opt(m.kurtosis)
        ));
    }
    if let Some(m) = &report.moments {
        out.push_str(&format!(
            "average,{},{},{},{}\n",
            m.mean,
            m.sd,
            fmt_opt(m.skewness),
            fmt_opt(m.kurtosis)
        ));
    }
    out.into_bytes()
}

fn entropy_csv(report: &LanguageReport) -> Vec<u8> {
    let mut out = String::from("n,segment,phi\n");
    for e in &report.entropies {
        for (i, phi) in e.per_segment.iter().enumerate() {
            out.push_str(&format!("{},{i},{phi}\n", e.n));
        }
        out.push_str(&format!("{},average,{}\n", e.n, e.phi));
    }
    out.into_bytes()
}

fn rank_csv(table: &RankTable) -> Vec<u8> {
    let mut out = String::from("rank,gram,probability\n");
    for row in &table.rows {
        let gram = row
            .gram
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(" ");
        out.push_str(&format!("{},{gram},{}\n", row.rank, row.probability));
    }
    out.into_bytes()
}

/// Reads a rank-table CSV back; inverse of the emitted format.
pub fn read_rank_csv(path: &Path) -> Result<RankTable> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut rows = Vec::new();
    let mut n = 0usize;
    for (lineno, line) in text.lines().enumerate() {
        if lineno == 0 {
            continue; // header
        }
        let bad = || Error::Report(format!("{}: malformed rank row {}", path.display(), lineno + 1));
        let mut fields = line.splitn(3, ',');
        let rank: usize = fields.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let gram: Vec<u32> = fields
            .next()
            .ok_or_else(bad)?
            .split_whitespace()
            .map(|v| v.parse::<u32>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        let probability: f64 = fields.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        n = gram.len();
        rows.push(crate::ngram::RankRow {
            rank,
            gram,
            probability,
        });
    }
    if rows.is_empty() {
        return Err(Error::EmptyTable);
    }
    Ok(RankTable { n, rows })
}

fn kde_csv(curve: &DensityCurve) -> Vec<u8> {
    let mut out = String::from("grid,density\n");
    for (x, d) in curve.grid.iter().zip(&curve.density) {
        out.push_str(&format!("{x},{d}\n"));
    }
    out.into_bytes()
}

fn summary_csv(summary: &CrossLanguageSummary) -> Vec<u8> {
    let mut header = vec!["language".to_string()];
    header.extend(summary.columns.iter().cloned());
    header.extend(summary.columns.iter().map(|c| format!("rank_{c}")));
    let mut out = header.join(",");
    out.push('\n');
    for row in &summary.rows {
        let mut fields = vec![row.language.clone()];
        fields.extend(row.values.iter().map(|v| fmt_opt(*v)));
        fields.extend(row.ranks.iter().map(|r| r.to_string()));
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out.into_bytes()
}

/// Loads a single language report from JSON.
pub fn load_report(path: &Path) -> Result<LanguageReport> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text)
        .map_err(|e| Error::Report(format!("{}: {e}", path.display())))
}

/// Loads every `<code>.json` language report in a directory, sorted by code.
/// Failure records (`*.error.json`) and the summary are skipped.
pub fn load_reports_dir(dir: &Path) -> Result<Vec<LanguageReport>> {
    let entries = fs::read_dir(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut reports = Vec::new();
    for entry in entries {
        let path = entry
            .map_err(|source| Error::Io {
                path: dir.to_path_buf(),
                source,
            })?
            .path();
        let name = match path.file_name().and_then(|n| n.to_str()) {
            Some(n) => n,
            None => continue,
        };
        if !name.ends_with(".json") || name.ends_with(".error.json") || name == "summary.json" {
            continue;
        }
        reports.push(load_report(&path)?);
    }
    reports.sort_by(|a, b| a.language.cmp(&b.language));
    Ok(reports)
}
