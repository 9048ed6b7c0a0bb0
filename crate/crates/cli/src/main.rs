//! Command-line front end for the word-length corpus statistics pipeline.
//!
//! Every flag can also be set through an environment variable with the
//! `WORDLEN_` prefix, e.g. `WORDLEN_MANIFEST`, `WORDLEN_SEED`.
//!
//! Exit codes: 0 success, 1 completed with per-language error records,
//! 2 fatal error.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use wordlen::report::{self, AnalysisConfig, OutputFormat};
use wordlen::{ingest, tokenize, TokenizerOptions};

#[derive(Parser)]
#[command(name = "wordlen", version, about = "Word-length distribution, entropy, and correlation statistics for multilingual corpora")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze every language in a manifest and write reports.
    Analyze(AnalyzeArgs),
    /// Summarize previously written reports into a cross-language table.
    Compare(CompareArgs),
    /// Dump the first tokens of a corpus with their lengths (tokenizer audit).
    Tokens(TokensArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// TOML manifest mapping language codes to file globs.
    #[arg(long, env = "WORDLEN_MANIFEST")]
    manifest: PathBuf,
    /// Output directory for reports and CSVs.
    #[arg(long, env = "WORDLEN_OUT")]
    out: PathBuf,
    /// Segment length in words.
    #[arg(long, env = "WORDLEN_BLOCK_LEN", default_value_t = 1000)]
    block_len: usize,
    /// Gram orders to compute (comma-separated, within 1..=8).
    #[arg(long, env = "WORDLEN_ORDERS", value_delimiter = ',', default_value = "1,2,3")]
    orders: Vec<usize>,
    /// Shuffle repeats per segment for the C_n baselines.
    #[arg(long, env = "WORDLEN_REPEATS", default_value_t = 10)]
    repeats: usize,
    /// Base seed for the shuffled baselines.
    #[arg(long, env = "WORDLEN_SEED", default_value_t = 0)]
    seed: u64,
    /// Cap word lengths at this many letters (no cap when omitted).
    #[arg(long, env = "WORDLEN_CAP")]
    cap: Option<u32>,
    /// Output formats: json, csv, or both.
    #[arg(long, env = "WORDLEN_FORMAT", default_value = "both")]
    format: OutputFormat,
}

#[derive(Args)]
struct CompareArgs {
    /// Directory holding per-language report JSON files.
    #[arg(long, env = "WORDLEN_REPORTS")]
    reports: PathBuf,
    /// Where to write the summary (defaults to the reports directory).
    #[arg(long, env = "WORDLEN_OUT")]
    out: Option<PathBuf>,
    /// Output formats: json, csv, or both.
    #[arg(long, env = "WORDLEN_FORMAT", default_value = "both")]
    format: OutputFormat,
}

#[derive(Args)]
struct TokensArgs {
    /// TOML manifest mapping language codes to file globs.
    #[arg(long, env = "WORDLEN_MANIFEST")]
    manifest: PathBuf,
    /// Language code to audit.
    #[arg(long)]
    language: String,
    /// How many tokens to dump.
    #[arg(long, default_value_t = 40)]
    count: usize,
    /// Cap word lengths at this many letters (no cap when omitted).
    #[arg(long, env = "WORDLEN_CAP")]
    cap: Option<u32>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Analyze(args) => run_analyze(args),
        Command::Compare(args) => run_compare(args),
        Command::Tokens(args) => run_tokens(args),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run_analyze(args: AnalyzeArgs) -> anyhow::Result<bool> {
    let config = AnalysisConfig {
        manifest: args.manifest,
        out_dir: args.out,
        block_len: args.block_len,
        orders: args.orders,
        repeats: args.repeats,
        base_seed: args.seed,
        tokenizer: TokenizerOptions {
            max_word_length: args.cap,
        },
        format: args.format,
    };
    let run = report::analyze(&config).context("analysis failed")?;
    let summary = if run.analyses.len() >= 2 {
        Some(report::compare_languages(&run.reports())?)
    } else {
        None
    };
    let written = report::emit_report(&run, summary.as_ref(), &config)
        .context("emitting reports failed")?;

    for analysis in &run.analyses {
        let r = &analysis.report;
        println!(
            "{}: {} words, {} segments",
            r.language,
            r.word_count,
            r.segment_moments.len()
        );
    }
    for failure in &run.failures {
        eprintln!("{}: {}", failure.language, failure.error);
    }
    if let Some(summary) = &summary {
        print_summary(summary);
    }
    println!("wrote {} files to {}", written.len(), config.out_dir.display());
    Ok(run.failures.is_empty())
}

fn run_compare(args: CompareArgs) -> anyhow::Result<bool> {
    let reports = report::load_reports_dir(&args.reports)?;
    let refs: Vec<&report::LanguageReport> = reports.iter().collect();
    let summary = report::compare_languages(&refs)?;
    print_summary(&summary);

    let out_dir = args.out.unwrap_or_else(|| args.reports.clone());
    let config = AnalysisConfig {
        out_dir,
        format: args.format,
        ..AnalysisConfig::new(PathBuf::new(), PathBuf::new())
    };
    let empty = report::AnalysisRun {
        analyses: Vec::new(),
        failures: Vec::new(),
    };
    report::emit_report(&empty, Some(&summary), &config)?;
    Ok(true)
}

fn run_tokens(args: TokensArgs) -> anyhow::Result<bool> {
    let corpora = ingest::load_manifest(&args.manifest)?;
    let corpus = corpora
        .iter()
        .find(|c| c.code == args.language)
        .with_context(|| format!("language '{}' not in manifest", args.language))?;
    let mut remaining = args.count;
    'outer: for line in ingest::load_corpus(corpus)? {
        let line = line?;
        for token in tokenize::tokenize(&line) {
            if remaining == 0 {
                break 'outer;
            }
            let mut len = tokenize::word_length(token) as u32;
            if let Some(cap) = args.cap {
                len = len.min(cap);
            }
            println!("{token}\t{len}");
            remaining -= 1;
        }
    }
    Ok(true)
}

fn print_summary(summary: &report::CrossLanguageSummary) {
    let mut header = String::from("language");
    for c in &summary.columns {
        header.push_str(&format!("  {c:>9}"));
    }
    println!("{header}");
    for row in &summary.rows {
        let mut line = format!("{:<8}", row.language);
        for v in &row.values {
            match v {
                Some(x) => line.push_str(&format!("  {x:>9.4}")),
                None => line.push_str(&format!("  {:>9}", "-")),
            }
        }
        println!("{line}");
    }
}
