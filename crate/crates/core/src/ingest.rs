//! Corpus loading: manifest resolution, markup stripping, UTF-8 validation.
//!
//! Input files are plain UTF-8 text, newline-delimited. Any line whose first
//! non-whitespace character is `<` is markup (Europarl `<CHAPTER>`,
//! `<SPEAKER>`, `<P>` tags are all line-delimited) and is dropped from the
//! stream. Files of one language are concatenated in lexicographic path
//! order so series construction is deterministic.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};

/// One language's input files, resolved from the manifest.
#[derive(Debug, Clone)]
pub struct LanguageCorpus {
    /// 2-letter language tag, e.g. `"fi"`, `"de"`.
    pub code: String,
    /// Input files in lexicographic path order.
    pub paths: Vec<PathBuf>,
    /// Populated after ingestion; equals the length of the series produced
    /// downstream.
    pub word_count: Option<u64>,
}

#[derive(Debug, Deserialize)]
struct ManifestFile {
    languages: BTreeMap<String, Vec<String>>,
}

/// Parses a TOML manifest mapping language code to file glob lists and
/// expands the globs.
///
/// ```toml
/// [languages]
/// en = ["corpus/en/*.txt"]
/// fi = ["corpus/fi/*.txt"]
/// ```
///
/// Globs are resolved relative to the manifest's directory. Languages come
/// back sorted by code. Duplicate codes are rejected by the TOML parser
/// itself; codes must be exactly two ASCII letters.
pub fn load_manifest(path: &Path) -> Result<Vec<LanguageCorpus>> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let manifest: ManifestFile =
        toml::from_str(&text).map_err(|e| Error::Manifest(format!("{}: {e}", path.display())))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));

    let mut corpora = Vec::new();
    for (code, patterns) in manifest.languages {
        if code.len() != 2 || !code.chars().all(|c| c.is_ascii_alphabetic()) {
            return Err(Error::Manifest(format!(
                "language code '{code}' is not a 2-letter tag"
            )));
        }
        let code = code.to_ascii_lowercase();
        if patterns.is_empty() {
            return Err(Error::EmptyCorpus { language: code });
        }
        let mut paths = Vec::new();
        for pattern in &patterns {
            let full = base.join(pattern);
            let full_str = full.to_string_lossy();
            let matches = glob::glob(&full_str)
                .map_err(|e| Error::Manifest(format!("bad glob '{pattern}': {e}")))?;
            let mut found = 0usize;
            for entry in matches {
                let p = entry.map_err(|e| Error::Io {
                    path: e.path().to_path_buf(),
                    source: e.into(),
                })?;
                if p.is_file() {
                    paths.push(p);
                    found += 1;
                }
            }
            if found == 0 {
                return Err(Error::Manifest(format!(
                    "language '{code}': no file matches '{pattern}'"
                )));
            }
        }
        paths.sort();
        paths.dedup();
        corpora.push(LanguageCorpus {
            code,
            paths,
            word_count: None,
        });
    }
    if corpora.is_empty() {
        return Err(Error::Manifest("manifest defines no languages".into()));
    }
    Ok(corpora)
}

/// Opens a corpus as a stream of clean text lines.
///
/// Lines are yielded in file order with markup lines removed; the stream
/// never yields a line whose first non-whitespace character is `<`. Missing
/// files fail naming the path; undecodable bytes fail with their offset, no
/// silent replacement.
pub fn load_corpus(corpus: &LanguageCorpus) -> Result<LineStream> {
    if corpus.paths.is_empty() {
        return Err(Error::EmptyCorpus {
            language: corpus.code.clone(),
        });
    }
    for path in &corpus.paths {
        if !path.is_file() {
            return Err(Error::Io {
                path: path.clone(),
                source: std::io::Error::new(std::io::ErrorKind::NotFound, "no such file"),
            });
        }
    }
    Ok(LineStream {
        paths: corpus.paths.clone(),
        next_file: 0,
        reader: None,
        offset: 0,
        buf: Vec::new(),
        failed: false,
    })
}

/// Iterator over the clean lines of a corpus. Fatal errors are yielded once
/// and end the stream.
#[derive(Debug)]
pub struct LineStream {
    paths: Vec<PathBuf>,
    next_file: usize,
    reader: Option<(PathBuf, BufReader<File>)>,
    /// Byte offset of the current line start within the current file.
    offset: u64,
    buf: Vec<u8>,
    failed: bool,
}

fn is_markup(line: &str) -> bool {
    line.trim_start().starts_with('<')
}

impl LineStream {
    fn open_next(&mut self) -> Result<bool> {
        if self.next_file >= self.paths.len() {
            return Ok(false);
        }
        let path = self.paths[self.next_file].clone();
        self.next_file += 1;
        let file = File::open(&path).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })?;
        self.reader = Some((path, BufReader::new(file)));
        self.offset = 0;
        Ok(true)
    }

    fn read_line(&mut self) -> Result<Option<String>> {
        loop {
            if self.reader.is_none() && !self.open_next()? {
                return Ok(None);
            }
            let (path, reader) = self.reader.as_mut().expect("reader just opened");
            self.buf.clear();
            let n = reader.read_until(b'\n', &mut self.buf).map_err(|source| Error::Io {
                path: path.clone(),
                source,
            })?;
            if n == 0 {
                self.reader = None;
                continue;
            }
            let line_start = self.offset;
            self.offset += n as u64;
            let mut bytes: &[u8] = &self.buf;
            if bytes.last() == Some(&b'\n') {
                bytes = &bytes[..bytes.len() - 1];
            }
            if bytes.last() == Some(&b'\r') {
                bytes = &bytes[..bytes.len() - 1];
            }
            let line = std::str::from_utf8(bytes).map_err(|e| Error::Utf8 {
                path: path.clone(),
                offset: line_start + e.valid_up_to() as u64,
            })?;
            if is_markup(line) {
                continue;
            }
            return Ok(Some(line.to_string()));
        }
    }
}

impl Iterator for LineStream {
    type Item = Result<String>;

    fn next(&mut self) -> Option<Result<String>> {
        if self.failed {
            return None;
        }
        match self.read_line() {
            Ok(Some(line)) => Some(Ok(line)),
            Ok(None) => None,
            Err(e) => {
                self.failed = true;
                Some(Err(e))
            }
        }
    }
}
