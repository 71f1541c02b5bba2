//! Pattern and FASTA ingestion, CSV output.

use std::fmt::Display;
use std::io::Write;
use std::path::Path;

use hopfield_core::patterns::encode_rna;
use hopfield_core::{ActivationPattern, Matrix, TrainingSet};
use thiserror::Error;

/// Bases kept from each FASTA record unless told otherwise.
pub const DEFAULT_BASES: usize = 50;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("no patterns found")]
    Empty,
    #[error(transparent)]
    Core(#[from] hopfield_core::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    /// One pattern per line, entries from +1, -1, 0.
    Patterns,
    /// `>name` headers followed by A/C/G/U sequence lines.
    Fasta,
}

fn line_err(line: usize, message: impl Display) -> IngestError {
    IngestError::Line { line, message: message.to_string() }
}

/// Parses pattern lines. Blank lines and lines starting with `#` are skipped.
/// Zeros are allowed, so the result may hold incomplete patterns.
pub fn parse_patterns(text: &str) -> Result<Vec<(usize, ActivationPattern)>, IngestError> {
    let mut out: Vec<(usize, ActivationPattern)> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let body = raw.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let values = body
            .split_whitespace()
            .map(|tok| match tok {
                "+1" | "1" => Ok(1.0),
                "-1" => Ok(-1.0),
                "0" | "+0" | "-0" => Ok(0.0),
                _ => Err(line_err(line, format_args!("entry {tok:?} is not one of +1, -1, 0"))),
            })
            .collect::<Result<Vec<f64>, _>>()?;
        if let Some((first, p)) = out.first() {
            if p.dim() != values.len() {
                return Err(line_err(line, format_args!("{} entries, but line {first} has {}", values.len(), p.dim())));
            }
        }
        let p = ActivationPattern::incomplete(values).map_err(|e| line_err(line, e))?;
        out.push((line, p));
    }
    Ok(out)
}

/// A pattern file as training data: every entry must be ±1.
pub fn patterns_training_set(text: &str) -> Result<TrainingSet, IngestError> {
    let rows = parse_patterns(text)?;
    if rows.is_empty() {
        return Err(IngestError::Empty);
    }
    let mut names = Vec::with_capacity(rows.len());
    let mut pats = Vec::with_capacity(rows.len());
    for (line, p) in rows {
        if !p.is_binary() {
            return Err(line_err(line, "training patterns may not contain 0"));
        }
        names.push(format!("line{line}"));
        pats.push(p);
    }
    Ok(TrainingSet::with_names(pats, names)?)
}

/// Reads FASTA records as (line of header, name, sequence).
pub fn parse_fasta(text: &str) -> Result<Vec<(usize, String, String)>, IngestError> {
    let mut out: Vec<(usize, String, String)> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let body = raw.trim();
        if body.is_empty() || body.starts_with(';') {
            continue;
        }
        if let Some(name) = body.strip_prefix('>') {
            out.push((line, name.trim().to_string(), String::new()));
            continue;
        }
        let Some((_, _, seq)) = out.last_mut() else {
            return Err(line_err(line, "sequence data before the first '>' header"));
        };
        if let Some(pos) = body.find(|c: char| !matches!(c.to_ascii_uppercase(), 'A' | 'C' | 'G' | 'U' | 'T')) {
            let c = body[pos..].chars().next().unwrap_or('?');
            return Err(line_err(line, format_args!("invalid base {c:?} in column {}", pos + 1)));
        }
        seq.push_str(body);
    }
    Ok(out)
}

/// FASTA as training data, each record cut to its first `bases` bases and
/// encoded two neurons per base. Records shorter than `bases` are rejected.
/// DNA-style `T` is read as `U`.
pub fn fasta_training_set(text: &str, bases: usize) -> Result<TrainingSet, IngestError> {
    let records = parse_fasta(text)?;
    if records.is_empty() {
        return Err(IngestError::Empty);
    }
    let mut names = Vec::with_capacity(records.len());
    let mut pats = Vec::with_capacity(records.len());
    for (line, name, seq) in records {
        if seq.len() < bases {
            return Err(line_err(line, format_args!("record {name:?} has {} bases, need {bases}", seq.len())));
        }
        let rna: String = seq[..bases].chars().map(|c| if c.eq_ignore_ascii_case(&'T') { 'U' } else { c }).collect();
        pats.push(encode_rna(&rna).map_err(|e| line_err(line, e))?);
        names.push(name);
    }
    Ok(TrainingSet::with_names(pats, names)?)
}

pub fn read_text(path: &Path) -> Result<String, IngestError> {
    std::fs::read_to_string(path).map_err(|source| IngestError::Io { path: path.display().to_string(), source })
}

pub fn ingest(path: &Path, format: Format, bases: usize) -> Result<TrainingSet, IngestError> {
    let text = read_text(path)?;
    match format {
        Format::Patterns => patterns_training_set(&text),
        Format::Fasta => fasta_training_set(&text, bases),
    }
}

/// One row of a recovery curve or γ sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    /// Known-neuron count, or γ for a sweep.
    pub key: f64,
    pub mean_hamming: f64,
    pub stderr: f64,
    pub reps: usize,
}

/// Writes `<key>,mean_hamming,stderr,reps` rows.
pub fn write_curve<W: Write>(out: W, key: &str, points: &[CurvePoint]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([key, "mean_hamming", "stderr", "reps"])?;
    for p in points {
        w.write_record([p.key.to_string(), p.mean_hamming.to_string(), p.stderr.to_string(), p.reps.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Square matrix as CSV, preceded by a `d=<n>` line.
pub fn write_matrix<W: Write>(mut out: W, m: &Matrix) -> std::io::Result<()> {
    writeln!(out, "d={}", m.rows())?;
    let mut w = csv::WriterBuilder::new().from_writer(out);
    for i in 0..m.rows() {
        w.write_record((0..m.cols()).map(|j| m[(i, j)].to_string()))?;
    }
    w.flush()
}

/// Reads back what [`write_matrix`] wrote.
pub fn read_matrix(text: &str) -> Result<Matrix, IngestError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, head) = lines.next().ok_or(IngestError::Empty)?;
    let d: usize = head
        .trim()
        .strip_prefix("d=")
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| line_err(1, "expected a d=<n> header"))?;
    let mut data = Vec::with_capacity(d * d);
    let mut rows = 0;
    for (k, l) in lines {
        let row = l
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|e| line_err(k + 1, format_args!("{t:?}: {e}"))))
            .collect::<Result<Vec<_>, _>>()?;
        if row.len() != d {
            return Err(line_err(k + 1, format_args!("{} columns, expected {d}", row.len())));
        }
        data.extend(row);
        rows += 1;
    }
    if rows != d {
        return Err(line_err(text.lines().count(), format_args!("{rows} rows, expected {d}")));
    }
    Ok(Matrix::from_row_major(d, d, data))
}
