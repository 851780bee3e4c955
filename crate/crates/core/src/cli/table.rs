//! Delimited tables with `#` metadata lines.
//!
//! Layout of every file written by the CLI:
//!
//! ```text
//! # xysteer 0.1.0 sweep
//! # gamma: 0.6
//! # r: 1
//! N,h,S,dS_dh,...
//! 101,0,...
//! ```
//!
//! Floats use Rust's shortest round-trip formatting, so every numeric cell
//! parses back to the exact value that was written.

use std::io::Write;
use std::path::Path;

use clap::ValueEnum;

use super::CliError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Tsv,
}

impl Format {
    pub fn delimiter(self) -> u8 {
        match self {
            Format::Csv => b',',
            Format::Tsv => b'\t',
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Tsv => "tsv",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    /// `(key, value)` pairs written as `# key: value`.
    pub meta: Vec<(String, String)>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            ..Default::default()
        }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.meta.push((key.to_string(), value.to_string()));
        self
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn meta_value(&self, key: &str) -> Option<&str> {
        self.meta
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Renders the table. `title` becomes the first comment line.
    pub fn render(&self, title: &str, format: Format) -> Vec<u8> {
        let mut out = Vec::new();
        writeln!(out, "# {title}").unwrap();
        for (k, v) in &self.meta {
            writeln!(out, "# {k}: {v}").unwrap();
        }
        let mut w = csv::WriterBuilder::new()
            .delimiter(format.delimiter())
            .from_writer(out);
        w.write_record(&self.header).unwrap();
        for row in &self.rows {
            w.write_record(row).unwrap();
        }
        w.into_inner().expect("in-memory writer")
    }

    /// Reads a table written by [`Table::render`]. The delimiter is taken
    /// from the header line.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut meta = Vec::new();
        let mut body_start = None;
        let mut offset = 0;
        for line in text.split_inclusive('\n') {
            let trimmed = line.trim_end();
            if let Some(comment) = trimmed.strip_prefix('#') {
                if let Some((k, v)) = comment.split_once(':') {
                    meta.push((k.trim().to_string(), v.trim().to_string()));
                }
            } else if !trimmed.is_empty() {
                body_start = Some(offset);
                break;
            }
            offset += line.len();
        }
        let start = body_start.ok_or_else(|| CliError::Usage("table has no header row".into()))?;
        let body = &text[start..];
        let header_line = body.lines().next().unwrap_or("");
        let delimiter = if header_line.contains('\t') {
            b'\t'
        } else {
            b','
        };

        let mut reader = csv::ReaderBuilder::new()
            .delimiter(delimiter)
            .comment(Some(b'#'))
            .from_reader(body.as_bytes());
        let malformed = |e: csv::Error| CliError::Usage(format!("malformed table: {e}"));
        let header: Vec<String> = reader
            .headers()
            .map_err(malformed)?
            .iter()
            .map(str::to_string)
            .collect();
        if header.iter().any(|h| h.is_empty()) {
            return Err(CliError::Usage("malformed table: empty column name".into()));
        }
        let rows = reader
            .records()
            .map(|r| r.map(|rec| rec.iter().map(str::to_string).collect()))
            .collect::<Result<Vec<Vec<String>>, _>>()
            .map_err(malformed)?;
        Ok(Table { meta, header, rows })
    }
}

/// Writes `bytes` to `path`, or to stdout when `path` is `None`.
pub fn emit(bytes: &[u8], path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|source| CliError::Output {
            path: p.to_path_buf(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(bytes)
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Output {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

/// Shortest representation that parses back to the same `f64`; exponent
/// form outside `[1e-5, 1e16)`.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || !a.is_finite() || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}
