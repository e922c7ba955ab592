//! Number formatting, aligned text tables and CSV emission.

use std::fmt::Write as _;

use clap::ValueEnum;

use crate::error::{CliError, Result};

/// Version of the JSON output schemas shipped in `docs/schema`.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

/// Rounds to 12 significant digits. Non-finite values pass through.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.11e}", x).parse().unwrap_or(x)
}

/// Shortest text that round-trips the 12-digit rounding of `x`.
pub fn sig12(x: f64) -> String {
    format!("{}", round12(x))
}

/// Full-precision text, shortest round-trip form.
pub fn num(x: f64) -> String {
    format!("{}", x)
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map_or_else(|| String::from("-"), num)
}

/// Column-aligned plain-text table. Numeric-looking cells are right-aligned.
#[derive(Debug, Default)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<I, S>(header: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Table { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn row<I, S>(&mut self, cells: I)
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.rows.push(cells.into_iter().map(Into::into).collect());
    }

    pub fn render(&self) -> String {
        let columns = self.header.len().max(self.rows.iter().map(Vec::len).max().unwrap_or(0));
        let mut widths = vec![0; columns];
        for row in std::iter::once(&self.header).chain(&self.rows) {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let mut out = String::new();
        let line = |row: &[String], out: &mut String| {
            let mut text = String::new();
            for (k, w) in widths.iter().enumerate() {
                let cell = row.get(k).map_or("", String::as_str);
                if k > 0 {
                    text.push_str("  ");
                }
                let pad = w - cell.chars().count();
                if looks_numeric(cell) {
                    text.extend(std::iter::repeat_n(' ', pad));
                    text.push_str(cell);
                } else {
                    text.push_str(cell);
                    text.extend(std::iter::repeat_n(' ', pad));
                }
            }
            out.push_str(text.trim_end());
            out.push('\n');
        };
        line(&self.header, &mut out);
        let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
        line(&rule, &mut out);
        for row in &self.rows {
            line(row, &mut out);
        }
        out
    }
}

fn looks_numeric(cell: &str) -> bool {
    !cell.is_empty() && cell.parse::<f64>().is_ok()
}

/// RFC 4180 CSV with a mandatory header and LF line endings.
pub fn csv_string<I, R, S>(header: &[&str], rows: I) -> Result<String>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = S>,
    S: AsRef<[u8]>,
{
    let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let fail = |e: csv::Error| CliError::Input(format!("csv encoding failed: {}", e));
    writer.write_record(header).map_err(fail)?;
    for row in rows {
        writer.write_record(row).map_err(fail)?;
    }
    let bytes = writer.into_inner().map_err(|e| CliError::Input(format!("csv encoding failed: {}", e)))?;
    String::from_utf8(bytes).map_err(|e| CliError::Input(format!("csv output is not UTF-8: {}", e)))
}

/// Pretty JSON followed by a newline.
pub fn json_string<T: serde::Serialize>(value: &T) -> Result<String> {
    let mut text =
        serde_json::to_string_pretty(value).map_err(|e| CliError::Input(format!("json encoding failed: {}", e)))?;
    text.push('\n');
    Ok(text)
}

/// `key: value` lines with keys padded to a common width.
pub fn key_values(pairs: &[(&str, String)]) -> String {
    let width = pairs.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
    let mut out = String::new();
    for (k, v) in pairs {
        let _ = writeln!(out, "{:<width$}  {}", k, v, width = width);
    }
    out
}
