//! CSV conventions: `.` decimal point, no grouping, 17 significant digits
//! for real values, `\n` line endings.

use std::fmt::Write as _;
use std::io::Read;
use std::path::Path;

use avlab::{AllanSpectrum, TimeSeries};

use crate::error::{CliError, CliResult};

/// Real value with 17 significant digits, e.g. `1.2512500000000000e2`.
pub fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_real).unwrap_or_default()
}

pub fn series_csv(x: &TimeSeries) -> String {
    let mut out = String::from("t,x\n");
    for (i, v) in x.values().iter().enumerate() {
        let _ = writeln!(out, "{},{}", i + 1, fmt_real(*v));
    }
    out
}

pub fn spectrum_csv(s: &AllanSpectrum) -> String {
    let mut out = String::from("n,av\n");
    for e in s.entries() {
        let _ = writeln!(out, "{},{}", e.n, fmt_real(e.av));
    }
    out
}

/// Writes to `path`, or stdout when `path` is `None` or `-`.
pub fn emit(path: Option<&Path>, contents: &str) -> CliResult<()> {
    match path {
        Some(p) if p != Path::new("-") => {
            std::fs::write(p, contents).map_err(|e| CliError::write(p, e))
        }
        _ => {
            use std::io::Write;
            std::io::stdout()
                .write_all(contents.as_bytes())
                .map_err(|e| CliError::Resource(format!("cannot write to stdout: {e}")))
        }
    }
}

fn parse_number(field: &str, line: u64) -> CliResult<f64> {
    let v: f64 = field
        .trim()
        .parse()
        .map_err(|_| CliError::Data(format!("line {line}: cannot parse `{field}` as a number")))?;
    if !v.is_finite() {
        return Err(CliError::Data(format!(
            "line {line}: non-finite value `{field}`"
        )));
    }
    Ok(v)
}

/// Reads one numeric column. A non-numeric first row is a header; the
/// column named `name` is used if present, otherwise the last column.
pub fn read_column(path: &Path, name: &str) -> CliResult<Vec<f64>> {
    let mut raw = String::new();
    std::fs::File::open(path)
        .and_then(|mut f| f.read_to_string(&mut raw))
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(raw.as_bytes());

    let mut column: Option<usize> = None;
    let mut values = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(i as u64 + 1);
            CliError::Data(format!("line {line}: malformed CSV: {e}"))
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(i as u64 + 1);
        if record.iter().all(str::is_empty) {
            continue;
        }
        if column.is_none() {
            let numeric = record.iter().all(|f| f.parse::<f64>().is_ok());
            if numeric {
                column = Some(record.len() - 1);
            } else {
                column = Some(
                    record
                        .iter()
                        .position(|h| h.eq_ignore_ascii_case(name))
                        .unwrap_or(record.len() - 1),
                );
                continue;
            }
        }
        let col = column.expect("set above");
        let field = record.get(col).ok_or_else(|| {
            CliError::Data(format!("line {line}: expected at least {} fields", col + 1))
        })?;
        values.push(parse_number(field, line)?);
    }
    if values.is_empty() {
        return Err(CliError::Data(format!(
            "{} holds no data rows",
            path.display()
        )));
    }
    Ok(values)
}
