//! CSV input and JSON/CSV output.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use l1logit::Dataset;
use serde::Serialize;

use crate::error::{CliError, CliResult};

/// Numeric rows of a CSV file with their 1-based line numbers. A first row
/// that does not parse as numbers is taken as a header and skipped.
fn numeric_rows(path: &Path) -> CliResult<Vec<(u64, Vec<f64>)>> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(file);
    let mut rows = Vec::new();
    for (k, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::io(path, e))?;
        let line = record.position().map_or(k as u64 + 1, |p| p.line());
        let parsed: Vec<Option<f64>> = record.iter().map(|f| f.parse::<f64>().ok()).collect();
        if k == 0 && parsed.iter().any(Option::is_none) {
            continue;
        }
        let mut values = Vec::with_capacity(parsed.len());
        for (col, (field, value)) in record.iter().zip(parsed).enumerate() {
            match value {
                Some(v) if v.is_finite() => values.push(v),
                _ => {
                    return Err(CliError::Data(format!(
                        "{}: line {line}, column {}: `{field}` is not a finite number",
                        path.display(),
                        col + 1
                    )))
                }
            }
        }
        rows.push((line, values));
    }
    Ok(rows)
}

/// Reads `y, x_1, ..., x_p` rows with `y` in {0, 1}.
pub fn read_dataset(path: &Path) -> CliResult<Dataset> {
    let rows = numeric_rows(path)?;
    if rows.is_empty() {
        return Err(CliError::Data(format!("{}: no data rows", path.display())));
    }
    let width = rows[0].1.len();
    if width < 2 {
        return Err(CliError::Data(format!(
            "{}: need a response column and at least one predictor",
            path.display()
        )));
    }
    let n = rows.len();
    let p = width - 1;
    let mut y = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n * p);
    for (line, row) in &rows {
        let label = row[0];
        if label != 0.0 && label != 1.0 {
            return Err(CliError::Data(format!(
                "{}: line {line}: response must be 0 or 1, got {label}",
                path.display()
            )));
        }
        y.push(label);
        values.extend_from_slice(&row[1..]);
    }
    Ok(Dataset::from_row_slice(n, p, &values, y)?)
}

/// Reads true coefficients: every number in the file, in reading order.
pub fn read_truth(path: &Path, p: usize) -> CliResult<Vec<f64>> {
    let beta: Vec<f64> = numeric_rows(path)?
        .into_iter()
        .flat_map(|(_, row)| row)
        .collect();
    if beta.len() != p {
        return Err(CliError::Data(format!(
            "{}: truth has {} values, data has {p} predictors",
            path.display(),
            beta.len()
        )));
    }
    Ok(beta)
}

/// Serializes `value` to `out` or standard output, followed by a newline.
pub fn write_json<T: Serialize>(value: &T, out: Option<&Path>, compact: bool) -> CliResult<()> {
    let mut text = if compact {
        serde_json::to_string(value)
    } else {
        serde_json::to_string_pretty(value)
    }
    .map_err(|e| CliError::Numeric(format!("cannot serialize report: {e}")))?;
    text.push('\n');
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Data(format!("standard output: {e}"))),
    }
}

/// Writes serializable rows with a header line.
pub fn write_csv<T: Serialize>(rows: &[T], path: &Path) -> CliResult<()> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| CliError::io(path, e))?;
    for row in rows {
        writer.serialize(row).map_err(|e| CliError::io(path, e))?;
    }
    writer.flush().map_err(|e| CliError::io(path, e))
}
