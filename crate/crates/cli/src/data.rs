use std::fs;
use std::path::Path;

use crate::error::{CliError, Result};

/// Read a data file: one numeric observation per line, decimal point,
/// optionally skipping a single header line. Every retained line must parse
/// as a finite real.
pub fn read_data_file(path: &Path, skip_header: bool) -> Result<Vec<f64>> {
    let content = fs::read_to_string(path)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
    let mut values = Vec::new();
    for (idx, line) in content.lines().enumerate() {
        if idx == 0 && skip_header {
            continue;
        }
        let field = line.trim();
        let value: f64 = field.parse().map_err(|_| {
            CliError::Data(format!(
                "{}:{}: not a number: {field:?}",
                path.display(),
                idx + 1
            ))
        })?;
        if !value.is_finite() {
            return Err(CliError::Data(format!(
                "{}:{}: observation must be finite, got {value}",
                path.display(),
                idx + 1
            )));
        }
        values.push(value);
    }
    Ok(values)
}
