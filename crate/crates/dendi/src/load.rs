use std::collections::BTreeSet;
use std::path::Path;

use dendi_core::{Dataset, Family};

use crate::config::RunConfig;
use crate::error::{CliError, Result};

fn is_missing(field: &str) -> bool {
    let t = field.trim();
    t.is_empty() || t == "NA"
}

fn parse_real(column: &str, row: usize, value: &str) -> Result<f64> {
    match value.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(CliError::NonNumericValue {
            column: column.to_string(),
            row,
            value: value.to_string(),
            expected: "a finite decimal number",
        }),
    }
}

fn check_outcome(family: Family, column: &str, row: usize, raw: &str, v: f64) -> Result<()> {
    let expected = match family {
        Family::GaussianIdentity => return Ok(()),
        Family::BernoulliLogit if v == 0.0 || v == 1.0 => return Ok(()),
        Family::BernoulliLogit => "0 or 1",
        Family::PoissonLog if v >= 0.0 && v.fract() == 0.0 => return Ok(()),
        Family::PoissonLog => "a non-negative integer",
    };
    Err(CliError::NonNumericValue {
        column: column.to_string(),
        row,
        value: raw.to_string(),
        expected,
    })
}

/// Expands a confounder into model columns: the values themselves when
/// every entry is numeric, otherwise one 0/1 indicator per non-reference
/// level named `column=level`, with the lexicographically first level as
/// reference.
fn expand_confounder(name: &str, raw: &[&str]) -> (Vec<String>, Vec<Vec<f64>>) {
    let numeric: Option<Vec<f64>> = raw
        .iter()
        .map(|s| s.trim().parse::<f64>().ok().filter(|v| v.is_finite()))
        .collect();
    if let Some(values) = numeric {
        return (vec![name.to_string()], vec![values]);
    }
    let levels: BTreeSet<&str> = raw.iter().map(|s| s.trim()).collect();
    levels
        .iter()
        .skip(1)
        .map(|level| {
            let col = raw
                .iter()
                .map(|s| if s.trim() == *level { 1.0 } else { 0.0 })
                .collect();
            (format!("{name}={level}"), col)
        })
        .unzip()
}

/// Reads a headed CSV file into a dataset using the outcome, covariate and
/// confounder columns named in `config`. Rows with an empty or `NA` field
/// in any of those columns are dropped.
pub fn load_csv(path: &Path, config: &RunConfig) -> Result<Dataset> {
    let outcome = config
        .outcome_column
        .as_deref()
        .ok_or_else(|| CliError::Usage("no outcome column given".into()))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => CliError::io(path, io),
            other => CliError::Usage(format!("{}: {other:?}", path.display())),
        })?;
    let header = reader.headers()?.clone();
    let index_of = |name: &str| {
        header
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| CliError::MissingColumn(name.to_string()))
    };
    let y_idx = index_of(outcome)?;
    let x_idx: Vec<usize> = config
        .covariate_columns
        .iter()
        .map(|c| index_of(c))
        .collect::<Result<_>>()?;
    let z_idx: Vec<usize> = config
        .confounder_columns
        .iter()
        .map(|c| index_of(c))
        .collect::<Result<_>>()?;

    let used: Vec<usize> = std::iter::once(y_idx)
        .chain(x_idx.iter().copied())
        .chain(z_idx.iter().copied())
        .collect();
    let mut kept: Vec<(usize, csv::StringRecord)> = Vec::new();
    let mut dropped = 0;
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        if used.iter().any(|&c| record.get(c).is_none_or(is_missing)) {
            dropped += 1;
        } else {
            kept.push((i + 1, record));
        }
    }
    if dropped > 0 {
        log::info!("dropped {dropped} rows with missing values in used columns");
    }
    if kept.is_empty() {
        return Err(CliError::EmptyAfterFiltering { dropped });
    }

    let mut y = Vec::with_capacity(kept.len());
    for (row, rec) in &kept {
        let raw = &rec[y_idx];
        let v = parse_real(outcome, *row, raw)?;
        check_outcome(config.family, outcome, *row, raw, v)?;
        y.push(v);
    }
    let mut x = Vec::with_capacity(x_idx.len());
    for (name, &c) in config.covariate_columns.iter().zip(&x_idx) {
        let col = kept
            .iter()
            .map(|(row, rec)| parse_real(name, *row, &rec[c]))
            .collect::<Result<Vec<f64>>>()?;
        x.push(col);
    }
    let mut z = Vec::new();
    let mut z_names = Vec::new();
    for (name, &c) in config.confounder_columns.iter().zip(&z_idx) {
        let raw: Vec<&str> = kept.iter().map(|(_, rec)| &rec[c]).collect();
        let (names, cols) = expand_confounder(name, &raw);
        z_names.extend(names);
        z.extend(cols);
    }
    let data = Dataset::new(y, x, z, config.family)?
        .with_names(config.covariate_columns.clone(), z_names)?;
    Ok(data)
}
