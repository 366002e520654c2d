//! CSV ingestion and emission.
//!
//! Format: UTF-8, header row, comma separated, '.' decimal, empty field =
//! missing. Categorical columns are expanded to one-hot groups at ingestion,
//! so models only ever see a numeric matrix.

use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::data::{ColumnRole, DataSpec, Dataset, Transform, VariableKind, VariableSpec};
use crate::{Error, Result};

struct RawColumn {
    name: String,
    cells: Vec<Option<String>>,
}

/// Loads a CSV file against a JSON spec file.
///
/// Every CSV column must be declared in the spec and vice versa; exactly one
/// spec column has role=target. Empty fields mark missing values, except in
/// the target column where missingness is rejected.
pub fn load_csv(path: impl AsRef<Path>, spec_path: impl AsRef<Path>) -> Result<Dataset> {
    let spec = DataSpec::from_path(spec_path)?;
    load_csv_with_spec(path, &spec)
}

/// As [`load_csv`] with an already-parsed spec.
pub fn load_csv_with_spec(path: impl AsRef<Path>, spec: &DataSpec) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_path(path)?;
    let headers: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();

    for name in spec.columns.keys() {
        if !headers.contains(name) {
            return Err(Error::Spec(format!(
                "spec column {name:?} not present in CSV header"
            )));
        }
    }
    let mut columns: Vec<RawColumn> = Vec::with_capacity(headers.len());
    for name in &headers {
        if !spec.columns.contains_key(name) {
            return Err(Error::Spec(format!(
                "CSV column {name:?} not declared in spec"
            )));
        }
        columns.push(RawColumn {
            name: name.clone(),
            cells: Vec::new(),
        });
    }

    for record in reader.records() {
        let record = record?;
        for (j, field) in record.iter().enumerate() {
            let cell = if field.is_empty() {
                None
            } else {
                Some(field.to_string())
            };
            columns[j].cells.push(cell);
        }
    }
    let n = columns.first().map(|c| c.cells.len()).unwrap_or(0);
    if n == 0 {
        return Err(Error::validation("CSV has no data rows"));
    }

    // Assemble feature columns in header order, expanding categoricals.
    let mut specs: Vec<VariableSpec> = Vec::new();
    let mut data: Vec<Vec<f64>> = Vec::new();
    let mut missing: Vec<Vec<bool>> = Vec::new();
    let mut target: Option<DVector<f64>> = None;

    for col in &columns {
        let cspec = &spec.columns[&col.name];
        if cspec.role == ColumnRole::Target {
            let mut values = Vec::with_capacity(n);
            for (i, cell) in col.cells.iter().enumerate() {
                match cell {
                    None => return Err(Error::MissingTarget(i)),
                    Some(text) => values.push(parse_numeric(&col.name, i, text)?),
                }
            }
            target = Some(DVector::from_vec(values));
            continue;
        }
        match cspec.kind {
            VariableKind::Continuous | VariableKind::Binary => {
                let mut values = Vec::with_capacity(n);
                let mut mask = Vec::with_capacity(n);
                for (i, cell) in col.cells.iter().enumerate() {
                    match cell {
                        None => {
                            values.push(0.0);
                            mask.push(true);
                        }
                        Some(text) => {
                            values.push(parse_numeric(&col.name, i, text)?);
                            mask.push(false);
                        }
                    }
                }
                specs.push(VariableSpec {
                    name: col.name.clone(),
                    kind: cspec.kind,
                    ohe_group: cspec.ohe_group.clone(),
                    transform: cspec.transform,
                });
                data.push(values);
                missing.push(mask);
            }
            VariableKind::Categorical => {
                let (lspecs, ldata, lmask) = expand_categorical(col)?;
                specs.extend(lspecs);
                data.extend(ldata);
                missing.extend(lmask);
            }
        }
    }

    let target = target.ok_or_else(|| Error::Spec("target column absent from CSV".into()))?;
    let p = specs.len();
    let features = DMatrix::from_fn(n, p, |i, j| data[j][i]);
    let mask = DMatrix::from_fn(n, p, |i, j| missing[j][i]);
    Dataset::new(features, target, specs, mask)
}

/// Expands one categorical column into a one-hot group. Levels are the
/// distinct observed cell texts in lexicographic order; member columns are
/// named `{column}={level}`.
fn expand_categorical(col: &RawColumn) -> Result<(Vec<VariableSpec>, Vec<Vec<f64>>, Vec<Vec<bool>>)> {
    let mut levels: Vec<String> = col
        .cells
        .iter()
        .flatten()
        .cloned()
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    levels.sort();
    if levels.is_empty() {
        return Err(Error::validation(format!(
            "categorical column {:?} is entirely missing",
            col.name
        )));
    }
    let n = col.cells.len();
    let mut specs = Vec::with_capacity(levels.len());
    let mut data = vec![vec![0.0; n]; levels.len()];
    let mut mask = vec![vec![false; n]; levels.len()];
    for (l, level) in levels.iter().enumerate() {
        specs.push(VariableSpec {
            name: format!("{}={}", col.name, level),
            kind: VariableKind::Binary,
            ohe_group: Some(col.name.clone()),
            transform: Transform::None,
        });
        for (i, cell) in col.cells.iter().enumerate() {
            match cell {
                None => mask[l][i] = true,
                Some(text) if text == level => data[l][i] = 1.0,
                Some(_) => {}
            }
        }
    }
    Ok((specs, data, mask))
}

fn parse_numeric(column: &str, row: usize, text: &str) -> Result<f64> {
    text.trim().parse::<f64>().map_err(|_| Error::NonNumeric {
        column: column.to_string(),
        row,
        value: text.to_string(),
    })
}

/// Writes a dataset back to CSV. Numeric cells use the shortest
/// representation that round-trips through f64 parsing; missing cells are
/// written as empty fields.
pub fn write_csv(d: &Dataset, target_name: &str, path: impl AsRef<Path>) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    let mut header: Vec<&str> = d.specs.iter().map(|s| s.name.as_str()).collect();
    header.push(target_name);
    writer.write_record(&header)?;
    for i in 0..d.n() {
        let mut record: Vec<String> = Vec::with_capacity(d.p() + 1);
        for j in 0..d.p() {
            if d.is_cell_missing(i, j) {
                record.push(String::new());
            } else {
                record.push(format!("{}", d.features[(i, j)]));
            }
        }
        record.push(format!("{}", d.target[i]));
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}
