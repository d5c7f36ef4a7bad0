//! CSV datasets with header `x1,…,xd,y`.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::dataset::LabeledDataset;

use super::HarnessError;

pub fn load_dataset_csv(path: impl AsRef<Path>) -> Result<LabeledDataset, HarnessError> {
    read_dataset_csv(File::open(path)?)
}

/// Rows and columns in errors are 1-based; the header is row 1.
pub fn read_dataset_csv(reader: impl Read) -> Result<LabeledDataset, HarnessError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(true).trim(csv::Trim::All).from_reader(reader);
    let header = rdr.headers()?.clone();
    let width = header.len();
    if width < 2 {
        return Err(HarnessError::MalformedCsv {
            row: 1,
            col: width.max(1),
            reason: "need at least one covariate and y".into(),
        });
    }
    for (j, name) in header.iter().enumerate() {
        let expected = if j + 1 == width { "y".to_string() } else { format!("x{}", j + 1) };
        if name != expected {
            return Err(HarnessError::MalformedCsv {
                row: 1,
                col: j + 1,
                reason: format!("header `{name}`, expected `{expected}`"),
            });
        }
    }
    let d = width - 1;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let row = k + 2;
        let rec = rec?;
        if rec.len() != width {
            return Err(HarnessError::DimensionMismatch { row, expected: width, found: rec.len() });
        }
        let mut vals = Vec::with_capacity(width);
        for (j, cell) in rec.iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| HarnessError::MalformedCsv {
                row,
                col: j + 1,
                reason: format!("`{cell}` is not a number"),
            })?;
            vals.push(v);
        }
        ys.push(vals.pop().expect("width ≥ 2"));
        xs.push(vals);
    }
    Ok(LabeledDataset::with_dim(d, xs, ys)?)
}

pub fn write_dataset_csv(path: impl AsRef<Path>, data: &LabeledDataset) -> Result<(), HarnessError> {
    write_dataset_csv_to(File::create(path)?, data)
}

/// Values are written with 17 significant digits, which round-trips every double.
pub fn write_dataset_csv_to(writer: impl Write, data: &LabeledDataset) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = (1..=data.dim()).map(|j| format!("x{j}")).collect();
    header.push("y".into());
    w.write_record(&header)?;
    for (x, y) in data.iter() {
        w.write_record(x.iter().chain(std::iter::once(&y)).map(|v| format!("{v:.16e}")))?;
    }
    w.flush()?;
    Ok(())
}
