use std::collections::HashSet;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{ColumnSpec, Dataset};
use crate::error::{Error, Result};

/// Reserved header carrying provenance row ids. Written first by
/// [`write_csv`]; when present on input it becomes `source_row_ids`.
pub const SOURCE_ROW_ID: &str = "source_row_id";

pub fn load_csv(path: impl AsRef<Path>, schema: &[ColumnSpec]) -> Result<Dataset> {
    read_csv(BufReader::new(File::open(path)?), schema)
}

/// Reads a comma-separated table whose header is a superset of `schema`.
/// Columns come out in schema order; empty cells become `NaN` (missing).
pub fn read_csv<R: Read>(reader: R, schema: &[ColumnSpec]) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Err(Error::EmptyFile);
    }
    let lookup = |name: &str| headers.iter().position(|h| h == name);
    let mut positions = Vec::with_capacity(schema.len());
    for spec in schema {
        positions.push(lookup(&spec.name).ok_or_else(|| Error::MissingColumn(spec.name.clone()))?);
    }
    let id_pos = lookup(SOURCE_ROW_ID);

    let mut values = Vec::new();
    let mut ids = Vec::new();
    let mut seen = HashSet::new();
    let mut record = csv::StringRecord::new();
    let mut row = 0usize;
    while rdr.read_record(&mut record)? {
        for (spec, &pos) in schema.iter().zip(&positions) {
            values.push(parse_cell(&record[pos], row, &spec.name)?);
        }
        let id = match id_pos {
            Some(p) => record[p].parse::<u64>().map_err(|_| Error::UnparseableCell {
                row,
                column: SOURCE_ROW_ID.into(),
                value: record[p].to_string(),
            })?,
            None => row as u64,
        };
        if !seen.insert(id) {
            return Err(Error::DuplicateRowId(id));
        }
        ids.push(id);
        row += 1;
    }
    Dataset::new(schema.to_vec(), values, ids)
}

fn parse_cell(text: &str, row: usize, column: &str) -> Result<f64> {
    if text.is_empty() {
        return Ok(f64::NAN);
    }
    match text.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::UnparseableCell {
            row,
            column: column.to_string(),
            value: text.to_string(),
        }),
    }
}

/// Writes `source_row_id` followed by every column. Values use the shortest
/// representation that parses back to the same bits; missing cells are empty.
pub fn write_csv<W: Write>(dataset: &Dataset, writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    let mut header = vec![SOURCE_ROW_ID];
    header.extend(dataset.columns().iter().map(|c| c.name.as_str()));
    wtr.write_record(&header)?;
    let mut fields: Vec<String> = Vec::with_capacity(dataset.width() + 1);
    for (r, row) in dataset.rows().enumerate() {
        fields.clear();
        fields.push(dataset.source_row_ids()[r].to_string());
        fields.extend(row.iter().map(|v| {
            if v.is_nan() {
                String::new()
            } else {
                v.to_string()
            }
        }));
        wtr.write_record(&fields)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_csv_path(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    write_csv(dataset, BufWriter::new(File::create(path)?))
}
