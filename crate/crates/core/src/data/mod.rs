//! In-memory alloy table: column schema, ingestion, preprocessing and
//! min-max normalization.
//!
//! A [`Dataset`] is a dense row-major `f64` table. Missing cells are carried as
//! `NaN` between [`load_csv`] and [`zero_fill_missing`]; every other operation
//! expects a total table.

mod csv_io;
mod schema;
mod stats;
pub mod synth;

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::IteratorRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use csv_io::{load_csv, read_csv, write_csv, write_csv_path, SOURCE_ROW_ID};
pub use schema::{load_schema, parse_schema, write_schema};
pub use stats::{
    compute_norm_stats, denormalize, normalize, summarize, ColumnSummary, NormStats,
    NormalizedTable,
};

/// Semantic group a column belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnGroup {
    ScrapInput,
    ElementFraction,
    Microstructure,
    Property,
}

impl ColumnGroup {
    pub const ALL: [ColumnGroup; 4] = [
        ColumnGroup::ScrapInput,
        ColumnGroup::ElementFraction,
        ColumnGroup::Microstructure,
        ColumnGroup::Property,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ColumnGroup::ScrapInput => "scrap_input",
            ColumnGroup::ElementFraction => "element_fraction",
            ColumnGroup::Microstructure => "microstructure",
            ColumnGroup::Property => "property",
        }
    }
}

impl fmt::Display for ColumnGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ColumnGroup {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace(['-', ' '], "_").as_str() {
            "scrap_input" | "scrap" => Ok(ColumnGroup::ScrapInput),
            "element_fraction" | "element" | "composition" => Ok(ColumnGroup::ElementFraction),
            "microstructure" => Ok(ColumnGroup::Microstructure),
            "property" => Ok(ColumnGroup::Property),
            other => Err(format!("unknown column group {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnSpec {
    pub name: String,
    pub group: ColumnGroup,
    /// Informational only.
    #[serde(default)]
    pub units: String,
}

impl ColumnSpec {
    pub fn new(name: impl Into<String>, group: ColumnGroup, units: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            group,
            units: units.into(),
        }
    }
}

/// Immutable row-major numeric table with provenance row ids.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    columns: Vec<ColumnSpec>,
    values: Vec<f64>,
    row_count: usize,
    source_row_ids: Vec<u64>,
}

impl Dataset {
    /// Builds a dataset, checking shape, name uniqueness and row-id uniqueness.
    /// `NaN` cells are accepted and mean "missing".
    pub fn new(columns: Vec<ColumnSpec>, values: Vec<f64>, source_row_ids: Vec<u64>) -> Result<Self> {
        let mut seen = HashSet::new();
        for c in &columns {
            if !seen.insert(c.name.as_str()) {
                return Err(Error::DuplicateColumn(c.name.clone()));
            }
        }
        let row_count = source_row_ids.len();
        if values.len() != row_count * columns.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} values for {} rows x {} columns",
                values.len(),
                row_count,
                columns.len()
            )));
        }
        let mut ids = HashSet::with_capacity(row_count);
        for &id in &source_row_ids {
            if !ids.insert(id) {
                return Err(Error::DuplicateRowId(id));
            }
        }
        Ok(Self {
            columns,
            values,
            row_count,
            source_row_ids,
        })
    }

    /// Builds a dataset with source row ids `0..rows`.
    pub fn from_rows(columns: Vec<ColumnSpec>, rows: &[Vec<f64>]) -> Result<Self> {
        let width = columns.len();
        let mut values = Vec::with_capacity(rows.len() * width);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != width {
                return Err(Error::ShapeMismatch(format!(
                    "row {i} has {} values, expected {width}",
                    r.len()
                )));
            }
            values.extend_from_slice(r);
        }
        Self::new(columns, values, (0..rows.len() as u64).collect())
    }

    pub fn columns(&self) -> &[ColumnSpec] {
        &self.columns
    }

    pub fn column_names(&self) -> Vec<&str> {
        self.columns.iter().map(|c| c.name.as_str()).collect()
    }

    pub fn width(&self) -> usize {
        self.columns.len()
    }

    pub fn row_count(&self) -> usize {
        self.row_count
    }

    pub fn is_empty(&self) -> bool {
        self.row_count == 0
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn source_row_ids(&self) -> &[u64] {
        &self.source_row_ids
    }

    pub fn row(&self, row: usize) -> &[f64] {
        let w = self.width();
        &self.values[row * w..(row + 1) * w]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        // chunks_exact panics on 0
        self.values.chunks_exact(self.width().max(1)).take(self.row_count)
    }

    pub fn value(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.width() + col]
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn require_column(&self, name: &str) -> Result<usize> {
        self.column_index(name)
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))
    }

    pub fn column(&self, col: usize) -> impl Iterator<Item = f64> + '_ {
        self.rows().map(move |r| r[col])
    }

    pub fn columns_in_group(&self, group: ColumnGroup) -> Vec<usize> {
        self.columns
            .iter()
            .enumerate()
            .filter(|(_, c)| c.group == group)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn has_missing(&self) -> bool {
        self.values.iter().any(|v| v.is_nan())
    }

    pub fn missing_count(&self, col: usize) -> usize {
        self.column(col).filter(|v| v.is_nan()).count()
    }

    /// Row position of a source row id.
    pub fn position_of(&self, source_row_id: u64) -> Option<usize> {
        self.source_row_ids.iter().position(|&id| id == source_row_id)
    }

    /// New dataset holding the given rows (by position) in the given order.
    pub fn select_rows(&self, positions: &[usize]) -> Dataset {
        let w = self.width();
        let mut values = Vec::with_capacity(positions.len() * w);
        let mut ids = Vec::with_capacity(positions.len());
        for &p in positions {
            values.extend_from_slice(self.row(p));
            ids.push(self.source_row_ids[p]);
        }
        Dataset {
            columns: self.columns.clone(),
            values,
            row_count: positions.len(),
            source_row_ids: ids,
        }
    }

    /// Bitwise cell comparison; `NaN == NaN` and `0.0 != -0.0`.
    pub fn bit_eq(&self, other: &Dataset) -> bool {
        self.columns == other.columns
            && self.source_row_ids == other.source_row_ids
            && self.values.len() == other.values.len()
            && self
                .values
                .iter()
                .zip(&other.values)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

/// Replaces every missing cell with zero.
///
/// Columns that are missing in all rows are the expected case (phases that
/// never form). Partially missing columns are filled too, with a warning.
pub fn zero_fill_missing(dataset: Dataset) -> Dataset {
    let Dataset {
        columns,
        mut values,
        row_count,
        source_row_ids,
    } = dataset;
    let w = columns.len();
    if w > 0 && row_count > 0 {
        for (c, spec) in columns.iter().enumerate() {
            let missing = (0..row_count)
                .filter(|r| values[r * w + c].is_nan())
                .count();
            if missing == 0 {
                continue;
            }
            if missing < row_count {
                log::warn!(
                    "column {} has {missing} of {row_count} cells missing; filling with 0",
                    spec.name
                );
            } else {
                log::debug!("column {} is entirely missing; zero-filled", spec.name);
            }
            for r in 0..row_count {
                let v = &mut values[r * w + c];
                if v.is_nan() {
                    *v = 0.0;
                }
            }
        }
    }
    Dataset {
        columns,
        values,
        row_count,
        source_row_ids,
    }
}

/// Uniform sample of `n` rows without replacement, deterministic in `seed`.
/// Survivors keep their relative order; `n >= row_count` returns the input.
pub fn subsample(dataset: &Dataset, n: usize, seed: u64) -> Result<Dataset> {
    if n == 0 {
        return Err(Error::InvalidCount("subsample size must be at least 1".into()));
    }
    if n >= dataset.row_count() {
        return Ok(dataset.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = (0..dataset.row_count()).choose_multiple(&mut rng, n);
    picked.sort_unstable();
    Ok(dataset.select_rows(&picked))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cols(names: &[&str]) -> Vec<ColumnSpec> {
        names
            .iter()
            .map(|n| ColumnSpec::new(*n, ColumnGroup::Property, ""))
            .collect()
    }

    #[test]
    fn zero_fill_full_partial_and_clean_columns() {
        let nan = f64::NAN;
        let ds = Dataset::from_rows(
            cols(&["all_missing", "clean", "partial"]),
            &[
                vec![nan, 1.0, 5.0],
                vec![nan, 2.0, nan],
                vec![nan, 3.0, 7.0],
            ],
        )
        .unwrap();
        assert!(ds.has_missing());
        let filled = zero_fill_missing(ds);
        assert!(!filled.has_missing());
        assert_eq!(filled.column(0).collect::<Vec<_>>(), vec![0.0, 0.0, 0.0]);
        assert_eq!(filled.column(1).collect::<Vec<_>>(), vec![1.0, 2.0, 3.0]);
        assert_eq!(filled.column(2).collect::<Vec<_>>(), vec![5.0, 0.0, 7.0]);
    }

    #[test]
    fn subsample_identity_and_errors() {
        let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64]).collect();
        let ds = Dataset::from_rows(cols(&["x"]), &rows).unwrap();
        assert!(subsample(&ds, 10, 3).unwrap().bit_eq(&ds));
        assert!(subsample(&ds, 50, 3).unwrap().bit_eq(&ds));
        assert!(matches!(subsample(&ds, 0, 3), Err(Error::InvalidCount(_))));
    }

    #[test]
    fn subsample_is_deterministic_and_order_preserving() {
        let rows: Vec<Vec<f64>> = (0..1000).map(|i| vec![i as f64 * 0.5]).collect();
        let ds = Dataset::from_rows(cols(&["x"]), &rows).unwrap();
        let a = subsample(&ds, 100, 42).unwrap();
        let b = subsample(&ds, 100, 42).unwrap();
        let c = subsample(&ds, 100, 43).unwrap();
        assert!(a.bit_eq(&b));
        assert_ne!(a.source_row_ids(), c.source_row_ids());
        assert_eq!(a.row_count(), 100);
        assert!(a.source_row_ids().windows(2).all(|w| w[0] < w[1]));
        for (r, &id) in a.source_row_ids().iter().enumerate() {
            assert_eq!(a.value(r, 0), id as f64 * 0.5);
        }
    }

    #[test]
    fn duplicate_names_and_ids_rejected() {
        let err = Dataset::from_rows(cols(&["a", "a"]), &[vec![1.0, 2.0]]).unwrap_err();
        assert!(matches!(err, Error::DuplicateColumn(_)));
        let err = Dataset::new(cols(&["a"]), vec![1.0, 2.0], vec![4, 4]).unwrap_err();
        assert!(matches!(err, Error::DuplicateRowId(4)));
    }

    #[test]
    fn group_parsing() {
        assert_eq!("element_fraction".parse(), Ok(ColumnGroup::ElementFraction));
        assert_eq!("Scrap Input".parse(), Ok(ColumnGroup::ScrapInput));
        assert!("phase".parse::<ColumnGroup>().is_err());
    }
}
