use serde::{Deserialize, Serialize};

use super::{ColumnGroup, Dataset};
use crate::error::{Error, Result};

/// Per-column min/max used for `[0, 1]` scaling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormStats {
    pub columns: Vec<String>,
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl NormStats {
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn range(&self, col: usize) -> f64 {
        self.max[col] - self.min[col]
    }

    /// `(x - min) / (max - min)` clamped to `[0, 1]`; constant columns map to 0.5.
    pub fn normalize_value(&self, col: usize, x: f64) -> f64 {
        let range = self.range(col);
        if range > 0.0 {
            ((x - self.min[col]) / range).clamp(0.0, 1.0)
        } else {
            0.5
        }
    }

    /// Inverse of [`normalize_value`](Self::normalize_value) for non-degenerate
    /// columns; constant columns return their single value.
    pub fn denormalize_value(&self, col: usize, u: f64) -> f64 {
        let range = self.range(col);
        if range > 0.0 {
            self.min[col] + u * range
        } else {
            self.min[col]
        }
    }

    fn check_columns(&self, names: &[&str]) -> Result<()> {
        if self.columns.len() != names.len()
            || self.columns.iter().zip(names).any(|(a, b)| a != b)
        {
            return Err(Error::ColumnMismatch(format!(
                "stats cover {:?}, table has {:?}",
                self.columns, names
            )));
        }
        Ok(())
    }
}

pub fn compute_norm_stats(dataset: &Dataset) -> Result<NormStats> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let w = dataset.width();
    let mut min = vec![f64::INFINITY; w];
    let mut max = vec![f64::NEG_INFINITY; w];
    for row in dataset.rows() {
        for (c, &v) in row.iter().enumerate() {
            min[c] = min[c].min(v);
            max[c] = max[c].max(v);
        }
    }
    Ok(NormStats {
        columns: dataset.columns().iter().map(|c| c.name.clone()).collect(),
        min,
        max,
    })
}

/// Row-major table of values in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizedTable {
    pub columns: Vec<String>,
    pub row_count: usize,
    pub values: Vec<f64>,
}

impl NormalizedTable {
    pub fn width(&self) -> usize {
        self.columns.len()
    }

    pub fn row(&self, row: usize) -> &[f64] {
        let w = self.width();
        &self.values[row * w..(row + 1) * w]
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }
}

pub fn normalize(dataset: &Dataset, stats: &NormStats) -> Result<NormalizedTable> {
    stats.check_columns(&dataset.column_names())?;
    let w = dataset.width();
    let values = dataset
        .values()
        .iter()
        .enumerate()
        .map(|(i, &x)| stats.normalize_value(i % w, x))
        .collect();
    Ok(NormalizedTable {
        columns: stats.columns.clone(),
        row_count: dataset.row_count(),
        values,
    })
}

/// Maps a normalized table back to original units (row-major values).
pub fn denormalize(table: &NormalizedTable, stats: &NormStats) -> Result<Vec<f64>> {
    let names: Vec<&str> = table.columns.iter().map(String::as_str).collect();
    stats.check_columns(&names)?;
    let w = table.width();
    Ok(table
        .values
        .iter()
        .enumerate()
        .map(|(i, &u)| stats.denormalize_value(i % w, u))
        .collect())
}

/// Descriptive statistics per column (population standard deviation).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnSummary {
    pub name: String,
    pub group: ColumnGroup,
    pub units: String,
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

pub fn summarize(dataset: &Dataset) -> Result<Vec<ColumnSummary>> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let n = dataset.row_count() as f64;
    Ok(dataset
        .columns()
        .iter()
        .enumerate()
        .map(|(c, spec)| {
            let mean = dataset.column(c).sum::<f64>() / n;
            let var = dataset.column(c).map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
            let (min, max) = dataset
                .column(c)
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
            ColumnSummary {
                name: spec.name.clone(),
                group: spec.group,
                units: spec.units.clone(),
                mean,
                std: var.sqrt(),
                min,
                max,
            }
        })
        .collect())
}
