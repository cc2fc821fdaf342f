//! Target-range filtering.
//!
//! Bounds are closed intervals in original units. A row is a match when every
//! active column lies inside its interval, and a soft match when it misses
//! but every active column lies inside the interval widened by
//! `tolerance · (max − min)` on both sides, where `max − min` is the column's
//! full range from [`NormStats`]. A tolerance of `0.05` is a 5% margin in
//! normalized units.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, NormStats};
use crate::error::{Error, Result};

pub const DEFAULT_TOLERANCE: f64 = 0.05;

/// Closed interval `[lo, hi]`. `lo > hi` is the empty interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        Interval::new(self.lo.max(other.lo), self.hi.min(other.hi))
    }
}

impl From<[f64; 2]> for Interval {
    fn from([lo, hi]: [f64; 2]) -> Self {
        Interval::new(lo, hi)
    }
}

impl From<Interval> for [f64; 2] {
    fn from(i: Interval) -> Self {
        [i.lo, i.hi]
    }
}

/// Active bounds keyed by column name. Serializes as `{"column": [lo, hi]}`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BoundsSpec {
    entries: BTreeMap<String, Interval>,
}

impl BoundsSpec {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds or replaces a bound. Rejects `lo > hi` and non-finite endpoints.
    pub fn insert(&mut self, column: impl Into<String>, lo: f64, hi: f64) -> Result<()> {
        let column = column.into();
        if !(lo.is_finite() && hi.is_finite()) || lo > hi {
            return Err(Error::InvalidInterval { column, lo, hi });
        }
        self.entries.insert(column, Interval::new(lo, hi));
        Ok(())
    }

    pub fn with(mut self, column: impl Into<String>, lo: f64, hi: f64) -> Result<Self> {
        self.insert(column, lo, hi)?;
        Ok(self)
    }

    pub fn get(&self, column: &str) -> Option<&Interval> {
        self.entries.get(column)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Interval)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn remove(&mut self, column: &str) -> Option<Interval> {
        self.entries.remove(column)
    }
}

/// Per-column intersection; keys present on one side pass through. Disjoint
/// intervals produce an empty interval that no row can satisfy.
pub fn intersect(a: &BoundsSpec, b: &BoundsSpec) -> BoundsSpec {
    let mut entries = a.entries.clone();
    for (k, iv) in &b.entries {
        entries
            .entry(k.clone())
            .and_modify(|cur| *cur = cur.intersect(iv))
            .or_insert(*iv);
    }
    BoundsSpec { entries }
}

/// Bounds as written by a user: either endpoint may be omitted (`null`),
/// meaning "column minimum" / "column maximum".
///
/// A one-sided bound that lies entirely outside the column's range resolves
/// to the degenerate interval at the given endpoint (`[null, 95]` over a
/// column whose minimum is 100 becomes `[95, 95]`), so it matches nothing
/// instead of being rejected.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OpenBounds(pub BTreeMap<String, [Option<f64>; 2]>);

impl OpenBounds {
    /// Fills omitted endpoints from `stats` and validates every interval.
    pub fn resolve(&self, stats: &NormStats) -> Result<BoundsSpec> {
        let mut spec = BoundsSpec::new();
        for (name, [lo, hi]) in &self.0 {
            let col = stats
                .index_of(name)
                .ok_or_else(|| Error::UnknownColumn(name.clone()))?;
            let (lo, hi) = match (*lo, *hi) {
                (Some(lo), Some(hi)) => (lo, hi),
                (Some(lo), None) => (lo, stats.max[col].max(lo)),
                (None, Some(hi)) => (stats.min[col].min(hi), hi),
                (None, None) => (stats.min[col], stats.max[col]),
            };
            spec.insert(name.clone(), lo, hi)?;
        }
        Ok(spec)
    }
}

impl From<&BoundsSpec> for OpenBounds {
    fn from(spec: &BoundsSpec) -> Self {
        OpenBounds(
            spec.iter()
                .map(|(k, iv)| (k.to_string(), [Some(iv.lo), Some(iv.hi)]))
                .collect(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchLabel {
    Match,
    SoftMatch,
    NoMatch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchClassification {
    pub labels: Vec<MatchLabel>,
    pub match_count: usize,
    pub soft_count: usize,
    pub feasible: bool,
}

impl MatchClassification {
    pub fn rows_with(&self, label: MatchLabel) -> impl Iterator<Item = usize> + '_ {
        self.labels
            .iter()
            .enumerate()
            .filter(move |(_, l)| **l == label)
            .map(|(i, _)| i)
    }
}

struct ActiveDim {
    col: usize,
    hard: Interval,
    soft: Interval,
}

/// Labels every row of `data` against `bounds`. `stats` supplies the column
/// ranges for the soft margin; empty bounds make every row a match.
pub fn classify(
    data: &Dataset,
    stats: &NormStats,
    bounds: &BoundsSpec,
    tolerance: f64,
) -> Result<MatchClassification> {
    if tolerance.is_nan() || tolerance < 0.0 {
        return Err(Error::NegativeTolerance(tolerance));
    }
    let mut dims = Vec::with_capacity(bounds.len());
    for (name, iv) in bounds.iter() {
        let col = data.require_column(name)?;
        let stat_col = stats
            .index_of(name)
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))?;
        let margin = tolerance * stats.range(stat_col);
        let soft = if iv.is_empty() {
            *iv
        } else {
            Interval::new(iv.lo - margin, iv.hi + margin)
        };
        dims.push(ActiveDim {
            col,
            hard: *iv,
            soft,
        });
    }

    let mut match_count = 0;
    let mut soft_count = 0;
    let labels = data
        .rows()
        .map(|row| {
            if dims.iter().all(|d| d.hard.contains(row[d.col])) {
                match_count += 1;
                MatchLabel::Match
            } else if dims.iter().all(|d| d.soft.contains(row[d.col])) {
                soft_count += 1;
                MatchLabel::SoftMatch
            } else {
                MatchLabel::NoMatch
            }
        })
        .collect();
    Ok(MatchClassification {
        labels,
        match_count,
        soft_count,
        feasible: match_count > 0,
    })
}
