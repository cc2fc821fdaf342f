//! Nearest-neighbor fallback over normalized columns.
//!
//! Distances are Euclidean over the target's active columns only, after
//! min-max scaling, so columns with different units contribute comparably.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};

use serde::{Deserialize, Serialize};

use crate::data::{NormStats, NormalizedTable};
use crate::error::{Error, Result};
use crate::filter::BoundsSpec;

pub const DEFAULT_K: usize = 20;

/// Target values in original units, keyed by column.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TargetVector {
    pub entries: BTreeMap<String, f64>,
}

impl TargetVector {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }
}

/// One target per bounded column, at the interval midpoint.
pub fn target_from_bounds(bounds: &BoundsSpec) -> Result<TargetVector> {
    if bounds.is_empty() {
        return Err(Error::EmptyBounds);
    }
    Ok(TargetVector {
        entries: bounds
            .iter()
            .map(|(k, iv)| (k.to_string(), iv.midpoint()))
            .collect(),
    })
}

/// Euclidean distance between two equally sized normalized vectors.
pub fn distance(row: &[f64], target: &[f64]) -> Result<f64> {
    if row.len() != target.len() {
        return Err(Error::DimensionMismatch {
            expected: target.len(),
            actual: row.len(),
        });
    }
    Ok(row
        .iter()
        .zip(target)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Neighbor {
    /// Row position in the table that was searched.
    pub row: usize,
    pub distance: f64,
    /// 1 for the nearest entry, falling linearly to 0 at the farthest returned.
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeighborRanking {
    pub k: usize,
    pub entries: Vec<Neighbor>,
}

#[derive(Clone, Copy)]
struct Candidate {
    distance: f64,
    row: usize,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.distance
            .total_cmp(&other.distance)
            .then(self.row.cmp(&other.row))
    }
}

/// Exact `k` nearest rows to `target`, ties broken by ascending row position.
///
/// `stats` maps the target into normalized units; it must be the same
/// statistics that produced `table`.
pub fn top_k(
    table: &NormalizedTable,
    stats: &NormStats,
    target: &TargetVector,
    k: usize,
) -> Result<NeighborRanking> {
    if k == 0 {
        return Err(Error::InvalidCount("k must be at least 1".into()));
    }
    if target.is_empty() {
        return Err(Error::EmptyTarget);
    }
    let mut cols = Vec::with_capacity(target.len());
    let mut goal = Vec::with_capacity(target.len());
    for (name, &value) in &target.entries {
        if !value.is_finite() {
            return Err(Error::NonFiniteInput(cols.len()));
        }
        let col = table
            .column_index(name)
            .ok_or_else(|| Error::UnknownColumn(name.clone()))?;
        let stat_col = stats
            .index_of(name)
            .ok_or_else(|| Error::UnknownColumn(name.clone()))?;
        cols.push(col);
        goal.push(scale_unclamped(stats, stat_col, value));
    }

    // max-heap holding the best k seen so far; its top is the worst of them
    let mut heap: BinaryHeap<Candidate> = BinaryHeap::with_capacity(k + 1);
    let mut point = vec![0.0; cols.len()];
    for r in 0..table.row_count {
        let row = table.row(r);
        for (p, &c) in point.iter_mut().zip(&cols) {
            *p = row[c];
        }
        let cand = Candidate {
            distance: distance(&point, &goal)?,
            row: r,
        };
        if heap.len() < k {
            heap.push(cand);
        } else if let Some(top) = heap.peek() {
            if cand < *top {
                heap.pop();
                heap.push(cand);
            }
        }
    }
    let sorted = heap.into_sorted_vec();
    Ok(NeighborRanking {
        k,
        entries: assign_scores(&sorted),
    })
}

fn assign_scores(sorted: &[Candidate]) -> Vec<Neighbor> {
    let (Some(first), Some(last)) = (sorted.first(), sorted.last()) else {
        return Vec::new();
    };
    let spread = last.distance - first.distance;
    sorted
        .iter()
        .map(|c| Neighbor {
            row: c.row,
            distance: c.distance,
            score: if spread > 0.0 {
                1.0 - (c.distance - first.distance) / spread
            } else {
                1.0
            },
        })
        .collect()
}

// Targets may sit outside the sampled range; clamping would distort distances.
fn scale_unclamped(stats: &NormStats, col: usize, x: f64) -> f64 {
    let range = stats.range(col);
    if range > 0.0 {
        (x - stats.min[col]) / range
    } else {
        0.5
    }
}
