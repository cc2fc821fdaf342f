//! Exploration sessions.
//!
//! An [`Explorer`] owns immutable datasets and an optional surrogate, plus a
//! table of sessions. Each session serves a deterministic subsample and keeps
//! the latest bounds, tolerance and response. When a bounds update leaves no
//! row matching, the response carries a nearest-neighbor ranking toward the
//! bounds' midpoints; otherwise it carries none.

pub mod http;

use std::collections::{BTreeMap, HashMap};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock};

use serde::{Deserialize, Serialize};

use crate::data::{
    compute_norm_stats, normalize, subsample, write_csv, ColumnSpec, Dataset, NormStats,
    NormalizedTable,
};
use crate::error::{Error, Result};
use crate::filter::{classify, BoundsSpec, MatchLabel, DEFAULT_TOLERANCE};
use crate::neighbors::{target_from_bounds, top_k, DEFAULT_K};
use crate::surrogate::{
    composition_center, sensitivity_curve, MlpModel, ResidualReport, SensitivityCurve,
};

pub const DEFAULT_SUBSAMPLE: usize = 20_000;
pub const DEFAULT_CURVE_SAMPLES: usize = 51;

/// A dataset registered with the explorer, with statistics over all rows.
#[derive(Debug)]
pub struct LoadedDataset {
    pub name: String,
    pub dataset: Dataset,
    pub stats: NormStats,
}

impl LoadedDataset {
    pub fn new(name: impl Into<String>, dataset: Dataset) -> Result<Self> {
        let stats = compute_norm_stats(&dataset)?;
        Ok(Self {
            name: name.into(),
            dataset,
            stats,
        })
    }
}

#[derive(Debug)]
pub struct LoadedModel {
    pub model: MlpModel,
    pub residuals: Vec<ResidualReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedRow {
    pub row_id: u64,
    /// Position in the session's served rows.
    pub row_index: usize,
    pub distance: f64,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplorationResponse {
    pub row_count: usize,
    pub labels: Vec<MatchLabel>,
    pub match_count: usize,
    pub soft_count: usize,
    pub feasible: bool,
    pub tolerance: f64,
    /// Present exactly when `feasible` is false.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ranking: Option<Vec<RankedRow>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionInfo {
    pub session_id: String,
    pub dataset: String,
    pub row_count: usize,
}

/// Normalized coordinates of every served row, in served order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointsPayload {
    pub columns: Vec<String>,
    pub source_row_ids: Vec<u64>,
    pub row_count: usize,
    /// Row-major, `row_count × columns.len()`.
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelStatus {
    pub loaded: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub layer_dims: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inputs: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outputs: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub residual_report: Vec<ResidualReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnsPayload {
    pub dataset: String,
    pub row_count: usize,
    pub columns: Vec<ColumnSpec>,
    pub norm_stats: NormStats,
}

pub struct Session {
    id: String,
    source: Arc<LoadedDataset>,
    served: Dataset,
    normalized: NormalizedTable,
    active_columns: Vec<String>,
    bounds: BoundsSpec,
    tolerance: f64,
    last: ExplorationResponse,
}

impl Session {
    fn new(id: String, source: Arc<LoadedDataset>, n: usize, seed: u64) -> Result<Self> {
        let served = subsample(&source.dataset, n, seed)?;
        let normalized = normalize(&served, &source.stats)?;
        let mut session = Self {
            id,
            source,
            served,
            normalized,
            active_columns: Vec::new(),
            bounds: BoundsSpec::new(),
            tolerance: DEFAULT_TOLERANCE,
            last: ExplorationResponse {
                row_count: 0,
                labels: Vec::new(),
                match_count: 0,
                soft_count: 0,
                feasible: true,
                tolerance: DEFAULT_TOLERANCE,
                ranking: None,
            },
        };
        session.last = session.evaluate(&BoundsSpec::new(), DEFAULT_TOLERANCE, DEFAULT_K)?;
        Ok(session)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn served(&self) -> &Dataset {
        &self.served
    }

    pub fn stats(&self) -> &NormStats {
        &self.source.stats
    }

    pub fn active_columns(&self) -> &[String] {
        &self.active_columns
    }

    pub fn bounds(&self) -> &BoundsSpec {
        &self.bounds
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn last_response(&self) -> &ExplorationResponse {
        &self.last
    }

    fn evaluate(&self, bounds: &BoundsSpec, tolerance: f64, k: usize) -> Result<ExplorationResponse> {
        let stats = &self.source.stats;
        let classification = classify(&self.served, stats, bounds, tolerance)?;
        let ranking = if classification.feasible {
            None
        } else {
            let target = target_from_bounds(bounds)?;
            let ranking = top_k(&self.normalized, stats, &target, k)?;
            let ids = self.served.source_row_ids();
            Some(
                ranking
                    .entries
                    .iter()
                    .map(|n| RankedRow {
                        row_id: ids[n.row],
                        row_index: n.row,
                        distance: n.distance,
                        score: n.score,
                    })
                    .collect(),
            )
        };
        Ok(ExplorationResponse {
            row_count: self.served.row_count(),
            labels: classification.labels,
            match_count: classification.match_count,
            soft_count: classification.soft_count,
            feasible: classification.feasible,
            tolerance,
            ranking,
        })
    }

    /// Classifies the served rows; falls back to a top-`k` ranking when
    /// nothing matches. State is replaced only if evaluation succeeds.
    pub fn update_bounds(
        &mut self,
        bounds: BoundsSpec,
        tolerance: f64,
        k: usize,
    ) -> Result<ExplorationResponse> {
        let response = self.evaluate(&bounds, tolerance, k)?;
        self.active_columns = bounds.iter().map(|(k, _)| k.to_string()).collect();
        self.bounds = bounds;
        self.tolerance = tolerance;
        self.last = response.clone();
        Ok(response)
    }

    pub fn points(&self) -> PointsPayload {
        PointsPayload {
            columns: self.normalized.columns.clone(),
            source_row_ids: self.served.source_row_ids().to_vec(),
            row_count: self.normalized.row_count,
            values: self.normalized.values.clone(),
        }
    }

    /// Sensitivity sweep anchored at the mean composition of the served rows.
    pub fn sensitivity(
        &self,
        model: &MlpModel,
        axis: &str,
        overrides: &BTreeMap<String, f64>,
        n_samples: usize,
    ) -> Result<SensitivityCurve> {
        if model.input_index(axis).is_none() {
            return Err(Error::UnknownAxis(axis.to_string()));
        }
        let col = self
            .source
            .stats
            .index_of(axis)
            .ok_or_else(|| Error::UnknownAxis(axis.to_string()))?;
        let anchor = composition_center(&self.served, &model.input_names)?;
        let stats = &self.source.stats;
        sensitivity_curve(
            model,
            &anchor,
            axis,
            (stats.min[col], stats.max[col]),
            n_samples,
            overrides,
        )
    }

    /// Source ids of the served rows that carried `label` in the last response.
    pub fn row_ids_with(&self, label: MatchLabel) -> Vec<u64> {
        let ids = self.served.source_row_ids();
        self.last
            .labels
            .iter()
            .zip(ids)
            .filter(|(l, _)| **l == label)
            .map(|(_, id)| *id)
            .collect()
    }

    /// CSV of the selected served rows with every column, in served order.
    pub fn export(&self, row_ids: &[u64]) -> Result<String> {
        let mut positions = Vec::with_capacity(row_ids.len());
        for &id in row_ids {
            positions.push(self.served.position_of(id).ok_or(Error::UnknownRow(id))?);
        }
        positions.sort_unstable();
        positions.dedup();
        let selection = self.served.select_rows(&positions);
        let mut buf = Vec::new();
        write_csv(&selection, &mut buf)?;
        Ok(String::from_utf8(buf).expect("csv writer emits utf-8"))
    }
}

/// Shared engine state: datasets, optional model, and live sessions.
pub struct Explorer {
    datasets: BTreeMap<String, Arc<LoadedDataset>>,
    model: Option<Arc<LoadedModel>>,
    sessions: RwLock<HashMap<String, Arc<Mutex<Session>>>>,
    next_id: AtomicU64,
}

impl Explorer {
    pub fn new() -> Self {
        Self {
            datasets: BTreeMap::new(),
            model: None,
            sessions: RwLock::new(HashMap::new()),
            next_id: AtomicU64::new(1),
        }
    }

    pub fn with_dataset(mut self, name: impl Into<String>, dataset: Dataset) -> Result<Self> {
        let loaded = LoadedDataset::new(name, dataset)?;
        self.datasets.insert(loaded.name.clone(), Arc::new(loaded));
        Ok(self)
    }

    pub fn with_model(mut self, model: MlpModel, residuals: Vec<ResidualReport>) -> Self {
        self.model = Some(Arc::new(LoadedModel { model, residuals }));
        self
    }

    pub fn dataset_names(&self) -> Vec<String> {
        self.datasets.keys().cloned().collect()
    }

    /// Named dataset, or the first one registered when `name` is `None`.
    pub fn dataset(&self, name: Option<&str>) -> Result<Arc<LoadedDataset>> {
        match name {
            Some(n) => self.datasets.get(n).cloned(),
            None => self.datasets.values().next().cloned(),
        }
        .ok_or_else(|| Error::UnknownDataset(name.unwrap_or("<none>").to_string()))
    }

    pub fn columns(&self, name: Option<&str>) -> Result<ColumnsPayload> {
        let d = self.dataset(name)?;
        Ok(ColumnsPayload {
            dataset: d.name.clone(),
            row_count: d.dataset.row_count(),
            columns: d.dataset.columns().to_vec(),
            norm_stats: d.stats.clone(),
        })
    }

    pub fn model_status(&self) -> ModelStatus {
        match &self.model {
            Some(m) => ModelStatus {
                loaded: true,
                layer_dims: Some(m.model.layer_dims.clone()),
                inputs: Some(m.model.input_names.clone()),
                outputs: Some(m.model.output_names.clone()),
                residual_report: m.residuals.clone(),
            },
            None => ModelStatus {
                loaded: false,
                layer_dims: None,
                inputs: None,
                outputs: None,
                residual_report: Vec::new(),
            },
        }
    }

    pub fn create_session(&self, dataset: Option<&str>, n: usize, seed: u64) -> Result<SessionInfo> {
        let source = self.dataset(dataset)?;
        let id = format!("s{}", self.next_id.fetch_add(1, Ordering::Relaxed));
        let session = Session::new(id.clone(), source.clone(), n, seed)?;
        let info = SessionInfo {
            session_id: id.clone(),
            dataset: source.name.clone(),
            row_count: session.served.row_count(),
        };
        self.sessions
            .write()
            .expect("session table poisoned")
            .insert(id, Arc::new(Mutex::new(session)));
        Ok(info)
    }

    /// Runs `f` with the session locked; calls on one session are serialized.
    pub fn with_session<T>(&self, id: &str, f: impl FnOnce(&mut Session) -> Result<T>) -> Result<T> {
        let handle = self
            .sessions
            .read()
            .expect("session table poisoned")
            .get(id)
            .cloned()
            .ok_or_else(|| Error::UnknownSession(id.to_string()))?;
        let mut guard = handle.lock().unwrap_or_else(|p| p.into_inner());
        f(&mut guard)
    }

    pub fn points(&self, id: &str) -> Result<PointsPayload> {
        self.with_session(id, |s| Ok(s.points()))
    }

    pub fn update_bounds(
        &self,
        id: &str,
        bounds: BoundsSpec,
        tolerance: f64,
        k: usize,
    ) -> Result<ExplorationResponse> {
        self.with_session(id, |s| s.update_bounds(bounds, tolerance, k))
    }

    pub fn sensitivity(
        &self,
        id: &str,
        axis: &str,
        overrides: &BTreeMap<String, f64>,
        n_samples: usize,
    ) -> Result<SensitivityCurve> {
        let model = self.model.clone().ok_or(Error::ModelNotLoaded)?;
        self.with_session(id, |s| s.sensitivity(&model.model, axis, overrides, n_samples))
    }

    pub fn export(&self, id: &str, rows: &[u64]) -> Result<String> {
        self.with_session(id, |s| s.export(rows))
    }
}

impl Default for Explorer {
    fn default() -> Self {
        Self::new()
    }
}
