use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::MlpModel;
use crate::data::Dataset;
use crate::error::{Error, Result};

/// Per-column arithmetic mean of the named input columns.
pub fn composition_center(dataset: &Dataset, inputs: &[String]) -> Result<Vec<f64>> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let n = dataset.row_count() as f64;
    inputs
        .iter()
        .map(|name| {
            let col = dataset.require_column(name)?;
            Ok(dataset.column(col).sum::<f64>() / n)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSample {
    /// Axis coordinate in original units.
    pub x: f64,
    /// Predicted outputs, original units.
    pub outputs: Vec<f64>,
    /// `d output / d axis` at this point, original units.
    pub derivatives: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityCurve {
    pub axis: String,
    pub input_names: Vec<String>,
    pub output_names: Vec<String>,
    /// Base point after overrides; every coordinate except `axis` is held here.
    pub anchor: Vec<f64>,
    pub samples: Vec<CurveSample>,
}

/// Sweeps `axis` across `[range.0, range.1]` in `n_samples` equal steps from
/// `anchor` (with `overrides` applied first), recording predictions and the
/// axis column of the exact input Jacobian at each step.
pub fn sensitivity_curve(
    model: &MlpModel,
    anchor: &[f64],
    axis: &str,
    range: (f64, f64),
    n_samples: usize,
    overrides: &BTreeMap<String, f64>,
) -> Result<SensitivityCurve> {
    let axis_idx = model
        .input_index(axis)
        .ok_or_else(|| Error::UnknownAxis(axis.to_string()))?;
    if n_samples < 2 {
        return Err(Error::TooFewSamples(n_samples));
    }
    if anchor.len() != model.n_inputs() {
        return Err(Error::DimensionMismatch {
            expected: model.n_inputs(),
            actual: anchor.len(),
        });
    }
    let (lo, hi) = range;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidInterval {
            column: axis.to_string(),
            lo,
            hi,
        });
    }
    let mut base = anchor.to_vec();
    for (name, &value) in overrides {
        let i = model
            .input_index(name)
            .ok_or_else(|| Error::UnknownColumn(name.clone()))?;
        base[i] = value;
    }

    let last = n_samples - 1;
    let grid: Vec<f64> = (0..n_samples)
        .map(|k| {
            if k == last {
                hi
            } else {
                lo + (hi - lo) * (k as f64 / last as f64)
            }
        })
        .collect();

    let samples = grid
        .par_iter()
        .map(|&x| {
            let mut point = base.clone();
            point[axis_idx] = x;
            let outputs = model.forward(&point)?;
            let jac = model.input_jacobian(&point)?;
            Ok(CurveSample {
                x,
                outputs,
                derivatives: jac.column(axis_idx).to_vec(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(SensitivityCurve {
        axis: axis.to_string(),
        input_names: model.input_names.clone(),
        output_names: model.output_names.clone(),
        anchor: base,
        samples,
    })
}
