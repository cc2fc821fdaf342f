use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use super::MlpModel;
use crate::data::Dataset;
use crate::error::{Error, Result};

/// One output's worst-case error. `original_max = normalized_max * std`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualRow {
    pub name: String,
    pub mean: f64,
    pub std: f64,
    pub normalized_max: f64,
    pub original_max: f64,
}

impl ResidualRow {
    pub fn from_normalized(name: impl Into<String>, mean: f64, std: f64, normalized_max: f64) -> Self {
        Self {
            name: name.into(),
            mean,
            std,
            normalized_max,
            original_max: normalized_max * std,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalSplit {
    HeldOut,
    InSample,
    Full,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub split: EvalSplit,
    pub rows_evaluated: usize,
    pub outputs: Vec<ResidualRow>,
    /// Mean of `normalized_max` over outputs.
    pub average_normalized_max: f64,
}

/// Worst-case residuals of `model` over every row of `dataset`.
///
/// Each output's largest absolute error is divided by the model's output
/// standard deviation, so outputs with very different units compare on one
/// scale.
pub fn max_normalized_residual(model: &MlpModel, dataset: &Dataset) -> Result<ResidualReport> {
    let (x, y) = extract_xy(dataset, &model.input_names, &model.output_names)?;
    residuals_for(model, x.view(), y.view(), EvalSplit::Full)
}

pub(crate) fn residuals_for(
    model: &MlpModel,
    x: ArrayView2<f64>,
    y: ArrayView2<f64>,
    split: EvalSplit,
) -> Result<ResidualReport> {
    if x.nrows() == 0 {
        return Err(Error::EmptyEvaluationSet);
    }
    let pred = model.forward_batch(x)?;
    let outputs: Vec<ResidualRow> = (0..model.n_outputs())
        .map(|j| {
            let worst = pred
                .column(j)
                .iter()
                .zip(y.column(j))
                .map(|(p, t)| (p - t).abs())
                .fold(0.0f64, f64::max);
            let std = model.output_stats.std[j];
            ResidualRow::from_normalized(
                model.output_names[j].clone(),
                model.output_stats.mean[j],
                std,
                worst / std,
            )
        })
        .collect();
    let average = outputs.iter().map(|r| r.normalized_max).sum::<f64>() / outputs.len() as f64;
    Ok(ResidualReport {
        split,
        rows_evaluated: x.nrows(),
        outputs,
        average_normalized_max: average,
    })
}

impl ResidualReport {
    /// Plain-text table: one line per output, then the average.
    pub fn to_table(&self) -> String {
        let width = self.outputs.iter().map(|r| r.name.len()).max().unwrap_or(0).max(8);
        let mut out = format!(
            "{:<width$}  {:>12}  {:>12}  {:>12}  {:>12}\n",
            "output", "mean", "std", "max (norm)", "max (orig)"
        );
        for r in &self.outputs {
            out += &format!(
                "{:<width$}  {:>12.6e}  {:>12.6e}  {:>12.4}  {:>12.6e}\n",
                r.name, r.mean, r.std, r.normalized_max, r.original_max
            );
        }
        out += &format!(
            "average normalized max residual ({:?}, {} rows): {:.4}\n",
            self.split, self.rows_evaluated, self.average_normalized_max
        );
        out
    }
}

/// Input and output matrices for the named columns, in the given order.
pub(crate) fn extract_xy(
    dataset: &Dataset,
    inputs: &[String],
    outputs: &[String],
) -> Result<(Array2<f64>, Array2<f64>)> {
    let find = |names: &[String]| -> Result<Vec<usize>> {
        names
            .iter()
            .map(|n| {
                dataset
                    .column_index(n)
                    .ok_or_else(|| Error::ShapeMismatch(format!("dataset lacks column {n}")))
            })
            .collect()
    };
    let (ic, oc) = (find(inputs)?, find(outputs)?);
    let n = dataset.row_count();
    let x = Array2::from_shape_fn((n, ic.len()), |(r, c)| dataset.value(r, ic[c]));
    let y = Array2::from_shape_fn((n, oc.len()), |(r, c)| dataset.value(r, oc[c]));
    Ok((x, y))
}
