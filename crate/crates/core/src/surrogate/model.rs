use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hidden widths of the production network.
pub const PRODUCTION_HIDDEN: [usize; 2] = [1024, 1024];
pub const INITIAL_ALPHA: f64 = 0.25;

/// Parametric ReLU: `x` for `x >= 0`, `alpha * x` otherwise.
pub fn prelu(x: f64, alpha: f64) -> f64 {
    if x >= 0.0 {
        x
    } else {
        alpha * x
    }
}

/// Derivative of [`prelu`] in `x`; uses `alpha` at the kink.
pub fn prelu_derivative(x: f64, alpha: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else {
        alpha
    }
}

/// Per-feature affine standardization `(x - mean) / std`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Standardizer {
    pub fn identity(n: usize) -> Self {
        Self {
            mean: vec![0.0; n],
            std: vec![1.0; n],
        }
    }

    /// Column means and population standard deviations of a row-major
    /// matrix. Zero or non-finite deviations are replaced by 1.
    pub fn fit(data: ArrayView2<f64>) -> Self {
        let n = data.nrows().max(1) as f64;
        let mean: Vec<f64> = data.axis_iter(Axis(1)).map(|c| c.sum() / n).collect();
        let std = data
            .axis_iter(Axis(1))
            .zip(&mean)
            .map(|(c, m)| {
                let s = (c.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n).sqrt();
                if s > 0.0 && s.is_finite() {
                    s
                } else {
                    1.0
                }
            })
            .collect();
        Self { mean, std }
    }

    pub fn len(&self) -> usize {
        self.mean.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mean.is_empty()
    }

    pub fn apply(&self, data: ArrayView2<f64>) -> Array2<f64> {
        let mut out = data.to_owned();
        for (j, mut col) in out.axis_iter_mut(Axis(1)).enumerate() {
            let (m, s) = (self.mean[j], self.std[j]);
            col.mapv_inplace(|v| (v - m) / s);
        }
        out
    }

    pub fn invert(&self, data: ArrayView2<f64>) -> Array2<f64> {
        let mut out = data.to_owned();
        for (j, mut col) in out.axis_iter_mut(Axis(1)).enumerate() {
            let (m, s) = (self.mean[j], self.std[j]);
            col.mapv_inplace(|v| m + s * v);
        }
        out
    }
}

/// Fully connected network with PReLU hidden layers and a linear output,
/// wrapped in input/output standardization.
///
/// `weights[l]` is `layer_dims[l + 1] × layer_dims[l]`; `alphas[l]` is the
/// slope of hidden layer `l`.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    pub layer_dims: Vec<usize>,
    pub weights: Vec<Array2<f64>>,
    pub biases: Vec<Array1<f64>>,
    pub alphas: Vec<f64>,
    pub input_names: Vec<String>,
    pub output_names: Vec<String>,
    pub input_stats: Standardizer,
    pub output_stats: Standardizer,
}

impl MlpModel {
    /// He-uniform weights, zero biases, `alpha = 0.25`, identity standardization,
    /// placeholder feature names.
    pub fn init(layer_dims: &[usize], seed: u64) -> Result<Self> {
        if layer_dims.len() < 2 || layer_dims.contains(&0) {
            return Err(Error::ShapeMismatch(format!(
                "layer dims {layer_dims:?} need at least input and output widths, all non-zero"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        for pair in layer_dims.windows(2) {
            let (fan_in, fan_out) = (pair[0], pair[1]);
            let bound = (6.0 / fan_in as f64).sqrt();
            weights.push(Array2::from_shape_simple_fn((fan_out, fan_in), || {
                rng.random_range(-bound..bound)
            }));
            biases.push(Array1::zeros(fan_out));
        }
        let n_in = layer_dims[0];
        let n_out = *layer_dims.last().unwrap();
        Ok(Self {
            layer_dims: layer_dims.to_vec(),
            weights,
            biases,
            alphas: vec![INITIAL_ALPHA; layer_dims.len() - 2],
            input_names: (0..n_in).map(|i| format!("x{i}")).collect(),
            output_names: (0..n_out).map(|j| format!("y{j}")).collect(),
            input_stats: Standardizer::identity(n_in),
            output_stats: Standardizer::identity(n_out),
        })
    }

    pub fn n_inputs(&self) -> usize {
        self.layer_dims[0]
    }

    pub fn n_outputs(&self) -> usize {
        *self.layer_dims.last().unwrap()
    }

    pub fn hidden_layers(&self) -> usize {
        self.layer_dims.len() - 2
    }

    pub fn input_index(&self, name: &str) -> Option<usize> {
        self.input_names.iter().position(|n| n == name)
    }

    /// Checks shape chaining and finiteness of every parameter.
    pub fn validate(&self) -> Result<()> {
        let dims = &self.layer_dims;
        let bad = |m: String| Err(Error::ShapeMismatch(m));
        if dims.len() < 2 {
            return bad(format!("layer dims {dims:?}"));
        }
        let layers = dims.len() - 1;
        if self.weights.len() != layers || self.biases.len() != layers {
            return bad(format!("{layers} layers expected"));
        }
        if self.alphas.len() != layers - 1 {
            return bad(format!("{} PReLU slopes expected", layers - 1));
        }
        for l in 0..layers {
            if self.weights[l].dim() != (dims[l + 1], dims[l]) || self.biases[l].len() != dims[l + 1] {
                return bad(format!("layer {l} does not match dims {dims:?}"));
            }
        }
        let (n_in, n_out) = (self.n_inputs(), self.n_outputs());
        if self.input_names.len() != n_in
            || self.input_stats.len() != n_in
            || self.input_stats.std.len() != n_in
        {
            return bad(format!("input metadata must have {n_in} entries"));
        }
        if self.output_names.len() != n_out
            || self.output_stats.len() != n_out
            || self.output_stats.std.len() != n_out
        {
            return bad(format!("output metadata must have {n_out} entries"));
        }
        let finite = self.weights.iter().all(|w| w.iter().all(|v| v.is_finite()))
            && self.biases.iter().all(|b| b.iter().all(|v| v.is_finite()))
            && self.alphas.iter().all(|a| a.is_finite())
            && [&self.input_stats, &self.output_stats]
                .iter()
                .all(|s| s.mean.iter().chain(&s.std).all(|v| v.is_finite()));
        if !finite {
            return bad("non-finite parameter".into());
        }
        Ok(())
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n_inputs() {
            return Err(Error::DimensionMismatch {
                expected: self.n_inputs(),
                actual: x.len(),
            });
        }
        if let Some(i) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput(i));
        }
        Ok(())
    }

    fn standardize_input(&self, x: &[f64]) -> Array1<f64> {
        x.iter()
            .zip(self.input_stats.mean.iter().zip(&self.input_stats.std))
            .map(|(v, (m, s))| (v - m) / s)
            .collect()
    }

    /// Hidden pre-activations and the standardized output for one input.
    fn trace(&self, x: &[f64]) -> (Vec<Array1<f64>>, Array1<f64>) {
        let mut h = self.standardize_input(x);
        let mut pre = Vec::with_capacity(self.hidden_layers());
        let last = self.weights.len() - 1;
        for (l, (w, b)) in self.weights.iter().zip(&self.biases).enumerate() {
            let z = w.dot(&h) + b;
            if l == last {
                return (pre, z);
            }
            let alpha = self.alphas[l];
            h = z.mapv(|v| prelu(v, alpha));
            pre.push(z);
        }
        unreachable!("at least one layer")
    }

    /// Prediction in original output units.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_input(x)?;
        let (_, z) = self.trace(x);
        Ok(self.destandardize(&z))
    }

    fn destandardize(&self, z: &Array1<f64>) -> Vec<f64> {
        z.iter()
            .zip(self.output_stats.mean.iter().zip(&self.output_stats.std))
            .map(|(v, (m, s))| m + s * v)
            .collect()
    }

    /// Predictions for each row of `x` (rows × inputs), original units.
    pub fn forward_batch(&self, x: ArrayView2<f64>) -> Result<Array2<f64>> {
        if x.ncols() != self.n_inputs() {
            return Err(Error::DimensionMismatch {
                expected: self.n_inputs(),
                actual: x.ncols(),
            });
        }
        if let Some(i) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput(i % self.n_inputs()));
        }
        let z = self.forward_standardized(self.input_stats.apply(x).view());
        Ok(self.output_stats.invert(z.view()))
    }

    /// Standardized-space batch forward pass.
    pub(crate) fn forward_standardized(&self, x: ArrayView2<f64>) -> Array2<f64> {
        let mut h = x.to_owned();
        let last = self.weights.len() - 1;
        for (l, (w, b)) in self.weights.iter().zip(&self.biases).enumerate() {
            let mut z = h.dot(&w.t());
            z += b;
            if l < last {
                let alpha = self.alphas[l];
                z.mapv_inplace(|v| prelu(v, alpha));
            }
            h = z;
        }
        h
    }

    /// Exact `outputs × inputs` Jacobian at `x`, original units, by reverse
    /// accumulation through the layer chain.
    pub fn input_jacobian(&self, x: &[f64]) -> Result<Array2<f64>> {
        self.check_input(x)?;
        let (pre, _) = self.trace(x);
        let last = self.weights.len() - 1;
        // rows are outputs; start with d(output)/d(last hidden) scaled to output units
        let mut grad = self.weights[last].clone();
        for (mut row, s) in grad.axis_iter_mut(Axis(0)).zip(&self.output_stats.std) {
            row *= *s;
        }
        for l in (0..last).rev() {
            let alpha = self.alphas[l];
            let slope = pre[l].mapv(|v| prelu_derivative(v, alpha));
            grad *= &slope;
            grad = grad.dot(&self.weights[l]);
        }
        for (mut col, s) in grad.axis_iter_mut(Axis(1)).zip(&self.input_stats.std) {
            col /= *s;
        }
        Ok(grad)
    }

    /// Smallest absolute hidden pre-activation at `x`; points near zero sit on
    /// a PReLU kink where the derivative is one-sided.
    pub fn min_abs_preactivation(&self, x: &[f64]) -> Result<f64> {
        self.check_input(x)?;
        let (pre, _) = self.trace(x);
        Ok(pre
            .iter()
            .flat_map(|z| z.iter())
            .fold(f64::INFINITY, |m, v| m.min(v.abs())))
    }
}
