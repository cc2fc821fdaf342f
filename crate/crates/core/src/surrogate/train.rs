use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::model::{prelu, prelu_derivative, MlpModel, Standardizer, PRODUCTION_HIDDEN};
use super::residual::{extract_xy, residuals_for, EvalSplit, ResidualReport};
use crate::data::{ColumnGroup, Dataset};
use crate::error::{Error, Result};

/// Which columns feed the surrogate and which it predicts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurrogateLayout {
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
}

impl SurrogateLayout {
    /// Element fractions in, properties and microstructure features out, in
    /// schema order. Scrap inputs stay passive.
    pub fn from_groups(dataset: &Dataset) -> Self {
        let names = |pred: &dyn Fn(ColumnGroup) -> bool| {
            dataset
                .columns()
                .iter()
                .filter(|c| pred(c.group))
                .map(|c| c.name.clone())
                .collect()
        };
        Self {
            inputs: names(&|g| g == ColumnGroup::ElementFraction),
            outputs: names(&|g| matches!(g, ColumnGroup::Property | ColumnGroup::Microstructure)),
        }
    }
}

/// Fields missing from a deserialized config take their [`Default`] values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub hidden: Vec<usize>,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub momentum: f64,
    pub seed: u64,
    pub validation_fraction: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            hidden: PRODUCTION_HIDDEN.to_vec(),
            epochs: 30,
            batch_size: 256,
            learning_rate: 1e-3,
            momentum: 0.9,
            seed: 0,
            validation_fraction: 0.1,
        }
    }
}

impl TrainConfig {
    /// Two 64-unit hidden layers with a step size suited to a few thousand
    /// rows; trains in about a second.
    pub fn desk_scale() -> Self {
        Self {
            hidden: vec![64, 64],
            epochs: 30,
            batch_size: 64,
            learning_rate: 0.01,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if self.hidden.is_empty() || self.hidden.contains(&0) {
            return bad("hidden widths must be non-empty and positive");
        }
        if self.epochs == 0 || self.batch_size == 0 {
            return bad("epochs and batch_size must be positive");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate must be positive");
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return bad("momentum must be in [0, 1)");
        }
        if !(self.validation_fraction > 0.0 && self.validation_fraction < 1.0) {
            return bad("validation_fraction must be in (0, 1)");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochLoss {
    pub epoch: usize,
    pub train_loss: f64,
    pub validation_loss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub layer_dims: Vec<usize>,
    pub train_rows: usize,
    pub validation_rows: usize,
    pub loss_history: Vec<EpochLoss>,
    pub held_out: ResidualReport,
    pub in_sample: ResidualReport,
}

/// Fits the surrogate by minimizing mean squared error on standardized
/// outputs with momentum mini-batch gradient descent.
///
/// Rows are split once into train/validation with the config seed;
/// standardization statistics come from the training rows only. The same
/// data, layout and config always produce the same weights.
pub fn train(
    dataset: &Dataset,
    layout: &SurrogateLayout,
    config: &TrainConfig,
) -> Result<(MlpModel, TrainReport)> {
    config.validate()?;
    if layout.inputs.is_empty() || layout.outputs.is_empty() {
        return Err(Error::ShapeMismatch("layout needs inputs and outputs".into()));
    }
    let (x, y) = extract_xy(dataset, &layout.inputs, &layout.outputs)?;
    let n = x.nrows();
    if n < 2 {
        return Err(Error::ShapeMismatch(format!(
            "need at least 2 rows to split train/validation, got {n}"
        )));
    }
    if let Some(i) = x.iter().chain(y.iter()).position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput(i));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let n_val = ((n as f64 * config.validation_fraction).round() as usize).clamp(1, n - 1);
    let (val_idx, train_idx) = order.split_at(n_val);
    let mut train_idx = train_idx.to_vec();
    train_idx.sort_unstable();
    let mut val_idx = val_idx.to_vec();
    val_idx.sort_unstable();

    let x_train = x.select(Axis(0), &train_idx);
    let y_train = y.select(Axis(0), &train_idx);
    let x_val = x.select(Axis(0), &val_idx);
    let y_val = y.select(Axis(0), &val_idx);

    let mut dims = vec![layout.inputs.len()];
    dims.extend(&config.hidden);
    dims.push(layout.outputs.len());
    let mut model = MlpModel::init(&dims, config.seed.wrapping_add(0x9e37_79b9_7f4a_7c15))?;
    model.input_names = layout.inputs.clone();
    model.output_names = layout.outputs.clone();
    model.input_stats = Standardizer::fit(x_train.view());
    model.output_stats = Standardizer::fit(y_train.view());

    let xs = model.input_stats.apply(x_train.view());
    let ys = model.output_stats.apply(y_train.view());
    let xs_val = model.input_stats.apply(x_val.view());
    let ys_val = model.output_stats.apply(y_val.view());

    let mut velocity = Gradients::zeros_like(&model);
    let mut grads = Gradients::zeros_like(&model);
    let mut history = Vec::with_capacity(config.epochs);
    let mut batch_order: Vec<usize> = (0..xs.nrows()).collect();

    for epoch in 0..config.epochs {
        batch_order.shuffle(&mut rng);
        let mut weighted_loss = 0.0;
        for chunk in batch_order.chunks(config.batch_size) {
            let bx = xs.select(Axis(0), chunk);
            let by = ys.select(Axis(0), chunk);
            let loss = backprop(&model, bx.view(), by.view(), &mut grads);
            if !loss.is_finite() {
                return Err(Error::NonFiniteLoss { epoch });
            }
            weighted_loss += loss * chunk.len() as f64;
            velocity.momentum_step(&grads, config.momentum, config.learning_rate);
            velocity.apply_to(&mut model);
        }
        let train_loss = weighted_loss / xs.nrows() as f64;
        let validation_loss = mse(&model.forward_standardized(xs_val.view()), &ys_val);
        if !train_loss.is_finite() || !validation_loss.is_finite() {
            return Err(Error::NonFiniteLoss { epoch });
        }
        log::debug!("epoch {epoch}: train {train_loss:.6e} validation {validation_loss:.6e}");
        history.push(EpochLoss {
            epoch,
            train_loss,
            validation_loss,
        });
    }
    model.validate().map_err(|_| Error::NonFiniteLoss {
        epoch: config.epochs.saturating_sub(1),
    })?;

    let held_out = residuals_for(&model, x_val.view(), y_val.view(), EvalSplit::HeldOut)?;
    let in_sample = residuals_for(&model, x_train.view(), y_train.view(), EvalSplit::InSample)?;
    let report = TrainReport {
        layer_dims: dims,
        train_rows: train_idx.len(),
        validation_rows: val_idx.len(),
        loss_history: history,
        held_out,
        in_sample,
    };
    Ok((model, report))
}

fn mse(pred: &Array2<f64>, target: &Array2<f64>) -> f64 {
    let diff = pred - target;
    diff.iter().map(|d| d * d).sum::<f64>() / diff.len().max(1) as f64
}

struct Gradients {
    weights: Vec<Array2<f64>>,
    biases: Vec<Array1<f64>>,
    alphas: Vec<f64>,
}

impl Gradients {
    fn zeros_like(model: &MlpModel) -> Self {
        Self {
            weights: model.weights.iter().map(|w| Array2::zeros(w.raw_dim())).collect(),
            biases: model.biases.iter().map(|b| Array1::zeros(b.len())).collect(),
            alphas: vec![0.0; model.alphas.len()],
        }
    }

    /// `self = momentum * self - lr * grad`
    fn momentum_step(&mut self, grad: &Gradients, momentum: f64, lr: f64) {
        for (v, g) in self.weights.iter_mut().zip(&grad.weights) {
            v.zip_mut_with(g, |v, g| *v = momentum * *v - lr * g);
        }
        for (v, g) in self.biases.iter_mut().zip(&grad.biases) {
            v.zip_mut_with(g, |v, g| *v = momentum * *v - lr * g);
        }
        for (v, g) in self.alphas.iter_mut().zip(&grad.alphas) {
            *v = momentum * *v - lr * g;
        }
    }

    fn apply_to(&self, model: &mut MlpModel) {
        for (w, v) in model.weights.iter_mut().zip(&self.weights) {
            *w += v;
        }
        for (b, v) in model.biases.iter_mut().zip(&self.biases) {
            *b += v;
        }
        for (a, v) in model.alphas.iter_mut().zip(&self.alphas) {
            *a += v;
        }
    }
}

/// Mean squared error of one standardized batch; parameter gradients are
/// written into `out`.
fn backprop(model: &MlpModel, x: ArrayView2<f64>, y: ArrayView2<f64>, out: &mut Gradients) -> f64 {
    let layers = model.weights.len();
    let mut activations = Vec::with_capacity(layers);
    let mut pre = Vec::with_capacity(layers - 1);
    let mut h = x.to_owned();
    for l in 0..layers {
        let mut z = h.dot(&model.weights[l].t());
        z += &model.biases[l];
        activations.push(h);
        if l + 1 < layers {
            let alpha = model.alphas[l];
            h = z.mapv(|v| prelu(v, alpha));
            pre.push(z);
        } else {
            h = z;
        }
    }

    let count = y.len() as f64;
    let mut delta = &h - &y;
    let loss = delta.iter().map(|d| d * d).sum::<f64>() / count;
    delta *= 2.0 / count;

    for l in (0..layers).rev() {
        out.weights[l] = delta.t().dot(&activations[l]);
        out.biases[l] = delta.sum_axis(Axis(0));
        if l == 0 {
            break;
        }
        let upstream = delta.dot(&model.weights[l]);
        let z = &pre[l - 1];
        let alpha = model.alphas[l - 1];
        out.alphas[l - 1] = upstream
            .iter()
            .zip(z.iter())
            .filter(|(_, zv)| **zv <= 0.0)
            .map(|(g, zv)| g * zv)
            .sum();
        delta = upstream;
        delta.zip_mut_with(z, |g, zv| *g *= prelu_derivative(*zv, alpha));
    }
    loss
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::ColumnSpec;
    use ndarray::arr2;

    fn small_config() -> TrainConfig {
        TrainConfig {
            hidden: vec![8, 8],
            epochs: 3,
            batch_size: 16,
            learning_rate: 0.01,
            ..TrainConfig::default()
        }
    }

    fn loss_of(model: &MlpModel, x: &Array2<f64>, y: &Array2<f64>) -> f64 {
        mse(&model.forward_standardized(x.view()), y)
    }

    #[test]
    fn backprop_matches_finite_differences() {
        let mut model = MlpModel::init(&[3, 5, 4, 2], 11).unwrap();
        model.alphas = vec![0.3, 0.7];
        for (l, b) in model.biases.iter_mut().enumerate() {
            b.iter_mut().enumerate().for_each(|(i, v)| *v = 0.05 * (i as f64 - l as f64));
        }
        let x = arr2(&[[0.3, -1.2, 0.8], [1.1, 0.4, -0.5], [-0.7, 0.9, 0.2]]);
        let y = arr2(&[[0.5, -0.1], [0.0, 0.3], [-0.4, 0.9]]);
        let mut grads = Gradients::zeros_like(&model);
        backprop(&model, x.view(), y.view(), &mut grads);

        let h = 1e-6;
        for l in 0..model.weights.len() {
            for ((i, j), g) in grads.weights[l].indexed_iter() {
                let mut plus = model.clone();
                plus.weights[l][[i, j]] += h;
                let mut minus = model.clone();
                minus.weights[l][[i, j]] -= h;
                let fd = (loss_of(&plus, &x, &y) - loss_of(&minus, &x, &y)) / (2.0 * h);
                assert!((fd - g).abs() < 1e-7, "w{l}[{i},{j}]: {fd} vs {g}");
            }
        }
        for l in 0..model.alphas.len() {
            let mut plus = model.clone();
            plus.alphas[l] += h;
            let mut minus = model.clone();
            minus.alphas[l] -= h;
            let fd = (loss_of(&plus, &x, &y) - loss_of(&minus, &x, &y)) / (2.0 * h);
            assert!((fd - grads.alphas[l]).abs() < 1e-7, "alpha{l}");
        }
        for l in 0..model.biases.len() {
            for (i, g) in grads.biases[l].indexed_iter() {
                let mut plus = model.clone();
                plus.biases[l][i] += h;
                let mut minus = model.clone();
                minus.biases[l][i] -= h;
                let fd = (loss_of(&plus, &x, &y) - loss_of(&minus, &x, &y)) / (2.0 * h);
                assert!((fd - g).abs() < 1e-7);
            }
        }
    }

    fn toy_dataset(rows: usize, f: impl Fn(f64, f64) -> f64) -> Dataset {
        let cols = vec![
            ColumnSpec::new("a", ColumnGroup::ElementFraction, ""),
            ColumnSpec::new("b", ColumnGroup::ElementFraction, ""),
            ColumnSpec::new("p", ColumnGroup::Property, ""),
        ];
        let data: Vec<Vec<f64>> = (0..rows)
            .map(|i| {
                let a = (i as f64 * 0.37).sin();
                let b = (i as f64 * 0.11).cos();
                vec![a, b, f(a, b)]
            })
            .collect();
        Dataset::from_rows(cols, &data).unwrap()
    }

    #[test]
    fn layout_from_groups() {
        let ds = toy_dataset(4, |a, _| a);
        let layout = SurrogateLayout::from_groups(&ds);
        assert_eq!(layout.inputs, vec!["a", "b"]);
        assert_eq!(layout.outputs, vec!["p"]);
    }

    #[test]
    fn deterministic_given_seed() {
        let ds = toy_dataset(200, |a, b| a * b + 0.5 * a);
        let layout = SurrogateLayout::from_groups(&ds);
        let (m1, r1) = train(&ds, &layout, &small_config()).unwrap();
        let (m2, r2) = train(&ds, &layout, &small_config()).unwrap();
        assert_eq!(m1, m2);
        assert_eq!(r1, r2);
        let other = TrainConfig {
            seed: 1,
            ..small_config()
        };
        let (m3, _) = train(&ds, &layout, &other).unwrap();
        assert_ne!(m1, m3);
    }

    #[test]
    fn constant_target_converges() {
        let ds = toy_dataset(300, |_, _| 4.25);
        let layout = SurrogateLayout::from_groups(&ds);
        let config = TrainConfig {
            epochs: 150,
            learning_rate: 0.05,
            ..small_config()
        };
        let (model, report) = train(&ds, &layout, &config).unwrap();
        let last = report.loss_history.last().unwrap();
        assert!(last.train_loss < 1e-6, "loss {}", last.train_loss);
        let y = model.forward(&[0.2, -0.3]).unwrap();
        assert!((y[0] - 4.25).abs() < 1e-3);
    }

    #[test]
    fn divergence_is_reported() {
        let ds = toy_dataset(100, |a, b| 1e3 * a + b);
        let layout = SurrogateLayout::from_groups(&ds);
        let config = TrainConfig {
            learning_rate: 1e6,
            epochs: 5,
            ..small_config()
        };
        assert!(matches!(
            train(&ds, &layout, &config),
            Err(Error::NonFiniteLoss { .. })
        ));
    }

    #[test]
    fn config_and_shape_errors() {
        let ds = toy_dataset(10, |a, _| a);
        let layout = SurrogateLayout::from_groups(&ds);
        let bad = TrainConfig {
            validation_fraction: 1.0,
            ..small_config()
        };
        assert!(matches!(train(&ds, &layout, &bad), Err(Error::InvalidConfig(_))));
        let missing = SurrogateLayout {
            inputs: vec!["a".into(), "zz".into()],
            outputs: vec!["p".into()],
        };
        assert!(matches!(
            train(&ds, &missing, &small_config()),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn split_sizes() {
        let ds = toy_dataset(50, |a, _| a);
        let (_, report) = train(&ds, &SurrogateLayout::from_groups(&ds), &small_config()).unwrap();
        assert_eq!(report.validation_rows, 5);
        assert_eq!(report.train_rows, 45);
        assert_eq!(report.held_out.split, EvalSplit::HeldOut);
        assert_eq!(report.loss_history.len(), 3);
    }
}
