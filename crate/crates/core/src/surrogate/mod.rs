//! Neural surrogate: a PReLU multilayer perceptron mapping element fractions
//! to properties, with exact input Jacobians for local sensitivity analysis.
//!
//! Production shape is `[12, 1024, 1024, 20]`; every routine is generic over
//! layer widths and depth.

mod io;
mod model;
mod residual;
mod sensitivity;
mod train;

pub use io::{
    load_model, read_model, save_model, sidecar_path, write_model, ModelFiles, ModelSidecar,
    FORMAT_VERSION, MAGIC,
};
pub use model::{prelu, prelu_derivative, MlpModel, Standardizer, INITIAL_ALPHA, PRODUCTION_HIDDEN};
pub use residual::{max_normalized_residual, EvalSplit, ResidualReport, ResidualRow};
pub use sensitivity::{composition_center, sensitivity_curve, CurveSample, SensitivityCurve};
pub use train::{train, EpochLoss, SurrogateLayout, TrainConfig, TrainReport};
