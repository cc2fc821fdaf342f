//! Model persistence.
//!
//! The weights file is a little-endian binary envelope:
//!
//! ```text
//! magic     8 bytes   "ALXMLP\0\0"
//! version   u32
//! n_dims    u32
//! dims      n_dims × u64
//! params    f64 × count, in order:
//!           for each layer: weights (row-major, out × in), then biases
//!           PReLU slopes (one per hidden layer)
//!           input mean, input std, output mean, output std
//! ```
//!
//! A JSON sidecar (same path, `.json` extension) carries the column names,
//! a readable copy of the standardization statistics and, optionally, the
//! residual reports from training. The binary file is authoritative for
//! every number.

use std::path::{Path, PathBuf};

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use super::{MlpModel, ResidualReport, Standardizer};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 8] = b"ALXMLP\0\0";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSidecar {
    pub format_version: u32,
    pub layer_dims: Vec<usize>,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub input_stats: Standardizer,
    pub output_stats: Standardizer,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub residuals: Vec<ResidualReport>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelFiles {
    pub binary: Vec<u8>,
    pub sidecar: ModelSidecar,
}

impl ModelFiles {
    pub fn sidecar_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.sidecar)?)
    }
}

pub fn save_model(model: &MlpModel) -> ModelFiles {
    let mut buf = Vec::new();
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    buf.extend_from_slice(&(model.layer_dims.len() as u32).to_le_bytes());
    for &d in &model.layer_dims {
        buf.extend_from_slice(&(d as u64).to_le_bytes());
    }
    let mut put = |v: f64| buf.extend_from_slice(&v.to_le_bytes());
    for (w, b) in model.weights.iter().zip(&model.biases) {
        w.iter().for_each(|v| put(*v));
        b.iter().for_each(|v| put(*v));
    }
    model.alphas.iter().for_each(|v| put(*v));
    for s in [&model.input_stats, &model.output_stats] {
        s.mean.iter().chain(&s.std).for_each(|v| put(*v));
    }
    ModelFiles {
        binary: buf,
        sidecar: ModelSidecar {
            format_version: FORMAT_VERSION,
            layer_dims: model.layer_dims.clone(),
            inputs: model.input_names.clone(),
            outputs: model.output_names.clone(),
            input_stats: model.input_stats.clone(),
            output_stats: model.output_stats.clone(),
            residuals: Vec::new(),
        },
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| {
            Error::CorruptModelFile(format!("truncated at byte {} (need {n} more)", self.pos))
        })?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64s(&mut self, n: usize) -> Result<Vec<f64>> {
        let raw = self.take(n.checked_mul(8).ok_or_else(|| Error::CorruptModelFile("size overflow".into()))?)?;
        Ok(raw
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }
}

pub fn load_model(binary: &[u8], sidecar: &ModelSidecar) -> Result<MlpModel> {
    let mut r = Reader { bytes: binary, pos: 0 };
    if r.take(8)? != MAGIC {
        return Err(Error::CorruptModelFile("bad magic".into()));
    }
    let version = r.u32()?;
    if version != FORMAT_VERSION {
        return Err(Error::VersionMismatch {
            found: version,
            expected: FORMAT_VERSION,
        });
    }
    let n_dims = r.u32()? as usize;
    if !(2..=64).contains(&n_dims) {
        return Err(Error::CorruptModelFile(format!("{n_dims} layer dims")));
    }
    let mut dims = Vec::with_capacity(n_dims);
    for _ in 0..n_dims {
        let d = r.u64()?;
        if d == 0 || d > (1 << 24) {
            return Err(Error::CorruptModelFile(format!("layer width {d}")));
        }
        dims.push(d as usize);
    }
    if sidecar.layer_dims != dims {
        return Err(Error::CorruptModelFile(format!(
            "sidecar dims {:?} disagree with weights {:?}",
            sidecar.layer_dims, dims
        )));
    }
    let mut weights = Vec::new();
    let mut biases = Vec::new();
    for pair in dims.windows(2) {
        let (fan_in, fan_out) = (pair[0], pair[1]);
        let w = r.f64s(fan_in * fan_out)?;
        weights.push(Array2::from_shape_vec((fan_out, fan_in), w).expect("length checked"));
        biases.push(Array1::from(r.f64s(fan_out)?));
    }
    let alphas = r.f64s(n_dims - 2)?;
    let (n_in, n_out) = (dims[0], dims[n_dims - 1]);
    let input_stats = Standardizer {
        mean: r.f64s(n_in)?,
        std: r.f64s(n_in)?,
    };
    let output_stats = Standardizer {
        mean: r.f64s(n_out)?,
        std: r.f64s(n_out)?,
    };
    if r.pos != binary.len() {
        return Err(Error::CorruptModelFile(format!(
            "{} trailing bytes",
            binary.len() - r.pos
        )));
    }
    let model = MlpModel {
        layer_dims: dims,
        weights,
        biases,
        alphas,
        input_names: sidecar.inputs.clone(),
        output_names: sidecar.outputs.clone(),
        input_stats,
        output_stats,
    };
    model
        .validate()
        .map_err(|e| Error::CorruptModelFile(e.to_string()))?;
    Ok(model)
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("json")
}

/// Writes the weights to `path` and the sidecar next to it.
pub fn write_model(path: impl AsRef<Path>, files: &ModelFiles) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, &files.binary)?;
    std::fs::write(sidecar_path(path), files.sidecar_json()?)?;
    Ok(())
}

pub fn read_model(path: impl AsRef<Path>) -> Result<(MlpModel, ModelSidecar)> {
    let path = path.as_ref();
    let binary = std::fs::read(path)?;
    let sidecar: ModelSidecar = serde_json::from_slice(&std::fs::read(sidecar_path(path))?)
        .map_err(|e| Error::CorruptModelFile(format!("sidecar: {e}")))?;
    let model = load_model(&binary, &sidecar)?;
    Ok((model, sidecar))
}
