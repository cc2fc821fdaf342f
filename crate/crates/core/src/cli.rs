//! Command-line front end.
//!
//! Each subcommand is a `cmd_*` function that composes library operations and
//! returns a serializable result; the binary only parses flags and prints.

use std::collections::BTreeMap;
use std::net::{IpAddr, Ipv4Addr, SocketAddr};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::data::synth::{synthesize_dataset, synthesize_linear_dataset, synthetic_schema};
use crate::data::{
    load_csv, load_schema, summarize, write_csv_path, write_schema, zero_fill_missing,
    ColumnGroup, ColumnSummary, Dataset,
};
use crate::error::Result;
use crate::filter::{MatchLabel, OpenBounds, DEFAULT_TOLERANCE};
use crate::neighbors::DEFAULT_K;
use crate::session::http::{bind, serve, DEFAULT_PORT};
use crate::session::{ExplorationResponse, Explorer, DEFAULT_CURVE_SAMPLES};
use crate::surrogate::{
    read_model, save_model, train, write_model, SensitivityCurve,
    SurrogateLayout, TrainConfig, TrainReport,
};

#[derive(Debug, Parser)]
#[command(name = "alloy-explorer", version, about = "Alloy inverse-design engine")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a CSV against a schema, zero-fill missing cells, and summarize.
    Ingest(IngestArgs),
    /// Write a seeded synthetic dataset and its schema.
    Synth(SynthArgs),
    /// Train the surrogate and report worst-case residuals.
    Train(TrainArgs),
    /// Classify rows against bounds; rank nearest rows if none match.
    Query(QueryArgs),
    /// Serve the session API over HTTP.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Args)]
pub struct DatasetArgs {
    /// Dataset CSV.
    #[arg(long)]
    pub dataset: PathBuf,
    /// Schema file; defaults to the dataset path with a `.schema` extension.
    #[arg(long)]
    pub schema: Option<PathBuf>,
}

impl DatasetArgs {
    pub fn schema_path(&self) -> PathBuf {
        self.schema
            .clone()
            .unwrap_or_else(|| self.dataset.with_extension("schema"))
    }

    /// Loads and zero-fills the dataset.
    pub fn load(&self) -> Result<Dataset> {
        let schema = load_schema(self.schema_path())?;
        Ok(zero_fill_missing(load_csv(&self.dataset, &schema)?))
    }
}

#[derive(Debug, Clone, Args)]
pub struct IngestArgs {
    #[arg(long)]
    pub csv: PathBuf,
    #[arg(long)]
    pub schema: PathBuf,
    /// Cleaned CSV to write; its schema goes next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Noise-free affine outputs instead of the nonlinear generator.
    #[arg(long)]
    pub linear: bool,
}

#[derive(Debug, Clone, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub data: DatasetArgs,
    /// Weights file; the JSON sidecar is written next to it.
    #[arg(long)]
    pub model_out: PathBuf,
    /// JSON training config. Flags given on the command line win.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Start from the small two-layer preset instead of the production size.
    #[arg(long)]
    pub desk_scale: bool,
    /// Hidden widths, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub hidden: Option<Vec<usize>>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub momentum: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub validation_fraction: Option<f64>,
}

impl TrainArgs {
    pub fn resolve_config(&self) -> Result<TrainConfig> {
        let mut c = match &self.config {
            Some(p) => serde_json::from_slice(&std::fs::read(p)?)?,
            None if self.desk_scale => TrainConfig::desk_scale(),
            None => TrainConfig::default(),
        };
        if let Some(h) = &self.hidden {
            c.hidden = h.clone();
        }
        if let Some(v) = self.epochs {
            c.epochs = v;
        }
        if let Some(v) = self.batch_size {
            c.batch_size = v;
        }
        if let Some(v) = self.learning_rate {
            c.learning_rate = v;
        }
        if let Some(v) = self.momentum {
            c.momentum = v;
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if let Some(v) = self.validation_fraction {
            c.validation_fraction = v;
        }
        c.validate()?;
        Ok(c)
    }
}

#[derive(Debug, Clone, Args)]
pub struct QueryArgs {
    #[command(flatten)]
    pub data: DatasetArgs,
    /// JSON bounds: `{"bounds": {col: [lo, hi]}, "tolerance": .., "k": ..}` or a
    /// bare `{col: [lo, hi]}` map. `null` endpoints mean column min/max.
    #[arg(long)]
    pub bounds: Option<PathBuf>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Rows to draw from the dataset; all rows when omitted.
    #[arg(long)]
    pub subsample: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Surrogate weights; with `--axis`, adds a sensitivity curve.
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long, requires = "model")]
    pub axis: Option<String>,
    #[arg(long, default_value_t = DEFAULT_CURVE_SAMPLES)]
    pub n_samples: usize,
    /// Write the matched rows here as CSV.
    #[arg(long)]
    pub export: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ServeArgs {
    #[command(flatten)]
    pub data: DatasetArgs,
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_PORT)]
    pub port: u16,
    #[arg(long, default_value_t = IpAddr::V4(Ipv4Addr::LOCALHOST))]
    pub host: IpAddr,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestSummary {
    pub rows: usize,
    pub missing_cells_filled: usize,
    pub groups: BTreeMap<ColumnGroup, usize>,
    pub columns: Vec<ColumnSummary>,
}

pub fn cmd_ingest(args: &IngestArgs) -> Result<IngestSummary> {
    let schema = load_schema(&args.schema)?;
    let raw = load_csv(&args.csv, &schema)?;
    let missing = (0..raw.width()).map(|c| raw.missing_count(c)).sum();
    let ds = zero_fill_missing(raw);
    let columns = summarize(&ds)?;
    let mut groups = BTreeMap::new();
    for c in ds.columns() {
        *groups.entry(c.group).or_insert(0) += 1;
    }
    if let Some(out) = &args.out {
        write_csv_path(&ds, out)?;
        std::fs::write(out.with_extension("schema"), write_schema(ds.columns()))?;
    }
    Ok(IngestSummary {
        rows: ds.row_count(),
        missing_cells_filled: missing,
        groups,
        columns,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSummary {
    pub rows: usize,
    pub columns: usize,
    pub csv: PathBuf,
    pub schema: PathBuf,
}

pub fn cmd_synth(args: &SynthArgs) -> Result<SynthSummary> {
    let ds = if args.linear {
        synthesize_linear_dataset(args.n, args.seed)?
    } else {
        synthesize_dataset(args.n, args.seed)?
    };
    let schema = args.out.with_extension("schema");
    write_csv_path(&ds, &args.out)?;
    std::fs::write(&schema, write_schema(&synthetic_schema()))?;
    Ok(SynthSummary {
        rows: ds.row_count(),
        columns: ds.width(),
        csv: args.out.clone(),
        schema,
    })
}

pub fn cmd_train(args: &TrainArgs) -> Result<TrainReport> {
    let config = args.resolve_config()?;
    let ds = args.data.load()?;
    let layout = SurrogateLayout::from_groups(&ds);
    log::info!(
        "training {} -> {} on {} rows, hidden {:?}",
        layout.inputs.len(),
        layout.outputs.len(),
        ds.row_count(),
        config.hidden
    );
    let (model, report) = train(&ds, &layout, &config)?;
    let mut files = save_model(&model);
    files.sidecar.residuals = vec![report.held_out.clone(), report.in_sample.clone()];
    write_model(&args.model_out, &files)?;
    Ok(report)
}

/// Bounds file contents; also accepts a bare column map.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct QuerySpec {
    #[serde(default)]
    pub bounds: OpenBounds,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
}

impl QuerySpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        if value.get("bounds").is_some() {
            Ok(serde_json::from_value(value)?)
        } else {
            Ok(QuerySpec {
                bounds: serde_json::from_value(value)?,
                ..Default::default()
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryOutput {
    #[serde(flatten)]
    pub response: ExplorationResponse,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sensitivity: Option<SensitivityCurve>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exported_rows: Option<usize>,
}

pub fn cmd_query(args: &QueryArgs) -> Result<QueryOutput> {
    let spec = match &args.bounds {
        Some(p) => QuerySpec::from_json(&std::fs::read_to_string(p)?)?,
        None => QuerySpec::default(),
    };
    let ds = args.data.load()?;
    let n = args.subsample.unwrap_or(ds.row_count()).max(1);
    let mut explorer = Explorer::new().with_dataset("dataset", ds)?;
    if let Some(path) = &args.model {
        let (model, sidecar) = read_model(path)?;
        explorer = explorer.with_model(model, sidecar.residuals);
    }
    let id = explorer.create_session(None, n, args.seed)?.session_id;
    let stats = explorer.with_session(&id, |s| Ok(s.stats().clone()))?;
    let bounds = spec.bounds.resolve(&stats)?;
    let tolerance = args.tolerance.or(spec.tolerance).unwrap_or(DEFAULT_TOLERANCE);
    let k = args.k.or(spec.k).unwrap_or(DEFAULT_K);
    let response = explorer.update_bounds(&id, bounds, tolerance, k)?;

    let sensitivity = match &args.axis {
        Some(axis) => Some(explorer.sensitivity(&id, axis, &BTreeMap::new(), args.n_samples)?),
        None => None,
    };
    let exported_rows = match &args.export {
        Some(path) => {
            let ids = explorer.with_session(&id, |s| Ok(s.row_ids_with(MatchLabel::Match)))?;
            std::fs::write(path, explorer.export(&id, &ids)?)?;
            Some(ids.len())
        }
        None => None,
    };
    Ok(QueryOutput {
        response,
        sensitivity,
        exported_rows,
    })
}

/// Loads the dataset and optional model into an [`Explorer`].
pub fn build_explorer(data: &DatasetArgs, model: Option<&Path>) -> Result<Explorer> {
    let ds = data.load()?;
    let name = data
        .dataset
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".into());
    let mut explorer = Explorer::new().with_dataset(name, ds)?;
    if let Some(path) = model {
        let (model, sidecar) = read_model(path)?;
        explorer = explorer.with_model(model, sidecar.residuals);
    }
    Ok(explorer)
}

/// Binds, reports the bound address through `on_bound`, then serves until
/// Ctrl-C.
pub fn cmd_serve(args: &ServeArgs, on_bound: impl FnOnce(SocketAddr)) -> Result<()> {
    let explorer = Arc::new(build_explorer(&args.data, args.model.as_deref())?);
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()?;
    runtime.block_on(async move {
        let listener = bind(SocketAddr::new(args.host, args.port)).await?;
        on_bound(listener.local_addr()?);
        serve(listener, explorer, async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
    })
}
