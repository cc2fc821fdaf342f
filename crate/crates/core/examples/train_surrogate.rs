//! Train the surrogate on synthetic data and print the residual table.
//!
//! cargo run --release --example train_surrogate -- [rows] [--full]
//!
//! `--full` uses the production width (two 1024-unit hidden layers).

use alloy_explorer::data::synth::synthesize_dataset;
use alloy_explorer::surrogate::{save_model, train, write_model, SurrogateLayout, TrainConfig};

fn main() -> anyhow::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let rows = args.iter().find_map(|a| a.parse().ok()).unwrap_or(10_000);
    let config = if args.iter().any(|a| a == "--full") {
        TrainConfig::default()
    } else {
        TrainConfig::desk_scale()
    };

    let ds = synthesize_dataset(rows, 1)?;
    let layout = SurrogateLayout::from_groups(&ds);
    let start = std::time::Instant::now();
    let (model, report) = train(&ds, &layout, &config)?;
    println!("layers {:?}, {:.1} s", report.layer_dims, start.elapsed().as_secs_f64());
    for e in report.loss_history.iter().step_by(5) {
        println!("epoch {:>3}  train {:.5}  validation {:.5}", e.epoch, e.train_loss, e.validation_loss);
    }
    print!("{}", report.held_out.to_table());
    print!("{}", report.in_sample.to_table());

    let dir = tempfile::tempdir()?;
    let path = dir.path().join("surrogate.bin");
    let files = save_model(&model);
    write_model(&path, &files)?;
    println!("wrote {} bytes", files.binary.len());
    Ok(())
}
