//! Sweep Si from the composition centroid and print predicted yield strength
//! and its slope, then repeat along Fe with Si nudged by +0.1 wt.%.

use std::collections::BTreeMap;

use alloy_explorer::data::compute_norm_stats;
use alloy_explorer::data::synth::synthesize_dataset;
use alloy_explorer::surrogate::{
    composition_center, sensitivity_curve, train, SurrogateLayout, TrainConfig,
};

fn main() -> anyhow::Result<()> {
    let ds = synthesize_dataset(5000, 4)?;
    let stats = compute_norm_stats(&ds)?;
    let (model, _) = train(&ds, &SurrogateLayout::from_groups(&ds), &TrainConfig::desk_scale())?;
    let center = composition_center(&ds, &model.input_names)?;
    let ys = model.output_names.iter().position(|n| n == "YS").unwrap();

    let range = |axis: &str| {
        let c = stats.index_of(axis).unwrap();
        (stats.min[c], stats.max[c])
    };
    let curve = sensitivity_curve(&model, &center, "Si", range("Si"), 11, &BTreeMap::new())?;
    println!("{:>8} {:>10} {:>12}", "Si", "YS", "dYS/dSi");
    for s in &curve.samples {
        println!("{:>8.3} {:>10.2} {:>12.4}", s.x, s.outputs[ys], s.derivatives[ys]);
    }

    let si = model.input_index("Si").unwrap();
    let nudge = BTreeMap::from([("Si".to_string(), center[si] + 0.1)]);
    let base = sensitivity_curve(&model, &center, "Fe", range("Fe"), 6, &BTreeMap::new())?;
    let moved = sensitivity_curve(&model, &center, "Fe", range("Fe"), 6, &nudge)?;
    println!("\n{:>8} {:>10} {:>14}", "Fe", "YS", "YS (Si+0.1)");
    for (a, b) in base.samples.iter().zip(&moved.samples) {
        println!("{:>8.3} {:>10.2} {:>14.2}", a.x, a.outputs[ys], b.outputs[ys]);
    }
    Ok(())
}
