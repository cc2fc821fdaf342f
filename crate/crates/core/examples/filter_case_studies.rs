//! Classify a synthetic table against the structural and heat-exchanger
//! target ranges shipped in `fixtures/`.

use alloy_explorer::cli::QuerySpec;
use alloy_explorer::data::compute_norm_stats;
use alloy_explorer::data::synth::synthesize_dataset;
use alloy_explorer::filter::{classify, DEFAULT_TOLERANCE};

fn main() -> anyhow::Result<()> {
    let ds = synthesize_dataset(20_000, 2025)?;
    let stats = compute_norm_stats(&ds)?;
    let fixtures = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");

    for name in ["structural", "structural_delta_t", "heat_exchanger"] {
        let text = std::fs::read_to_string(format!("{fixtures}/{name}.json"))?;
        let spec = QuerySpec::from_json(&text)?;
        let bounds = spec.bounds.resolve(&stats)?;
        let tol = spec.tolerance.unwrap_or(DEFAULT_TOLERANCE);
        let c = classify(&ds, &stats, &bounds, tol)?;
        println!(
            "{name:<20} match {:>5}  soft {:>5}  feasible {}",
            c.match_count, c.soft_count, c.feasible
        );
        for (col, iv) in bounds.iter() {
            println!("    {col:<20} [{:.4e}, {:.4e}]", iv.lo, iv.hi);
        }
    }
    Ok(())
}
