//! When the structural bounds plus a narrow solidification range leave no
//! candidate, rank rows by normalized distance to the bounds' midpoints.

use alloy_explorer::data::synth::synthesize_dataset;
use alloy_explorer::data::{compute_norm_stats, normalize};
use alloy_explorer::filter::{classify, OpenBounds};
use alloy_explorer::neighbors::{target_from_bounds, top_k};

fn main() -> anyhow::Result<()> {
    let ds = synthesize_dataset(20_000, 2025)?;
    let stats = compute_norm_stats(&ds)?;
    let open: OpenBounds = serde_json::from_str(
        r#"{"YS": [200, null], "hardness": [80, 130], "density": [null, 2.75],
            "CSC": [null, 0.5], "Vf_FCC_A1": [80, null], "Fe": [null, 0.5],
            "Si": [null, 0.5], "delta_T": [null, 100]}"#,
    )?;
    let bounds = open.resolve(&stats)?;

    let c = classify(&ds, &stats, &bounds, 0.05)?;
    println!("match {}  soft {}", c.match_count, c.soft_count);
    if c.feasible {
        return Ok(());
    }

    let target = target_from_bounds(&bounds)?;
    let table = normalize(&ds, &stats)?;
    let ranking = top_k(&table, &stats, &target, 10)?;
    println!("no row satisfies every bound; nearest 10:");
    let cols: Vec<usize> = bounds.iter().map(|(n, _)| ds.column_index(n).unwrap()).collect();
    for n in &ranking.entries {
        let row = ds.row(n.row);
        let vals: Vec<String> = cols.iter().map(|&c| format!("{:.3}", row[c])).collect();
        println!("  row {:>5}  d={:.4}  score={:.3}  {}", n.row, n.distance, n.score, vals.join(" "));
    }
    Ok(())
}
