//! Generate a synthetic table, write it with its schema, read it back and
//! print the per-group column counts and per-column statistics.
//!
//! cargo run --example synth_and_ingest -- [rows] [seed]

use alloy_explorer::data::synth::synthesize_dataset;
use alloy_explorer::data::{
    load_csv, load_schema, summarize, write_csv_path, write_schema, zero_fill_missing, ColumnGroup,
};

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let rows: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(5000);
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(0);

    let dir = tempfile::tempdir()?;
    let csv = dir.path().join("alloys.csv");
    let schema = dir.path().join("alloys.schema");
    let ds = synthesize_dataset(rows, seed)?;
    write_csv_path(&ds, &csv)?;
    std::fs::write(&schema, write_schema(ds.columns()))?;

    let loaded = zero_fill_missing(load_csv(&csv, &load_schema(&schema)?)?);
    assert!(loaded.bit_eq(&ds));
    println!("{} rows from {}", loaded.row_count(), csv.display());

    for group in ColumnGroup::ALL {
        println!("{:<18} {} columns", group.as_str(), loaded.columns_in_group(group).len());
    }
    println!();
    println!("{:<20} {:>14} {:>14}", "column", "mean", "std");
    for s in summarize(&loaded)? {
        if s.group != ColumnGroup::ScrapInput {
            println!("{:<20} {:>14.6e} {:>14.6e}", s.name, s.mean, s.std);
        }
    }
    Ok(())
}
