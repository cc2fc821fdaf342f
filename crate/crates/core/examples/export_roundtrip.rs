//! Filter a session for heat-exchanger candidates, export them, and check
//! the CSV re-ingests to the same values.

use std::io::Cursor;

use alloy_explorer::data::read_csv;
use alloy_explorer::data::synth::{synthesize_dataset, synthetic_schema};
use alloy_explorer::filter::{BoundsSpec, MatchLabel};
use alloy_explorer::session::Explorer;

fn main() -> anyhow::Result<()> {
    let ds = synthesize_dataset(50_000, 9)?;
    let explorer = Explorer::new().with_dataset("alloys", ds.clone())?;
    let id = explorer.create_session(None, 20_000, 1)?.session_id;

    let bounds = BoundsSpec::new()
        .with("therm_conductivity", 150.0, 1e9)?
        .with("density", 0.0, 2.7)?
        .with("lin_thermal_exp", 20e-6, 26e-6)?
        .with("hardness", 60.0, 100.0)?
        .with("Si", 1.0, 12.0)?;
    let r = explorer.update_bounds(&id, bounds, 0.05, 20)?;
    let ids = explorer.with_session(&id, |s| Ok(s.row_ids_with(MatchLabel::Match)))?;
    let csv = explorer.export(&id, &ids)?;

    let back = read_csv(Cursor::new(&csv), &synthetic_schema())?;
    let positions: Vec<usize> = ids.iter().map(|i| ds.position_of(*i).unwrap()).collect();
    println!(
        "{} matches, exported {} rows ({} bytes), bit-identical: {}",
        r.match_count,
        back.row_count(),
        csv.len(),
        back.bit_eq(&ds.select_rows(&positions))
    );
    Ok(())
}
