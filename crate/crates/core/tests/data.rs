mod common;

use std::io::Cursor;

use alloy_explorer::data::synth::{synthesize_dataset, synthetic_schema};
use alloy_explorer::data::{
    compute_norm_stats, denormalize, normalize, read_csv, subsample, summarize, write_csv,
    zero_fill_missing, ColumnGroup,
};
use alloy_explorer::Error;

#[test]
fn csv_round_trip_is_bit_exact() {
    let ds = synthesize_dataset(500, 12).unwrap();
    let mut buf = Vec::new();
    write_csv(&ds, &mut buf).unwrap();
    let back = read_csv(Cursor::new(&buf), &synthetic_schema()).unwrap();
    assert!(back.bit_eq(&ds));
    let mut again = Vec::new();
    write_csv(&back, &mut again).unwrap();
    assert_eq!(buf, again);
}

#[test]
fn missing_schema_column_is_reported() {
    let csv = "Si,Fe\n1,2\n";
    let mut schema = synthetic_schema();
    schema.truncate(6);
    match read_csv(Cursor::new(csv), &schema) {
        Err(Error::MissingColumn(c)) => assert_eq!(c, "scrap_cast"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn zero_fill_then_no_missing_cells() {
    let schema = &synthetic_schema()[4..6];
    let csv = "Si,Fe\n1,\n,\n3,0.5\n";
    let ds = read_csv(Cursor::new(csv), schema).unwrap();
    assert_eq!(ds.missing_count(0), 1);
    assert_eq!(ds.missing_count(1), 2);
    let filled = zero_fill_missing(ds);
    assert!(!filled.has_missing());
    assert_eq!(filled.row(1), &[0.0, 0.0]);
}

#[test]
fn summary_matches_a_direct_scan() {
    let ds = synthesize_dataset(2000, 3).unwrap();
    let summary = summarize(&ds).unwrap();
    let c = ds.column_index("density").unwrap();
    let n = ds.row_count() as f64;
    let mean = ds.rows().map(|r| r[c]).sum::<f64>() / n;
    let var = ds.rows().map(|r| (r[c] - mean).powi(2)).sum::<f64>() / n;
    assert!((summary[c].mean - mean).abs() < 1e-9);
    assert!((summary[c].std - var.sqrt()).abs() < 1e-9);
    assert_eq!(summary[c].group, ColumnGroup::Property);
}

#[test]
fn subsample_is_seeded_and_order_preserving() {
    let ds = synthesize_dataset(3000, 4).unwrap();
    let a = subsample(&ds, 500, 9).unwrap();
    let b = subsample(&ds, 500, 9).unwrap();
    let c = subsample(&ds, 500, 10).unwrap();
    assert!(a.bit_eq(&b));
    assert_ne!(a.source_row_ids(), c.source_row_ids());
    assert!(a.source_row_ids().windows(2).all(|w| w[0] < w[1]));
    for (i, &id) in a.source_row_ids().iter().enumerate() {
        assert_eq!(a.row(i), ds.row(ds.position_of(id).unwrap()));
    }
    assert!(subsample(&ds, 10_000, 1).unwrap().bit_eq(&ds));
}

#[test]
fn normalization_round_trips_within_rounding() {
    let ds = synthesize_dataset(400, 5).unwrap();
    let stats = compute_norm_stats(&ds).unwrap();
    let table = normalize(&ds, &stats).unwrap();
    assert!(table.values.iter().all(|v| (0.0..=1.0).contains(v)));
    let back = denormalize(&table, &stats).unwrap();
    for (i, (x, y)) in ds.values().iter().zip(&back).enumerate() {
        let range = stats.range(i % ds.width());
        assert!((x - y).abs() <= 1e-12 * range.max(x.abs()), "{x} vs {y}");
    }
}
