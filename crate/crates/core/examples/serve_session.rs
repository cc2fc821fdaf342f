//! Start the HTTP service on an ephemeral port and drive one session the way
//! the browser client does.

use std::sync::Arc;

use alloy_explorer::data::synth::synthesize_dataset;
use alloy_explorer::session::http::{bind, serve};
use alloy_explorer::session::Explorer;
use alloy_explorer::surrogate::{train, SurrogateLayout, TrainConfig};
use serde_json::{json, Value};

#[tokio::main]
async fn main() -> anyhow::Result<()> {
    let ds = synthesize_dataset(5000, 3)?;
    let (model, report) = train(&ds, &SurrogateLayout::from_groups(&ds), &TrainConfig::desk_scale())?;
    let explorer = Explorer::new()
        .with_dataset("synthetic", ds)?
        .with_model(model, vec![report.held_out]);

    let listener = bind("127.0.0.1:0".parse()?).await?;
    let base = format!("http://{}", listener.local_addr()?);
    let (stop, stopped) = tokio::sync::oneshot::channel::<()>();
    let server = tokio::spawn(serve(listener, Arc::new(explorer), async {
        let _ = stopped.await;
    }));
    println!("serving on {base}");

    let c = reqwest::Client::new();
    let session: Value = c
        .post(format!("{base}/api/sessions"))
        .json(&json!({"n": 2000, "seed": 1}))
        .send()
        .await?
        .json()
        .await?;
    let id = session["session_id"].as_str().unwrap();
    println!("session {id}: {} rows", session["row_count"]);

    for bounds in [
        json!({"YS": [250, null], "density": [null, 2.7]}),
        json!({"YS": [250, null], "density": [null, 2.7], "delta_T": [null, 95]}),
    ] {
        let r: Value = c
            .post(format!("{base}/api/sessions/{id}/bounds"))
            .json(&json!({"bounds": bounds, "k": 5}))
            .send()
            .await?
            .json()
            .await?;
        println!(
            "match {} soft {} feasible {} ranking {}",
            r["match_count"], r["soft_count"], r["feasible"],
            r.get("ranking").map_or(0, |v| v.as_array().unwrap().len())
        );
    }

    let curve: Value = c
        .post(format!("{base}/api/sessions/{id}/sensitivity"))
        .json(&json!({"axis": "Cu", "n_samples": 5}))
        .send()
        .await?
        .json()
        .await?;
    for s in curve["samples"].as_array().unwrap() {
        println!("Cu {:.3} -> YS {:.1}", s["x"].as_f64().unwrap(), s["outputs"][1].as_f64().unwrap());
    }

    stop.send(()).ok();
    server.await??;
    Ok(())
}
