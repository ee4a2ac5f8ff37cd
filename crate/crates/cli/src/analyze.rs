use std::fmt::Write as _;

use catchscope::analysis::{
    detect_changes_in_matrix, hac_cluster_with, select_modes, Linkage, SimilarityMatrix,
};
use catchscope::SnapshotSeries;
use serde::{Deserialize, Serialize};

use crate::config::Study;
use crate::pipeline::prepare;
use crate::store::{write_atomic, Store};
use crate::InputError;

pub const META: &str = "analysis/meta.json";
pub const CHANGES: &str = "analysis/changes.csv";

/// Summary of the last analysis, read back by `report`.
#[derive(Debug, Serialize, Deserialize)]
pub struct Meta {
    pub cache_key: String,
    pub threshold: f64,
    pub adaptive: bool,
    pub linkage: Linkage,
    pub snapshots: usize,
    pub clusters: usize,
    pub modes: Vec<usize>,
    pub events: usize,
}

impl Meta {
    pub fn load(store: &Store) -> anyhow::Result<Meta> {
        let path = store.path(META);
        let text = std::fs::read_to_string(&path).map_err(|_| {
            InputError(format!(
                "no analysis in {}; run `catchscope analyze` first",
                store.root().display()
            ))
        })?;
        Ok(serde_json::from_str(&text)?)
    }
}

pub fn run(study: &Study, store: &Store, threshold: Option<f64>) -> anyhow::Result<()> {
    if let Some(t) = threshold {
        if !(0.0..=1.0).contains(&t) {
            return Err(InputError(format!("--threshold {t} outside [0,1]")).into());
        }
    }
    let prepared = prepare(study, store)?;
    let (matrix, hit) = match store.cached_matrix(&prepared.cache_key)? {
        Some(m) => (m, true),
        None => {
            let series = SnapshotSeries::from_snapshots(&prepared.snapshots)?;
            let m = SimilarityMatrix::from_series(&series, &prepared.weights)?;
            store.put_matrix(&prepared.cache_key, &m)?;
            (m, false)
        }
    };

    let fixed = threshold.or(study.clustering.threshold);
    let assignment = match fixed {
        Some(t) => hac_cluster_with(&matrix, t, study.clustering.linkage),
        None => select_modes(&matrix, &study.clustering.sweep())?,
    };
    let events = detect_changes_in_matrix(&matrix, &study.detection.params());

    write_atomic(
        &store.path("analysis/similarity.csv"),
        matrix.to_csv().as_bytes(),
    )?;
    let mut modes = String::from("time,cluster,is_mode\n");
    for &t in assignment.times() {
        let c = assignment.cluster_of(t).expect("every time clustered");
        writeln!(modes, "{t},{c},{}", assignment.is_mode(c)).unwrap();
    }
    write_atomic(&store.path("analysis/modes.csv"), modes.as_bytes())?;
    let mut changes = String::from("time,score\n");
    for e in &events {
        writeln!(changes, "{},{}", e.time, e.score).unwrap();
    }
    write_atomic(&store.path(CHANGES), changes.as_bytes())?;

    let meta = Meta {
        cache_key: prepared.cache_key,
        threshold: assignment.threshold(),
        adaptive: fixed.is_none(),
        linkage: study.clustering.linkage,
        snapshots: matrix.len(),
        clusters: assignment.cluster_count(),
        modes: assignment.mode_ids().iter().copied().collect(),
        events: events.len(),
    };
    let mut text = serde_json::to_string_pretty(&meta)?;
    text.push('\n');
    write_atomic(&store.path(META), text.as_bytes())?;

    println!(
        "snapshots={} clusters={} modes={} threshold={:.2}{} events={} cache={}",
        meta.snapshots,
        meta.clusters,
        meta.modes.len(),
        meta.threshold,
        if meta.adaptive { " (adaptive)" } else { "" },
        meta.events,
        if hit { "hit" } else { "miss" }
    );
    Ok(())
}
