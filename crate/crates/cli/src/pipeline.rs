//! Loading and cleaning shared by `analyze` and `report`.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::net::Ipv4Addr;

use anyhow::Context;
use catchscope::ingest::{load_snapshots, InputFormat};
use catchscope::prep::{
    drop_micro_catchments, expand_prefix_weights, interpolate_missing, load_traffic_weights,
    remove_incorrect,
};
use catchscope::{CatchmentLabel, NetworkId, Snapshot, WeightVector};
use ipnet::Ipv4Net;

use crate::config::{Study, WeightMode};
use crate::store::{sha256_hex, Store, SNAPSHOTS};
use crate::InputError;

pub struct Prepared {
    pub snapshots: Vec<Snapshot>,
    pub weights: WeightVector,
    /// Hash of store contents, weights and cleaning settings.
    pub cache_key: String,
}

fn key_net(key: &NetworkId) -> Option<Ipv4Net> {
    let text = key.as_str();
    text.parse::<Ipv4Net>()
        .ok()
        .or_else(|| text.parse::<Ipv4Addr>().ok().map(Ipv4Net::from))
}

fn study_weights(study: &Study, snapshots: &[Snapshot]) -> anyhow::Result<WeightVector> {
    Ok(match study.weights.mode {
        WeightMode::Uniform => WeightVector::uniform(),
        WeightMode::Prefix => {
            if study.weights.coverage.is_empty() {
                return Err(
                    InputError("weights.mode = \"prefix\" needs weights.coverage".into()).into(),
                );
            }
            let universe: BTreeSet<&NetworkId> =
                snapshots.iter().flat_map(|s| s.entries().keys()).collect();
            expand_prefix_weights(universe, &study.weights.coverage)?
        }
        WeightMode::Traffic => {
            let file = study.weights.file.as_ref().ok_or_else(|| {
                InputError("weights.mode = \"traffic\" needs weights.file".into())
            })?;
            let path = study.resolve(file);
            load_traffic_weights(&path)
                .with_context(|| format!("weights file {}", path.display()))?
        }
    })
}

fn weights_hash(weights: &WeightVector) -> String {
    let mut text = String::new();
    for (k, w) in weights.explicit() {
        writeln!(text, "{k},{w:?}").unwrap();
    }
    sha256_hex(text.as_bytes())
}

pub fn prepare(study: &Study, store: &Store) -> anyhow::Result<Prepared> {
    let manifest = store.require_manifest()?;
    let raw = load_snapshots(store.path(SNAPSHOTS), InputFormat::CanonicalRows)
        .with_context(|| format!("reading {}", store.path(SNAPSHOTS).display()))?;
    let weights = study_weights(study, &raw)?;

    let cleaning = &study.cleaning;
    let rejected: Vec<CatchmentLabel> = cleaning
        .reject_labels
        .iter()
        .map(|l| {
            CatchmentLabel::parse(l).map_err(|e| InputError(format!("reject label `{l}`: {e}")))
        })
        .collect::<Result<_, _>>()?;
    let mut snapshots = if rejected.is_empty() && cleaning.reject_prefixes.is_empty() {
        raw
    } else {
        remove_incorrect(&raw, |network, label| {
            rejected.contains(label)
                || key_net(network)
                    .is_some_and(|net| cleaning.reject_prefixes.iter().any(|p| p.contains(&net)))
        })
    };
    if cleaning.min_share > 0.0 {
        snapshots = drop_micro_catchments(&snapshots, &weights, cleaning.min_share)?;
    }
    if cleaning.max_gap > 0 {
        snapshots = interpolate_missing(&snapshots, cleaning.max_gap);
    }

    let cache_key = sha256_hex(
        format!(
            "{}\n{}\n{}\n",
            manifest.snapshots_sha256,
            weights_hash(&weights),
            study.cleaning_fingerprint()
        )
        .as_bytes(),
    );
    Ok(Prepared {
        snapshots,
        weights,
        cache_key,
    })
}
