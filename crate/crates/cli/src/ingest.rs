use std::collections::BTreeMap;

use anyhow::Context;
use catchscope::ingest::{
    hop_snapshot, load_identifier_rows, load_nsid_rules, load_traceroutes, parse_snapshots,
    InputFormat,
};
use catchscope::report::snapshots_to_csv;
use catchscope::Snapshot;

use crate::config::{Format, Study};
use crate::store::{sha256_hex, write_atomic, Manifest, Store, SNAPSHOTS};
use crate::InputError;

fn read_input(study: &Study, path: &std::path::Path) -> anyhow::Result<Vec<u8>> {
    let full = study.resolve(path);
    std::fs::read(&full)
        .map_err(|e| InputError(format!("cannot read input {}: {e}", full.display())).into())
}

/// Parses every configured input into time-ordered snapshots. Nothing is
/// written until all inputs parse.
fn parse_inputs(study: &Study) -> anyhow::Result<Vec<Snapshot>> {
    let inputs = &study.inputs;
    let mut merged: BTreeMap<i64, Snapshot> = BTreeMap::new();
    let rules = match (inputs.format, &inputs.rules) {
        (Format::Nsid, Some(r)) => {
            let path = study.resolve(r);
            Some(load_nsid_rules(&path).with_context(|| format!("rules {}", path.display()))?)
        }
        (Format::Nsid, None) => {
            return Err(InputError("format \"nsid\" needs inputs.rules".into()).into())
        }
        _ => None,
    };
    for file in &inputs.files {
        let path = study.resolve(file.path());
        let shown = path.display().to_string();
        let snapshots = match inputs.format {
            Format::Canonical | Format::Verfploeter => {
                let format = if inputs.format == Format::Canonical {
                    InputFormat::CanonicalRows
                } else {
                    InputFormat::VerfploeterTable
                };
                let text = String::from_utf8(read_input(study, file.path())?)
                    .map_err(|_| InputError(format!("{shown}: not UTF-8")))?;
                parse_snapshots(&text, format).with_context(|| shown.clone())?
            }
            Format::Nsid => load_identifier_rows(&path, rules.as_ref().unwrap())
                .with_context(|| shown.clone())?,
            Format::Traceroute => {
                let time = file
                    .time()
                    .ok_or_else(|| InputError(format!("{shown}: traceroute inputs need a time")))?;
                let records = load_traceroutes(&path).with_context(|| shown.clone())?;
                vec![hop_snapshot(time, &records, inputs.focus_hop)
                    .with_context(|| shown.clone())?]
            }
        };
        for s in snapshots {
            let target = merged
                .entry(s.time)
                .or_insert_with(|| Snapshot::new(s.time));
            for (n, l) in s.iter() {
                if !target.try_insert(n.clone(), l.clone()) {
                    return Err(InputError(format!(
                        "{shown}: {n} at time {} already seen in another input",
                        s.time
                    ))
                    .into());
                }
            }
        }
    }
    Ok(merged.into_values().collect())
}

pub fn run(study: &Study, store: &Store) -> anyhow::Result<()> {
    if study.inputs.files.is_empty() {
        return Err(InputError("config lists no input files (inputs.files)".into()).into());
    }
    let settings = serde_json::to_string(&study.inputs)?;
    let mut hashes = BTreeMap::new();
    for file in &study.inputs.files {
        hashes.insert(
            file.path().display().to_string(),
            sha256_hex(&read_input(study, file.path())?),
        );
    }
    if let Some(rules) = &study.inputs.rules {
        hashes.insert(
            rules.display().to_string(),
            sha256_hex(&read_input(study, rules)?),
        );
    }
    if let Some(m) = store.manifest()? {
        if m.settings == settings && m.inputs == hashes && store.path(SNAPSHOTS).exists() {
            println!(
                "skipped: inputs unchanged ({} snapshots in {})",
                m.snapshot_count,
                store.root().display()
            );
            return Ok(());
        }
    }

    let snapshots = parse_inputs(study)?;
    if snapshots.is_empty() {
        return Err(InputError("inputs contain no observations".into()).into());
    }
    let text = snapshots_to_csv(&snapshots);
    write_atomic(&store.path(SNAPSHOTS), text.as_bytes())?;
    store.write_manifest(&Manifest {
        version: 1,
        settings,
        inputs: hashes,
        snapshots_sha256: sha256_hex(text.as_bytes()),
        snapshot_count: snapshots.len(),
    })?;
    let networks: std::collections::BTreeSet<_> =
        snapshots.iter().flat_map(|s| s.entries().keys()).collect();
    println!(
        "ingested {} snapshots, {} networks into {}",
        snapshots.len(),
        networks.len(),
        store.root().display()
    );
    Ok(())
}
