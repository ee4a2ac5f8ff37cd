use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use ipnet::IpNet;

use super::data_rows;
use super::nsid::{map_nsid, NsidRules};
use crate::error::{Error, Result};
use crate::model::{CatchmentLabel, NetworkId, Snapshot, Timestamp};

/// Layouts accepted by [`load_snapshots`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InputFormat {
    /// `time,network,label`; label is a site token or a reserved word.
    CanonicalRows,
    /// `time,prefix,site`; every prefix seen anywhere in the file is part of
    /// every snapshot, unknown where absent.
    VerfploeterTable,
}

impl InputFormat {
    fn header(self) -> [&'static str; 3] {
        match self {
            InputFormat::CanonicalRows => ["time", "network", "label"],
            InputFormat::VerfploeterTable => ["time", "prefix", "site"],
        }
    }
}

pub fn load_snapshots(path: impl AsRef<Path>, format: InputFormat) -> Result<Vec<Snapshot>> {
    let text = std::fs::read_to_string(path)?;
    parse_snapshots(&text, format)
}

/// Parses snapshot rows. Output is sorted by time.
pub fn parse_snapshots(text: &str, format: InputFormat) -> Result<Vec<Snapshot>> {
    let rows = data_rows(text, &format.header())?;
    if rows.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut by_time: BTreeMap<Timestamp, Snapshot> = BTreeMap::new();
    for (line, fields) in rows {
        let time = parse_time(line, fields[0])?;
        let network = parse_network(line, fields[1], format)?;
        let label =
            CatchmentLabel::parse(fields[2]).map_err(|e| Error::parse(line, e.to_string()))?;
        let snapshot = by_time.entry(time).or_insert_with(|| Snapshot::new(time));
        if !snapshot.try_insert(network.clone(), label) {
            return Err(Error::DuplicateEntry {
                line,
                time,
                network: network.to_string(),
            });
        }
    }
    let mut snapshots: Vec<Snapshot> = by_time.into_values().collect();
    if format == InputFormat::VerfploeterTable {
        let universe: BTreeSet<NetworkId> = snapshots
            .iter()
            .flat_map(|s| s.entries().keys().cloned())
            .collect();
        for snapshot in &mut snapshots {
            for network in &universe {
                snapshot.try_insert(network.clone(), CatchmentLabel::Unknown);
            }
        }
    }
    Ok(snapshots)
}

/// Loads `time,network,identifier` rows (pre-extracted NSID or
/// hostname.bind strings) and maps each identifier through `rules`.
pub fn load_identifier_rows(path: impl AsRef<Path>, rules: &NsidRules) -> Result<Vec<Snapshot>> {
    let text = std::fs::read_to_string(path)?;
    parse_identifier_rows(&text, rules)
}

pub fn parse_identifier_rows(text: &str, rules: &NsidRules) -> Result<Vec<Snapshot>> {
    // identifiers may legitimately be empty, so split on the first two commas only
    let mut lines = super::numbered_lines(text);
    let Some((line_no, header)) = lines.next() else {
        return Err(Error::EmptyInput);
    };
    let fields: Vec<&str> = header.split(',').map(str::trim).collect();
    if fields != ["time", "network", "identifier"] {
        return Err(Error::parse(
            line_no,
            format!("expected header `time,network,identifier`, found `{header}`"),
        ));
    }
    let mut by_time: BTreeMap<Timestamp, Snapshot> = BTreeMap::new();
    for (line, text) in lines {
        let mut parts = text.splitn(3, ',');
        let (Some(time), Some(network), Some(identifier)) =
            (parts.next(), parts.next(), parts.next())
        else {
            return Err(Error::parse(line, "expected 3 fields"));
        };
        let time = parse_time(line, time.trim())?;
        let network = NetworkId::new(network);
        if network.as_str().is_empty() {
            return Err(Error::parse(line, "empty network key"));
        }
        let label = map_nsid(identifier, rules);
        let snapshot = by_time.entry(time).or_insert_with(|| Snapshot::new(time));
        if !snapshot.try_insert(network.clone(), label) {
            return Err(Error::DuplicateEntry {
                line,
                time,
                network: network.to_string(),
            });
        }
    }
    if by_time.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(by_time.into_values().collect())
}

pub(crate) fn parse_time(line: usize, text: &str) -> Result<Timestamp> {
    text.parse::<Timestamp>()
        .map_err(|_| Error::parse(line, format!("invalid epoch seconds `{text}`")))
}

fn parse_network(line: usize, text: &str, format: InputFormat) -> Result<NetworkId> {
    if text.is_empty() {
        return Err(Error::parse(line, "empty network key"));
    }
    if format == InputFormat::VerfploeterTable && text.parse::<IpNet>().is_err() {
        return Err(Error::parse(line, format!("invalid prefix `{text}`")));
    }
    Ok(NetworkId::new(text))
}
