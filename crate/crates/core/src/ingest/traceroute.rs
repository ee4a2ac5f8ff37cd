use std::path::Path;

use super::numbered_lines;
use crate::error::{Error, Result};
use crate::model::{CatchmentLabel, NetworkId, Snapshot, Timestamp};

/// Only the first ten hops of a path are measured.
pub const MAX_HOPS: u8 = 10;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hop {
    pub index: u8,
    /// `None` when the hop did not respond.
    pub responder: Option<String>,
    pub label: CatchmentLabel,
}

impl Hop {
    fn is_viable(&self) -> bool {
        self.responder.is_some() && self.label.is_known()
    }
}

/// Path towards one target network, hop indices strictly increasing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TracerouteRecord {
    pub target: NetworkId,
    hops: Vec<Hop>,
}

impl TracerouteRecord {
    pub fn new(target: NetworkId, hops: Vec<Hop>) -> Result<Self> {
        if hops.len() > MAX_HOPS as usize {
            return Err(Error::config(format!(
                "{} hops exceed {MAX_HOPS}",
                hops.len()
            )));
        }
        let mut previous = 0;
        for hop in &hops {
            if hop.index <= previous || hop.index > MAX_HOPS {
                return Err(Error::config(format!(
                    "hop index {} out of order or outside 1..={MAX_HOPS}",
                    hop.index
                )));
            }
            previous = hop.index;
        }
        Ok(TracerouteRecord { target, hops })
    }

    pub fn hops(&self) -> &[Hop] {
        &self.hops
    }
}

/// Catchment seen at `focus_hop`, or at the nearest viable hop when the
/// focus hop is silent or unlabeled. Equidistant candidates resolve to the
/// lower hop index.
pub fn extract_hop_catchment(record: &TracerouteRecord, focus_hop: u8) -> CatchmentLabel {
    record
        .hops
        .iter()
        .filter(|hop| hop.is_viable())
        .min_by_key(|hop| (hop.index.abs_diff(focus_hop), hop.index))
        .map(|hop| hop.label.clone())
        .unwrap_or(CatchmentLabel::Unknown)
}

/// Snapshot of the hop-`focus_hop` catchment of every target.
pub fn hop_snapshot(
    time: Timestamp,
    records: &[TracerouteRecord],
    focus_hop: u8,
) -> Result<Snapshot> {
    let mut snapshot = Snapshot::new(time);
    for record in records {
        if !snapshot.try_insert(
            record.target.clone(),
            extract_hop_catchment(record, focus_hop),
        ) {
            return Err(Error::config(format!(
                "target {} traced more than once",
                record.target
            )));
        }
    }
    Ok(snapshot)
}

/// Parses `target|hop,responder,label|...`; `*` marks an unresponsive hop.
pub fn parse_traceroute_line(line: &str) -> std::result::Result<TracerouteRecord, String> {
    let mut fields = line.split('|');
    let target = fields.next().map(str::trim).unwrap_or_default();
    if target.is_empty() {
        return Err("empty target".into());
    }
    let mut hops = Vec::new();
    for field in fields {
        let parts: Vec<&str> = field.split(',').map(str::trim).collect();
        let [index, responder, label] = parts[..] else {
            return Err(format!("hop `{field}` is not `hop,responder,label`"));
        };
        let index: u8 = index
            .parse()
            .map_err(|_| format!("invalid hop index `{index}`"))?;
        let responder = (responder != "*" && !responder.is_empty()).then(|| responder.to_string());
        let label = if responder.is_none() || label == "*" || label.is_empty() {
            CatchmentLabel::Unknown
        } else {
            CatchmentLabel::parse(label).map_err(|e| e.to_string())?
        };
        hops.push(Hop {
            index,
            responder,
            label,
        });
    }
    TracerouteRecord::new(NetworkId::new(target), hops).map_err(|e| e.to_string())
}

pub fn parse_traceroutes(text: &str) -> Result<Vec<TracerouteRecord>> {
    numbered_lines(text)
        .map(|(line, row)| parse_traceroute_line(row).map_err(|msg| Error::parse(line, msg)))
        .collect()
}

pub fn load_traceroutes(path: impl AsRef<Path>) -> Result<Vec<TracerouteRecord>> {
    parse_traceroutes(&std::fs::read_to_string(path)?)
}
