//! Cleaning of snapshot series and construction of weight vectors.
//!
//! Cleaning never deletes networks: a discarded observation becomes
//! UNKNOWN so the universe, and with it every similarity denominator, stays
//! the same whatever cleaning is configured.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use ipnet::Ipv4Net;

use crate::error::{Error, Result};
use crate::ingest::data_rows;
use crate::model::{CatchmentLabel, NetworkId, SiteName, Snapshot, WeightVector};

/// Default limit, in observation slots, on how far a label is carried into
/// a gap.
pub const DEFAULT_MAX_GAP: usize = 3;

/// Replaces every entry for which `reject` holds with UNKNOWN.
pub fn remove_incorrect<F>(series: &[Snapshot], reject: F) -> Vec<Snapshot>
where
    F: Fn(&NetworkId, &CatchmentLabel) -> bool,
{
    series
        .iter()
        .map(|snapshot| {
            let mut cleaned = snapshot.clone();
            for (network, label) in snapshot.iter() {
                if label.is_known() && reject(network, label) {
                    cleaned.set(network.clone(), CatchmentLabel::Unknown);
                }
            }
            cleaned
        })
        .collect()
}

fn universe(series: &[Snapshot]) -> BTreeSet<NetworkId> {
    series
        .iter()
        .flat_map(|s| s.entries().keys().cloned())
        .collect()
}

/// Relabels as OTHER every site whose largest weighted share of the
/// universe, over all snapshots, stays below `min_share`. A site that is
/// significant in any snapshot is kept everywhere.
pub fn drop_micro_catchments(
    series: &[Snapshot],
    weights: &WeightVector,
    min_share: f64,
) -> Result<Vec<Snapshot>> {
    if !(0.0..1.0).contains(&min_share) {
        return Err(Error::config(format!(
            "micro-catchment share must lie in [0, 1), got {min_share}"
        )));
    }
    let total: f64 = universe(series).iter().map(|n| weights.get(n)).sum();
    if min_share == 0.0 || total <= 0.0 {
        return Ok(series.to_vec());
    }
    let mut max_share: HashMap<&SiteName, f64> = HashMap::new();
    for snapshot in series {
        let mut mass: HashMap<&SiteName, f64> = HashMap::new();
        for (network, label) in snapshot.iter() {
            if let CatchmentLabel::Site(site) = label {
                *mass.entry(site).or_default() += weights.get(network);
            }
        }
        for (site, m) in mass {
            let best = max_share.entry(site).or_default();
            *best = best.max(m / total);
        }
    }
    let micro: BTreeSet<SiteName> = max_share
        .into_iter()
        .filter(|&(_, share)| share < min_share)
        .map(|(site, _)| site.clone())
        .collect();
    if micro.is_empty() {
        return Ok(series.to_vec());
    }
    Ok(series
        .iter()
        .map(|snapshot| {
            Snapshot::from_entries(
                snapshot.time,
                snapshot.iter().map(|(n, label)| {
                    let label = match label {
                        CatchmentLabel::Site(site) if micro.contains(site) => CatchmentLabel::Other,
                        other => other.clone(),
                    };
                    (n.clone(), label)
                }),
            )
        })
        .collect())
}

/// How a run of UNKNOWN observations between two known ones is filled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum GapFill {
    /// Fill the whole run, or none of it when its midpoint lies more than
    /// `max_gap` slots from the neighbour it would copy. Idempotent.
    #[default]
    WholeGap,
    /// Fill every slot within `max_gap` of its neighbour and leave the
    /// middle of long runs UNKNOWN. Not idempotent: a second pass fills the
    /// remaining middle.
    Partial,
}

/// Nearest-neighbour imputation with the default [`GapFill::WholeGap`]
/// policy.
pub fn interpolate_missing(series: &[Snapshot], max_gap: usize) -> Vec<Snapshot> {
    interpolate_missing_with(series, max_gap, GapFill::default())
}

/// Fills each run of UNKNOWN strictly between two known observations of a
/// network: the first half copies the left neighbour, the second half the
/// right one, and the middle slot of an odd run goes left. Leading and
/// trailing runs are left alone. `series` must be time-ordered.
pub fn interpolate_missing_with(
    series: &[Snapshot],
    max_gap: usize,
    policy: GapFill,
) -> Vec<Snapshot> {
    let mut out = series.to_vec();
    if series.len() < 3 || max_gap == 0 {
        return out;
    }
    for network in universe(series) {
        let labels: Vec<&CatchmentLabel> = series.iter().map(|s| s.label(&network)).collect();
        for (pos, source) in gap_fills(&labels, max_gap, policy) {
            out[pos].set(network.clone(), labels[source].clone());
        }
    }
    out
}

/// (slot, index of the known slot it copies) for every slot to fill.
fn gap_fills(labels: &[&CatchmentLabel], max_gap: usize, policy: GapFill) -> Vec<(usize, usize)> {
    let mut fills = Vec::new();
    let mut last_known: Option<usize> = None;
    for (right, label) in labels.iter().enumerate() {
        if !label.is_known() {
            continue;
        }
        if let Some(left) = last_known {
            let run = right - left - 1;
            let left_count = run.div_ceil(2);
            if run > 0 && (policy == GapFill::Partial || left_count <= max_gap) {
                for r in 0..run {
                    let (source, distance) = if r < left_count {
                        (left, r + 1)
                    } else {
                        (right, run - r)
                    };
                    if distance <= max_gap {
                        fills.push((left + 1 + r, source));
                    }
                }
            }
        }
        last_known = Some(right);
    }
    fills
}

/// Number of /24 blocks covered by `prefix` (fractional beyond /24).
fn slash24_blocks(prefix: &Ipv4Net) -> f64 {
    2f64.powi(24 - i32::from(prefix.prefix_len()))
}

fn parse_key(key: &NetworkId) -> Option<Ipv4Net> {
    let text = key.as_str();
    text.parse::<Ipv4Net>()
        .ok()
        .or_else(|| text.parse::<std::net::Ipv4Addr>().ok().map(Ipv4Net::from))
}

/// Weights observed networks by the address space they stand for: each
/// coverage prefix's /24 count is split evenly among the observed keys
/// inside it. Keys outside every coverage prefix weigh 1.
pub fn expand_prefix_weights<'a, I>(observed: I, coverage: &[Ipv4Net]) -> Result<WeightVector>
where
    I: IntoIterator<Item = &'a NetworkId>,
{
    let mut sorted: Vec<Ipv4Net> = coverage.iter().map(Ipv4Net::trunc).collect();
    sorted.sort();
    for pair in sorted.windows(2) {
        if pair[0].contains(&pair[1].network()) {
            return Err(Error::config(format!(
                "coverage prefixes {} and {} overlap",
                pair[0], pair[1]
            )));
        }
    }
    let mut inside: BTreeMap<usize, Vec<NetworkId>> = BTreeMap::new();
    let mut weights = BTreeMap::new();
    for key in observed {
        let home = parse_key(key).and_then(|net| sorted.iter().position(|p| p.contains(&net)));
        match home {
            Some(i) => inside.entry(i).or_default().push(key.clone()),
            None => {
                weights.insert(key.clone(), WeightVector::DEFAULT_WEIGHT);
            }
        }
    }
    for (i, keys) in inside {
        let share = slash24_blocks(&sorted[i]) / keys.len() as f64;
        for key in keys {
            weights.insert(key, share);
        }
    }
    WeightVector::from_map(weights)
}

pub fn load_traffic_weights(path: impl AsRef<Path>) -> Result<WeightVector> {
    parse_traffic_weights(&std::fs::read_to_string(path)?)
}

/// Parses `network,weight` rows (header required unless the text is empty).
pub fn parse_traffic_weights(text: &str) -> Result<WeightVector> {
    let mut weights = BTreeMap::new();
    for (line, fields) in data_rows(text, &["network", "weight"])? {
        let weight: f64 = fields[1]
            .parse()
            .map_err(|_| Error::parse(line, format!("invalid weight `{}`", fields[1])))?;
        if !(weight.is_finite() && weight >= 0.0) {
            return Err(Error::parse(
                line,
                format!("weight must be nonnegative, got {weight}"),
            ));
        }
        if fields[0].is_empty() {
            return Err(Error::parse(line, "empty network key"));
        }
        if weights.insert(NetworkId::new(fields[0]), weight).is_some() {
            return Err(Error::parse(
                line,
                format!("duplicate network `{}`", fields[0]),
            ));
        }
    }
    WeightVector::from_map(weights)
}
