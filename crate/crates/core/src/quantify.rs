//! Per-site totals, site-to-site transitions and latency summaries.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::ingest::parse_time;
use crate::model::{
    format_number, CatchmentLabel, NetworkId, Snapshot, SnapshotSeries, Timestamp, WeightVector,
};

/// Weighted number of networks per catchment at one time.
#[derive(Clone, Debug, PartialEq)]
pub struct AggregateVector {
    pub time: Timestamp,
    pub counts: BTreeMap<CatchmentLabel, f64>,
}

impl AggregateVector {
    pub fn get(&self, label: &CatchmentLabel) -> f64 {
        self.counts.get(label).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.counts.values().sum()
    }
}

/// Sums weights per label. The UNKNOWN bucket is always present.
pub fn aggregate(snapshot: &Snapshot, weights: &WeightVector) -> AggregateVector {
    let mut counts = BTreeMap::from([(CatchmentLabel::Unknown, 0.0)]);
    for (network, label) in snapshot.iter() {
        *counts.entry(label.clone()).or_insert(0.0) += weights.get(network);
    }
    AggregateVector {
        time: snapshot.time,
        counts,
    }
}

/// One aggregate per snapshot of a dense series. Networks absent from a
/// snapshot land in UNKNOWN.
pub fn aggregate_series(series: &SnapshotSeries, weights: &WeightVector) -> Vec<AggregateVector> {
    let w = series.weights(weights);
    (0..series.len())
        .map(|i| {
            let mut sums = vec![0.0; series.labels().len()];
            for (&code, &wt) in series.column(i).iter().zip(&w) {
                sums[code as usize] += wt;
            }
            let mut counts = BTreeMap::from([(CatchmentLabel::Unknown, 0.0)]);
            for (code, sum) in sums.into_iter().enumerate() {
                if sum > 0.0 || code as u32 == SnapshotSeries::UNKNOWN_CODE {
                    *counts
                        .entry(series.label(code as u32).clone())
                        .or_insert(0.0) += sum;
                }
            }
            AggregateVector {
                time: series.times()[i],
                counts,
            }
        })
        .collect()
}

/// Weighted counts of networks moving from one catchment to another.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionMatrix {
    pub from_time: Timestamp,
    pub to_time: Timestamp,
    labels: Vec<CatchmentLabel>,
    cells: Vec<f64>,
}

impl TransitionMatrix {
    pub fn labels(&self) -> &[CatchmentLabel] {
        &self.labels
    }

    fn index(&self, label: &CatchmentLabel) -> Option<usize> {
        self.labels.binary_search(label).ok()
    }

    pub fn get(&self, from: &CatchmentLabel, to: &CatchmentLabel) -> f64 {
        match (self.index(from), self.index(to)) {
            (Some(i), Some(j)) => self.cells[i * self.labels.len() + j],
            _ => 0.0,
        }
    }

    /// Cell by axis position.
    pub fn cell(&self, i: usize, j: usize) -> f64 {
        self.cells[i * self.labels.len() + j]
    }

    pub fn row_totals(&self) -> Vec<f64> {
        let n = self.labels.len();
        (0..n)
            .map(|i| (0..n).map(|j| self.cell(i, j)).sum())
            .collect()
    }

    pub fn column_totals(&self) -> Vec<f64> {
        let n = self.labels.len();
        (0..n)
            .map(|j| (0..n).map(|i| self.cell(i, j)).sum())
            .collect()
    }

    pub fn total(&self) -> f64 {
        self.cells.iter().sum()
    }

    /// Labeled grid: rows are the earlier catchment, columns the later one.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("from\\to");
        for l in &self.labels {
            write!(out, ",{l}").unwrap();
        }
        out.push('\n');
        for (i, l) in self.labels.iter().enumerate() {
            write!(out, "{l}").unwrap();
            for j in 0..self.labels.len() {
                write!(out, ",{}", format_number(self.cell(i, j))).unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// Transition counts between two snapshots over the union of their keys.
/// The label axis holds every label seen on either side, sorted.
pub fn transition_matrix(a: &Snapshot, b: &Snapshot, weights: &WeightVector) -> TransitionMatrix {
    let universe: BTreeSet<&NetworkId> = a.entries().keys().chain(b.entries().keys()).collect();
    let pairs: Vec<(&CatchmentLabel, &CatchmentLabel, f64)> = universe
        .into_iter()
        .map(|n| (a.label(n), b.label(n), weights.get(n)))
        .collect();
    let labels: Vec<CatchmentLabel> = pairs
        .iter()
        .flat_map(|&(x, y, _)| [x, y])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .cloned()
        .collect();
    let n = labels.len();
    let mut cells = vec![0.0; n * n];
    for (x, y, w) in pairs {
        let i = labels.binary_search(x).unwrap();
        let j = labels.binary_search(y).unwrap();
        cells[i * n + j] += w;
    }
    TransitionMatrix {
        from_time: a.time,
        to_time: b.time,
        labels,
        cells,
    }
}

/// One round-trip time measurement for a network.
#[derive(Clone, Debug, PartialEq)]
pub struct LatencySample {
    pub network: NetworkId,
    pub time: Timestamp,
    /// Milliseconds.
    pub rtt: f64,
    pub catchment: CatchmentLabel,
}

pub fn load_latency_samples(path: impl AsRef<Path>) -> Result<Vec<LatencySample>> {
    parse_latency_samples(&std::fs::read_to_string(path)?)
}

/// Parses `time,network,rtt_ms,label` rows.
pub fn parse_latency_samples(text: &str) -> Result<Vec<LatencySample>> {
    crate::ingest::data_rows(text, &["time", "network", "rtt_ms", "label"])?
        .into_iter()
        .map(|(line, f)| {
            let time = parse_time(line, f[0])?;
            if f[1].is_empty() {
                return Err(Error::parse(line, "empty network key"));
            }
            let rtt: f64 = f[2]
                .parse()
                .map_err(|_| Error::parse(line, format!("invalid rtt `{}`", f[2])))?;
            if !(rtt.is_finite() && rtt > 0.0) {
                return Err(Error::parse(
                    line,
                    format!("rtt must be positive, got {rtt}"),
                ));
            }
            let catchment =
                CatchmentLabel::parse(f[3]).map_err(|e| Error::parse(line, e.to_string()))?;
            Ok(LatencySample {
                network: NetworkId::new(f[1]),
                time,
                rtt,
                catchment,
            })
        })
        .collect()
}

/// Weight-averaged RTT over the sampled networks of a single time. A later
/// sample for the same network replaces an earlier one.
pub fn weighted_mean_latency(samples: &[LatencySample], weights: &WeightVector) -> Result<f64> {
    let first = samples.first().ok_or(Error::NoSamples)?;
    if let Some(other) = samples.iter().find(|s| s.time != first.time) {
        return Err(Error::config(format!(
            "latency samples span times {} and {}",
            first.time, other.time
        )));
    }
    let latest: BTreeMap<&NetworkId, f64> = samples.iter().map(|s| (&s.network, s.rtt)).collect();
    let (mut sum, mut total) = (0.0, 0.0);
    for (network, rtt) in latest {
        let w = weights.get(network);
        sum += rtt * w;
        total += w;
    }
    if total <= 0.0 {
        return Err(Error::ZeroWeight);
    }
    Ok(sum / total)
}

/// Nearest-rank percentile of RTT per (time, catchment).
pub fn per_catchment_percentile(
    samples: &[LatencySample],
    percentile: f64,
) -> Result<BTreeMap<(Timestamp, CatchmentLabel), f64>> {
    if !(percentile > 0.0 && percentile <= 100.0) {
        return Err(Error::config(format!(
            "percentile {percentile} outside (0,100]"
        )));
    }
    let mut groups: HashMap<(Timestamp, &CatchmentLabel), Vec<f64>> = HashMap::new();
    for s in samples {
        groups
            .entry((s.time, &s.catchment))
            .or_default()
            .push(s.rtt);
    }
    Ok(groups
        .into_iter()
        .map(|((time, label), mut rtts)| {
            rtts.sort_by(f64::total_cmp);
            let rank = (percentile * rtts.len() as f64 / 100.0).ceil() as usize;
            let value = rtts[rank.clamp(1, rtts.len()) - 1];
            ((time, label.clone()), value)
        })
        .collect())
}
