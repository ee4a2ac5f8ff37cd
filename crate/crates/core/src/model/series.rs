use std::collections::{BTreeSet, HashMap};

use super::{CatchmentLabel, NetworkId, Snapshot, Timestamp, WeightVector};
use crate::error::{Error, Result};

/// Interned label index inside a [`SnapshotSeries`]. Code 0 is always
/// [`CatchmentLabel::Unknown`].
pub type LabelCode = u32;

/// Columnar encoding of a time-ordered list of snapshots over one shared
/// network universe.
///
/// Each snapshot becomes a vector of [`LabelCode`]s indexed by network
/// position in the sorted universe. This is the representation every
/// whole-series computation runs on; at millions of networks it is two
/// orders of magnitude smaller than a map per snapshot.
#[derive(Clone, Debug, PartialEq)]
pub struct SnapshotSeries {
    networks: Vec<NetworkId>,
    labels: Vec<CatchmentLabel>,
    times: Vec<Timestamp>,
    codes: Vec<Vec<LabelCode>>,
}

impl SnapshotSeries {
    pub const UNKNOWN_CODE: LabelCode = 0;

    /// Encodes `snapshots`, which must have strictly increasing times. The
    /// universe is the union of keys across all snapshots.
    pub fn from_snapshots(snapshots: &[Snapshot]) -> Result<Self> {
        let universe: BTreeSet<&NetworkId> =
            snapshots.iter().flat_map(|s| s.entries().keys()).collect();
        let mut builder = SeriesBuilder::new(universe.into_iter().cloned().collect());
        for snapshot in snapshots {
            let mut column = vec![Self::UNKNOWN_CODE; builder.networks.len()];
            // both sides are sorted, walk them together
            let mut pos = 0;
            for (network, label) in snapshot.iter() {
                while builder.networks[pos] != *network {
                    pos += 1;
                }
                column[pos] = builder.intern(label);
            }
            builder.push_column(snapshot.time, column)?;
        }
        Ok(builder.build())
    }

    pub fn networks(&self) -> &[NetworkId] {
        &self.networks
    }

    pub fn times(&self) -> &[Timestamp] {
        &self.times
    }

    /// Number of snapshots.
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn network_count(&self) -> usize {
        self.networks.len()
    }

    pub fn labels(&self) -> &[CatchmentLabel] {
        &self.labels
    }

    pub fn label(&self, code: LabelCode) -> &CatchmentLabel {
        &self.labels[code as usize]
    }

    pub fn column(&self, index: usize) -> &[LabelCode] {
        &self.codes[index]
    }

    /// Resolves `weights` against the universe, in network order.
    pub fn weights(&self, weights: &WeightVector) -> Vec<f64> {
        self.networks.iter().map(|n| weights.get(n)).collect()
    }

    /// Decodes snapshot `index`. Every network of the universe gets an
    /// entry, unknown ones included, so the universe survives a round trip.
    pub fn snapshot(&self, index: usize) -> Snapshot {
        Snapshot::from_entries(
            self.times[index],
            self.networks
                .iter()
                .zip(&self.codes[index])
                .map(|(n, &c)| (n.clone(), self.labels[c as usize].clone())),
        )
    }

    pub fn to_snapshots(&self) -> Vec<Snapshot> {
        (0..self.len()).map(|i| self.snapshot(i)).collect()
    }
}

/// Incremental construction of a [`SnapshotSeries`] without going through
/// per-snapshot maps.
#[derive(Debug)]
pub struct SeriesBuilder {
    networks: Vec<NetworkId>,
    labels: Vec<CatchmentLabel>,
    label_index: HashMap<CatchmentLabel, LabelCode>,
    times: Vec<Timestamp>,
    codes: Vec<Vec<LabelCode>>,
}

impl SeriesBuilder {
    /// `networks` is sorted and deduplicated.
    pub fn new(mut networks: Vec<NetworkId>) -> Self {
        networks.sort();
        networks.dedup();
        let mut label_index = HashMap::new();
        label_index.insert(CatchmentLabel::Unknown, SnapshotSeries::UNKNOWN_CODE);
        SeriesBuilder {
            networks,
            labels: vec![CatchmentLabel::Unknown],
            label_index,
            times: Vec::new(),
            codes: Vec::new(),
        }
    }

    pub fn networks(&self) -> &[NetworkId] {
        &self.networks
    }

    pub fn intern(&mut self, label: &CatchmentLabel) -> LabelCode {
        if let Some(&code) = self.label_index.get(label) {
            return code;
        }
        let code = self.labels.len() as LabelCode;
        self.labels.push(label.clone());
        self.label_index.insert(label.clone(), code);
        code
    }

    /// Appends a snapshot given as one code per network (universe order).
    pub fn push_column(&mut self, time: Timestamp, column: Vec<LabelCode>) -> Result<()> {
        if column.len() != self.networks.len() {
            return Err(Error::config(format!(
                "column has {} cells for a universe of {} networks",
                column.len(),
                self.networks.len()
            )));
        }
        if let Some(&last) = self.times.last() {
            if time <= last {
                return Err(Error::config(format!(
                    "snapshot times must be strictly increasing ({time} after {last})"
                )));
            }
        }
        if let Some(&bad) = column.iter().find(|&&c| c as usize >= self.labels.len()) {
            return Err(Error::config(format!(
                "label code {bad} was never interned"
            )));
        }
        self.times.push(time);
        self.codes.push(column);
        Ok(())
    }

    pub fn build(self) -> SnapshotSeries {
        SnapshotSeries {
            networks: self.networks,
            labels: self.labels,
            times: self.times,
            codes: self.codes,
        }
    }
}
