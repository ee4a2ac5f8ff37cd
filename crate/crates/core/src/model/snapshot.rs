use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use super::{CatchmentLabel, Timestamp};

/// Opaque key of an observed network: a /24 in CIDR text, a vantage-point
/// id, or a probed prefix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NetworkId(Arc<str>);

impl NetworkId {
    pub fn new(key: impl AsRef<str>) -> Self {
        NetworkId(Arc::from(key.as_ref().trim()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NetworkId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for NetworkId {
    fn from(key: &str) -> Self {
        NetworkId::new(key)
    }
}

impl From<String> for NetworkId {
    fn from(key: String) -> Self {
        NetworkId::new(key)
    }
}

/// One routing vector: the catchment of every observed network at `time`.
///
/// A network missing from `entries` means exactly the same thing as an entry
/// labeled [`CatchmentLabel::Unknown`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Snapshot {
    pub time: Timestamp,
    entries: BTreeMap<NetworkId, CatchmentLabel>,
}

static UNKNOWN: CatchmentLabel = CatchmentLabel::Unknown;

impl Snapshot {
    pub fn new(time: Timestamp) -> Self {
        Snapshot {
            time,
            entries: BTreeMap::new(),
        }
    }

    pub fn from_entries<I, K>(time: Timestamp, entries: I) -> Self
    where
        I: IntoIterator<Item = (K, CatchmentLabel)>,
        K: Into<NetworkId>,
    {
        Snapshot {
            time,
            entries: entries.into_iter().map(|(k, v)| (k.into(), v)).collect(),
        }
    }

    /// Inserts an entry, refusing to overwrite an existing one. Returns
    /// `false` if the network already had a label.
    pub fn try_insert(&mut self, network: NetworkId, label: CatchmentLabel) -> bool {
        match self.entries.entry(network) {
            Entry::Occupied(_) => false,
            Entry::Vacant(slot) => {
                slot.insert(label);
                true
            }
        }
    }

    /// Sets (or replaces) the label of `network`.
    pub fn set(&mut self, network: NetworkId, label: CatchmentLabel) {
        self.entries.insert(network, label);
    }

    pub fn label(&self, network: &NetworkId) -> &CatchmentLabel {
        self.entries.get(network).unwrap_or(&UNKNOWN)
    }

    pub fn entries(&self) -> &BTreeMap<NetworkId, CatchmentLabel> {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (&NetworkId, &CatchmentLabel)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// One-hot cell: true iff `network` is in catchment `label`.
    pub fn indicator(&self, network: &NetworkId, label: &CatchmentLabel) -> bool {
        self.label(network) == label
    }
}
