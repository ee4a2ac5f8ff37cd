use std::collections::BTreeMap;

use super::NetworkId;
use crate::error::{Error, Result};

/// Per-network importance weights. Networks without an entry weigh 1.0.
///
/// One vector is attached to a whole study and reused for every snapshot.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct WeightVector {
    weights: BTreeMap<NetworkId, f64>,
}

impl WeightVector {
    pub const DEFAULT_WEIGHT: f64 = 1.0;

    /// All networks weigh 1.0.
    pub fn uniform() -> Self {
        WeightVector::default()
    }

    pub fn from_map(weights: BTreeMap<NetworkId, f64>) -> Result<Self> {
        for (network, &w) in &weights {
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::config(format!(
                    "weight of {network} must be finite and nonnegative, got {w}"
                )));
            }
        }
        Ok(WeightVector { weights })
    }

    pub fn from_pairs<I, K>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (K, f64)>,
        K: Into<NetworkId>,
    {
        Self::from_map(pairs.into_iter().map(|(k, w)| (k.into(), w)).collect())
    }

    pub fn get(&self, network: &NetworkId) -> f64 {
        self.weights
            .get(network)
            .copied()
            .unwrap_or(Self::DEFAULT_WEIGHT)
    }

    pub fn explicit(&self) -> &BTreeMap<NetworkId, f64> {
        &self.weights
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Same vector with every explicit weight multiplied by `factor`; the
    /// implicit default is materialized for `universe` first so that every
    /// network is scaled.
    pub fn scaled<'a, I>(&self, universe: I, factor: f64) -> Result<Self>
    where
        I: IntoIterator<Item = &'a NetworkId>,
    {
        let mut weights = self.weights.clone();
        for network in universe {
            weights
                .entry(network.clone())
                .or_insert(Self::DEFAULT_WEIGHT);
        }
        for w in weights.values_mut() {
            *w *= factor;
        }
        Self::from_map(weights)
    }
}
