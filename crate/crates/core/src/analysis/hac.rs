use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::similarity::SimilarityMatrix;
use crate::error::{Error, Result};
use crate::model::Timestamp;

/// Slack applied when comparing merge distances against a threshold, so a
/// distance of exactly 0.5 computed as 0.5000000000000001 still merges.
pub const MERGE_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Linkage {
    #[default]
    Average,
    Single,
}

/// One agglomeration step. `left` and `right` are positions in the
/// time-ordered dendrogram leaves; the merged cluster keeps `left`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub distance: f64,
}

/// Full merge history of a matrix, computed once and cut at any threshold.
#[derive(Clone, Debug)]
pub struct Dendrogram {
    times: Vec<Timestamp>,
    merges: Vec<Merge>,
}

/// Builds the merge history on d = 1 - Φ. Leaves are sorted by time first so
/// the result does not depend on matrix row order. Ties go to the lowest
/// leaf position.
pub fn dendrogram(matrix: &SimilarityMatrix, linkage: Linkage) -> Dendrogram {
    let n = matrix.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| matrix.times()[i]);
    let times = order.iter().map(|&i| matrix.times()[i]).collect();

    let mut dist = vec![0.0; n * n];
    for (a, &i) in order.iter().enumerate() {
        for (b, &j) in order.iter().enumerate() {
            dist[a * n + b] = 1.0 - matrix.get(i, j);
        }
    }
    let mut active = vec![true; n];
    let mut size = vec![1usize; n];
    let mut nn = vec![usize::MAX; n];
    let mut nn_dist = vec![f64::INFINITY; n];

    let nearest = |dist: &[f64], active: &[bool], i: usize| {
        let mut best = (usize::MAX, f64::INFINITY);
        for j in 0..n {
            if j != i && active[j] && dist[i * n + j] < best.1 {
                best = (j, dist[i * n + j]);
            }
        }
        best
    };
    for i in 0..n {
        (nn[i], nn_dist[i]) = nearest(&dist, &active, i);
    }

    let mut merges = Vec::with_capacity(n.saturating_sub(1));
    for _ in 1..n {
        let mut pick = usize::MAX;
        for i in 0..n {
            if active[i] && (pick == usize::MAX || nn_dist[i] < nn_dist[pick]) {
                pick = i;
            }
        }
        let (a, b) = (pick.min(nn[pick]), pick.max(nn[pick]));
        merges.push(Merge {
            left: a,
            right: b,
            distance: dist[a * n + b],
        });

        for k in 0..n {
            if !active[k] || k == a || k == b {
                continue;
            }
            let (da, db) = (dist[a * n + k], dist[b * n + k]);
            let merged = match linkage {
                Linkage::Average => {
                    (size[a] as f64 * da + size[b] as f64 * db) / (size[a] + size[b]) as f64
                }
                Linkage::Single => da.min(db),
            };
            dist[a * n + k] = merged;
            dist[k * n + a] = merged;
        }
        size[a] += size[b];
        active[b] = false;

        (nn[a], nn_dist[a]) = nearest(&dist, &active, a);
        for k in 0..n {
            if !active[k] || k == a {
                continue;
            }
            if nn[k] == a || nn[k] == b {
                (nn[k], nn_dist[k]) = nearest(&dist, &active, k);
            } else {
                let d = dist[k * n + a];
                if d < nn_dist[k] || (d == nn_dist[k] && a < nn[k]) {
                    nn[k] = a;
                    nn_dist[k] = d;
                }
            }
        }
    }
    Dendrogram { times, merges }
}

impl Dendrogram {
    pub fn times(&self) -> &[Timestamp] {
        &self.times
    }

    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    /// Cluster id per leaf (time order) after applying every merge up to the
    /// first one whose distance exceeds `threshold`. Ids follow the earliest
    /// member.
    fn cut_ids(&self, threshold: f64) -> Vec<usize> {
        let n = self.times.len();
        let mut parent: Vec<usize> = (0..n).collect();
        for m in &self.merges {
            if m.distance > threshold + MERGE_TOLERANCE {
                break;
            }
            parent[m.right] = m.left;
        }
        let mut ids = vec![usize::MAX; n];
        let mut next = 0;
        for i in 0..n {
            let mut root = i;
            while parent[root] != root {
                root = parent[root];
            }
            if ids[root] == usize::MAX {
                ids[root] = next;
                next += 1;
            }
            ids[i] = ids[root];
        }
        ids
    }

    pub fn cut(&self, threshold: f64) -> ModeAssignment {
        let ids = self.cut_ids(threshold);
        ModeAssignment::new(self.times.clone(), ids, threshold)
    }
}

/// Cluster per snapshot. Cluster 0 contains the earliest snapshot, cluster 1
/// the earliest snapshot not in cluster 0, and so on.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeAssignment {
    times: Vec<Timestamp>,
    cluster_of: BTreeMap<Timestamp, usize>,
    threshold: f64,
    mode_ids: BTreeSet<usize>,
}

impl ModeAssignment {
    fn new(times: Vec<Timestamp>, ids: Vec<usize>, threshold: f64) -> Self {
        let mut sizes: BTreeMap<usize, usize> = BTreeMap::new();
        for &id in &ids {
            *sizes.entry(id).or_default() += 1;
        }
        let mode_ids = sizes
            .into_iter()
            .filter(|&(_, size)| size >= 2)
            .map(|(id, _)| id)
            .collect();
        let cluster_of = times.iter().copied().zip(ids).collect();
        ModeAssignment {
            times,
            cluster_of,
            threshold,
            mode_ids,
        }
    }

    pub fn times(&self) -> &[Timestamp] {
        &self.times
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn cluster_of(&self, time: Timestamp) -> Option<usize> {
        self.cluster_of.get(&time).copied()
    }

    /// Cluster id per snapshot, in time order.
    pub fn labels(&self) -> Vec<usize> {
        self.times.iter().map(|t| self.cluster_of[t]).collect()
    }

    pub fn cluster_count(&self) -> usize {
        self.cluster_of.values().max().map_or(0, |&m| m + 1)
    }

    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.cluster_count()];
        for &id in self.cluster_of.values() {
            sizes[id] += 1;
        }
        sizes
    }

    pub fn members(&self, cluster: usize) -> Vec<Timestamp> {
        self.times
            .iter()
            .copied()
            .filter(|t| self.cluster_of[t] == cluster)
            .collect()
    }

    pub fn mode_ids(&self) -> &BTreeSet<usize> {
        &self.mode_ids
    }

    pub fn is_mode(&self, cluster: usize) -> bool {
        self.mode_ids.contains(&cluster)
    }
}

/// Average-linkage clustering cut at `threshold`.
pub fn hac_cluster(matrix: &SimilarityMatrix, threshold: f64) -> ModeAssignment {
    hac_cluster_with(matrix, threshold, Linkage::Average)
}

pub fn hac_cluster_with(
    matrix: &SimilarityMatrix,
    threshold: f64,
    linkage: Linkage,
) -> ModeAssignment {
    dendrogram(matrix, linkage).cut(threshold)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepParams {
    pub max_modes: usize,
    pub min_size: usize,
    pub step: f64,
    pub linkage: Linkage,
}

impl Default for SweepParams {
    fn default() -> Self {
        SweepParams {
            max_modes: 15,
            min_size: 2,
            step: 0.01,
            linkage: Linkage::Average,
        }
    }
}

impl SweepParams {
    /// Ascending thresholds from 0 to 1. When 1/step is (nearly) an integer
    /// K the grid is k/K so that values like 0.5 come out exact.
    fn thresholds(&self) -> Result<Vec<f64>> {
        if !(self.step > 0.0 && self.step <= 1.0) {
            return Err(Error::config(format!(
                "sweep step {} outside (0,1]",
                self.step
            )));
        }
        let k = (1.0 / self.step).round();
        let mut grid: Vec<f64> = if (k * self.step - 1.0).abs() < 1e-9 {
            let k = k as usize;
            (0..=k).map(|i| i as f64 / k as f64).collect()
        } else {
            (0..)
                .map(|i| i as f64 * self.step)
                .take_while(|&t| t < 1.0)
                .chain(std::iter::once(1.0))
                .collect()
        };
        grid.dedup();
        Ok(grid)
    }
}

fn sweep(dendrogram: &Dendrogram, params: &SweepParams) -> Result<f64> {
    for t in params.thresholds()? {
        let ids = dendrogram.cut_ids(t);
        let count = ids.iter().max().map_or(0, |&m| m + 1);
        let mut sizes = vec![0usize; count];
        for id in ids {
            sizes[id] += 1;
        }
        let largest = sizes.into_iter().max().unwrap_or(0);
        if count < params.max_modes && largest >= params.min_size {
            return Ok(t);
        }
    }
    Ok(1.0)
}

/// First threshold of the sweep giving fewer than `max_modes` clusters with
/// the largest holding at least `min_size` snapshots; 1.0 if none does.
pub fn adaptive_threshold(matrix: &SimilarityMatrix, params: &SweepParams) -> Result<f64> {
    sweep(&dendrogram(matrix, params.linkage), params)
}

/// Adaptive threshold and the clustering it selects, from one dendrogram.
pub fn select_modes(matrix: &SimilarityMatrix, params: &SweepParams) -> Result<ModeAssignment> {
    let tree = dendrogram(matrix, params.linkage);
    let t = sweep(&tree, params)?;
    Ok(tree.cut(t))
}

/// Smallest and largest Φ between members of two clusters. For a cluster
/// against itself only distinct pairs count.
pub fn mode_phi_range(
    matrix: &SimilarityMatrix,
    assignment: &ModeAssignment,
    mode_a: usize,
    mode_b: usize,
) -> Result<(f64, f64)> {
    let index: HashMap<Timestamp, usize> = matrix
        .times()
        .iter()
        .enumerate()
        .map(|(i, &t)| (t, i))
        .collect();
    let lookup = |mode: usize| -> Result<Vec<usize>> {
        let members = assignment.members(mode);
        if members.is_empty() {
            return Err(Error::UndefinedRange(format!("no cluster {mode}")));
        }
        members
            .iter()
            .map(|t| {
                index
                    .get(t)
                    .copied()
                    .ok_or_else(|| Error::UndefinedRange(format!("time {t} is not in the matrix")))
            })
            .collect()
    };
    let a = lookup(mode_a)?;
    let b = lookup(mode_b)?;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (x, &i) in a.iter().enumerate() {
        for (y, &j) in b.iter().enumerate() {
            if mode_a == mode_b && y <= x {
                continue;
            }
            let v = matrix.get(i, j);
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    if lo > hi {
        return Err(Error::UndefinedRange(format!(
            "cluster {mode_a} has a single member"
        )));
    }
    Ok((lo, hi))
}
