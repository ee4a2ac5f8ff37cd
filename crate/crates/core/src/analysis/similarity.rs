use std::cmp::Ordering;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{CatchmentLabel, Snapshot, SnapshotSeries, Timestamp, WeightVector};

/// Weighted fraction of networks whose catchment is the same, and known, in
/// both snapshots.
///
/// The universe is the union of the two snapshots' keys; a network missing
/// from one side counts as UNKNOWN there and therefore as changed. So
/// `similarity(a, a)` is the known fraction of `a`, not 1.
///
/// A variant normalizing over networks known in both snapshots would slot in
/// here; nothing uses it yet.
pub fn similarity(a: &Snapshot, b: &Snapshot, weights: &WeightVector) -> Result<f64> {
    let mut same = 0.0;
    let mut total = 0.0;
    let mut left = a.iter().peekable();
    let mut right = b.iter().peekable();
    loop {
        let (network, la, lb) = match (left.peek(), right.peek()) {
            (None, None) => break,
            (Some(&(na, la)), None) => {
                left.next();
                (na, la, &CatchmentLabel::Unknown)
            }
            (None, Some(&(nb, lb))) => {
                right.next();
                (nb, &CatchmentLabel::Unknown, lb)
            }
            (Some(&(na, la)), Some(&(nb, lb))) => match na.cmp(nb) {
                Ordering::Less => {
                    left.next();
                    (na, la, &CatchmentLabel::Unknown)
                }
                Ordering::Greater => {
                    right.next();
                    (nb, &CatchmentLabel::Unknown, lb)
                }
                Ordering::Equal => {
                    left.next();
                    right.next();
                    (na, la, lb)
                }
            },
        };
        let w = weights.get(network);
        total += w;
        if la == lb && la.is_known() {
            same += w;
        }
    }
    if total <= 0.0 {
        return Err(Error::ZeroWeight);
    }
    Ok(same / total)
}

/// Symmetric matrix of pairwise similarities over a time-ordered series.
#[derive(Clone, Debug, PartialEq)]
pub struct SimilarityMatrix {
    times: Vec<Timestamp>,
    values: Vec<f64>,
}

impl SimilarityMatrix {
    /// Builds a matrix from row-major `values`, checking shape, range and
    /// symmetry.
    pub fn new(times: Vec<Timestamp>, values: Vec<f64>) -> Result<Self> {
        let n = times.len();
        if values.len() != n * n {
            return Err(Error::config(format!(
                "{} values do not form a {n}x{n} matrix",
                values.len()
            )));
        }
        let mut seen = times.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != n {
            return Err(Error::config("matrix times must be distinct"));
        }
        for i in 0..n {
            for j in 0..n {
                let v = values[i * n + j];
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::config(format!(
                        "value {v} at ({i},{j}) outside [0,1]"
                    )));
                }
                if v != values[j * n + i] {
                    return Err(Error::config(format!("matrix not symmetric at ({i},{j})")));
                }
            }
        }
        Ok(SimilarityMatrix { times, values })
    }

    /// Computes every cell over the series universe. Each unordered pair is
    /// computed once, in network order, so results do not depend on how the
    /// work is spread over threads.
    pub fn from_series(series: &SnapshotSeries, weights: &WeightVector) -> Result<Self> {
        if series.is_empty() {
            return Err(Error::config(
                "similarity matrix needs at least one snapshot",
            ));
        }
        let w = series.weights(weights);
        let total: f64 = w.iter().sum();
        if total <= 0.0 {
            return Err(Error::ZeroWeight);
        }
        let n = series.len();
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
        let cells: Vec<f64> = pairs
            .par_iter()
            .map(|&(i, j)| matched_weight(series.column(i), series.column(j), &w) / total)
            .collect();
        let mut values = vec![0.0; n * n];
        for (&(i, j), v) in pairs.iter().zip(cells) {
            values[i * n + j] = v;
            values[j * n + i] = v;
        }
        Ok(SimilarityMatrix {
            times: series.times().to_vec(),
            values,
        })
    }

    pub fn times(&self) -> &[Timestamp] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.times.len() + j]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.times.len();
        &self.values[i * n..(i + 1) * n]
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }

    /// Same matrix with rows and columns reordered: position `k` of the
    /// result is position `order[k]` of `self`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let n = self.len();
        let mut check = order.to_vec();
        check.sort_unstable();
        if check != (0..n).collect::<Vec<_>>() {
            return Err(Error::config("order is not a permutation"));
        }
        let times = order.iter().map(|&i| self.times[i]).collect();
        let values = order
            .iter()
            .flat_map(|&i| order.iter().map(move |&j| (i, j)))
            .map(|(i, j)| self.get(i, j))
            .collect();
        Ok(SimilarityMatrix { times, values })
    }

    /// Comma-separated grid: header row and column of epoch times, cells to
    /// four decimals.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("time");
        for t in &self.times {
            write!(out, ",{t}").unwrap();
        }
        out.push('\n');
        for (i, t) in self.times.iter().enumerate() {
            write!(out, "{t}").unwrap();
            for v in self.row(i) {
                write!(out, ",{v:.4}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// Sum of weights of networks with the same known label in both columns.
fn matched_weight(a: &[u32], b: &[u32], weights: &[f64]) -> f64 {
    let mut sum = 0.0;
    for ((&x, &y), &w) in a.iter().zip(b).zip(weights) {
        if x == y && x != SnapshotSeries::UNKNOWN_CODE {
            sum += w;
        }
    }
    sum
}

/// Similarity of every pair of snapshots in `series` (time-ordered), over
/// the union of all their keys.
pub fn similarity_matrix(series: &[Snapshot], weights: &WeightVector) -> Result<SimilarityMatrix> {
    SimilarityMatrix::from_series(&SnapshotSeries::from_snapshots(series)?, weights)
}
