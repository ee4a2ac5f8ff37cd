use crate::error::{Error, Result};
use crate::model::{Snapshot, SnapshotSeries, Timestamp, WeightVector};

use super::similarity::SimilarityMatrix;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChangeParams {
    /// Number of preceding consecutive-pair similarities forming the baseline.
    pub window: usize,
    /// Minimum drop below the baseline that counts as a change.
    pub delta: f64,
}

impl Default for ChangeParams {
    fn default() -> Self {
        ChangeParams {
            window: 15,
            delta: 0.05,
        }
    }
}

/// A boundary where similarity dropped. `time` is the later snapshot of the
/// pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChangeEvent {
    pub time: Timestamp,
    pub score: f64,
}

/// Φ between each snapshot and the next, over the series universe.
pub fn consecutive_similarity(series: &SnapshotSeries, weights: &WeightVector) -> Result<Vec<f64>> {
    let w = series.weights(weights);
    let total: f64 = w.iter().sum();
    if total <= 0.0 {
        return Err(Error::ZeroWeight);
    }
    Ok((1..series.len())
        .map(|i| {
            let (a, b) = (series.column(i - 1), series.column(i));
            let mut same = 0.0;
            for ((&x, &y), &wt) in a.iter().zip(b).zip(&w) {
                if x == y && x != SnapshotSeries::UNKNOWN_CODE {
                    same += wt;
                }
            }
            same / total
        })
        .collect())
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

/// Change score for every boundary: median of up to `window` preceding
/// consecutive similarities minus the current one. The first boundary has
/// no history and is compared with itself.
pub fn boundary_scores(times: &[Timestamp], phis: &[f64], window: usize) -> Vec<ChangeEvent> {
    let window = window.max(1);
    phis.iter()
        .enumerate()
        .map(|(i, &phi)| {
            let mut history: Vec<f64> = if i == 0 {
                vec![phi]
            } else {
                phis[i.saturating_sub(window)..i].to_vec()
            };
            ChangeEvent {
                time: times[i + 1],
                score: median(&mut history) - phi,
            }
        })
        .collect()
}

fn detect(times: &[Timestamp], phis: &[f64], params: &ChangeParams) -> Vec<ChangeEvent> {
    boundary_scores(times, phis, params.window)
        .into_iter()
        .filter(|e| e.score > params.delta)
        .collect()
}

/// Boundaries whose similarity falls more than `delta` below the trailing
/// median.
pub fn detect_changes(
    series: &[Snapshot],
    weights: &WeightVector,
    params: &ChangeParams,
) -> Result<Vec<ChangeEvent>> {
    let series = SnapshotSeries::from_snapshots(series)?;
    let phis = consecutive_similarity(&series, weights)?;
    Ok(detect(series.times(), &phis, params))
}

/// Same rule reading consecutive cells from an existing matrix, in time
/// order.
pub fn detect_changes_in_matrix(
    matrix: &SimilarityMatrix,
    params: &ChangeParams,
) -> Vec<ChangeEvent> {
    let mut order: Vec<usize> = (0..matrix.len()).collect();
    order.sort_by_key(|&i| matrix.times()[i]);
    let times: Vec<Timestamp> = order.iter().map(|&i| matrix.times()[i]).collect();
    let phis: Vec<f64> = order.windows(2).map(|p| matrix.get(p[0], p[1])).collect();
    detect(&times, &phis, params)
}
