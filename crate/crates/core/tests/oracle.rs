//! Elementwise brute-force references for the similarity and transition
//! computations on small random instances.

use std::collections::BTreeSet;

use catchscope::analysis::similarity_matrix;
use catchscope::quantify::transition_matrix;
use catchscope::{CatchmentLabel, NetworkId, Snapshot, WeightVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const INSTANCES: usize = 200;

fn random_instance(rng: &mut ChaCha8Rng) -> (Vec<Snapshot>, WeightVector) {
    let snaps = rng.random_range(1..=6);
    let networks = rng.random_range(1..=20);
    let pool = [
        CatchmentLabel::site("LAX").unwrap(),
        CatchmentLabel::site("AMS").unwrap(),
        CatchmentLabel::site("NRT").unwrap(),
        CatchmentLabel::Unknown,
        CatchmentLabel::Error,
        CatchmentLabel::Other,
    ];
    let series = (0..snaps)
        .map(|t| {
            let mut s = Snapshot::new(t as i64 * 300);
            for n in 0..networks {
                if rng.random_bool(0.9) {
                    s.set(
                        NetworkId::new(format!("net{n}")),
                        pool[rng.random_range(0..pool.len())].clone(),
                    );
                }
            }
            s
        })
        .collect();
    let weights = WeightVector::from_pairs((0..networks).filter_map(|n| {
        // Some networks keep the implicit weight of 1.
        if rng.random_bool(0.8) {
            Some((format!("net{n}"), rng.random_range(0.0..50.0)))
        } else {
            None
        }
    }))
    .unwrap();
    (series, weights)
}

fn oracle_phi(a: &Snapshot, b: &Snapshot, universe: &[NetworkId], w: &WeightVector) -> Option<f64> {
    let mut num = 0.0;
    let mut den = 0.0;
    for n in universe {
        let (x, y) = (a.label(n), b.label(n));
        let m = if x == y && *x != CatchmentLabel::Unknown {
            1.0
        } else {
            0.0
        };
        num += m * w.get(n);
        den += w.get(n);
    }
    (den > 0.0).then(|| num / den)
}

#[test]
fn similarity_matrix_matches_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(20200301);
    for k in 0..INSTANCES {
        let (series, w) = random_instance(&mut rng);
        let universe: Vec<NetworkId> = series
            .iter()
            .flat_map(|s| s.entries().keys().cloned())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let m = match similarity_matrix(&series, &w) {
            Ok(m) => m,
            Err(_) => {
                assert!(
                    oracle_phi(&series[0], &series[0], &universe, &w).is_none(),
                    "instance {k}"
                );
                continue;
            }
        };
        for i in 0..series.len() {
            for j in 0..series.len() {
                let expected = oracle_phi(&series[i], &series[j], &universe, &w).unwrap();
                assert_eq!(m.get(i, j), expected, "instance {k} cell ({i},{j})");
            }
        }
    }
}

#[test]
fn transition_matrix_matches_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(3097);
    for k in 0..INSTANCES {
        let (series, w) = random_instance(&mut rng);
        for pair in series.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            let t = transition_matrix(a, b, &w);
            let universe: BTreeSet<&NetworkId> =
                a.entries().keys().chain(b.entries().keys()).collect();
            for from in t.labels() {
                for to in t.labels() {
                    let mut expected = 0.0;
                    for n in &universe {
                        if a.label(n) == from && b.label(n) == to {
                            expected += w.get(n);
                        }
                    }
                    assert_eq!(t.get(from, to), expected, "instance {k} {from}->{to}");
                }
            }
        }
    }
}
