//! Acceptance suite. Runs every criterion in order, prints one PASS/FAIL
//! line per criterion and exits non-zero if any failed.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use catchscope::analysis::{
    adaptive_threshold, detect_changes, hac_cluster, select_modes, similarity, similarity_matrix,
    ChangeParams, SimilarityMatrix, SweepParams,
};
use catchscope::eval::{
    adjusted_rand_index, generate_scenario, generate_series, score_detections, EventGroup,
    ScenarioSpec, ScoreOptions,
};
use catchscope::prep::{expand_prefix_weights, interpolate_missing};
use catchscope::quantify::{aggregate, transition_matrix};
use catchscope::report::render_transition_table;
use catchscope::{CatchmentLabel, GroundTruthEvent, NetworkId, Snapshot, Visibility, WeightVector};
use ipnet::Ipv4Net;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let held: bool = $cond;
        if !held {
            return Err(format!($($msg)+));
        }
    };
}

fn label(text: &str) -> CatchmentLabel {
    CatchmentLabel::parse(text).unwrap()
}

fn within(elapsed: Duration, limit: Duration) -> Outcome {
    if elapsed < limit {
        Ok(format!("{:.2}s", elapsed.as_secs_f64()))
    } else {
        Err(format!(
            "took {:.2}s, limit {:.0}s",
            elapsed.as_secs_f64(),
            limit.as_secs_f64()
        ))
    }
}

// 1. Confusion metrics on the 56-group fixture.
fn confusion_regression() -> Outcome {
    let start = Instant::now();
    let day = 86_400;
    let group = |i: i64, visibility| EventGroup {
        start: i * day,
        end: i * day + 300,
        operator: "root-ops".into(),
        visibility,
        members: vec![GroundTruthEvent::new(i * day, "root-ops", visibility)],
    };
    let mut groups = Vec::new();
    let mut detections = Vec::new();
    for i in 0..19 {
        let v = if i % 2 == 0 {
            Visibility::Drain
        } else {
            Visibility::TrafficEngineering
        };
        groups.push(group(i, v));
        detections.push(i * day + 240);
    }
    for i in 19..27 {
        groups.push(group(i, Visibility::Internal));
        detections.push(i * day + 480);
    }
    for i in 27..56 {
        groups.push(group(i, Visibility::Internal));
    }
    for i in 0..10 {
        detections.push((60 + i) * day);
    }
    let r = score_detections(&detections, &groups, &ScoreOptions::default());
    ensure!(
        (r.tp, r.fn_, r.tn, r.fp, r.extra) == (19, 0, 29, 8, 10),
        "counts {r}"
    );
    ensure!(r.recall() == 1.0, "recall {}", r.recall());
    ensure!(
        (r.accuracy() - 0.857).abs() <= 0.001,
        "accuracy {}",
        r.accuracy()
    );
    ensure!(
        (r.precision() - 0.704).abs() <= 0.001,
        "precision {}",
        r.precision()
    );
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(r.to_string())
}

const TABLE_LABELS: [&str; 8] = ["CMH", "NAP", "STR", "NRT", "SAT", "HNL", "error", "other"];

/// Transition counts from 21:56 to 22:00 on the drain day.
const TABLE_3A: [[u32; 8]; 8] = [
    [1352, 0, 0, 1, 0, 0, 16, 0],
    [0, 1939, 0, 1, 0, 0, 272, 0],
    [0, 3097, 625, 4, 0, 0, 1542, 0],
    [1, 2, 0, 985, 0, 0, 30, 0],
    [1, 0, 0, 1, 472, 0, 2, 0],
    [0, 0, 0, 0, 0, 12, 1, 0],
    [17, 45, 15, 14, 7, 0, 309, 0],
    [0, 0, 0, 0, 0, 0, 1, 46],
];

// 2. Transition matrix built from per-network snapshots matching the table.
fn transition_regression() -> Outcome {
    let mut a = Snapshot::new(1583099760);
    let mut b = Snapshot::new(1583100000);
    let mut n = 0u32;
    for (i, row) in TABLE_3A.iter().enumerate() {
        for (j, &count) in row.iter().enumerate() {
            for _ in 0..count {
                let key = NetworkId::new(format!("net{n}"));
                a.set(key.clone(), label(TABLE_LABELS[i]));
                b.set(key, label(TABLE_LABELS[j]));
                n += 1;
            }
        }
    }
    let w = WeightVector::uniform();
    let t = transition_matrix(&a, &b, &w);
    let (str_, nap, err) = (label("STR"), label("NAP"), label("error"));
    ensure!(
        t.get(&str_, &nap) == 3097.0,
        "STR->NAP {}",
        t.get(&str_, &nap)
    );
    ensure!(
        t.get(&str_, &err) == 1542.0,
        "STR->err {}",
        t.get(&str_, &err)
    );
    ensure!(
        t.get(&str_, &str_) == 625.0,
        "STR->STR {}",
        t.get(&str_, &str_)
    );
    for (i, from) in TABLE_LABELS.iter().enumerate() {
        for (j, to) in TABLE_LABELS.iter().enumerate() {
            ensure!(
                t.get(&label(from), &label(to)) == TABLE_3A[i][j] as f64,
                "cell {from}->{to}"
            );
        }
    }
    let (ga, gb) = (aggregate(&a, &w), aggregate(&b, &w));
    for (i, l) in t.labels().iter().enumerate() {
        ensure!(t.row_totals()[i] == ga.get(l), "row total {l}");
        ensure!(t.column_totals()[i] == gb.get(l), "column total {l}");
    }
    ensure!(t.total() == n as f64, "grand total {}", t.total());
    let table = render_transition_table(&t, 1000.0);
    let flagged: Vec<&str> = table
        .lines()
        .filter(|l| l.contains('*') && !l.starts_with('*'))
        .collect();
    ensure!(
        flagged.len() == 1 && flagged[0].starts_with("STR") && flagged[0].matches('*').count() == 2,
        "highlighting {flagged:?}"
    );
    Ok(format!(
        "STR->NAP=3097 STR->err=1542 STR->STR=625 total={n}"
    ))
}

// 3. Aggregate of the example snapshot.
fn aggregate_regression() -> Outcome {
    let counts = [1350, 2200, 5200, 1000, 480, 10, 560, 50];
    let mut s = Snapshot::new(1583020800);
    let mut n = 0;
    for (l, &c) in TABLE_LABELS.iter().zip(&counts) {
        for _ in 0..c {
            s.set(NetworkId::new(format!("net{n}")), label(l));
            n += 1;
        }
    }
    let a = aggregate(&s, &WeightVector::uniform());
    let got: Vec<f64> = TABLE_LABELS.iter().map(|l| a.get(&label(l))).collect();
    let want: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    ensure!(got == want, "A = {got:?}");
    ensure!(a.get(&CatchmentLabel::Unknown) == 0.0, "unknown bucket");
    Ok(format!("A = {got:?}"))
}

// 4. Stable series where 45% of networks never answer.
fn unknown_coverage() -> Outcome {
    let start = Instant::now();
    let spec = ScenarioSpec::from_toml(
        r#"
        version = 1
        networks = 10000
        sites = ["ARI", "IAD", "LAX", "MIA", "SIN", "AMS"]
        unresponsive = 0.45
        [[segments]]
        length = 100
        "#,
    )
    .map_err(|e| e.to_string())?;
    let run = |seed| -> Result<Vec<f64>, String> {
        let (series, _) = generate_series(&spec, seed).map_err(|e| e.to_string())?;
        catchscope::analysis::consecutive_similarity(&series, &WeightVector::uniform())
            .map_err(|e| e.to_string())
    };
    let phis = run(45)?;
    ensure!(phis == run(45)?, "not seed-deterministic");
    let inside = phis.iter().filter(|&&p| (0.5..=0.6).contains(&p)).count();
    let share = inside as f64 / phis.len() as f64;
    ensure!(
        share >= 0.95,
        "{inside}/{} boundaries in [0.50,0.60]",
        phis.len()
    );
    let time = within(start.elapsed(), Duration::from_secs(5))?;
    let (lo, hi) = phis
        .iter()
        .fold((1.0f64, 0.0f64), |(l, h), &p| (l.min(p), h.max(p)));
    Ok(format!(
        "{inside}/{} boundaries in band, phi range [{lo:.4}, {hi:.4}], {time}",
        phis.len()
    ))
}

// 5. Three planted modes.
fn mode_recovery() -> Outcome {
    let start = Instant::now();
    let spec = ScenarioSpec::from_toml(
        r#"
        version = 1
        networks = 10000
        sites = ["AMS", "IAD", "NRT", "LAX", "SYD"]
        start = 1583020800
        churn = 0.0075
        unknown = 0.0
        [[segments]]
        length = 20
        [[segments]]
        length = 20
        reassign = 0.7
        [[segments]]
        length = 20
        reassign = 0.7
        "#,
    )
    .map_err(|e| e.to_string())?;
    let (snapshots, events) = generate_scenario(&spec, 2020).map_err(|e| e.to_string())?;
    let w = WeightVector::uniform();
    let m = similarity_matrix(&snapshots, &w).map_err(|e| e.to_string())?;
    let params = SweepParams::default();
    let t = adaptive_threshold(&m, &params).map_err(|e| e.to_string())?;
    let modes = hac_cluster(&m, t);
    let truth: Vec<usize> = (0..snapshots.len()).map(|i| i / 20).collect();
    let ari = adjusted_rand_index(&modes.labels(), &truth).map_err(|e| e.to_string())?;
    ensure!(
        modes.mode_ids().len() == 3,
        "{} modes at threshold {t}",
        modes.mode_ids().len()
    );
    ensure!(
        modes.cluster_count() == 3,
        "{} clusters at threshold {t}",
        modes.cluster_count()
    );
    ensure!(ari == 1.0, "ARI {ari}");
    let changes =
        detect_changes(&snapshots, &w, &ChangeParams::default()).map_err(|e| e.to_string())?;
    let fired: Vec<i64> = changes.iter().map(|c| c.time).collect();
    let planted: Vec<i64> = events.iter().map(|e| e.time).collect();
    ensure!(
        fired == planted,
        "changes at {fired:?}, planted {planted:?}"
    );
    let time = within(start.elapsed(), Duration::from_secs(10))?;
    Ok(format!(
        "threshold={t:.2} modes=3 ARI=1.0 changes at {fired:?}, {time}"
    ))
}

fn random_instance(rng: &mut ChaCha8Rng) -> (Vec<Snapshot>, WeightVector) {
    let pool = ["LAX", "AMS", "NRT", "unknown", "error", "other"];
    let snaps = rng.random_range(1..=6);
    let networks = rng.random_range(1..=20);
    let series = (0..snaps)
        .map(|t| {
            let mut s = Snapshot::new(t as i64 * 240);
            for n in 0..networks {
                if rng.random_bool(0.9) {
                    s.set(
                        NetworkId::new(format!("n{n}")),
                        label(pool[rng.random_range(0..pool.len())]),
                    );
                }
            }
            s
        })
        .collect();
    let w = WeightVector::from_pairs(
        (0..networks).map(|n| (format!("n{n}"), rng.random_range(0.0..10.0))),
    )
    .unwrap();
    (series, w)
}

// 6. Brute-force references on 200 random instances.
fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut cells = 0;
    for k in 0..200 {
        let (series, w) = random_instance(&mut rng);
        let universe: BTreeSet<NetworkId> = series
            .iter()
            .flat_map(|s| s.entries().keys().cloned())
            .collect();
        let oracle = |a: &Snapshot, b: &Snapshot| {
            let (mut num, mut den) = (0.0, 0.0);
            for n in &universe {
                let (x, y) = (a.label(n), b.label(n));
                if x == y && x.is_known() {
                    num += w.get(n);
                }
                den += w.get(n);
            }
            num / den
        };
        let Ok(m) = similarity_matrix(&series, &w) else {
            let total: f64 = universe.iter().map(|n| w.get(n)).sum();
            ensure!(total == 0.0, "instance {k}: unexpected error");
            continue;
        };
        for i in 0..series.len() {
            for j in 0..series.len() {
                ensure!(
                    m.get(i, j) == oracle(&series[i], &series[j]),
                    "instance {k} phi ({i},{j})"
                );
                cells += 1;
            }
        }
        for pair in series.windows(2) {
            let t = transition_matrix(&pair[0], &pair[1], &w);
            let pair_universe: BTreeSet<&NetworkId> = pair[0]
                .entries()
                .keys()
                .chain(pair[1].entries().keys())
                .collect();
            for from in t.labels() {
                for to in t.labels() {
                    let mut expected = 0.0;
                    for n in &pair_universe {
                        if pair[0].label(n) == from && pair[1].label(n) == to {
                            expected += w.get(n);
                        }
                    }
                    ensure!(
                        t.get(from, to) == expected,
                        "instance {k} transition {from}->{to}"
                    );
                    cells += 1;
                }
            }
        }
    }
    Ok(format!("200 instances, {cells} cells exact"))
}

fn snapshot_strategy(time: i64, n: usize) -> impl Strategy<Value = Snapshot> {
    let labels = prop::sample::select(vec!["A", "B", "C", "unknown", "error", "other"]);
    prop::collection::vec(prop::option::weighted(0.85, labels), n).prop_map(move |ls| {
        let mut s = Snapshot::new(time);
        for (i, l) in ls.into_iter().enumerate() {
            if let Some(l) = l {
                s.set(NetworkId::new(format!("n{i}")), label(l));
            }
        }
        s
    })
}

fn weights_strategy(n: usize) -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(0u32..8, n)
}

fn to_weights(raw: &[u32], scale: f64) -> WeightVector {
    WeightVector::from_pairs(
        raw.iter()
            .enumerate()
            .map(|(i, &v)| (format!("n{i}"), v as f64 * scale)),
    )
    .unwrap()
}

fn argmin_argmax(values: &[f64]) -> (usize, usize) {
    let mut lo = 0;
    let mut hi = 0;
    for (i, &v) in values.iter().enumerate() {
        if v < values[lo] {
            lo = i;
        }
        if v > values[hi] {
            hi = i;
        }
    }
    (lo, hi)
}

fn matrix_strategy() -> impl Strategy<Value = SimilarityMatrix> {
    (1usize..=12).prop_flat_map(|n| {
        prop::collection::vec(
            prop::sample::select(vec![0.0, 0.2, 0.4, 0.5, 0.7, 0.9, 1.0]),
            n * n,
        )
        .prop_map(move |raw| {
            let mut v = vec![0.0; n * n];
            for i in 0..n {
                for j in i..n {
                    v[i * n + j] = raw[i * n + j];
                    v[j * n + i] = raw[i * n + j];
                }
            }
            SimilarityMatrix::new((0..n as i64).collect(), v).unwrap()
        })
    })
}

// 7. Invariants, 1000 random cases each.
fn property_suite() -> Outcome {
    const CASES: u32 = 1000;
    let runner = || {
        TestRunner::new(Config {
            cases: CASES,
            failure_persistence: None,
            ..Config::default()
        })
    };
    let mut report = Vec::new();
    let mut check = |name: &str, result: Result<(), String>| {
        report.push(name.to_string());
        result.map_err(|e| format!("{name}: {e}"))
    };

    check(
        "symmetry",
        runner()
            .run(
                &(
                    snapshot_strategy(0, 10),
                    snapshot_strategy(1, 10),
                    weights_strategy(10),
                ),
                |(a, b, w)| {
                    let w = to_weights(&w, 1.0);
                    let (x, y) = (similarity(&a, &b, &w), similarity(&b, &a, &w));
                    prop_assert_eq!(x.is_ok(), y.is_ok());
                    if let (Ok(x), Ok(y)) = (x, y) {
                        prop_assert_eq!(x, y);
                    }
                    Ok(())
                },
            )
            .map_err(|e| e.to_string()),
    )?;

    check(
        "weight-scale invariance",
        runner()
            .run(
                &(
                    snapshot_strategy(0, 10),
                    snapshot_strategy(1, 10),
                    snapshot_strategy(2, 10),
                    weights_strategy(10),
                    1u32..500,
                ),
                |(a, b, c, w, k)| {
                    let series = [a, b, c];
                    let (w1, wk) = (to_weights(&w, 1.0), to_weights(&w, k as f64));
                    if let (Ok(m1), Ok(mk)) = (
                        similarity_matrix(&series, &w1),
                        similarity_matrix(&series, &wk),
                    ) {
                        prop_assert_eq!(m1.values(), mk.values());
                        prop_assert_eq!(argmin_argmax(m1.values()), argmin_argmax(mk.values()));
                        let p = SweepParams::default();
                        prop_assert_eq!(
                            select_modes(&m1, &p).unwrap(),
                            select_modes(&mk, &p).unwrap()
                        );
                    }
                    let (g1, gk) = (aggregate(&series[0], &w1), aggregate(&series[0], &wk));
                    let v1: Vec<f64> = g1.counts.values().copied().collect();
                    let vk: Vec<f64> = gk.counts.values().copied().collect();
                    prop_assert_eq!(argmin_argmax(&v1), argmin_argmax(&vk));
                    let (t1, tk) = (
                        transition_matrix(&series[0], &series[1], &w1),
                        transition_matrix(&series[0], &series[1], &wk),
                    );
                    let n = t1.labels().len();
                    let c1: Vec<f64> = (0..n * n).map(|x| t1.cell(x / n, x % n)).collect();
                    let ck: Vec<f64> = (0..n * n).map(|x| tk.cell(x / n, x % n)).collect();
                    prop_assert_eq!(argmin_argmax(&c1), argmin_argmax(&ck));
                    Ok(())
                },
            )
            .map_err(|e| e.to_string()),
    )?;

    check(
        "cross bounded by self",
        runner()
            .run(
                &(
                    snapshot_strategy(0, 10),
                    snapshot_strategy(1, 10),
                    weights_strategy(10),
                ),
                |(a, b, w)| {
                    let w = to_weights(&w, 1.0);
                    if let (Ok(ab), Ok(aa), Ok(bb)) = (
                        similarity(&a, &b, &w),
                        similarity(&a, &a, &w),
                        similarity(&b, &b, &w),
                    ) {
                        prop_assert!(ab <= aa.min(bb));
                    }
                    if let Ok(m) = similarity_matrix(&[a, b], &w) {
                        prop_assert!(m.get(0, 1) <= m.get(0, 0).min(m.get(1, 1)));
                    }
                    Ok(())
                },
            )
            .map_err(|e| e.to_string()),
    )?;

    check(
        "HAC monotone coarsening",
        runner()
            .run(
                &(matrix_strategy(), 0.0f64..=1.0, 0.0f64..=1.0),
                |(m, x, y)| {
                    let (lo, hi) = (x.min(y), x.max(y));
                    let (fine, coarse) = (hac_cluster(&m, lo), hac_cluster(&m, hi));
                    prop_assert_eq!(fine.cluster_sizes().iter().sum::<usize>(), m.len());
                    prop_assert!(coarse.cluster_count() <= fine.cluster_count());
                    for c in 0..fine.cluster_count() {
                        let parents: BTreeSet<_> = fine
                            .members(c)
                            .iter()
                            .map(|&t| coarse.cluster_of(t))
                            .collect();
                        prop_assert_eq!(parents.len(), 1);
                    }
                    Ok(())
                },
            )
            .map_err(|e| e.to_string()),
    )?;

    check(
        "interpolation idempotence and known-label preservation",
        runner()
            .run(
                &(
                    (1usize..10).prop_flat_map(|len| {
                        (0..len)
                            .map(|t| snapshot_strategy(t as i64, 5))
                            .collect::<Vec<_>>()
                    }),
                    0usize..5,
                ),
                |(series, gap)| {
                    let once = interpolate_missing(&series, gap);
                    prop_assert_eq!(&interpolate_missing(&once, gap), &once);
                    for (before, after) in series.iter().zip(&once) {
                        for (n, l) in before.iter().filter(|(_, l)| l.is_known()) {
                            prop_assert_eq!(after.label(n), l);
                        }
                    }
                    Ok(())
                },
            )
            .map_err(|e| e.to_string()),
    )?;

    check(
        "prefix-weight conservation",
        runner()
            .run(
                &(prop::collection::btree_set(0u32..256, 1..40), 16u8..=24),
                |(blocks, len)| {
                    let keys: Vec<NetworkId> = blocks
                        .iter()
                        .map(|b| NetworkId::new(format!("172.16.{b}.0/24")))
                        .collect();
                    let cover: Ipv4Net = format!("172.16.0.0/{len}").parse().unwrap();
                    let w = expand_prefix_weights(keys.iter(), &[cover]).unwrap();
                    let inside = keys
                        .iter()
                        .filter(|k| cover.contains(&k.as_str().parse::<Ipv4Net>().unwrap()))
                        .count();
                    let total: f64 = keys.iter().map(|k| w.get(k)).sum();
                    let expected = if inside > 0 {
                        2f64.powi(24 - len as i32)
                    } else {
                        0.0
                    } + (keys.len() - inside) as f64;
                    prop_assert!(
                        (total - expected).abs() <= 1e-9 * expected,
                        "{} vs {}",
                        total,
                        expected
                    );
                    Ok(())
                },
            )
            .map_err(|e| e.to_string()),
    )?;

    Ok(format!(
        "{} properties x {CASES} cases: {}",
        report.len(),
        report.join(", ")
    ))
}

fn peak_rss_kib() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    status
        .lines()
        .find(|l| l.starts_with("VmHWM:"))?
        .split_whitespace()
        .nth(1)?
        .parse()
        .ok()
}

// 8. 5M networks x 30 snapshots.
fn full_scale() -> Outcome {
    let spec = ScenarioSpec::from_toml(
        r#"
        version = 1
        networks = 5000000
        sites = ["ARI", "IAD", "LAX", "MIA", "SIN", "AMS", "NRT", "SCL"]
        churn = 0.01
        unknown = 0.05
        unresponsive = 0.4
        [[segments]]
        length = 15
        [[segments]]
        length = 15
        reassign = 0.3
        "#,
    )
    .map_err(|e| e.to_string())?;
    let gen_start = Instant::now();
    let (series, _) = generate_series(&spec, 8).map_err(|e| e.to_string())?;
    let generated = gen_start.elapsed();
    let start = Instant::now();
    let m = SimilarityMatrix::from_series(&series, &WeightVector::uniform())
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure!(
        m.len() == 30 && series.network_count() == 5_000_000,
        "shape"
    );
    let peak = peak_rss_kib().ok_or("cannot read peak memory")?;
    let gib = peak as f64 / (1024.0 * 1024.0);
    ensure!(gib < 8.0, "peak memory {gib:.2} GiB");
    let time = within(elapsed, Duration::from_secs(300))?;
    drop(series);
    Ok(format!(
        "similarity_matrix {time}, generation {:.2}s, peak RSS {gib:.2} GiB",
        generated.as_secs_f64()
    ))
}

fn catchscope(dir: &Path, args: &[&str]) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_catchscope"))
        .current_dir(dir)
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "catchscope {args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    Ok(String::from_utf8_lossy(&out.stdout).into_owned())
}

fn tree_bytes(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut files = BTreeMap::new();
    for sub in ["analysis", "report"] {
        let mut stack = vec![root.join(sub)];
        while let Some(dir) = stack.pop() {
            for entry in std::fs::read_dir(&dir).into_iter().flatten().flatten() {
                let path = entry.path();
                if path.is_dir() {
                    stack.push(path);
                } else {
                    files.insert(
                        path.strip_prefix(root).unwrap().to_path_buf(),
                        std::fs::read(&path).unwrap(),
                    );
                }
            }
        }
    }
    files
}

// 9. analyze and report outputs are byte-identical across runs.
fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let dir = tmp.path();
    std::fs::write(
        dir.join("scenario.toml"),
        "version = 1\nnetworks = 2000\nsites = [\"AMS\", \"IAD\", \"NRT\"]\nstart = 1583020800\nchurn = 0.01\nunknown = 0.05\n\
         [[segments]]\nlength = 12\n[[segments]]\nlength = 12\nreassign = 0.6\n",
    )
    .map_err(|e| e.to_string())?;
    std::fs::write(
        dir.join("catchscope.toml"),
        "version = 1\n[inputs]\nfiles = [\"synth/snapshots.csv\"]\n[report]\npairs = [[1583023440, 1583023680]]\n",
    )
    .map_err(|e| e.to_string())?;
    catchscope(
        dir,
        &[
            "synth",
            "--scenario",
            "scenario.toml",
            "--out",
            "synth",
            "--seed",
            "9",
        ],
    )?;
    let mut runs = Vec::new();
    for store in ["store-a", "store-b"] {
        catchscope(dir, &["--store", store, "ingest"])?;
        catchscope(dir, &["--store", store, "analyze"])?;
        catchscope(dir, &["--store", store, "report"])?;
        runs.push(tree_bytes(&dir.join(store)));
    }
    // Cache hit on the second store.
    let hit = catchscope(dir, &["--store", "store-b", "analyze"])?;
    ensure!(
        hit.contains("cache=hit"),
        "second analyze missed the cache: {hit}"
    );
    catchscope(dir, &["--store", "store-b", "report"])?;
    runs.push(tree_bytes(&dir.join("store-b")));
    ensure!(runs[0].len() >= 7, "only {} output files", runs[0].len());
    ensure!(runs[0] == runs[1], "fresh stores differ");
    ensure!(runs[1] == runs[2], "cache hit changed outputs");
    Ok(format!(
        "{} files identical across 3 runs (miss, miss, hit)",
        runs[0].len()
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("confusion-metric regression", confusion_regression),
        ("transition-matrix regression", transition_regression),
        ("aggregate regression", aggregate_regression),
        ("unknown-coverage band", unknown_coverage),
        ("mode recovery", mode_recovery),
        ("oracle equivalence", oracle_equivalence),
        ("property suite", property_suite),
        ("5M x 30 feasibility", full_scale),
        ("analyze/report determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("acceptance {} {name}: PASS ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("acceptance {} {name}: FAIL ({why})", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
