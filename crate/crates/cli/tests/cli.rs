use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_catchscope"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = run(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn status(dir: &Path, args: &[&str]) -> i32 {
    run(dir, args).status.code().unwrap()
}

const STUDY: &str = "version = 1\n[inputs]\nfiles = [\"obs.csv\"]\n";

/// `n` snapshots four minutes apart over 50 networks; `label` picks each
/// network's site for a snapshot index.
fn observations(n: usize, label: impl Fn(usize, usize) -> &'static str) -> String {
    let mut text = String::from("time,network,label\n");
    for t in 0..n {
        for net in 0..50 {
            writeln!(text, "{},n{net},{}", 1_000_000 + 240 * t, label(t, net)).unwrap();
        }
    }
    text
}

fn study(obs: &str) -> TempDir {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("catchscope.toml"), STUDY).unwrap();
    fs::write(tmp.path().join("obs.csv"), obs).unwrap();
    tmp
}

fn stable() -> String {
    observations(20, |_, net| ["A", "B", "C"][net % 3])
}

#[test]
fn ingest_skips_unchanged_inputs() {
    let tmp = study(&stable());
    let first = ok(tmp.path(), &["ingest"]);
    assert!(!first.contains("skipped"), "{first}");
    assert!(tmp.path().join("store/snapshots.csv").exists());
    let second = ok(tmp.path(), &["ingest"]);
    assert!(second.contains("skipped: inputs unchanged"), "{second}");
}

#[test]
fn malformed_input_leaves_store_untouched() {
    let tmp = study(&stable());
    ok(tmp.path(), &["ingest"]);
    let before = fs::read(tmp.path().join("store/snapshots.csv")).unwrap();
    let manifest = fs::read(tmp.path().join("store/manifest.json")).unwrap();
    fs::write(
        tmp.path().join("obs.csv"),
        "time,network,label\n1,n1,A\nnope,n2,B\n",
    )
    .unwrap();
    let out = run(tmp.path(), &["ingest"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
    assert_eq!(
        fs::read(tmp.path().join("store/snapshots.csv")).unwrap(),
        before
    );
    assert_eq!(
        fs::read(tmp.path().join("store/manifest.json")).unwrap(),
        manifest
    );
}

#[test]
fn missing_input_file_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("catchscope.toml"), STUDY).unwrap();
    assert_eq!(status(tmp.path(), &["ingest"]), 2);
    assert!(!tmp.path().join("store/manifest.json").exists());
}

#[test]
fn bad_config_is_a_usage_error() {
    let tmp = study(&stable());
    fs::write(
        tmp.path().join("catchscope.toml"),
        "version = 1\nbogus = 3\n",
    )
    .unwrap();
    assert_eq!(status(tmp.path(), &["ingest"]), 2);
}

#[test]
fn analyze_requires_an_ingested_store() {
    let tmp = study(&stable());
    assert_eq!(status(tmp.path(), &["analyze"]), 2);
    assert_eq!(status(tmp.path(), &["report"]), 2);
}

#[test]
fn stable_series_has_one_mode_and_no_changes() {
    let tmp = study(&stable());
    ok(tmp.path(), &["ingest"]);
    let out = ok(tmp.path(), &["analyze"]);
    assert!(out.contains("clusters=1 modes=1"), "{out}");
    assert!(out.contains("events=0"), "{out}");
    assert!(out.contains("cache=miss"), "{out}");
    assert!(ok(tmp.path(), &["analyze"]).contains("cache=hit"));
    let changes = fs::read_to_string(tmp.path().join("store/analysis/changes.csv")).unwrap();
    assert_eq!(changes, "time,score\n");
}

#[test]
fn three_planted_modes_are_found() {
    // Each block of 10 snapshots rotates every network to a new site.
    let tmp = study(&observations(30, |t, net| {
        ["A", "B", "C"][(net + t / 10) % 3]
    }));
    ok(tmp.path(), &["ingest"]);
    let out = ok(tmp.path(), &["analyze"]);
    assert!(out.contains("clusters=3 modes=3"), "{out}");
    assert!(out.contains("events=2"), "{out}");
    let changes = fs::read_to_string(tmp.path().join("store/analysis/changes.csv")).unwrap();
    let times: Vec<&str> = changes
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(times, ["1002400", "1004800"]);
    let modes = fs::read_to_string(tmp.path().join("store/analysis/modes.csv")).unwrap();
    assert_eq!(modes.lines().count(), 31);
    assert!(
        modes.lines().nth(11).unwrap().ends_with(",1,true"),
        "{modes}"
    );
}

#[test]
fn fixed_threshold_overrides_the_sweep() {
    let tmp = study(&observations(30, |t, net| {
        ["A", "B", "C"][(net + t / 10) % 3]
    }));
    ok(tmp.path(), &["ingest"]);
    let out = ok(tmp.path(), &["analyze", "--threshold", "1.0"]);
    assert!(out.contains("clusters=1"), "{out}");
    assert!(!out.contains("adaptive"), "{out}");
    assert_eq!(status(tmp.path(), &["analyze", "--threshold", "1.5"]), 2);
}

#[test]
fn report_writes_figures_after_analyze() {
    let tmp = study(&stable());
    ok(tmp.path(), &["ingest"]);
    assert_eq!(status(tmp.path(), &["report"]), 2);
    ok(tmp.path(), &["analyze"]);
    ok(tmp.path(), &["report"]);
    for name in ["heatmap.svg", "stackplot.svg"] {
        let svg = fs::read_to_string(tmp.path().join("store/report").join(name)).unwrap();
        assert!(svg.starts_with("<svg"), "{name}");
    }
}

fn validate_fixture(changes: &str, log: &str) -> TempDir {
    let tmp = tempfile::tempdir().unwrap();
    fs::create_dir_all(tmp.path().join("store/analysis")).unwrap();
    fs::write(tmp.path().join("store/analysis/changes.csv"), changes).unwrap();
    fs::write(tmp.path().join("truth.csv"), log).unwrap();
    tmp
}

#[test]
fn validate_reproduces_the_regression_counts() {
    let day = 86_400;
    let mut changes = String::from("time,score\n");
    let mut log = String::from("time,operator,visibility\n");
    for i in 0..56i64 {
        let visibility = if i < 19 { "drain" } else { "internal" };
        writeln!(log, "{},ops,{visibility}", i * day).unwrap();
        if i < 27 {
            writeln!(changes, "{},0.1", i * day + 240).unwrap();
        }
    }
    for i in 0..10i64 {
        writeln!(changes, "{},0.1", (70 + i) * day).unwrap();
    }
    let tmp = validate_fixture(&changes, &log);
    let out = ok(tmp.path(), &["validate", "--ground-truth", "truth.csv"]);
    assert_eq!(
        out.trim(),
        "tp=19 fn=0 tn=29 fp=8 extra=10 recall=1.000 accuracy=0.857 precision=0.704"
    );
    let strict = ok(
        tmp.path(),
        &["validate", "--ground-truth", "truth.csv", "--strict"],
    );
    assert!(strict.contains("fp=18 extra=10"), "{strict}");
    assert!(tmp.path().join("store/validate/report.txt").exists());
}

#[test]
fn validate_with_nothing_to_score() {
    let tmp = validate_fixture("time,score\n", "time,operator,visibility\n");
    let out = ok(tmp.path(), &["validate", "--ground-truth", "truth.csv"]);
    assert_eq!(
        out.trim(),
        "tp=0 fn=0 tn=0 fp=0 extra=0 recall=1.000 accuracy=1.000 precision=1.000"
    );
}

#[test]
fn validate_rejects_missing_inputs() {
    let tmp = validate_fixture("time,score\n", "time,operator,visibility\n");
    assert_eq!(status(tmp.path(), &["validate"]), 2);
    assert_eq!(
        status(tmp.path(), &["validate", "--ground-truth", "absent.csv"]),
        2
    );
    fs::write(tmp.path().join("truth.csv"), "time,operator\n1,x\n").unwrap();
    assert_eq!(
        status(tmp.path(), &["validate", "--ground-truth", "truth.csv"]),
        2
    );
}

#[test]
fn synth_then_validate_finds_planted_events() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(
        tmp.path().join("scenario.toml"),
        "version = 1\nnetworks = 500\nsites = [\"A\", \"B\", \"C\"]\nstart = 1000000\n\
         [[segments]]\nlength = 15\n[[segments]]\nlength = 15\nreassign = 0.8\n",
    )
    .unwrap();
    fs::write(
        tmp.path().join("catchscope.toml"),
        "version = 1\n[inputs]\nfiles = [\"out/snapshots.csv\"]\n\
         [validate]\nground_truth = \"out/ground_truth.csv\"\n",
    )
    .unwrap();
    ok(
        tmp.path(),
        &[
            "synth",
            "--scenario",
            "scenario.toml",
            "--out",
            "out",
            "--seed",
            "3",
        ],
    );
    ok(tmp.path(), &["ingest"]);
    ok(tmp.path(), &["analyze"]);
    let out = ok(tmp.path(), &["validate"]);
    assert!(out.starts_with("tp=1 fn=0 tn=0 fp=0 extra=0"), "{out}");
}
