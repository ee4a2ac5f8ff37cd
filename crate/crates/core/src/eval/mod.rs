//! Ground-truth grouping, detection scoring and synthetic scenarios.

mod scenario;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};
use crate::ingest::{data_rows, parse_time};
use crate::model::{GroundTruthEvent, Timestamp, Visibility};

pub use scenario::{
    generate_scenario, generate_series, DrainSpec, DrainTarget, ScenarioSpec, SegmentSpec,
};

pub const DEFAULT_WINDOW_MINUTES: u32 = 10;

pub fn load_ground_truth(path: impl AsRef<Path>) -> Result<Vec<GroundTruthEvent>> {
    parse_ground_truth(&std::fs::read_to_string(path)?)
}

/// Parses `time,operator,visibility` rows.
pub fn parse_ground_truth(text: &str) -> Result<Vec<GroundTruthEvent>> {
    data_rows(text, &["time", "operator", "visibility"])?
        .into_iter()
        .map(|(line, f)| {
            let time = parse_time(line, f[0])?;
            if f[1].is_empty() {
                return Err(Error::parse(line, "empty operator"));
            }
            let visibility: Visibility = f[2].parse().map_err(|e: String| Error::parse(line, e))?;
            Ok(GroundTruthEvent::new(time, f[1], visibility))
        })
        .collect()
}

/// Events by one operator close enough in time to count as one change.
#[derive(Clone, Debug, PartialEq)]
pub struct EventGroup {
    pub start: Timestamp,
    pub end: Timestamp,
    pub operator: String,
    pub visibility: Visibility,
    pub members: Vec<GroundTruthEvent>,
}

impl EventGroup {
    pub fn is_external(&self) -> bool {
        self.visibility.is_external()
    }
}

/// Chains each operator's events while consecutive gaps stay within
/// `window_minutes`. Groups come out ordered by start time, then operator.
pub fn group_events(log: &[GroundTruthEvent], window_minutes: u32) -> Vec<EventGroup> {
    let gap = i64::from(window_minutes) * 60;
    let mut by_operator: BTreeMap<&str, Vec<&GroundTruthEvent>> = BTreeMap::new();
    for e in log {
        by_operator.entry(&e.operator).or_default().push(e);
    }
    let mut groups = Vec::new();
    for (operator, mut events) in by_operator {
        events.sort_by_key(|e| (e.time, e.visibility.rank()));
        let mut current: Option<EventGroup> = None;
        for e in events {
            match current.as_mut() {
                Some(g) if e.time - g.end <= gap => {
                    g.end = e.time;
                    if e.visibility.rank() > g.visibility.rank() {
                        g.visibility = e.visibility;
                    }
                    g.members.push(e.clone());
                }
                _ => {
                    groups.extend(current.take());
                    current = Some(EventGroup {
                        start: e.time,
                        end: e.time,
                        operator: operator.to_string(),
                        visibility: e.visibility,
                        members: vec![e.clone()],
                    });
                }
            }
        }
        groups.extend(current);
    }
    groups.sort_by(|a, b| (a.start, &a.operator).cmp(&(b.start, &b.operator)));
    groups
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScoreOptions {
    /// A detection matches a group within this many minutes of its span.
    pub match_window_minutes: u32,
    /// Count detections matching no group as false positives.
    pub strict: bool,
}

impl Default for ScoreOptions {
    fn default() -> Self {
        ScoreOptions {
            match_window_minutes: DEFAULT_WINDOW_MINUTES,
            strict: false,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ConfusionReport {
    pub tp: usize,
    pub fn_: usize,
    pub tn: usize,
    pub fp: usize,
    /// Detections that matched no ground-truth group.
    pub extra: usize,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        1.0
    } else {
        num as f64 / den as f64
    }
}

impl ConfusionReport {
    pub fn accuracy(&self) -> f64 {
        ratio(self.tp + self.tn, self.tp + self.tn + self.fp + self.fn_)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.tp + self.fp)
    }
}

impl fmt::Display for ConfusionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "tp={} fn={} tn={} fp={} extra={} recall={:.3} accuracy={:.3} precision={:.3}",
            self.tp,
            self.fn_,
            self.tn,
            self.fp,
            self.extra,
            self.recall(),
            self.accuracy(),
            self.precision()
        )
    }
}

/// Scores detected boundary times against grouped ground truth.
pub fn score_detections(
    detections: &[Timestamp],
    groups: &[EventGroup],
    options: &ScoreOptions,
) -> ConfusionReport {
    let slack = i64::from(options.match_window_minutes) * 60;
    let hits = |g: &EventGroup, t: Timestamp| t >= g.start - slack && t <= g.end + slack;
    let mut report = ConfusionReport::default();
    for g in groups {
        let detected = detections.iter().any(|&t| hits(g, t));
        match (g.is_external(), detected) {
            (true, true) => report.tp += 1,
            (true, false) => report.fn_ += 1,
            (false, true) => report.fp += 1,
            (false, false) => report.tn += 1,
        }
    }
    report.extra = detections
        .iter()
        .filter(|&&t| !groups.iter().any(|g| hits(g, t)))
        .count();
    if options.strict {
        report.fp += report.extra;
    }
    report
}

fn pairs(n: u64) -> f64 {
    (n * n.saturating_sub(1) / 2) as f64
}

/// Adjusted Rand index between two labelings of the same items. Returns 1.0
/// when both labelings are trivially identical (for example one cluster each).
pub fn adjusted_rand_index(a: &[usize], b: &[usize]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::config(format!(
            "labelings differ in length: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let mut joint: HashMap<(usize, usize), u64> = HashMap::new();
    let mut rows: HashMap<usize, u64> = HashMap::new();
    let mut cols: HashMap<usize, u64> = HashMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *joint.entry((x, y)).or_default() += 1;
        *rows.entry(x).or_default() += 1;
        *cols.entry(y).or_default() += 1;
    }
    let index: f64 = joint.values().map(|&c| pairs(c)).sum();
    let sum_a: f64 = rows.values().map(|&c| pairs(c)).sum();
    let sum_b: f64 = cols.values().map(|&c| pairs(c)).sum();
    let total = pairs(a.len() as u64);
    if total == 0.0 {
        return Ok(1.0);
    }
    let expected = sum_a * sum_b / total;
    let max = (sum_a + sum_b) / 2.0;
    if max == expected {
        return Ok(1.0);
    }
    Ok((index - expected) / (max - expected))
}
