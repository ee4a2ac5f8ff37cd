use std::net::Ipv4Addr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::model::{
    CatchmentLabel, GroundTruthEvent, LabelCode, NetworkId, SeriesBuilder, Snapshot,
    SnapshotSeries, Timestamp, Visibility,
};

/// Synthetic study layout, read from a `version = 1` TOML document.
///
/// ```toml
/// version = 1
/// networks = 10000
/// sites = ["AMS", "IAD", "NRT"]
/// start = 1583020800
/// interval = 240
/// churn = 0.01
/// unknown = 0.05
///
/// [[segments]]
/// length = 20
///
/// [[segments]]
/// length = 20
/// reassign = 0.7
///
/// [[drains]]
/// at = 30
/// site = "AMS"
/// duration = 5
/// targets = [{ site = "IAD", share = 0.75 }, { site = "NRT", share = 0.25 }]
/// ```
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub version: u32,
    pub networks: usize,
    pub sites: Vec<String>,
    #[serde(default)]
    pub start: Timestamp,
    /// Seconds between snapshots.
    #[serde(default = "default_interval")]
    pub interval: i64,
    /// Per snapshot, chance that a network is seen at a random other site
    /// instead of its segment site.
    #[serde(default)]
    pub churn: f64,
    /// Per snapshot, chance that a network's catchment is not observed.
    #[serde(default)]
    pub unknown: f64,
    /// Share of networks that never answer.
    #[serde(default)]
    pub unresponsive: f64,
    #[serde(default = "default_operator")]
    pub operator: String,
    pub segments: Vec<SegmentSpec>,
    #[serde(default)]
    pub drains: Vec<DrainSpec>,
}

fn default_interval() -> i64 {
    240
}

fn default_operator() -> String {
    "synth".into()
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentSpec {
    /// Snapshots in this segment.
    pub length: usize,
    /// Share of networks moved to a different site at the segment start.
    /// Ignored for the first segment.
    #[serde(default)]
    pub reassign: f64,
    /// Return to the site assignment of an earlier segment instead.
    #[serde(default)]
    pub revisit: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DrainSpec {
    /// Snapshot index where the drain starts.
    pub at: usize,
    pub site: String,
    /// Snapshots until the site is restored; drained to the end if absent.
    #[serde(default)]
    pub duration: Option<usize>,
    pub targets: Vec<DrainTarget>,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DrainTarget {
    pub site: String,
    pub share: f64,
}

fn fraction(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::config(format!(
            "{name} must be within [0,1], got {v}"
        )))
    }
}

impl ScenarioSpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: ScenarioSpec =
            toml::from_str(text).map_err(|e| Error::config(format!("scenario: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn snapshot_count(&self) -> usize {
        self.segments.iter().map(|s| s.length).sum()
    }

    fn site_index(&self, name: &str) -> Result<usize> {
        let key = name.trim().to_lowercase();
        self.sites
            .iter()
            .position(|s| s.trim().to_lowercase() == key)
            .ok_or_else(|| Error::config(format!("site `{name}` is not in the site list")))
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != 1 {
            return Err(Error::config(format!(
                "unsupported scenario version {}",
                self.version
            )));
        }
        if self.networks == 0 {
            return Err(Error::config("scenario needs at least one network"));
        }
        if self.sites.is_empty() {
            return Err(Error::config("scenario needs at least one site"));
        }
        for (i, s) in self.sites.iter().enumerate() {
            CatchmentLabel::site(s).map_err(|e| Error::config(format!("site `{s}`: {e}")))?;
            if self.site_index(s)? != i {
                return Err(Error::config(format!("site `{s}` listed twice")));
            }
        }
        if self.interval <= 0 {
            return Err(Error::config("interval must be positive"));
        }
        fraction("churn", self.churn)?;
        fraction("unknown", self.unknown)?;
        fraction("unresponsive", self.unresponsive)?;
        if self.churn > 0.0 && self.sites.len() < 2 {
            return Err(Error::config("churn needs at least two sites"));
        }
        if self.segments.is_empty() {
            return Err(Error::config("scenario needs at least one segment"));
        }
        for (k, seg) in self.segments.iter().enumerate() {
            if seg.length == 0 {
                return Err(Error::config(format!("segment {k} is empty")));
            }
            fraction("reassign", seg.reassign)?;
            if k > 0 && seg.reassign > 0.0 && self.sites.len() < 2 {
                return Err(Error::config("reassignment needs at least two sites"));
            }
            if let Some(r) = seg.revisit {
                if r >= k {
                    return Err(Error::config(format!(
                        "segment {k} revisits segment {r}, which is not earlier"
                    )));
                }
            }
        }
        let total = self.snapshot_count();
        for d in &self.drains {
            if d.at >= total {
                return Err(Error::config(format!(
                    "drain at {} is past the last snapshot",
                    d.at
                )));
            }
            if d.duration == Some(0) {
                return Err(Error::config("drain duration must be positive"));
            }
            let from = self.site_index(&d.site)?;
            if d.targets.is_empty() {
                return Err(Error::config("drain needs at least one target"));
            }
            let mut sum = 0.0;
            for t in &d.targets {
                if self.site_index(&t.site)? == from {
                    return Err(Error::config("drain target equals the drained site"));
                }
                if !(t.share > 0.0 && t.share <= 1.0) {
                    return Err(Error::config(format!(
                        "drain share {} outside (0,1]",
                        t.share
                    )));
                }
                sum += t.share;
            }
            if (sum - 1.0).abs() > 1e-9 {
                return Err(Error::config(format!("drain shares sum to {sum}, not 1")));
            }
        }
        Ok(())
    }
}

fn network_key(i: usize) -> NetworkId {
    let base = u32::from(Ipv4Addr::new(1, 0, 0, 0));
    NetworkId::new(format!("{}/24", Ipv4Addr::from(base + ((i as u32) << 8))))
}

/// Index in `0..n` other than `skip`, uniformly.
fn other_site(rng: &mut ChaCha8Rng, n: usize, skip: usize) -> usize {
    let pick = rng.random_range(0..n - 1);
    if pick >= skip {
        pick + 1
    } else {
        pick
    }
}

/// Generates the scenario straight into the dense series representation
/// along with its ground truth. Identical `(spec, seed)` give identical
/// output.
pub fn generate_series(
    spec: &ScenarioSpec,
    seed: u64,
) -> Result<(SnapshotSeries, Vec<GroundTruthEvent>)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = spec.networks;
    let sites = spec.sites.len();
    if n > (u32::MAX as usize >> 8) - (1 << 16) {
        return Err(Error::config(format!(
            "{n} networks exceed the synthetic address space"
        )));
    }

    let mut bases: Vec<Vec<usize>> = Vec::with_capacity(spec.segments.len());
    for (k, seg) in spec.segments.iter().enumerate() {
        let base = if k == 0 {
            (0..n).map(|_| rng.random_range(0..sites)).collect()
        } else if let Some(r) = seg.revisit {
            bases[r].clone()
        } else {
            let mut base: Vec<usize> = bases[k - 1].clone();
            let moved = (seg.reassign * n as f64).round() as usize;
            for i in sample(&mut rng, n, moved.min(n)).into_iter() {
                base[i] = other_site(&mut rng, sites, base[i]);
            }
            base
        };
        bases.push(base);
    }

    let unresponsive: Vec<bool> = if spec.unresponsive > 0.0 {
        (0..n).map(|_| rng.random_bool(spec.unresponsive)).collect()
    } else {
        vec![false; n]
    };

    // Per drain, the target each network would move to.
    let mut drains = Vec::with_capacity(spec.drains.len());
    for d in &spec.drains {
        let from = spec.site_index(&d.site)?;
        let targets: Vec<(usize, f64)> = d
            .targets
            .iter()
            .map(|t| Ok((spec.site_index(&t.site)?, t.share)))
            .collect::<Result<_>>()?;
        let pick: Vec<usize> = (0..n)
            .map(|_| {
                let mut u: f64 = rng.random();
                for &(site, share) in &targets {
                    if u < share {
                        return site;
                    }
                    u -= share;
                }
                targets.last().unwrap().0
            })
            .collect();
        let end = d.duration.map_or(usize::MAX, |len| d.at + len);
        drains.push((from, d.at, end, pick));
    }

    let total = spec.snapshot_count();
    let time = |i: usize| spec.start + spec.interval * i as i64;
    let mut events = Vec::new();
    let mut segment_of = Vec::with_capacity(total);
    let mut offset = 0;
    for (k, seg) in spec.segments.iter().enumerate() {
        if k > 0 {
            events.push(GroundTruthEvent::new(
                time(offset),
                &spec.operator,
                Visibility::TrafficEngineering,
            ));
        }
        segment_of.extend(std::iter::repeat_n(k, seg.length));
        offset += seg.length;
    }
    for &(_, at, end, _) in &drains {
        events.push(GroundTruthEvent::new(
            time(at),
            &spec.operator,
            Visibility::Drain,
        ));
        if end < total {
            events.push(GroundTruthEvent::new(
                time(end),
                &spec.operator,
                Visibility::Drain,
            ));
        }
    }
    events.sort_by_key(|e| e.time);

    let mut builder = SeriesBuilder::new((0..n).map(network_key).collect());
    let codes: Vec<LabelCode> = spec
        .sites
        .iter()
        .map(|s| builder.intern(&CatchmentLabel::site(s).expect("validated")))
        .collect();
    for (i, &k) in segment_of.iter().enumerate() {
        let base = &bases[k];
        let mut column = Vec::with_capacity(n);
        for j in 0..n {
            let mut site = base[j];
            for (from, at, end, pick) in &drains {
                if site == *from && i >= *at && i < *end {
                    site = pick[j];
                }
            }
            if spec.churn > 0.0 && rng.random_bool(spec.churn) {
                site = other_site(&mut rng, sites, site);
            }
            let hidden = spec.unknown > 0.0 && rng.random_bool(spec.unknown);
            column.push(if unresponsive[j] || hidden {
                SnapshotSeries::UNKNOWN_CODE
            } else {
                codes[site]
            });
        }
        builder.push_column(time(i), column)?;
    }
    Ok((builder.build(), events))
}

/// [`generate_series`] materialized as snapshots.
pub fn generate_scenario(
    spec: &ScenarioSpec,
    seed: u64,
) -> Result<(Vec<Snapshot>, Vec<GroundTruthEvent>)> {
    let (series, events) = generate_series(spec, seed)?;
    Ok((series.to_snapshots(), events))
}
