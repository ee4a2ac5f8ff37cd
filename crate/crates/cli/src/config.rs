//! Versioned study configuration.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use catchscope::analysis::{ChangeParams, Linkage, SweepParams};
use catchscope::prep::DEFAULT_MAX_GAP;
use ipnet::Ipv4Net;
use serde::{Deserialize, Serialize};

use crate::InputError;

pub const CONFIG_VERSION: u32 = 1;

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Study {
    pub version: u32,
    /// Store directory, relative to the config file.
    #[serde(default)]
    pub store: Option<PathBuf>,
    #[serde(default)]
    pub inputs: Inputs,
    #[serde(default)]
    pub cleaning: Cleaning,
    #[serde(default)]
    pub weights: Weights,
    #[serde(default)]
    pub clustering: Clustering,
    #[serde(default)]
    pub detection: Detection,
    #[serde(default)]
    pub report: Report,
    #[serde(default)]
    pub validate: Validate,
    /// Directory the config was read from; relative paths resolve here.
    #[serde(skip)]
    pub base: PathBuf,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Canonical,
    Verfploeter,
    Traceroute,
    Nsid,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum InputFile {
    Path(PathBuf),
    Timed { path: PathBuf, time: i64 },
}

impl InputFile {
    pub fn path(&self) -> &Path {
        match self {
            InputFile::Path(p) | InputFile::Timed { path: p, .. } => p,
        }
    }

    pub fn time(&self) -> Option<i64> {
        match self {
            InputFile::Path(_) => None,
            InputFile::Timed { time, .. } => Some(*time),
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Inputs {
    #[serde(default)]
    pub format: Format,
    #[serde(default)]
    pub files: Vec<InputFile>,
    /// Identifier-to-site rules for the `nsid` format.
    #[serde(default)]
    pub rules: Option<PathBuf>,
    #[serde(default = "default_focus_hop")]
    pub focus_hop: u8,
}

fn default_focus_hop() -> u8 {
    1
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Cleaning {
    #[serde(default)]
    pub reject_labels: Vec<String>,
    #[serde(default)]
    pub reject_prefixes: Vec<Ipv4Net>,
    #[serde(default)]
    pub min_share: f64,
    #[serde(default = "default_max_gap")]
    pub max_gap: usize,
}

fn default_max_gap() -> usize {
    DEFAULT_MAX_GAP
}

impl Default for Cleaning {
    fn default() -> Self {
        Cleaning {
            reject_labels: Vec::new(),
            reject_prefixes: Vec::new(),
            min_share: 0.0,
            max_gap: DEFAULT_MAX_GAP,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightMode {
    #[default]
    Uniform,
    Prefix,
    Traffic,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Weights {
    #[serde(default)]
    pub mode: WeightMode,
    #[serde(default)]
    pub coverage: Vec<Ipv4Net>,
    #[serde(default)]
    pub file: Option<PathBuf>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Clustering {
    #[serde(default = "default_max_modes")]
    pub max_modes: usize,
    #[serde(default = "default_min_size")]
    pub min_size: usize,
    #[serde(default = "default_step")]
    pub step: f64,
    #[serde(default)]
    pub linkage: Linkage,
    /// Fixed threshold; skips the adaptive sweep.
    #[serde(default)]
    pub threshold: Option<f64>,
}

fn default_max_modes() -> usize {
    SweepParams::default().max_modes
}

fn default_min_size() -> usize {
    SweepParams::default().min_size
}

fn default_step() -> f64 {
    SweepParams::default().step
}

impl Default for Clustering {
    fn default() -> Self {
        Clustering {
            max_modes: default_max_modes(),
            min_size: default_min_size(),
            step: default_step(),
            linkage: Linkage::default(),
            threshold: None,
        }
    }
}

impl Clustering {
    pub fn sweep(&self) -> SweepParams {
        SweepParams {
            max_modes: self.max_modes,
            min_size: self.min_size,
            step: self.step,
            linkage: self.linkage,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Detection {
    #[serde(default = "default_window")]
    pub window: usize,
    #[serde(default = "default_delta")]
    pub delta: f64,
}

fn default_window() -> usize {
    ChangeParams::default().window
}

fn default_delta() -> f64 {
    ChangeParams::default().delta
}

impl Default for Detection {
    fn default() -> Self {
        Detection {
            window: default_window(),
            delta: default_delta(),
        }
    }
}

impl Detection {
    pub fn params(&self) -> ChangeParams {
        ChangeParams {
            window: self.window,
            delta: self.delta,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    /// Snapshot time pairs to tabulate transitions for.
    #[serde(default)]
    pub pairs: Vec<(i64, i64)>,
    #[serde(default = "default_highlight")]
    pub highlight: f64,
    /// Hop levels for flow exports of traceroute studies.
    #[serde(default)]
    pub sankey: Vec<u8>,
    /// Latency samples to summarize.
    #[serde(default)]
    pub latency: Option<PathBuf>,
    #[serde(default = "default_percentile")]
    pub percentile: f64,
    /// Fixed stacking order for the catchment plot.
    #[serde(default)]
    pub site_order: Vec<String>,
}

fn default_highlight() -> f64 {
    1000.0
}

fn default_percentile() -> f64 {
    90.0
}

impl Default for Report {
    fn default() -> Self {
        Report {
            pairs: Vec::new(),
            highlight: default_highlight(),
            sankey: Vec::new(),
            latency: None,
            percentile: default_percentile(),
            site_order: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Validate {
    #[serde(default)]
    pub ground_truth: Option<PathBuf>,
    #[serde(default = "default_window_minutes")]
    pub window_minutes: u32,
    /// Defaults to `window_minutes`.
    #[serde(default)]
    pub match_window_minutes: Option<u32>,
    #[serde(default)]
    pub strict: bool,
}

fn default_window_minutes() -> u32 {
    catchscope::eval::DEFAULT_WINDOW_MINUTES
}

impl Default for Validate {
    fn default() -> Self {
        Validate {
            ground_truth: None,
            window_minutes: default_window_minutes(),
            match_window_minutes: None,
            strict: false,
        }
    }
}

impl Study {
    pub fn load(path: &Path) -> anyhow::Result<Study> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| InputError(format!("cannot read config {}: {e}", path.display())))?;
        let mut study =
            Study::parse(&text).with_context(|| format!("config {}", path.display()))?;
        study.base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(study)
    }

    pub fn parse(text: &str) -> anyhow::Result<Study> {
        let study: Study = toml::from_str(text).map_err(|e| InputError(e.to_string()))?;
        if study.version != CONFIG_VERSION {
            bail!(InputError(format!(
                "unsupported config version {} (expected {CONFIG_VERSION})",
                study.version
            )));
        }
        if !(0.0..1.0).contains(&study.cleaning.min_share) {
            bail!(InputError("cleaning.min_share must be within [0,1)".into()));
        }
        if let Some(t) = study.clustering.threshold {
            if !(0.0..=1.0).contains(&t) {
                bail!(InputError(
                    "clustering.threshold must be within [0,1]".into()
                ));
            }
        }
        Ok(study)
    }

    /// Config-relative path.
    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base.join(path)
        }
    }

    /// Canonical text of the settings that shape the cleaned series, for
    /// cache keys.
    pub fn cleaning_fingerprint(&self) -> String {
        serde_json::to_string(&(&self.cleaning, self.inputs.format, self.inputs.focus_hop))
            .expect("plain data serializes")
    }
}
