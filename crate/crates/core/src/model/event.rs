use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::Timestamp;

/// How an operator action shows up from outside.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Visibility {
    /// No externally observable effect expected.
    Internal,
    /// Site drained; its networks move elsewhere.
    Drain,
    /// Traffic-engineering change such as a prepend or community update.
    #[serde(rename = "te")]
    TrafficEngineering,
}

impl Visibility {
    pub fn is_external(self) -> bool {
        self != Visibility::Internal
    }

    /// Precedence when events are grouped: drain beats TE beats internal.
    pub fn rank(self) -> u8 {
        match self {
            Visibility::Internal => 0,
            Visibility::TrafficEngineering => 1,
            Visibility::Drain => 2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Visibility::Internal => "internal",
            Visibility::Drain => "drain",
            Visibility::TrafficEngineering => "te",
        }
    }
}

impl fmt::Display for Visibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Visibility {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "internal" => Ok(Visibility::Internal),
            "drain" => Ok(Visibility::Drain),
            "te" => Ok(Visibility::TrafficEngineering),
            other => Err(format!("unknown visibility `{other}`")),
        }
    }
}

/// One logged operator action.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroundTruthEvent {
    pub time: Timestamp,
    pub operator: String,
    pub visibility: Visibility,
}

impl GroundTruthEvent {
    pub fn new(time: Timestamp, operator: impl Into<String>, visibility: Visibility) -> Self {
        GroundTruthEvent {
            time,
            operator: operator.into(),
            visibility,
        }
    }
}
