use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LabelError {
    #[error("empty site name")]
    Empty,
    #[error("site name {0:?} is a reserved word")]
    Reserved(String),
    #[error("site name {0:?} contains a forbidden character")]
    ForbiddenChar(String),
}

/// Name of a service site, upstream provider or front-end.
///
/// Equality, ordering and hashing use the trimmed, lower-cased name; the
/// trimmed original spelling is kept for display.
#[derive(Clone, Debug)]
pub struct SiteName {
    display: Box<str>,
    key: Box<str>,
}

impl SiteName {
    pub fn new(name: &str) -> Result<Self, LabelError> {
        let display = name.trim();
        if display.is_empty() {
            return Err(LabelError::Empty);
        }
        if display
            .chars()
            .any(|c| c == ',' || c == '|' || c.is_control())
        {
            return Err(LabelError::ForbiddenChar(display.to_string()));
        }
        let key = display.to_lowercase();
        if CatchmentLabel::reserved(&key).is_some() {
            return Err(LabelError::Reserved(display.to_string()));
        }
        Ok(SiteName {
            display: display.into(),
            key: key.into(),
        })
    }

    pub fn as_str(&self) -> &str {
        &self.display
    }

    /// Normalized comparison key.
    pub fn key(&self) -> &str {
        &self.key
    }
}

impl PartialEq for SiteName {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}

impl Eq for SiteName {}

impl Hash for SiteName {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.key.hash(state)
    }
}

impl PartialOrd for SiteName {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SiteName {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key.cmp(&other.key)
    }
}

impl fmt::Display for SiteName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display)
    }
}

/// The catchment a network was observed in.
///
/// Sites sort before the reserved states, which sort as error, other,
/// unknown.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CatchmentLabel {
    Site(SiteName),
    /// Observed, but the answer was an error (no reply from any site).
    Error,
    /// Observed, but the identity could not be mapped to a known site.
    Other,
    /// Not observed.
    Unknown,
}

impl CatchmentLabel {
    pub const UNKNOWN_WORD: &'static str = "unknown";
    pub const ERROR_WORD: &'static str = "error";
    pub const OTHER_WORD: &'static str = "other";

    pub fn site(name: &str) -> Result<Self, LabelError> {
        SiteName::new(name).map(CatchmentLabel::Site)
    }

    /// Parses label text: a reserved word (case-insensitive) or a site name.
    pub fn parse(text: &str) -> Result<Self, LabelError> {
        let trimmed = text.trim();
        match Self::reserved(&trimmed.to_lowercase()) {
            Some(label) => Ok(label),
            None => Self::site(trimmed),
        }
    }

    fn reserved(lower: &str) -> Option<Self> {
        match lower {
            Self::UNKNOWN_WORD => Some(CatchmentLabel::Unknown),
            Self::ERROR_WORD => Some(CatchmentLabel::Error),
            Self::OTHER_WORD => Some(CatchmentLabel::Other),
            _ => None,
        }
    }

    pub fn is_known(&self) -> bool {
        !matches!(self, CatchmentLabel::Unknown)
    }

    pub fn is_site(&self) -> bool {
        matches!(self, CatchmentLabel::Site(_))
    }

    /// Text form used in every file format.
    pub fn as_str(&self) -> &str {
        match self {
            CatchmentLabel::Site(name) => name.as_str(),
            CatchmentLabel::Error => Self::ERROR_WORD,
            CatchmentLabel::Other => Self::OTHER_WORD,
            CatchmentLabel::Unknown => Self::UNKNOWN_WORD,
        }
    }
}

impl fmt::Display for CatchmentLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}
