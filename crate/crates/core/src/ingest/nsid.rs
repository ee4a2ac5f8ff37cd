use std::path::Path;

use regex::Regex;

use super::numbered_lines;
use crate::error::{Error, Result};
use crate::model::CatchmentLabel;

/// One identifier-to-site mapping rule.
///
/// `site` may reference capture groups of `pattern` (`$1`, `${name}`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NsidRule {
    pub priority: i64,
    pub pattern: String,
    pub site: String,
}

/// Compiled, priority-ordered rule set.
#[derive(Clone, Debug)]
pub struct NsidRules {
    rules: Vec<(NsidRule, Regex)>,
}

impl NsidRules {
    /// Compiles `rules`. Lower priority wins; equal priorities keep their
    /// given order.
    pub fn compile(rules: Vec<NsidRule>) -> Result<Self> {
        if rules.is_empty() {
            return Err(Error::config("NSID rule set is empty"));
        }
        let mut compiled = Vec::with_capacity(rules.len());
        for rule in rules {
            let regex = Regex::new(&rule.pattern)
                .map_err(|e| Error::config(format!("NSID rule pattern `{}`: {e}", rule.pattern)))?;
            if rule.site.trim().is_empty() {
                return Err(Error::config(format!(
                    "NSID rule `{}` has an empty site",
                    rule.pattern
                )));
            }
            compiled.push((rule, regex));
        }
        compiled.sort_by_key(|(rule, _)| rule.priority);
        Ok(NsidRules { rules: compiled })
    }

    pub fn rules(&self) -> impl Iterator<Item = &NsidRule> {
        self.rules.iter().map(|(rule, _)| rule)
    }

    /// Site text of the first matching rule.
    fn resolve(&self, identifier: &str) -> Option<String> {
        self.rules.iter().find_map(|(rule, regex)| {
            regex.captures(identifier).map(|caps| {
                let mut site = String::new();
                caps.expand(&rule.site, &mut site);
                site
            })
        })
    }
}

/// Maps a server identity string (NSID, hostname.bind, CNAME target) to a
/// catchment. Answers that match no rule are [`CatchmentLabel::Other`]: the
/// server answered, only its identity is unrecognized.
pub fn map_nsid(identifier: &str, rules: &NsidRules) -> CatchmentLabel {
    let identifier = identifier.trim();
    if identifier.is_empty() {
        return CatchmentLabel::Other;
    }
    rules
        .resolve(identifier)
        .and_then(|site| CatchmentLabel::site(&site).ok())
        .unwrap_or(CatchmentLabel::Other)
}

pub fn load_nsid_rules(path: impl AsRef<Path>) -> Result<NsidRules> {
    parse_nsid_rules(&std::fs::read_to_string(path)?)
}

/// Parses `priority,pattern,site` rows. The header row is optional; the
/// pattern may itself contain commas.
pub fn parse_nsid_rules(text: &str) -> Result<NsidRules> {
    let mut rules = Vec::new();
    for (line, row) in numbered_lines(text) {
        if rules.is_empty() && row.replace(' ', "") == "priority,pattern,site" {
            continue;
        }
        let (priority, rest) = row
            .split_once(',')
            .ok_or_else(|| Error::parse(line, "expected `priority,pattern,site`"))?;
        let (pattern, site) = rest
            .rsplit_once(',')
            .ok_or_else(|| Error::parse(line, "expected `priority,pattern,site`"))?;
        let priority = priority
            .trim()
            .parse()
            .map_err(|_| Error::parse(line, format!("invalid priority `{}`", priority.trim())))?;
        rules.push(NsidRule {
            priority,
            pattern: pattern.trim().to_string(),
            site: site.trim().to_string(),
        });
    }
    NsidRules::compile(rules)
}
