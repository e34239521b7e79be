//! Scan configuration: rule selection, thresholds, and the auxiliary data
//! files (advisories for SWE-153, the chaincode import allowlist for
//! SWE-171).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::Deserialize;

use crate::registry::{Severity, SweId};
use crate::solidity::pragma::{parse_pragma, PragmaConstraint};
use crate::solidity::Version;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(OutputFormat::Text),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format {other:?} (expected text or json)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LanguageFilter {
    #[default]
    Auto,
    Solidity,
    GoChaincode,
}

impl FromStr for LanguageFilter {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(LanguageFilter::Auto),
            "sol" | "solidity" => Ok(LanguageFilter::Solidity),
            "go" | "chaincode" => Ok(LanguageFilter::GoChaincode),
            other => Err(format!("unknown language {other:?} (expected sol, go or auto)")),
        }
    }
}

/// One entry in the SWE-153 advisory database.
#[derive(Debug, Clone)]
pub struct AdvisoryEntry {
    pub import_path_pattern: String,
    pub affected_pragma: PragmaConstraint,
    pub advisory_id: String,
    pub description: String,
    pub severity: Severity,
}

impl AdvisoryEntry {
    /// Exact-prefix match on the import path text.
    pub fn matches_import(&self, import_path: &str) -> bool {
        import_path.starts_with(&self.import_path_pattern)
    }
}

#[derive(Debug, Deserialize)]
struct AdvisoryFile {
    #[serde(default)]
    advisories: Vec<RawAdvisory>,
}

#[derive(Debug, Deserialize)]
struct RawAdvisory {
    import_path_pattern: String,
    affected_pragma: String,
    advisory_id: String,
    #[serde(default)]
    description: String,
    #[serde(default = "default_advisory_severity")]
    severity: Severity,
}

fn default_advisory_severity() -> Severity {
    Severity::Medium
}

/// Parse an advisory file (TOML, `[[advisories]]` entries).
pub fn parse_advisories(text: &str) -> Result<Vec<AdvisoryEntry>, String> {
    let file: AdvisoryFile = toml::from_str(text).map_err(|e| e.to_string())?;
    Ok(file
        .advisories
        .into_iter()
        .map(|raw| AdvisoryEntry {
            import_path_pattern: raw.import_path_pattern,
            affected_pragma: parse_pragma(&format!("pragma solidity {};", raw.affected_pragma)).0,
            advisory_id: raw.advisory_id,
            description: raw.description,
            severity: raw.severity,
        })
        .collect())
}

/// Import prefixes considered deterministic for SWE-171.
pub fn default_allowlist() -> Vec<String> {
    [
        "fmt",
        "strconv",
        "strings",
        "bytes",
        "errors",
        "encoding/",
        "sort",
        "math",
        "github.com/hyperledger/fabric-chaincode-go/",
        "github.com/hyperledger/fabric/core/chaincode/shim",
        "github.com/hyperledger/fabric-protos-go/",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect()
}

/// Is `import_path` admitted by the allowlist? `math/rand` is carved out of
/// the `math` prefix.
pub fn import_allowed(allowlist: &[String], import_path: &str) -> bool {
    if import_path == "math/rand" || import_path.starts_with("math/rand/") {
        return false;
    }
    allowlist.iter().any(|prefix| {
        if let Some(dir) = prefix.strip_suffix('/') {
            import_path == dir || import_path.starts_with(prefix.as_str())
        } else {
            import_path == prefix || import_path.starts_with(&format!("{prefix}/"))
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuppressionMode {
    Honor,
    Ignore,
}

#[derive(Debug, Clone)]
pub struct ScanConfig {
    pub language: LanguageFilter,
    /// Empty set means all rules enabled.
    pub enabled: BTreeSet<SweId>,
    pub disabled: BTreeSet<SweId>,
    pub severity_overrides: BTreeMap<SweId, Severity>,
    pub fail_on: Severity,
    pub format: OutputFormat,
    pub honor_suppressions: bool,
    pub advisories: Vec<AdvisoryEntry>,
    pub allowlist: Vec<String>,
    /// SWE-102 threshold: pragmas admitting anything below this are outdated.
    pub min_compiler: Version,
    /// SWE-136 name fragments marking secret-bearing variables.
    pub secret_names: Vec<String>,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            language: LanguageFilter::Auto,
            enabled: BTreeSet::new(),
            disabled: BTreeSet::new(),
            severity_overrides: BTreeMap::new(),
            fail_on: Severity::High,
            format: OutputFormat::Text,
            honor_suppressions: true,
            advisories: Vec::new(),
            allowlist: default_allowlist(),
            min_compiler: Version::new(0, 8, 0),
            secret_names: ["secret", "password", "key", "seed", "salt"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
        }
    }
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl std::error::Error for ConfigError {}

impl ScanConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if let Some(id) = self.enabled.intersection(&self.disabled).next() {
            return Err(ConfigError(format!(
                "rule {id} is both enabled and disabled"
            )));
        }
        Ok(())
    }

    pub fn rule_enabled(&self, id: SweId) -> bool {
        if self.disabled.contains(&id) {
            return false;
        }
        self.enabled.is_empty() || self.enabled.contains(&id)
    }

    pub fn effective_severity(&self, id: SweId, default: Severity) -> Severity {
        self.severity_overrides.get(&id).copied().unwrap_or(default)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enable_disable_sets() {
        let mut cfg = ScanConfig::default();
        assert!(cfg.rule_enabled(SweId(107)));
        cfg.disabled.insert(SweId(107));
        assert!(!cfg.rule_enabled(SweId(107)));
        cfg.disabled.clear();
        cfg.enabled.insert(SweId(116));
        assert!(cfg.rule_enabled(SweId(116)));
        assert!(!cfg.rule_enabled(SweId(107)));
    }

    #[test]
    fn overlap_is_rejected() {
        let mut cfg = ScanConfig::default();
        cfg.enabled.insert(SweId(116));
        cfg.disabled.insert(SweId(116));
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn allowlist_semantics() {
        let list = default_allowlist();
        assert!(import_allowed(&list, "fmt"));
        assert!(import_allowed(&list, "encoding/json"));
        assert!(import_allowed(&list, "math"));
        assert!(import_allowed(&list, "math/big"));
        assert!(!import_allowed(&list, "math/rand"));
        assert!(!import_allowed(&list, "net/http"));
        assert!(!import_allowed(&list, "fmtx"));
        assert!(import_allowed(
            &list,
            "github.com/hyperledger/fabric-chaincode-go/shim"
        ));
    }

    #[test]
    fn advisory_parsing_and_matching() {
        let text = r#"
[[advisories]]
import_path_pattern = "./lib/Vulnerable"
affected_pragma = "<0.6.0"
advisory_id = "ADV-2019-001"
description = "known reentrancy in shared withdrawal helper"
severity = "high"
"#;
        let advisories = parse_advisories(text).unwrap();
        assert_eq!(advisories.len(), 1);
        let adv = &advisories[0];
        assert!(adv.matches_import("./lib/VulnerableVault.sol"));
        assert!(!adv.matches_import("./lib/Safe.sol"));
        assert!(adv
            .affected_pragma
            .admits(Version::new(0, 5, 0)));
        assert!(!adv.affected_pragma.admits(Version::new(0, 8, 0)));
    }

    #[test]
    fn empty_advisory_file() {
        assert!(parse_advisories("").unwrap().is_empty());
    }
}
