//! The machine-readable SWE weakness registry: bundled data, loading,
//! validation and lookup.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Raw bytes of the bundled registry file. `registry export` emits these
/// verbatim so the export round-trips byte-identically.
pub const BUNDLED_REGISTRY: &str = include_str!("../data/registry.toml");

/// An SWE code. Numbering starts at 100 to line up with the SWC registry;
/// the 900 block holds eliminated entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SweId(pub u32);

impl fmt::Display for SweId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SWE-{}", self.0)
    }
}

impl SweId {
    /// Parse "SWE-116" or a bare "116" (case-insensitive).
    pub fn parse(text: &str) -> Option<SweId> {
        let t = text.trim();
        let digits = if t.len() >= 4 && t[..4].eq_ignore_ascii_case("swe-") {
            &t[4..]
        } else {
            t
        };
        // Zero-padding is forbidden in the canonical rendering.
        if digits.len() > 1 && digits.starts_with('0') {
            return None;
        }
        digits.parse().ok().map(SweId)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Blockchain {
    Ethereum,
    HyperledgerFabric,
    Eosio,
    VntChain,
    Generic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourceLanguage {
    Solidity,
    GoChaincode,
    CppEosio,
    Any,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Active,
    Eliminated,
    Reserved,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Detectability {
    Automated,
    Heuristic,
    CrossRef,
    Manual,
    PlatformOutOfScope,
    Deprecated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Severity {
    Info,
    Low,
    Medium,
    High,
}

impl Severity {
    pub fn parse(s: &str) -> Option<Severity> {
        match s.to_ascii_lowercase().as_str() {
            "high" => Some(Severity::High),
            "medium" => Some(Severity::Medium),
            "low" => Some(Severity::Low),
            "info" => Some(Severity::Info),
            _ => None,
        }
    }
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Severity::High => "high",
            Severity::Medium => "medium",
            Severity::Low => "low",
            Severity::Info => "info",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegistryEntry {
    pub id: SweId,
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub aliases: Vec<String>,
    #[serde(default)]
    pub blockchains: BTreeSet<Blockchain>,
    #[serde(default)]
    pub source_languages: BTreeSet<SourceLanguage>,
    pub status: Status,
    #[serde(default)]
    pub detectability: Option<Detectability>,
    #[serde(default)]
    pub cross_refs: Vec<String>,
    #[serde(default)]
    pub default_severity: Option<Severity>,
    #[serde(default)]
    pub description: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elimination_reason: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cross_ref_target: Vec<SweId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Registry {
    pub entries: Vec<RegistryEntry>,
}

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("registry parse error: {0}")]
    Parse(String),
    #[error("registry validation failed:\n{}", .0.iter().map(|v| format!("  {v}")).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<Violation>),
}

#[derive(Debug, Error)]
pub enum LookupError {
    #[error("no registry entry matches {0:?}")]
    NotFound(String),
    #[error("{0} is a reserved id with no content")]
    Reserved(SweId),
}

/// One violated registry invariant, naming the offending id.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub id: Option<SweId>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.id {
            Some(id) => write!(f, "{id}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

fn violation(id: impl Into<Option<SweId>>, message: impl Into<String>) -> Violation {
    Violation {
        id: id.into(),
        message: message.into(),
    }
}

/// Filter for [`list_entries`]; absent fields match everything.
#[derive(Debug, Default, Clone)]
pub struct EntryFilter {
    pub blockchain: Option<Blockchain>,
    pub status: Option<Status>,
    pub detectability: Option<Detectability>,
    pub language: Option<SourceLanguage>,
}

fn normalize_key(text: &str) -> String {
    text.split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_lowercase()
}

/// Parse and validate a registry file. Entries come back sorted by id.
pub fn load_registry(source: &str) -> Result<Registry, RegistryError> {
    let mut registry: Registry =
        toml::from_str(source).map_err(|e| RegistryError::Parse(e.to_string()))?;
    registry.entries.sort_by_key(|e| e.id);
    let violations = validate_registry(&registry);
    if violations.is_empty() {
        Ok(registry)
    } else {
        Err(RegistryError::Invalid(violations))
    }
}

/// Load the registry bundled into the binary.
pub fn load_bundled() -> Registry {
    load_registry(BUNDLED_REGISTRY).expect("bundled registry must validate")
}

/// Every invariant check, returned as a list so callers see all problems at
/// once. Empty means the registry is sound.
pub fn validate_registry(registry: &Registry) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut seen_ids = BTreeSet::new();
    let mut names: BTreeMap<String, SweId> = BTreeMap::new();
    let mut aliases: BTreeMap<String, SweId> = BTreeMap::new();

    for entry in &registry.entries {
        if !seen_ids.insert(entry.id) {
            out.push(violation(entry.id, "duplicate id".to_string()));
        }
        if entry.id.0 < 100 {
            out.push(violation(entry.id, "ids start at 100"));
        }
        match entry.status {
            Status::Reserved => {
                let empty = entry.name.is_empty()
                    && entry.aliases.is_empty()
                    && entry.blockchains.is_empty()
                    && entry.source_languages.is_empty()
                    && entry.detectability.is_none()
                    && entry.cross_refs.is_empty()
                    && entry.default_severity.is_none()
                    && entry.description.is_empty()
                    && entry.elimination_reason.is_none()
                    && entry.cross_ref_target.is_empty();
                if !empty {
                    out.push(violation(entry.id, "reserved entry carries content"));
                }
                continue;
            }
            Status::Eliminated => {
                if entry.detectability != Some(Detectability::Manual) {
                    out.push(violation(entry.id, "eliminated entry must be manual-only"));
                }
                if entry
                    .elimination_reason
                    .as_deref()
                    .map_or(true, |r| r.trim().is_empty())
                {
                    out.push(violation(entry.id, "eliminated entry needs a reason"));
                }
            }
            Status::Active => {
                if entry.elimination_reason.is_some() {
                    out.push(violation(entry.id, "active entry has an elimination reason"));
                }
            }
        }
        if entry.name.is_empty() {
            out.push(violation(entry.id, "entry has no name"));
        }
        if entry.detectability.is_none() {
            out.push(violation(entry.id, "entry has no detectability"));
        }
        if entry.default_severity.is_none() {
            out.push(violation(entry.id, "entry has no default severity"));
        }
        match entry.detectability {
            Some(Detectability::CrossRef) => {
                if entry.cross_ref_target.is_empty() {
                    out.push(violation(entry.id, "cross-ref entry without a target"));
                }
            }
            _ => {
                if !entry.cross_ref_target.is_empty() {
                    out.push(violation(entry.id, "cross_ref_target on a non-cross-ref entry"));
                }
            }
        }
        if let Some(prev) = names.insert(normalize_key(&entry.name), entry.id) {
            out.push(violation(
                entry.id,
                format!("name also used by {prev}"),
            ));
        }
        for alias in &entry.aliases {
            if let Some(prev) = aliases.insert(normalize_key(alias), entry.id) {
                out.push(violation(
                    entry.id,
                    format!("alias {alias:?} also used by {prev}"),
                ));
            }
        }
    }
    for (alias, id) in &aliases {
        if let Some(owner) = names.get(alias) {
            out.push(violation(
                *id,
                format!("alias {alias:?} equals the canonical name of {owner}"),
            ));
        }
    }
    // Cross-ref targets must resolve to active entries.
    let by_id: BTreeMap<SweId, &RegistryEntry> =
        registry.entries.iter().map(|e| (e.id, e)).collect();
    for entry in &registry.entries {
        for target in &entry.cross_ref_target {
            match by_id.get(target) {
                Some(t) if t.status == Status::Active => {}
                _ => out.push(violation(
                    entry.id,
                    format!("cross-ref target {target} is not an active entry"),
                )),
            }
        }
    }
    // Census: the registry ships a fixed population.
    let active: Vec<u32> = registry
        .entries
        .iter()
        .filter(|e| e.status == Status::Active)
        .map(|e| e.id.0)
        .collect();
    let expected_active: Vec<u32> = (100..=104)
        .chain(std::iter::once(107))
        .chain(109..=129)
        .chain(132..=176)
        .collect();
    if active != expected_active {
        out.push(violation(
            None,
            format!("expected 72 active entries with the fixed id set, found {}", active.len()),
        ));
    }
    let reserved: Vec<u32> = registry
        .entries
        .iter()
        .filter(|e| e.status == Status::Reserved)
        .map(|e| e.id.0)
        .collect();
    if reserved != vec![105, 106, 108, 130, 131] {
        out.push(violation(None, "reserved block must be exactly 105, 106, 108, 130, 131"));
    }
    let eliminated = registry
        .entries
        .iter()
        .filter(|e| e.status == Status::Eliminated)
        .count();
    let eliminated_low = registry
        .entries
        .iter()
        .any(|e| e.status == Status::Eliminated && e.id.0 < 900);
    if eliminated != 11 || eliminated_low {
        out.push(violation(
            None,
            format!("expected 11 eliminated entries in the 900 block, found {eliminated}"),
        ));
    }
    out
}

/// Resolve a canonical id, bare number, name or alias to its entry.
/// Matching is case-insensitive with whitespace collapsed.
pub fn lookup_entry<'r>(registry: &'r Registry, key: &str) -> Result<&'r RegistryEntry, LookupError> {
    if let Some(id) = SweId::parse(key) {
        if let Some(entry) = registry.entries.iter().find(|e| e.id == id) {
            return if entry.status == Status::Reserved {
                Err(LookupError::Reserved(id))
            } else {
                Ok(entry)
            };
        }
        return Err(LookupError::NotFound(key.to_string()));
    }
    let needle = normalize_key(key);
    registry
        .entries
        .iter()
        .find(|e| {
            normalize_key(&e.name) == needle
                || e.aliases.iter().any(|a| normalize_key(a) == needle)
        })
        .ok_or_else(|| LookupError::NotFound(key.to_string()))
}

/// Entries matching every provided filter field, ascending by id.
pub fn list_entries<'r>(registry: &'r Registry, filter: &EntryFilter) -> Vec<&'r RegistryEntry> {
    registry
        .entries
        .iter()
        .filter(|e| {
            filter
                .blockchain
                .map_or(true, |b| e.blockchains.contains(&b))
                && filter.status.map_or(true, |s| e.status == s)
                && filter
                    .detectability
                    .map_or(true, |d| e.detectability == Some(d))
                && filter
                    .language
                    .map_or(true, |l| e.source_languages.contains(&l))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_registry_validates() {
        let reg = load_bundled();
        assert!(validate_registry(&reg).is_empty());
        let active = list_entries(
            &reg,
            &EntryFilter {
                status: Some(Status::Active),
                ..Default::default()
            },
        );
        assert_eq!(active.len(), 72);
        let eliminated = list_entries(
            &reg,
            &EntryFilter {
                status: Some(Status::Eliminated),
                ..Default::default()
            },
        );
        assert_eq!(eliminated.len(), 11);
        let reserved = list_entries(
            &reg,
            &EntryFilter {
                status: Some(Status::Reserved),
                ..Default::default()
            },
        );
        assert_eq!(reserved.len(), 5);
    }

    #[test]
    fn lookup_by_id_name_and_alias() {
        let reg = load_bundled();
        let e = lookup_entry(&reg, "SWE-116").unwrap();
        assert_eq!(e.name, "Block values as a proxy for time");
        assert_eq!(lookup_entry(&reg, "116").unwrap().id, SweId(116));
        assert_eq!(lookup_entry(&reg, "time manipulation").unwrap().id, SweId(116));
        assert_eq!(
            lookup_entry(&reg, "Block values as a PROXY for   time").unwrap().id,
            SweId(116)
        );
        assert_eq!(lookup_entry(&reg, "TOD").unwrap().id, SweId(114));
        assert_eq!(lookup_entry(&reg, "front-running").unwrap().id, SweId(114));
        assert_eq!(lookup_entry(&reg, "recursive call attack").unwrap().id, SweId(107));
        assert_eq!(lookup_entry(&reg, "call stack depth attack").unwrap().id, SweId(139));
    }

    #[test]
    fn reserved_id_is_a_distinct_error() {
        let reg = load_bundled();
        assert!(matches!(
            lookup_entry(&reg, "SWE-105"),
            Err(LookupError::Reserved(SweId(105)))
        ));
        assert!(matches!(
            lookup_entry(&reg, "SWE-999"),
            Err(LookupError::NotFound(_))
        ));
    }

    #[test]
    fn fabric_filter_is_the_fourteen_chaincode_entries() {
        let reg = load_bundled();
        let got: Vec<u32> = list_entries(
            &reg,
            &EntryFilter {
                blockchain: Some(Blockchain::HyperledgerFabric),
                status: Some(Status::Active),
                ..Default::default()
            },
        )
        .iter()
        .map(|e| e.id.0)
        .collect();
        assert_eq!(got, (162..=175).collect::<Vec<_>>());
    }

    #[test]
    fn eosio_filter() {
        let reg = load_bundled();
        let got: Vec<u32> = list_entries(
            &reg,
            &EntryFilter {
                blockchain: Some(Blockchain::Eosio),
                ..Default::default()
            },
        )
        .iter()
        .map(|e| e.id.0)
        .collect();
        assert_eq!(got, vec![149, 176]);
    }

    #[test]
    fn duplicate_id_rejected() {
        let src = r#"
[[entries]]
id = 116
name = "A"
status = "active"
detectability = "automated"
default_severity = "low"
description = "x"

[[entries]]
id = 116
name = "B"
status = "active"
detectability = "automated"
default_severity = "low"
description = "y"
"#;
        let err = load_registry(src).unwrap_err();
        match err {
            RegistryError::Invalid(vs) => {
                assert!(vs.iter().any(|v| v.message.contains("duplicate id")));
            }
            other => panic!("unexpected: {other}"),
        }
    }

    #[test]
    fn cross_ref_without_target_rejected() {
        let src = r#"
[[entries]]
id = 140
name = "X"
status = "active"
detectability = "cross-ref"
default_severity = "high"
description = "x"
"#;
        let err = load_registry(src).unwrap_err();
        match err {
            RegistryError::Invalid(vs) => {
                assert!(vs.iter().any(|v| v.message.contains("cross-ref entry without a target")));
            }
            other => panic!("unexpected: {other}"),
        }
    }

    #[test]
    fn alias_equal_to_name_rejected() {
        let mut reg = load_bundled();
        // Give 101 an alias equal to 116's canonical name.
        let idx = reg.entries.iter().position(|e| e.id == SweId(101)).unwrap();
        reg.entries[idx]
            .aliases
            .push("Block values as a proxy for time".to_string());
        let vs = validate_registry(&reg);
        assert!(vs.iter().any(|v| v.message.contains("equals the canonical name")));
    }

    #[test]
    fn eliminated_without_reason_rejected() {
        let mut reg = load_bundled();
        let idx = reg.entries.iter().position(|e| e.id == SweId(900)).unwrap();
        reg.entries[idx].elimination_reason = None;
        let vs = validate_registry(&reg);
        assert!(vs.iter().any(|v| v.message.contains("needs a reason")));
    }

    #[test]
    fn ids_strictly_increasing() {
        let reg = load_bundled();
        let ids: Vec<u32> = reg.entries.iter().map(|e| e.id.0).collect();
        let mut sorted = ids.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(ids, sorted);
    }

    #[test]
    fn export_round_trips() {
        let reg = load_bundled();
        let reloaded = load_registry(BUNDLED_REGISTRY).unwrap();
        assert_eq!(reg, reloaded);
    }
}
