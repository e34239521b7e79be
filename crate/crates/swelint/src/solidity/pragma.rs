//! Compiler-version pragma parsing and the admissible-version queries that
//! gate detector applicability.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Version {
    pub major: u32,
    pub minor: u32,
    pub patch: u32,
}

impl Version {
    pub const fn new(major: u32, minor: u32, patch: u32) -> Version {
        Version { major, minor, patch }
    }
}

impl fmt::Display for Version {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}.{}", self.major, self.minor, self.patch)
    }
}

/// A version with possibly missing components, as written in the source
/// (`0.4`, `0`, `0.4.*`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PartialVersion {
    pub major: Option<u32>,
    pub minor: Option<u32>,
    pub patch: Option<u32>,
}

impl PartialVersion {
    fn is_complete(&self) -> bool {
        self.major.is_some() && self.minor.is_some() && self.patch.is_some()
    }

    /// Missing components filled with zero; used as a comparison key.
    fn floor(&self) -> Version {
        Version::new(
            self.major.unwrap_or(0),
            self.minor.unwrap_or(0),
            self.patch.unwrap_or(0),
        )
    }

    fn matches(&self, v: Version) -> bool {
        self.major.map_or(true, |m| m == v.major)
            && self.minor.map_or(true, |m| m == v.minor)
            && self.patch.map_or(true, |p| p == v.patch)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparator {
    Exact,
    Caret,
    Tilde,
    Ge,
    Gt,
    Le,
    Lt,
    Wildcard,
    Range,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Clause {
    pub comparator: Comparator,
    pub version: PartialVersion,
    /// Upper end of a `a - b` range; unused otherwise.
    pub range_end: Option<PartialVersion>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PragmaConstraint {
    pub clauses: Vec<Clause>,
    pub floating: bool,
    /// Original pragma text, for diagnostics and findings.
    pub raw: String,
}

impl Clause {
    fn admits(&self, v: Version) -> bool {
        let base = self.version.floor();
        match self.comparator {
            Comparator::Wildcard => true,
            Comparator::Exact => self.version.matches(v),
            Comparator::Ge => v >= base,
            Comparator::Gt => v > base,
            Comparator::Le => v <= base,
            Comparator::Lt => v < base,
            Comparator::Caret => {
                let upper = if base.major > 0 {
                    Version::new(base.major + 1, 0, 0)
                } else {
                    Version::new(0, base.minor + 1, 0)
                };
                v >= base && v < upper
            }
            Comparator::Tilde => {
                let upper = Version::new(base.major, base.minor + 1, 0);
                v >= base && v < upper
            }
            Comparator::Range => {
                let end = self.range_end.map(|e| e.floor()).unwrap_or(base);
                v >= base && v <= end
            }
        }
    }
}

// The version grid probed for set queries. Wide enough for every compiler
// release the corpus can name.
fn version_grid() -> impl Iterator<Item = Version> {
    (0..=1).flat_map(|major| {
        (0..=30).flat_map(move |minor| (0..=99).map(move |patch| Version::new(major, minor, patch)))
    })
}

impl PragmaConstraint {
    /// True when every clause (ANDed) admits `v`.
    pub fn admits(&self, v: Version) -> bool {
        !self.clauses.is_empty() && self.clauses.iter().all(|c| c.admits(v))
    }

    /// True when some admissible version is strictly below `bound`.
    pub fn admits_any_below(&self, bound: Version) -> bool {
        version_grid().any(|v| v < bound && self.admits(v))
    }

    /// True when some version is admitted by both constraints.
    pub fn intersects(&self, other: &PragmaConstraint) -> bool {
        version_grid().any(|v| self.admits(v) && other.admits(v))
    }
}

fn parse_partial_version(text: &str) -> Option<PartialVersion> {
    let parts: Vec<&str> = text.split('.').collect();
    if parts.is_empty() || parts.len() > 3 {
        return None;
    }
    let mut components = [None, None, None];
    for (i, part) in parts.iter().enumerate() {
        if *part == "*" || part.is_empty() {
            continue;
        }
        components[i] = Some(part.parse().ok()?);
    }
    Some(PartialVersion {
        major: components[0],
        minor: components[1],
        patch: components[2],
    })
}

/// Parse one `pragma solidity ...;` directive. Unparseable constraints come
/// back as a floating wildcard with a diagnostic rather than an error: the
/// conservative reading keeps every version-gated rule applicable.
pub fn parse_pragma(line: &str) -> (PragmaConstraint, Option<String>) {
    let mut body = line.trim();
    if let Some(rest) = body.strip_prefix("pragma") {
        body = rest.trim_start();
    }
    if let Some(rest) = body.strip_prefix("solidity") {
        body = rest.trim_start();
    }
    let body = body.trim_end_matches(';').trim();

    // Split into operator-prefixed chunks. `-` between versions forms a range.
    let mut clauses = Vec::new();
    let mut diagnostic = None;
    let normalized = body
        .replace(">=", " >=")
        .replace("<=", " <=")
        .replace('^', " ^")
        .replace('~', " ~");
    // Re-split `>`/`<` that aren't part of >=/<=.
    let mut spaced = String::new();
    let chars: Vec<char> = normalized.chars().collect();
    for (i, &c) in chars.iter().enumerate() {
        if (c == '>' || c == '<') && chars.get(i + 1) != Some(&'=') {
            spaced.push(' ');
        }
        spaced.push(c);
    }
    let parts: Vec<&str> = spaced.split_whitespace().collect();
    let mut idx = 0;
    while idx < parts.len() {
        let part = parts[idx];
        idx += 1;
        let (comparator, vtext) = if let Some(v) = part.strip_prefix(">=") {
            (Comparator::Ge, v)
        } else if let Some(v) = part.strip_prefix("<=") {
            (Comparator::Le, v)
        } else if let Some(v) = part.strip_prefix('>') {
            (Comparator::Gt, v)
        } else if let Some(v) = part.strip_prefix('<') {
            (Comparator::Lt, v)
        } else if let Some(v) = part.strip_prefix('^') {
            (Comparator::Caret, v)
        } else if let Some(v) = part.strip_prefix('~') {
            (Comparator::Tilde, v)
        } else if part == "*" {
            clauses.push(Clause {
                comparator: Comparator::Wildcard,
                version: PartialVersion::default(),
                range_end: None,
            });
            continue;
        } else {
            (Comparator::Exact, part)
        };
        // a bare operator followed by its version in the next part
        let (vtext, consumed_next) = if vtext.is_empty() && idx < parts.len() {
            (parts[idx], true)
        } else {
            (vtext, false)
        };
        if consumed_next {
            idx += 1;
        }
        let Some(version) = parse_partial_version(vtext) else {
            diagnostic = Some(format!("unparseable version constraint {body:?}"));
            continue;
        };
        // `a - b` range form
        if comparator == Comparator::Exact && parts.get(idx) == Some(&"-") {
            idx += 1;
            let end = parts
                .get(idx)
                .and_then(|t| parse_partial_version(t));
            idx += 1;
            clauses.push(Clause {
                comparator: Comparator::Range,
                version,
                range_end: end,
            });
            continue;
        }
        let comparator = if comparator == Comparator::Exact && !version.is_complete() {
            // `0.4.*`, `0.4`, `0` admit every completion
            Comparator::Exact
        } else {
            comparator
        };
        clauses.push(Clause {
            comparator,
            version,
            range_end: None,
        });
    }

    if clauses.is_empty() {
        diagnostic = Some(format!("no version constraint in pragma {line:?}"));
        clauses.push(Clause {
            comparator: Comparator::Wildcard,
            version: PartialVersion::default(),
            range_end: None,
        });
    }

    let floating = clauses.len() > 1
        || clauses.iter().any(|c| {
            c.comparator != Comparator::Exact || !c.version.is_complete()
        });

    (
        PragmaConstraint {
            clauses,
            floating,
            raw: line.trim().to_string(),
        },
        diagnostic,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(line: &str) -> PragmaConstraint {
        parse_pragma(line).0
    }

    #[test]
    fn caret_is_floating() {
        let p = parse("pragma solidity ^0.4.14;");
        assert!(p.floating);
        assert_eq!(p.clauses.len(), 1);
        assert_eq!(p.clauses[0].comparator, Comparator::Caret);
        assert!(p.admits(Version::new(0, 4, 14)));
        assert!(p.admits(Version::new(0, 4, 26)));
        assert!(!p.admits(Version::new(0, 5, 0)));
    }

    #[test]
    fn exact_complete_is_fixed() {
        let p = parse("pragma solidity 0.8.0;");
        assert!(!p.floating);
        assert!(p.admits(Version::new(0, 8, 0)));
        assert!(!p.admits(Version::new(0, 8, 1)));
        assert!(!p.admits_any_below(Version::new(0, 8, 0)));
    }

    #[test]
    fn two_clauses_float() {
        let p = parse("pragma solidity >=0.4.24 <=0.5.3;");
        assert!(p.floating);
        assert_eq!(p.clauses.len(), 2);
        assert!(p.admits(Version::new(0, 5, 0)));
        assert!(!p.admits(Version::new(0, 5, 4)));
    }

    #[test]
    fn all_floating_fig_forms() {
        let floating_lines = [
            "pragma solidity >=0.4.0 < 0.6.0;",
            "pragma solidity >=0.4.0<0.6.0;",
            "pragma solidity >=0.4.14 <0.6.0;",
            "pragma solidity >0.4.13 <0.6.0;",
            "pragma solidity 0.4.24 - 0.5.2;",
            "pragma solidity >=0.4.24 <=0.5.3 ~0.4.20;",
            "pragma solidity <0.4.26;",
            "pragma solidity ~0.4.20;",
            "pragma solidity ^0.4.14;",
            "pragma solidity 0.4.*;",
            "pragma solidity 0.*;",
            "pragma solidity *;",
            "pragma solidity 0.4;",
            "pragma solidity 0;",
        ];
        for line in floating_lines {
            assert!(parse(line).floating, "{line} should float");
        }
        assert!(!parse("pragma solidity 0.8.0;").floating);
    }

    #[test]
    fn range_form_bounds() {
        let p = parse("pragma solidity 0.4.24 - 0.5.2;");
        assert!(p.admits(Version::new(0, 4, 24)));
        assert!(p.admits(Version::new(0, 5, 2)));
        assert!(!p.admits(Version::new(0, 5, 3)));
        assert!(!p.admits(Version::new(0, 4, 23)));
    }

    #[test]
    fn partial_exact_admits_completions() {
        let p = parse("pragma solidity 0.4;");
        assert!(p.floating);
        assert!(p.admits(Version::new(0, 4, 0)));
        assert!(p.admits(Version::new(0, 4, 26)));
        assert!(!p.admits(Version::new(0, 5, 0)));
    }

    #[test]
    fn unparseable_is_conservative() {
        let (p, diag) = parse_pragma("pragma solidity banana;");
        assert!(p.floating);
        assert!(diag.is_some());
        assert!(p.admits(Version::new(0, 4, 0)));
    }

    #[test]
    fn intersection_queries() {
        let old = parse("pragma solidity ^0.4.19;");
        let affected = parse("pragma solidity <0.6.0;");
        let modern = parse("pragma solidity 0.8.0;");
        assert!(old.intersects(&affected));
        assert!(affected.intersects(&old));
        assert!(!modern.intersects(&affected));
    }

    #[test]
    fn admits_any_below_queries() {
        assert!(parse("pragma solidity ^0.4.19;").admits_any_below(Version::new(0, 8, 0)));
        assert!(!parse("pragma solidity 0.8.0;").admits_any_below(Version::new(0, 8, 0)));
        assert!(parse("pragma solidity 0.4.22;").admits(Version::new(0, 4, 22)));
    }
}
