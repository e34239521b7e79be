//! Detector driver: applicability gating, per-file and cross-file rule
//! evaluation, overlap precedence, suppression comments, and report
//! rendering.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::{json, Value};

use crate::config::{OutputFormat, ScanConfig};
use crate::registry::{Severity, SweId};
use crate::rules;
use crate::solidity::pragma::{PragmaConstraint, Version};
use crate::solidity::token::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Language {
    Solidity,
    GoChaincode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Confidence {
    Low,
    Medium,
    High,
}

impl Confidence {
    pub fn as_str(&self) -> &'static str {
        match self {
            Confidence::Low => "low",
            Confidence::Medium => "medium",
            Confidence::High => "high",
        }
    }
}

/// Pragma predicate deciding whether a rule applies to a file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Applicability {
    Always,
    /// Some admissible version is strictly below the bound.
    AdmitsAnyBelow(Version),
    /// The specific version is admissible.
    Admits(Version),
}

#[derive(Debug, Clone)]
pub struct DetectorRule {
    pub id: SweId,
    pub name: &'static str,
    pub trigger: &'static str,
    pub applicability: Applicability,
    pub default_severity: Severity,
    pub confidence: Confidence,
    pub language: Language,
}

/// Evaluate a rule's pragma predicate. An absent pragma admits every rule.
pub fn applicable(rule: &DetectorRule, pragma: Option<&PragmaConstraint>) -> bool {
    let Some(pragma) = pragma else {
        return true;
    };
    match rule.applicability {
        Applicability::Always => true,
        Applicability::AdmitsAnyBelow(bound) => pragma.admits_any_below(bound),
        Applicability::Admits(v) => pragma.admits(v),
    }
}

/// File-level gate: applicable if any pragma admits the rule, or none exist.
pub fn applicable_to_file(rule: &DetectorRule, pragmas: &[PragmaConstraint]) -> bool {
    if pragmas.is_empty() {
        return true;
    }
    pragmas.iter().any(|p| applicable(rule, Some(p)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Finding {
    pub rule_id: SweId,
    pub severity: Severity,
    pub confidence: Confidence,
    pub path: String,
    pub span: Span,
    pub end_line: u32,
    pub end_column: u32,
    pub construct: String,
    pub message: String,
    pub snippet: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub path: String,
    pub line: u32,
    pub column: u32,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct ScanReport {
    pub findings: Vec<Finding>,
    pub files_scanned: usize,
    pub parse_diagnostics: Vec<Diagnostic>,
    pub rule_stats: BTreeMap<SweId, usize>,
    pub tool_version: String,
}

/// One file handed to the engine.
#[derive(Debug, Clone)]
pub struct ScanInput {
    pub path: String,
    pub source: String,
    pub language: Language,
}

/// Collects findings for one rule over one file, filling in severity,
/// confidence, snippet, and end positions.
pub struct Emitter<'a> {
    meta: &'a DetectorRule,
    config: &'a ScanConfig,
    path: &'a str,
    source: &'a str,
    findings: &'a mut Vec<Finding>,
}

impl<'a> Emitter<'a> {
    pub fn new(
        meta: &'a DetectorRule,
        config: &'a ScanConfig,
        path: &'a str,
        source: &'a str,
        findings: &'a mut Vec<Finding>,
    ) -> Emitter<'a> {
        Emitter {
            meta,
            config,
            path,
            source,
            findings,
        }
    }

    pub fn emit(&mut self, span: Span, construct: impl Into<String>, message: impl Into<String>) {
        self.emit_with_severity(
            span,
            construct,
            message,
            self.config
                .effective_severity(self.meta.id, self.meta.default_severity),
        );
    }

    /// Used by SWE-153, whose severity comes from the matched advisory.
    pub fn emit_with_severity(
        &mut self,
        span: Span,
        construct: impl Into<String>,
        message: impl Into<String>,
        severity: Severity,
    ) {
        let (end_line, end_column) = end_position(self.source, span);
        self.findings.push(Finding {
            rule_id: self.meta.id,
            severity,
            confidence: self.meta.confidence,
            path: self.path.to_string(),
            span,
            end_line,
            end_column,
            construct: construct.into(),
            message: message.into(),
            snippet: line_text(self.source, span.line),
        });
    }
}

fn end_position(source: &str, span: Span) -> (u32, u32) {
    let end = span.end_offset().min(source.len());
    let text = &source[span.offset.min(end)..end];
    let newlines = text.matches('\n').count() as u32;
    if newlines == 0 {
        (span.line, span.column + span.len as u32)
    } else {
        let last = text.rsplit('\n').next().unwrap_or("");
        (span.line + newlines, 1 + last.len() as u32)
    }
}

fn line_text(source: &str, line: u32) -> String {
    source
        .lines()
        .nth(line.saturating_sub(1) as usize)
        .unwrap_or("")
        .trim()
        .to_string()
}

/// Run the full scan. Per-file evaluation may run in parallel; the merge,
/// precedence, and ordering steps are deterministic regardless of schedule.
pub fn run_scan(inputs: &[ScanInput], config: &ScanConfig) -> ScanReport {
    let solidity_inputs: Vec<&ScanInput> = inputs
        .iter()
        .filter(|i| i.language == Language::Solidity)
        .collect();
    let chaincode_inputs: Vec<&ScanInput> = inputs
        .iter()
        .filter(|i| i.language == Language::GoChaincode)
        .collect();

    let units: Vec<crate::solidity::SourceUnit> = map_inputs(&solidity_inputs, |input| {
        crate::solidity::parse_source(&input.source, &input.path)
    });
    let unit_refs: Vec<&crate::solidity::SourceUnit> = units.iter().collect();

    let mut findings: Vec<Finding> = Vec::new();
    let mut diagnostics: Vec<Diagnostic> = Vec::new();

    let per_file: Vec<(Vec<Finding>, Vec<Diagnostic>)> =
        map_inputs(&solidity_inputs, |input| {
            let idx = solidity_inputs
                .iter()
                .position(|i| std::ptr::eq(*i, *input))
                .unwrap();
            let unit = &units[idx];
            let symbols = crate::solidity::resolve(unit, &unit_refs);
            let mut file_findings = Vec::new();
            let mut file_diags = Vec::new();
            for (span, msg) in &unit.parse_diagnostics {
                file_diags.push(Diagnostic {
                    path: input.path.clone(),
                    line: span.line,
                    column: span.column,
                    message: msg.clone(),
                });
            }
            for msg in &symbols.diagnostics {
                file_diags.push(Diagnostic {
                    path: input.path.clone(),
                    line: 0,
                    column: 0,
                    message: msg.clone(),
                });
            }
            let ctx = rules::solidity::FileCtx {
                unit,
                source: &input.source,
                symbols: &symbols,
                config,
            };
            for rule in rules::solidity::per_file_rules() {
                if !config.rule_enabled(rule.meta.id) {
                    continue;
                }
                if !applicable_to_file(&rule.meta, &pragma_list(unit)) {
                    continue;
                }
                let mut emitter =
                    Emitter::new(&rule.meta, config, &input.path, &input.source, &mut file_findings);
                (rule.run)(&ctx, &mut emitter);
            }
            (file_findings, file_diags)
        });
    for (f, d) in per_file {
        findings.extend(f);
        diagnostics.extend(d);
    }

    // cross-file rules over the merged immutable index
    rules::solidity::run_cross_file(&solidity_inputs, &units, config, &mut findings);

    let chaincode_results: Vec<(Vec<Finding>, Vec<Diagnostic>)> =
        map_inputs(&chaincode_inputs, |input| {
            let (file, parse_diags) = rules::chaincode::parse_chaincode(&input.source, &input.path);
            let mut file_findings = Vec::new();
            let mut file_diags: Vec<Diagnostic> = parse_diags
                .into_iter()
                .map(|(line, message)| Diagnostic {
                    path: input.path.clone(),
                    line,
                    column: 1,
                    message,
                })
                .collect();
            for rule in rules::chaincode::rules() {
                if !config.rule_enabled(rule.meta.id) {
                    continue;
                }
                let mut emitter =
                    Emitter::new(&rule.meta, config, &input.path, &input.source, &mut file_findings);
                (rule.run)(&file, config, &mut emitter);
            }
            file_diags.sort_by_key(|d| d.line);
            (file_findings, file_diags)
        });
    for (f, d) in chaincode_results {
        findings.extend(f);
        diagnostics.extend(d);
    }

    apply_precedence(&mut findings);
    dedup(&mut findings);
    attach_cross_reference_notes(&mut findings);
    sort_findings(&mut findings);

    let mut rule_stats: BTreeMap<SweId, usize> = BTreeMap::new();
    for f in &findings {
        *rule_stats.entry(f.rule_id).or_default() += 1;
    }

    if config.honor_suppressions {
        let mut sources: BTreeMap<&str, &str> = BTreeMap::new();
        for input in inputs {
            sources.insert(&input.path, &input.source);
        }
        findings = suppress(findings, &sources, &mut diagnostics);
    }

    diagnostics.sort_by(|a, b| (&a.path, a.line, a.column, &a.message).cmp(&(&b.path, b.line, b.column, &b.message)));

    ScanReport {
        findings,
        files_scanned: inputs.len(),
        parse_diagnostics: diagnostics,
        rule_stats,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
    }
}

#[cfg(feature = "parallel")]
fn map_inputs<'a, T, R, F>(items: &'a [T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&'a T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_inputs<'a, T, R, F>(items: &'a [T], f: F) -> Vec<R>
where
    F: Fn(&'a T) -> R,
{
    items.iter().map(f).collect()
}

fn pragma_list(unit: &crate::solidity::SourceUnit) -> Vec<PragmaConstraint> {
    unit.pragmas.iter().map(|(p, _)| p.clone()).collect()
}

/// SWE-113 claims ether sends in loops over SWE-157; SWE-126 claims payload
/// calls over SWE-104. The suppressed finding must overlap the winner's span.
fn apply_precedence(findings: &mut Vec<Finding>) {
    let pairs: &[(u32, u32)] = &[(113, 157), (126, 104)];
    for &(winner, loser) in pairs {
        let winners: Vec<(String, Span)> = findings
            .iter()
            .filter(|f| f.rule_id.0 == winner)
            .map(|f| (f.path.clone(), f.span))
            .collect();
        findings.retain(|f| {
            f.rule_id.0 != loser
                || !winners.iter().any(|(path, span)| {
                    *path == f.path
                        && f.span.offset < span.end_offset()
                        && span.offset < f.span.end_offset()
                })
        });
    }
}

fn dedup(findings: &mut Vec<Finding>) {
    let mut seen: BTreeSet<(u32, String, usize, usize)> = BTreeSet::new();
    findings.retain(|f| seen.insert((f.rule_id.0, f.path.clone(), f.span.offset, f.span.len)));
}

/// SWE-155/156 findings carry a pointer at the lost-ether entry instead of a
/// separate SWE-145 finding.
fn attach_cross_reference_notes(findings: &mut [Finding]) {
    for f in findings.iter_mut() {
        if matches!(f.rule_id.0, 155 | 156) && !f.message.contains("SWE-145") {
            f.message
                .push_str("; see SWE-145: ether sent to an orphan address is unrecoverable");
        }
    }
}

fn sort_findings(findings: &mut [Finding]) {
    findings.sort_by(|a, b| {
        (&a.path, a.span.offset, a.rule_id.0, &a.message).cmp(&(
            &b.path,
            b.span.offset,
            b.rule_id.0,
            &b.message,
        ))
    });
}

/// Remove findings whose preceding line carries a matching suppression
/// comment: `// swelint-disable-next-line <SWE-id>[,<SWE-id>...]|all`.
pub fn suppress(
    findings: Vec<Finding>,
    sources: &BTreeMap<&str, &str>,
    diagnostics: &mut Vec<Diagnostic>,
) -> Vec<Finding> {
    const MARKER: &str = "swelint-disable-next-line";
    // per path: line number of the comment -> suppressed ids (None = all)
    let mut suppressions: BTreeMap<&str, BTreeMap<u32, Option<BTreeSet<u32>>>> = BTreeMap::new();
    for (path, source) in sources {
        let mut per_line = BTreeMap::new();
        for (lineno, line) in source.lines().enumerate() {
            let trimmed = line.trim_start();
            let Some(rest) = trimmed.strip_prefix("//") else {
                continue;
            };
            let rest = rest.trim_start();
            let Some(spec) = rest.strip_prefix(MARKER) else {
                continue;
            };
            let spec = spec.trim();
            let lineno = lineno as u32 + 1;
            if spec == "all" {
                per_line.insert(lineno, None);
                continue;
            }
            let mut ids = BTreeSet::new();
            let mut ok = !spec.is_empty();
            for part in spec.split(',') {
                match SweId::parse(part.trim()) {
                    Some(id) => {
                        ids.insert(id.0);
                    }
                    None => ok = false,
                }
            }
            if ok {
                per_line.insert(lineno, Some(ids));
            } else {
                diagnostics.push(Diagnostic {
                    path: path.to_string(),
                    line: lineno,
                    column: 1,
                    message: format!("malformed suppression comment: {trimmed:?}"),
                });
            }
        }
        suppressions.insert(path, per_line);
    }
    findings
        .into_iter()
        .filter(|f| {
            let Some(per_line) = suppressions.get(f.path.as_str()) else {
                return true;
            };
            match per_line.get(&(f.span.line.saturating_sub(1))) {
                Some(None) => false,
                Some(Some(ids)) => !ids.contains(&f.rule_id.0),
                None => true,
            }
        })
        .collect()
}

/// Render a report. Returns the output bytes and the process exit code:
/// 0 when no finding meets the fail-on threshold, 1 otherwise.
pub fn render(report: &ScanReport, format: OutputFormat, fail_on: Severity) -> (Vec<u8>, i32) {
    let failing = report.findings.iter().any(|f| f.severity >= fail_on);
    let code = i32::from(failing);
    let bytes = match format {
        OutputFormat::Text => {
            let mut out = String::new();
            for f in &report.findings {
                out.push_str(&format!(
                    "{}:{}:{} {} {} {}\n",
                    f.path,
                    f.span.line,
                    f.span.column,
                    f.rule_id,
                    severity_str(f.severity),
                    f.message
                ));
            }
            out.into_bytes()
        }
        OutputFormat::Json => {
            let mut out = serde_json::to_vec_pretty(&report_json(report)).unwrap();
            out.push(b'\n');
            out
        }
    };
    (bytes, code)
}

fn severity_str(s: Severity) -> &'static str {
    match s {
        Severity::High => "high",
        Severity::Medium => "medium",
        Severity::Low => "low",
        Severity::Info => "info",
    }
}

fn report_json(report: &ScanReport) -> Value {
    let findings: Vec<Value> = report
        .findings
        .iter()
        .map(|f| {
            json!({
                "rule": f.rule_id.to_string(),
                "severity": severity_str(f.severity),
                "confidence": f.confidence.as_str(),
                "path": f.path,
                "line": f.span.line,
                "column": f.span.column,
                "end_line": f.end_line,
                "end_column": f.end_column,
                "construct": f.construct,
                "message": f.message,
                "snippet": f.snippet,
            })
        })
        .collect();
    let diagnostics: Vec<Value> = report
        .parse_diagnostics
        .iter()
        .map(|d| {
            json!({
                "path": d.path,
                "line": d.line,
                "column": d.column,
                "message": d.message,
            })
        })
        .collect();
    let rule_stats: BTreeMap<String, usize> = report
        .rule_stats
        .iter()
        .map(|(id, n)| (id.to_string(), *n))
        .collect();
    json!({
        "tool_version": report.tool_version,
        "files_scanned": report.files_scanned,
        "findings": findings,
        "diagnostics": diagnostics,
        "rule_stats": rule_stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solidity::parse_pragma;

    fn rule(applicability: Applicability) -> DetectorRule {
        DetectorRule {
            id: SweId(101),
            name: "test",
            trigger: "test",
            applicability,
            default_severity: Severity::High,
            confidence: Confidence::Medium,
            language: Language::Solidity,
        }
    }

    #[test]
    fn applicability_gating() {
        let below_080 = rule(Applicability::AdmitsAnyBelow(Version::new(0, 8, 0)));
        let caret = parse_pragma("pragma solidity ^0.4.19;").0;
        let fixed = parse_pragma("pragma solidity 0.8.0;").0;
        assert!(applicable(&below_080, Some(&caret)));
        assert!(!applicable(&below_080, Some(&fixed)));
        assert!(applicable(&below_080, None));

        let admits_0422 = rule(Applicability::Admits(Version::new(0, 4, 22)));
        let exact = parse_pragma("pragma solidity 0.4.22;").0;
        assert!(applicable(&admits_0422, Some(&exact)));
        assert!(!applicable(&admits_0422, Some(&fixed)));
    }

    fn finding(rule: u32, path: &str, line: u32, offset: usize) -> Finding {
        Finding {
            rule_id: SweId(rule),
            severity: Severity::High,
            confidence: Confidence::High,
            path: path.to_string(),
            span: Span {
                line,
                column: 1,
                offset,
                len: 10,
            },
            end_line: line,
            end_column: 11,
            construct: "c".to_string(),
            message: "m".to_string(),
            snippet: "s".to_string(),
        }
    }

    #[test]
    fn precedence_and_dedup() {
        let mut findings = vec![
            finding(113, "a.sol", 5, 100),
            finding(157, "a.sol", 5, 100),
            finding(157, "b.sol", 5, 100),
            finding(104, "a.sol", 9, 300),
            finding(126, "a.sol", 9, 300),
            finding(126, "a.sol", 9, 300),
        ];
        apply_precedence(&mut findings);
        dedup(&mut findings);
        let ids: Vec<(u32, &str)> = findings
            .iter()
            .map(|f| (f.rule_id.0, f.path.as_str()))
            .collect();
        assert_eq!(ids, [(113, "a.sol"), (157, "b.sol"), (126, "a.sol")]);
    }

    #[test]
    fn suppression_grammar() {
        let source = "line one\n// swelint-disable-next-line SWE-116\nflagged here\n// swelint-disable-next-line all\nalso flagged\n// swelint-disable-next-line bogus\nkept\n";
        let mut sources = BTreeMap::new();
        sources.insert("x.sol", source);
        let findings = vec![
            finding(116, "x.sol", 3, 0),
            finding(107, "x.sol", 3, 0),
            finding(116, "x.sol", 5, 50),
            finding(116, "x.sol", 7, 90),
        ];
        let mut diags = Vec::new();
        let kept = suppress(findings, &sources, &mut diags);
        let ids: Vec<(u32, u32)> = kept.iter().map(|f| (f.rule_id.0, f.span.line)).collect();
        // the named suppression removes only SWE-116; `all` removes line 5;
        // the malformed comment suppresses nothing and is diagnosed
        assert_eq!(ids, [(107, 3), (116, 7)]);
        assert_eq!(diags.len(), 1);
        assert!(diags[0].message.contains("malformed"));
    }

    #[test]
    fn exit_codes() {
        let empty = ScanReport {
            findings: Vec::new(),
            files_scanned: 0,
            parse_diagnostics: Vec::new(),
            rule_stats: BTreeMap::new(),
            tool_version: "0".to_string(),
        };
        assert_eq!(render(&empty, OutputFormat::Text, Severity::High).1, 0);

        let mut one_high = empty.clone();
        one_high.findings.push(finding(107, "a.sol", 1, 0));
        assert_eq!(render(&one_high, OutputFormat::Text, Severity::High).1, 1);

        let mut one_low = empty.clone();
        one_low.findings.push(Finding {
            severity: Severity::Low,
            ..finding(116, "a.sol", 1, 0)
        });
        assert_eq!(render(&one_low, OutputFormat::Text, Severity::High).1, 0);
        assert_eq!(render(&one_low, OutputFormat::Text, Severity::Low).1, 1);
    }

    #[test]
    fn text_render_format() {
        let mut report = ScanReport {
            findings: Vec::new(),
            files_scanned: 1,
            parse_diagnostics: Vec::new(),
            rule_stats: BTreeMap::new(),
            tool_version: "0".to_string(),
        };
        report.findings.push(finding(116, "fig12.sol", 6, 120));
        let (bytes, _) = render(&report, OutputFormat::Text, Severity::High);
        assert_eq!(String::from_utf8(bytes).unwrap(), "fig12.sol:6:1 SWE-116 high m\n");
    }
}
