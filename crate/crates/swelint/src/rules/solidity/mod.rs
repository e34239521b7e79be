//! The Solidity detector catalog, plus the selector computation used by the
//! function-clashing rule.

pub mod helpers;
pub mod selector;

mod checks_a;
mod checks_b;
mod checks_c;
mod cross;

use crate::config::ScanConfig;
use crate::engine::{
    applicable_to_file, Applicability, Confidence, DetectorRule, Emitter, Finding, Language,
    ScanInput,
};
use crate::registry::{Severity, SweId};
use crate::solidity::pragma::Version;
use crate::solidity::symbols::{ContractInfo, SymbolTable};
use crate::solidity::SourceUnit;

pub use selector::{find_selector_clashes, selector, SelectorEntry};

/// Everything a per-file rule may look at.
pub struct FileCtx<'a> {
    pub unit: &'a SourceUnit,
    pub source: &'a str,
    pub symbols: &'a SymbolTable,
    pub config: &'a ScanConfig,
}

impl<'a> FileCtx<'a> {
    pub fn contract_info(&self, name: &str) -> Option<&ContractInfo> {
        self.symbols.contract(name)
    }
}

pub struct SolidityRule {
    pub meta: DetectorRule,
    pub run: fn(&FileCtx, &mut Emitter),
}

const V0_4_22: Version = Version::new(0, 4, 22);
const V0_5_0: Version = Version::new(0, 5, 0);
const V0_6_0: Version = Version::new(0, 6, 0);
const V0_8_0: Version = Version::new(0, 8, 0);

fn meta(
    id: u32,
    name: &'static str,
    trigger: &'static str,
    applicability: Applicability,
    default_severity: Severity,
    confidence: Confidence,
) -> DetectorRule {
    DetectorRule {
        id: SweId(id),
        name,
        trigger,
        applicability,
        default_severity,
        confidence,
        language: Language::Solidity,
    }
}

/// The per-file rules in id order. SWE-123 and SWE-158 are cross-file and
/// live in [`cross_file_metas`].
pub fn per_file_rules() -> Vec<SolidityRule> {
    use Applicability::{Admits, AdmitsAnyBelow, Always};
    use Confidence as C;
    use Severity as S;
    let r = |meta, run| SolidityRule { meta, run };
    vec![
        r(
            meta(100, "Function or state variable default visibility",
                "function or state variable with unspecified visibility",
                AdmitsAnyBelow(V0_5_0), S::Medium, C::High),
            checks_a::swe_100,
        ),
        r(
            meta(101, "Integer Overflow and Underflow",
                "unguarded arithmetic on integer operands",
                AdmitsAnyBelow(V0_8_0), S::High, C::Medium),
            checks_a::swe_101,
        ),
        r(
            meta(102, "Outdated Compiler Version",
                "pragma admits a version below the configured minimum",
                Always, S::Info, C::High),
            checks_a::swe_102,
        ),
        r(
            meta(103, "Floating compiler version",
                "pragma constraint admits more than one version",
                Always, S::Info, C::High),
            checks_a::swe_103,
        ),
        r(
            meta(104, "Unchecked Call Return Value",
                "low-level call whose result is not consumed",
                Always, S::High, C::High),
            checks_a::swe_104,
        ),
        r(
            meta(107, "Reentrancy",
                "gas-forwarding external call before a storage write",
                Always, S::High, C::Medium),
            checks_a::swe_107,
        ),
        r(
            meta(109, "Uninitialized Storage Pointer",
                "local struct/array declaration without location or initializer",
                AdmitsAnyBelow(V0_5_0), S::High, C::High),
            checks_a::swe_109,
        ),
        r(
            meta(110, "Assert Violation",
                "assert condition referencing inputs",
                Always, S::Low, C::Medium),
            checks_a::swe_110,
        ),
        r(
            meta(111, "Use of Deprecated Solidity Functions",
                "deprecated identifier or construct",
                Always, S::Info, C::High),
            checks_a::swe_111,
        ),
        r(
            meta(112, "Delegatecall to Untrusted Callee",
                "delegatecall target derived from a parameter or writable storage",
                Always, S::High, C::Medium),
            checks_a::swe_112,
        ),
        r(
            meta(113, "DoS with Failed Call",
                "ether-sending operation inside a loop",
                Always, S::Medium, C::High),
            checks_a::swe_113,
        ),
        r(
            meta(114, "Transaction Order Dependence",
                "ether transfer guarded by parameter/storage equality",
                Always, S::Medium, C::Low),
            checks_a::swe_114,
        ),
        r(
            meta(115, "Authorization through tx.origin",
                "tx.origin compared with an address in a condition",
                Always, S::High, C::High),
            checks_a::swe_115,
        ),
        r(
            meta(116, "Block values as a proxy for time",
                "block timestamp/number in a comparison or branch condition",
                Always, S::Low, C::Medium),
            checks_a::swe_116,
        ),
        r(
            meta(117, "Signature Malleability",
                "ecrecover with unconstrained s argument",
                Always, S::Medium, C::Low),
            checks_a::swe_117,
        ),
        r(
            meta(118, "Incorrect Constructor Name",
                "case-mismatched constructor-name function",
                AdmitsAnyBelow(V0_4_22), S::High, C::High),
            checks_a::swe_118,
        ),
        r(
            meta(119, "Shadowing State Variables",
                "shadowing pair in the symbol table",
                Always, S::Medium, C::High),
            checks_a::swe_119,
        ),
        r(
            meta(120, "Weak Sources of Randomness from Chain Attributes",
                "block attribute in modulo arithmetic or hash input",
                Always, S::High, C::Medium),
            checks_b::swe_120,
        ),
        r(
            meta(121, "Missing Protection against Signature Replay Attacks",
                "ecrecover without a digested-hash bookkeeping write",
                Always, S::Medium, C::Low),
            checks_b::swe_121,
        ),
        r(
            meta(124, "Write to Arbitrary Storage Location",
                "parameter-derived storage-array index without bounds check",
                Always, S::High, C::Low),
            checks_b::swe_124,
        ),
        r(
            meta(125, "Incorrect Inheritance Order",
                "two or more bases declare the same function signature",
                Always, S::Info, C::Medium),
            checks_b::swe_125,
        ),
        r(
            meta(126, "Insufficient Gas Griefing",
                "unchecked low-level call carrying an encoded sub-call payload",
                Always, S::Medium, C::Medium),
            checks_b::swe_126,
        ),
        r(
            meta(127, "Arbitrary Jump with Function Type Variable",
                "mstore assembly plus a function-type declaration",
                Always, S::High, C::Medium),
            checks_b::swe_127,
        ),
        r(
            meta(128, "DoS With Block Gas Limit",
                "storage-array-length-bounded loop writing storage",
                Always, S::Medium, C::Medium),
            checks_b::swe_128,
        ),
        r(
            meta(129, "Typographical Error",
                "the =+ / =- adjacency lexeme",
                Always, S::High, C::High),
            checks_b::swe_129,
        ),
        r(
            meta(132, "Unexpected balance",
                "strict balance equality or msg.value-only accumulator",
                Always, S::Medium, C::Low),
            checks_b::swe_132,
        ),
        r(
            meta(133, "Hash collisions with multiple variable length arguments",
                "encodePacked with two or more dynamic arguments",
                Always, S::High, C::High),
            checks_b::swe_133,
        ),
        r(
            meta(134, "Message call with hardcoded gas amount",
                "gas call option set to an integer literal",
                Always, S::Low, C::High),
            checks_b::swe_134,
        ),
        r(
            meta(135, "Code with no effects",
                "statement with no effect (missing invocation or bare comparison)",
                Always, S::Medium, C::High),
            checks_b::swe_135,
        ),
        r(
            meta(136, "Unencrypted Private Data On-Chain",
                "secret-named non-public state variable",
                Always, S::Info, C::Low),
            checks_b::swe_136,
        ),
        r(
            meta(137, "Access control management",
                "sensitive operation without any access control",
                Always, S::High, C::Medium),
            checks_b::swe_137,
        ),
        r(
            meta(138, "Locked money",
                "payable functions with no ether egress anywhere",
                Always, S::Medium, C::High),
            checks_b::swe_138,
        ),
        r(
            meta(141, "Dynamic library",
                "delegatecall target held in updatable storage",
                Always, S::Medium, C::Medium),
            checks_c::swe_141,
        ),
        r(
            meta(142, "Type cast",
                "contract-type cast of an address parameter or storage variable",
                Always, S::Info, C::Low),
            checks_c::swe_142,
        ),
        r(
            meta(143, "Call to the unknown",
                "ether sent to a storage-held or parameter address",
                Always, S::Medium, C::Low),
            checks_c::swe_143,
        ),
        r(
            meta(144, "Assembly-based vulnerabilities",
                "any inline assembly region",
                Always, S::Info, C::High),
            checks_c::swe_144,
        ),
        r(
            meta(146, "double constructor",
                "both constructor keyword and contract-name function",
                Admits(V0_4_22), S::High, C::High),
            checks_c::swe_146,
        ),
        r(
            meta(148, "improper or missing event handling",
                "token-style state change without an emitted event",
                Always, S::Low, C::Medium),
            checks_c::swe_148,
        ),
        r(
            meta(150, "Money leak",
                "literal division truncation in a payment amount",
                Always, S::Medium, C::Low),
            checks_c::swe_150,
        ),
        r(
            meta(151, "Unchecked division",
                "non-literal denominator with no nonzero guard",
                Always, S::Medium, C::Medium),
            checks_c::swe_151,
        ),
        r(
            meta(152, "Token API violation",
                "ERC-20 function without bool return or with an amount bound",
                Always, S::Medium, C::Medium),
            checks_c::swe_152,
        ),
        r(
            meta(153, "Using components with known vulnerabilities",
                "import matching a bundled advisory",
                Always, S::Medium, C::Medium),
            checks_c::swe_153,
        ),
        r(
            meta(154, "Built-in symbol shadowing",
                "declaration named after a language built-in",
                Always, S::Medium, C::High),
            checks_c::swe_154,
        ),
        r(
            meta(155, "Hardcoded addresses",
                "address literal in executable code or initializer",
                Always, S::Low, C::High),
            checks_c::swe_155,
        ),
        r(
            meta(156, "Send to zero address",
                "address parameter used for funds without a zero-address check",
                Always, S::Low, C::Medium),
            checks_c::swe_156,
        ),
        r(
            meta(157, "Multiple calls in a single transaction",
                "external call inside a loop",
                Always, S::Medium, C::Medium),
            checks_c::swe_157,
        ),
        r(
            meta(160, "Identity verification",
                "code-size-based caller check",
                Always, S::Medium, C::Medium),
            checks_c::swe_160,
        ),
        r(
            meta(161, "Array length manipulation",
                "direct write to an array length member",
                AdmitsAnyBelow(V0_6_0), S::High, C::High),
            checks_c::swe_161,
        ),
    ]
}

/// Metadata of the two cross-file rules.
pub fn cross_file_metas() -> Vec<DetectorRule> {
    vec![
        meta(
            123,
            "Requirement violation by the called smart contract",
            "literal argument provably violating the callee's first require",
            Applicability::Always,
            Severity::Medium,
            Confidence::High,
        ),
        meta(
            158,
            "Function clashing",
            "two distinct signatures sharing a 4-byte selector",
            Applicability::Always,
            Severity::High,
            Confidence::High,
        ),
    ]
}

/// The complete catalog: exactly the 50 implemented detectors, id order.
pub fn solidity_rule_set() -> Vec<DetectorRule> {
    let mut metas: Vec<DetectorRule> = per_file_rules().into_iter().map(|r| r.meta).collect();
    metas.extend(cross_file_metas());
    metas.sort_by_key(|m| m.id);
    metas
}

/// Run SWE-123 and SWE-158 over the merged index of all scanned units.
pub fn run_cross_file(
    inputs: &[&ScanInput],
    units: &[SourceUnit],
    config: &ScanConfig,
    findings: &mut Vec<Finding>,
) {
    for rule in cross_file_metas() {
        if !config.rule_enabled(rule.id) {
            continue;
        }
        match rule.id.0 {
            123 => cross::requirement_violations(inputs, units, &rule, config, findings),
            158 => cross::selector_clashes(inputs, units, &rule, config, findings),
            _ => unreachable!(),
        }
    }
    // cross-file rules still honor per-file pragma gating if any is not Always
    let _ = applicable_to_file;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_has_exactly_fifty_rules() {
        let rules = solidity_rule_set();
        assert_eq!(rules.len(), 50);
        let ids: Vec<u32> = rules.iter().map(|r| r.id.0).collect();
        assert!(ids.windows(2).all(|w| w[0] < w[1]), "ids sorted and unique");
        assert!(ids.contains(&107));
        assert!(ids.contains(&158));
        // manual-only and registry-only entries have no detector
        for absent in [105, 106, 108, 122, 130, 131, 139, 140, 145, 147, 149, 159, 176] {
            assert!(!ids.contains(&absent), "SWE-{absent} must not have a rule");
        }
    }

    #[test]
    fn rules_resolve_to_active_registry_entries() {
        let registry = crate::registry::load_bundled();
        for rule in solidity_rule_set() {
            let entry = registry
                .entries
                .iter()
                .find(|e| e.id == rule.id)
                .unwrap_or_else(|| panic!("{} missing from registry", rule.id));
            assert_eq!(entry.status, crate::registry::Status::Active);
            assert!(matches!(
                entry.detectability,
                Some(
                    crate::registry::Detectability::Automated
                        | crate::registry::Detectability::Heuristic
                )
            ));
        }
    }
}
