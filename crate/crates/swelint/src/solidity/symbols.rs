//! Symbol resolution: per-contract inheritance linearization, flattened
//! member tables, and shadowing pairs.
//!
//! Linearization is C3 with the Solidity convention: the result lists the
//! most-derived contract first, and bases written left-to-right in the `is`
//! clause are merged with the rightmost treated as most base.

use std::collections::BTreeMap;

use super::ast::*;
use super::token::Span;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QualifiedDecl {
    pub contract: String,
    pub name: String,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShadowKind {
    /// A derived contract redeclares an inherited state variable.
    StateVar,
    /// A function-local declaration or parameter hides a state variable.
    Local,
}

#[derive(Debug, Clone)]
pub struct ShadowPair {
    pub kind: ShadowKind,
    pub derived: QualifiedDecl,
    pub shadowed: QualifiedDecl,
}

#[derive(Debug, Clone)]
pub struct ContractInfo {
    pub name: String,
    /// C3 order, self first.
    pub linearization: Vec<String>,
    /// State variables visible in this contract, base-most first. Each entry
    /// carries its declaring contract.
    pub state_vars: Vec<(String, VarDecl)>,
    /// Most-derived implementation per canonical signature.
    pub functions_by_signature: BTreeMap<String, (String, FunctionDef)>,
    /// Externally callable signatures (public/external, including the
    /// pre-0.5 implicit-public default) mapped to their declaring contract.
    pub external_interface: BTreeMap<String, String>,
    pub shadowing_pairs: Vec<ShadowPair>,
}

#[derive(Debug, Clone, Default)]
pub struct SymbolTable {
    pub contracts: BTreeMap<String, ContractInfo>,
    pub diagnostics: Vec<String>,
}

impl SymbolTable {
    pub fn contract(&self, name: &str) -> Option<&ContractInfo> {
        self.contracts.get(name)
    }
}

/// Resolve one file against its scan-set siblings. Sibling units only
/// contribute base-contract definitions; the returned table covers the
/// contracts of `unit`.
pub fn resolve(unit: &SourceUnit, siblings: &[&SourceUnit]) -> SymbolTable {
    let mut defs: BTreeMap<&str, &ContractDef> = BTreeMap::new();
    for sib in siblings {
        for c in &sib.contracts {
            defs.entry(c.name.as_str()).or_insert(c);
        }
    }
    // the unit's own contracts win over same-named siblings
    for c in &unit.contracts {
        defs.insert(c.name.as_str(), c);
    }

    let mut table = SymbolTable::default();
    let mut memo: BTreeMap<String, Option<Vec<String>>> = BTreeMap::new();
    for contract in &unit.contracts {
        let linearization = linearize(contract.name.as_str(), &defs, &mut memo, &mut table.diagnostics)
            .unwrap_or_else(|| vec![contract.name.clone()]);
        let info = build_info(contract, linearization, &defs);
        table.contracts.insert(contract.name.clone(), info);
    }
    table
}

fn linearize(
    name: &str,
    defs: &BTreeMap<&str, &ContractDef>,
    memo: &mut BTreeMap<String, Option<Vec<String>>>,
    diagnostics: &mut Vec<String>,
) -> Option<Vec<String>> {
    if let Some(cached) = memo.get(name) {
        return cached.clone();
    }
    // mark in-progress to break inheritance cycles
    memo.insert(name.to_string(), None);
    let Some(def) = defs.get(name) else {
        diagnostics.push(format!("unresolved base contract {name}"));
        return None;
    };
    // rightmost base is most base: merge the reversed base list
    let mut sequences: Vec<Vec<String>> = Vec::new();
    let mut known_bases: Vec<String> = Vec::new();
    for base in def.bases.iter().rev() {
        match linearize(base, defs, memo, diagnostics) {
            Some(lin) => {
                sequences.push(lin);
                known_bases.push(base.clone());
            }
            None => {} // diagnostic already recorded; linearize with the rest
        }
    }
    sequences.push(known_bases);
    let merged = c3_merge(sequences).map(|mut rest| {
        let mut lin = vec![name.to_string()];
        lin.append(&mut rest);
        lin
    });
    if merged.is_none() {
        diagnostics.push(format!("no valid C3 linearization for {name}"));
    }
    let result = merged.or(Some(vec![name.to_string()]));
    memo.insert(name.to_string(), result.clone());
    result
}

fn c3_merge(mut sequences: Vec<Vec<String>>) -> Option<Vec<String>> {
    let mut result = Vec::new();
    loop {
        sequences.retain(|s| !s.is_empty());
        if sequences.is_empty() {
            return Some(result);
        }
        // pick the first head that appears in no sequence's tail
        let candidate = sequences
            .iter()
            .map(|s| s[0].clone())
            .find(|head| !sequences.iter().any(|s| s[1..].contains(head)))?;
        result.push(candidate.clone());
        for s in sequences.iter_mut() {
            s.retain(|n| *n != candidate);
        }
    }
}

fn build_info(
    contract: &ContractDef,
    linearization: Vec<String>,
    defs: &BTreeMap<&str, &ContractDef>,
) -> ContractInfo {
    let mut state_vars: Vec<(String, VarDecl)> = Vec::new();
    let mut functions_by_signature: BTreeMap<String, (String, FunctionDef)> = BTreeMap::new();
    let mut external_interface: BTreeMap<String, String> = BTreeMap::new();
    let mut shadowing_pairs: Vec<ShadowPair> = Vec::new();

    // walk base-most to most-derived so derived members overwrite
    for ancestor_name in linearization.iter().rev() {
        let Some(def) = defs.get(ancestor_name.as_str()) else {
            continue;
        };
        for var in &def.state_vars {
            let prior = state_vars
                .iter()
                .find(|(owner, v)| v.name == var.name && owner != ancestor_name)
                .map(|(owner, v)| (owner.clone(), v.name.clone(), v.span));
            if let Some((owner, prev_name, prev_span)) = prior {
                shadowing_pairs.push(ShadowPair {
                    kind: ShadowKind::StateVar,
                    derived: QualifiedDecl {
                        contract: ancestor_name.clone(),
                        name: var.name.clone(),
                        span: var.span,
                    },
                    shadowed: QualifiedDecl {
                        contract: owner,
                        name: prev_name,
                        span: prev_span,
                    },
                });
            }
            state_vars.retain(|(_, v)| v.name != var.name);
            state_vars.push((ancestor_name.clone(), var.clone()));
        }
        for func in &def.functions {
            if func.kind != FunctionKind::Regular || func.name.is_empty() {
                continue;
            }
            let sig = canonical_signature(func);
            let externally_callable = matches!(
                func.visibility,
                Visibility::Public | Visibility::External | Visibility::Unspecified
            );
            if externally_callable {
                external_interface.insert(sig.clone(), ancestor_name.clone());
            }
            functions_by_signature.insert(sig, (ancestor_name.clone(), func.clone()));
        }
    }

    // locals (declarations and parameters) hiding state variables
    for func in &contract.functions {
        let mut record = |name: &str, span: Span| {
            if let Some((owner, var)) = state_vars.iter().find(|(_, v)| v.name == name) {
                shadowing_pairs.push(ShadowPair {
                    kind: ShadowKind::Local,
                    derived: QualifiedDecl {
                        contract: contract.name.clone(),
                        name: name.to_string(),
                        span,
                    },
                    shadowed: QualifiedDecl {
                        contract: owner.clone(),
                        name: var.name.clone(),
                        span: var.span,
                    },
                });
            }
        };
        for param in &func.params {
            if !param.name.is_empty() {
                record(&param.name, param.span);
            }
        }
        walk_stmts(func.body_stmts(), &mut |stmt| {
            if let Stmt::LocalVarDecl { name, span, .. } = stmt {
                record(name, *span);
            }
        });
    }

    ContractInfo {
        name: contract.name.clone(),
        linearization,
        state_vars,
        functions_by_signature,
        external_interface,
        shadowing_pairs,
    }
}

#[cfg(test)]
mod tests {
    use super::super::parser::parse_source;
    use super::*;

    fn table(src: &str) -> SymbolTable {
        let unit = parse_source(src, "t.sol");
        assert!(
            unit.parse_diagnostics.is_empty(),
            "{:?}",
            unit.parse_diagnostics
        );
        resolve(&unit, &[])
    }

    #[test]
    fn no_bases_linearizes_to_self() {
        let t = table("contract A { uint x; }");
        let info = t.contract("A").unwrap();
        assert_eq!(info.linearization, ["A"]);
        assert!(info.shadowing_pairs.is_empty());
    }

    #[test]
    fn diamond_linearization() {
        let t = table(
            "contract A {}\ncontract B is A {}\ncontract C is A {}\ncontract D is B, C {}\n",
        );
        let info = t.contract("D").unwrap();
        assert_eq!(info.linearization, ["D", "C", "B", "A"]);
        assert!(t.diagnostics.is_empty());
    }

    #[test]
    fn inherited_state_var_shadowing() {
        let t = table(
            r#"
contract NFTSales {
    uint256 public nftPrice = 1;
    function buyNFT() external payable { require(msg.value == nftPrice); }
}
contract PreNFTsale is NFTSales {
    uint256 public nftPrice = 2;
}
"#,
        );
        let info = t.contract("PreNFTsale").unwrap();
        let pair = info
            .shadowing_pairs
            .iter()
            .find(|p| p.kind == ShadowKind::StateVar)
            .expect("state var shadow pair");
        assert_eq!(pair.derived.contract, "PreNFTsale");
        assert_eq!(pair.shadowed.contract, "NFTSales");
        assert_eq!(pair.derived.name, "nftPrice");
        // the derived copy is the resolved one
        let (owner, _) = info
            .state_vars
            .iter()
            .find(|(_, v)| v.name == "nftPrice")
            .unwrap();
        assert_eq!(owner, "PreNFTsale");
    }

    #[test]
    fn local_shadowing_pair() {
        let t = table(
            "contract C { uint total; function f() public { uint total = 1; total += 1; } }",
        );
        let info = t.contract("C").unwrap();
        assert!(info
            .shadowing_pairs
            .iter()
            .any(|p| p.kind == ShadowKind::Local && p.derived.name == "total"));
    }

    #[test]
    fn inherited_interface_flattens() {
        let t = table(
            r#"
contract Base { function ping() public {} }
contract Derived is Base { function pong() external {} function hidden() internal {} }
"#,
        );
        let info = t.contract("Derived").unwrap();
        assert!(info.external_interface.contains_key("ping()"));
        assert!(info.external_interface.contains_key("pong()"));
        assert!(!info.external_interface.contains_key("hidden()"));
        assert_eq!(info.external_interface["ping()"], "Base");
    }

    #[test]
    fn unresolved_base_records_diagnostic() {
        let src = "contract D is Missing { uint x; }";
        let unit = parse_source(src, "t.sol");
        let t = resolve(&unit, &[]);
        assert!(!t.diagnostics.is_empty());
        assert_eq!(t.contract("D").unwrap().linearization, ["D"]);
    }

    #[test]
    fn sibling_units_supply_bases() {
        let base = parse_source("contract Base { uint v; }", "base.sol");
        let derived = parse_source("contract D is Base { }", "d.sol");
        let t = resolve(&derived, &[&base]);
        assert_eq!(t.contract("D").unwrap().linearization, ["D", "Base"]);
        assert!(t.diagnostics.is_empty());
    }
}
