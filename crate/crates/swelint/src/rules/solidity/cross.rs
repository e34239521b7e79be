//! Cross-file detectors: SWE-123 (requirement violation at the call site)
//! and SWE-158 (selector clashing).

use crate::config::ScanConfig;
use crate::engine::{DetectorRule, Emitter, Finding, ScanInput};
use crate::solidity::ast::*;
use crate::solidity::SourceUnit;

use super::helpers::*;
use super::selector::find_selector_clashes;

/// A callee whose first statement constrains one parameter against a
/// literal: `require(param op literal)` normalized to param-on-the-left.
struct FirstRequire {
    owner: String,
    func_name: String,
    param_index: usize,
    op: String,
    literal: i128,
}

fn flip(op: &str) -> String {
    match op {
        "<" => ">",
        ">" => "<",
        "<=" => ">=",
        ">=" => "<=",
        other => other,
    }
    .to_string()
}

fn eval(lhs: i128, op: &str, rhs: i128) -> bool {
    match op {
        "==" => lhs == rhs,
        "!=" => lhs != rhs,
        "<" => lhs < rhs,
        ">" => lhs > rhs,
        "<=" => lhs <= rhs,
        ">=" => lhs >= rhs,
        _ => true,
    }
}

fn first_require_constraints(units: &[SourceUnit]) -> Vec<FirstRequire> {
    let mut out = Vec::new();
    for unit in units {
        for (contract, func) in all_functions(unit) {
            let Some(Stmt::Require(args, _)) = func.body_stmts().first() else {
                continue;
            };
            let Some(Expr::Binary { op, lhs, rhs, .. }) = args.first() else {
                continue;
            };
            if !is_comparison_op(op) {
                continue;
            }
            let param_pos = |e: &Expr| {
                e.as_ident()
                    .and_then(|n| func.params.iter().position(|p| p.name == n))
            };
            let normalized = if let (Some(idx), Some(lit)) = (param_pos(lhs), literal_value(rhs)) {
                Some((idx, op.clone(), lit))
            } else if let (Some(idx), Some(lit)) = (param_pos(rhs), literal_value(lhs)) {
                Some((idx, flip(op), lit))
            } else {
                None
            };
            if let Some((param_index, op, literal)) = normalized {
                out.push(FirstRequire {
                    owner: contract
                        .map(|c| c.name.clone())
                        .unwrap_or_else(|| "<free>".to_string()),
                    func_name: func.name.clone(),
                    param_index,
                    op,
                    literal,
                });
            }
        }
    }
    out
}

/// SWE-123: literal call arguments that provably violate the callee's
/// leading require.
pub(super) fn requirement_violations(
    inputs: &[&ScanInput],
    units: &[SourceUnit],
    rule: &DetectorRule,
    config: &ScanConfig,
    findings: &mut Vec<Finding>,
) {
    let constraints = first_require_constraints(units);
    if constraints.is_empty() {
        return;
    }
    for (input, unit) in inputs.iter().zip(units) {
        let mut em = Emitter::new(rule, config, &input.path, &input.source, findings);
        for (contract, func) in all_functions(unit) {
            let label = qualified(contract.map(|c| c.name.as_str()), func);
            walk_exprs(func.body_stmts(), &mut |e| {
                let Expr::Call { callee, args, span, .. } = e else { return };
                let name = match callee.as_ref() {
                    Expr::Ident { name, .. } => name.as_str(),
                    Expr::Member { member, .. } => member.as_str(),
                    _ => return,
                };
                for c in constraints.iter().filter(|c| c.func_name == name) {
                    let Some(arg) = args.get(c.param_index) else { continue };
                    let Some(value) = literal_value(arg) else { continue };
                    if !eval(value, &c.op, c.literal) {
                        em.emit(
                            *span,
                            label.clone(),
                            format!(
                                "argument {value} violates the first requirement of \
                                 {}.{} (parameter must be {} {})",
                                c.owner, c.func_name, c.op, c.literal
                            ),
                        );
                    }
                }
            });
        }
    }
}

/// Canonical signatures of the externally callable functions declared
/// directly by an interface definition.
fn interface_signatures(name: &str, units: &[SourceUnit]) -> Vec<String> {
    for unit in units {
        for contract in &unit.contracts {
            if contract.name == name && contract.kind == ContractKind::Interface {
                return contract
                    .functions
                    .iter()
                    .filter(|f| f.kind == FunctionKind::Regular && !f.name.is_empty())
                    .map(canonical_signature)
                    .collect();
            }
        }
    }
    Vec::new()
}

/// SWE-158: distinct signatures sharing a 4-byte selector, within one
/// contract's external interface or across a contract and the interfaces it
/// casts addresses to.
pub(super) fn selector_clashes(
    inputs: &[&ScanInput],
    units: &[SourceUnit],
    rule: &DetectorRule,
    config: &ScanConfig,
    findings: &mut Vec<Finding>,
) {
    let unit_refs: Vec<&SourceUnit> = units.iter().collect();
    for (input, unit) in inputs.iter().zip(units) {
        let symbols = crate::solidity::resolve(unit, &unit_refs);
        let mut em = Emitter::new(rule, config, &input.path, &input.source, findings);
        for contract in &unit.contracts {
            let Some(info) = symbols.contract(&contract.name) else { continue };
            let mut signatures: Vec<String> = info.external_interface.keys().cloned().collect();
            // union with proxy-target interfaces this contract casts to
            let mut cast_targets: Vec<String> = Vec::new();
            for func in &contract.functions {
                walk_exprs(func.body_stmts(), &mut |e| {
                    if let Expr::Call { callee, args, .. } = e {
                        if let Some(n) = callee.as_ident() {
                            if args.len() == 1 && !cast_targets.iter().any(|t| t == n) {
                                cast_targets.push(n.to_string());
                            }
                        }
                    }
                });
            }
            for target in cast_targets {
                signatures.extend(interface_signatures(&target, units));
            }
            for (a, b) in find_selector_clashes(&signatures) {
                em.emit(
                    contract.span,
                    contract.name.clone(),
                    format!(
                        "'{}' and '{}' share the selector 0x{}; a call routed by \
                         selector can reach either implementation",
                        a.signature,
                        b.signature,
                        a.selector_hex()
                    ),
                );
            }
        }
    }
}
