//! Detectors SWE-141 through SWE-161.

use crate::engine::Emitter;
use crate::solidity::ast::*;

use super::helpers::*;
use super::FileCtx;

/// SWE-141: delegatecall target held in storage that a public entry point
/// can update.
pub(super) fn swe_141(ctx: &FileCtx, em: &mut Emitter) {
    for contract in &ctx.unit.contracts {
        let mut updatable: Vec<&str> = Vec::new();
        for func in &contract.functions {
            if !matches!(
                func.visibility,
                Visibility::Public | Visibility::External | Visibility::Unspecified
            ) {
                continue;
            }
            walk_exprs(func.body_stmts(), &mut |e| {
                if let Expr::Assignment { lhs, .. } = e {
                    if let Some(name) = root_ident(lhs) {
                        if contract.state_vars.iter().any(|v| v.name == name)
                            && !updatable.contains(&name)
                        {
                            updatable.push(name);
                        }
                    }
                }
            });
        }
        if updatable.is_empty() {
            continue;
        }
        for func in &contract.functions {
            let label = qualified(Some(&contract.name), func);
            walk_exprs(func.body_stmts(), &mut |e| {
                let Some(call) = classify_call(e) else { return };
                if call.method != CallMethod::Delegatecall {
                    return;
                }
                let dest = strip_address_casts(call.dest);
                if let Some(root) = root_ident(dest) {
                    if updatable.contains(&root) {
                        em.emit(
                            call.span,
                            label.clone(),
                            format!(
                                "library address '{root}' can be swapped at runtime; \
                                 the delegatecall then runs arbitrary code in this \
                                 contract's storage"
                            ),
                        );
                    }
                }
            });
        }
    }
}

/// SWE-142: contract-type cast over a raw address.
pub(super) fn swe_142(ctx: &FileCtx, em: &mut Emitter) {
    let contract_names: Vec<&str> = ctx
        .unit
        .contracts
        .iter()
        .map(|c| c.name.as_str())
        .collect();
    for (contract, func) in all_functions(ctx.unit) {
        let info = contract.and_then(|c| ctx.contract_info(&c.name));
        let label = qualified(contract.map(|c| c.name.as_str()), func);
        walk_exprs(func.body_stmts(), &mut |e| {
            let Expr::Call { callee, args, span, .. } = e else { return };
            let Some(name) = callee.as_ident() else { return };
            if !contract_names.contains(&name) || args.len() != 1 {
                return;
            }
            let Some(arg_root) = root_ident(strip_address_casts(&args[0])) else {
                return;
            };
            let is_address = declared_type(arg_root, func, info)
                .map_or(false, |t| t == "address" || t == "address payable");
            if is_address {
                em.emit(
                    *span,
                    label.clone(),
                    format!(
                        "cast of '{arg_root}' to {name} is unchecked; nothing \
                         guarantees the address carries that contract's code"
                    ),
                );
            }
        });
    }
}

/// SWE-143: ether sent to an address the contract does not pin.
pub(super) fn swe_143(ctx: &FileCtx, em: &mut Emitter) {
    for (contract, func) in all_functions(ctx.unit) {
        let label = qualified(contract.map(|c| c.name.as_str()), func);
        walk_exprs(func.body_stmts(), &mut |e| {
            let Some(call) = classify_call(e) else { return };
            if !call.is_ether_send() {
                return;
            }
            let dest = strip_address_casts(call.dest);
            let trusted = match dest {
                Expr::Literal { .. } => true,
                _ => matches!(
                    dest.dotted_path().as_deref(),
                    Some("msg.sender" | "tx.origin" | "this")
                ),
            };
            if !trusted {
                em.emit(
                    call.span,
                    label.clone(),
                    "recipient may be a contract whose fallback runs arbitrary code \
                     or rejects the transfer"
                        .to_string(),
                );
            }
        });
    }
}

/// SWE-144: any inline assembly region.
pub(super) fn swe_144(ctx: &FileCtx, em: &mut Emitter) {
    for (contract, func) in all_functions(ctx.unit) {
        let label = qualified(contract.map(|c| c.name.as_str()), func);
        walk_stmts(func.body_stmts(), &mut |stmt| {
            if let Stmt::Assembly { span, .. } = stmt {
                em.emit(
                    *span,
                    label.clone(),
                    "inline assembly bypasses Solidity safety checks".to_string(),
                );
            }
        });
    }
}

/// SWE-146: both constructor syntaxes present; on 0.4.22 the contract-name
/// function is an ordinary public function.
pub(super) fn swe_146(ctx: &FileCtx, em: &mut Emitter) {
    for contract in &ctx.unit.contracts {
        let has_keyword_ctor = contract.functions.iter().any(|f| f.is_constructor_keyword());
        if !has_keyword_ctor {
            continue;
        }
        for func in &contract.functions {
            if func.kind == FunctionKind::Regular && func.name == contract.name {
                em.emit(
                    func.span,
                    contract.name.clone(),
                    format!(
                        "'{}' declares both constructor syntaxes; '{}()' is a plain \
                         public function anyone can call",
                        contract.name, func.name
                    ),
                );
            }
        }
    }
}

const TOKEN_MUTATORS: [&str; 5] = ["transfer", "transferFrom", "approve", "mint", "burn"];

/// SWE-148: token-style balance change without an emitted event.
pub(super) fn swe_148(ctx: &FileCtx, em: &mut Emitter) {
    for contract in &ctx.unit.contracts {
        for func in &contract.functions {
            if !TOKEN_MUTATORS.contains(&func.name.as_str()) {
                continue;
            }
            let mut writes_mapping = false;
            walk_exprs(func.body_stmts(), &mut |e| {
                if let Expr::Assignment { lhs, .. } = e {
                    if let Some(name) = root_ident(lhs) {
                        if contract
                            .state_vars
                            .iter()
                            .any(|v| v.name == name && v.type_text.starts_with("mapping"))
                        {
                            writes_mapping = true;
                        }
                    }
                }
            });
            if !writes_mapping {
                continue;
            }
            let mut emits = false;
            walk_stmts(func.body_stmts(), &mut |stmt| {
                if matches!(stmt, Stmt::Emit(..)) {
                    emits = true;
                }
            });
            if !emits {
                em.emit(
                    func.span,
                    qualified(Some(&contract.name), func),
                    format!(
                        "'{}' changes balances without emitting an event; off-chain \
                         consumers cannot track the transfer",
                        func.name
                    ),
                );
            }
        }
    }
}

const BALANCE_FRAGMENTS: [&str; 3] = ["balance", "credit", "fund"];

fn balance_named(name: &str) -> bool {
    let lower = name.to_ascii_lowercase();
    BALANCE_FRAGMENTS.iter().any(|f| lower.contains(f))
}

/// SWE-150: literal-division truncation feeding a payment amount.
pub(super) fn swe_150(ctx: &FileCtx, em: &mut Emitter) {
    for (contract, func) in all_functions(ctx.unit) {
        let label = qualified(contract.map(|c| c.name.as_str()), func);
        let flag_divisions = |expr: &Expr, em: &mut Emitter| {
            expr.walk(&mut |e| {
                if let Expr::Binary { op, rhs, span, .. } = e {
                    if op == "/" && is_integer_literal(rhs) {
                        em.emit(
                            *span,
                            label.clone(),
                            "integer division truncates; the rounded-off remainder \
                             stays stuck in the contract"
                                .to_string(),
                        );
                    }
                }
            });
        };
        walk_exprs(func.body_stmts(), &mut |e| {
            // amount assigned into balance-tracking storage
            if let Expr::Assignment { lhs, rhs, .. } = e {
                if root_ident(lhs).map_or(false, balance_named) {
                    flag_divisions(rhs, em);
                }
            }
            // amount passed straight to transfer/send
            if let Some(call) = classify_call(e) {
                if matches!(call.method, CallMethod::Transfer | CallMethod::Send) {
                    if let Some(amount) = call.args.first() {
                        flag_divisions(amount, em);
                    }
                }
                if let Some(v) = call.value {
                    flag_divisions(v, em);
                }
            }
        });
    }
}

/// SWE-151: division or modulo by a value never checked to be nonzero.
pub(super) fn swe_151(ctx: &FileCtx, em: &mut Emitter) {
    for (contract, func) in all_functions(ctx.unit) {
        let label = qualified(contract.map(|c| c.name.as_str()), func);
        let mut guards: Vec<(usize, &Expr)> = Vec::new();
        walk_stmts(func.body_stmts(), &mut |stmt| match stmt {
            Stmt::Require(args, span) | Stmt::Assert(args, span) => {
                for a in args {
                    guards.push((span.offset, a));
                }
            }
            Stmt::If { cond, span, .. } => guards.push((span.offset, cond)),
            _ => {}
        });
        walk_exprs(func.body_stmts(), &mut |e| {
            let Expr::Binary { op, rhs, span, .. } = e else { return };
            if op != "/" && op != "%" {
                return;
            }
            if is_integer_literal(rhs) {
                return;
            }
            if let Some(name) = rhs.as_ident() {
                let guarded = guards.iter().any(|(off, guard)| {
                    *off <= span.offset
                        && expr_contains(guard, &|g| {
                            if let Expr::Binary { op, lhs, rhs, .. } = g {
                                matches!(op.as_str(), "!=" | ">" | ">=")
                                    && (lhs.as_ident() == Some(name)
                                        || rhs.as_ident() == Some(name))
                            } else {
                                false
                            }
                        })
                });
                if guarded {
                    return;
                }
            }
            em.emit(
                *span,
                label.clone(),
                format!(
                    "denominator of '{op}' is never checked to be nonzero; a zero \
                     value reverts the whole call"
                ),
            );
        });
    }
}

const ERC20_API: [&str; 3] = ["transfer", "transferFrom", "approve"];

/// SWE-152: ERC-20 entry point deviating from the standard contract.
pub(super) fn swe_152(ctx: &FileCtx, em: &mut Emitter) {
    for (contract, func) in all_functions(ctx.unit) {
        if !ERC20_API.contains(&func.name.as_str()) {
            continue;
        }
        let label = qualified(contract.map(|c| c.name.as_str()), func);
        let returns_bool = func.returns.iter().any(|r| r.type_text == "bool");
        if !returns_bool {
            em.emit(
                func.span,
                label.clone(),
                format!("'{}' must return bool per the token standard", func.name),
            );
            continue;
        }
        let uint_params: Vec<&str> = func
            .params
            .iter()
            .filter(|p| p.type_text.starts_with("uint"))
            .map(|p| p.name.as_str())
            .collect();
        walk_stmts(func.body_stmts(), &mut |stmt| {
            let Stmt::Require(args, span) = stmt else { return };
            for a in args {
                let bounds_amount = expr_contains(a, &|e| {
                    if let Expr::Binary { op, lhs, rhs, .. } = e {
                        is_comparison_op(op)
                            && ((lhs.as_ident().map_or(false, |n| uint_params.contains(&n))
                                && matches!(rhs.as_ref(), Expr::Literal { .. }))
                                || (rhs.as_ident().map_or(false, |n| uint_params.contains(&n))
                                    && matches!(lhs.as_ref(), Expr::Literal { .. })))
                    } else {
                        false
                    }
                });
                if bounds_amount {
                    em.emit(
                        *span,
                        label.clone(),
                        format!(
                            "'{}' imposes an arbitrary bound on the amount; the token \
                             standard does not allow extra transfer restrictions",
                            func.name
                        ),
                    );
                }
            }
        });
    }
}

/// SWE-153: import of a component covered by a loaded advisory.
pub(super) fn swe_153(ctx: &FileCtx, em: &mut Emitter) {
    for (import_path, span) in &ctx.unit.imports {
        for advisory in &ctx.config.advisories {
            if !advisory.matches_import(import_path) {
                continue;
            }
            let version_overlaps = ctx.unit.pragmas.is_empty()
                || ctx
                    .unit
                    .pragmas
                    .iter()
                    .any(|(p, _)| p.intersects(&advisory.affected_pragma));
            if version_overlaps {
                em.emit_with_severity(
                    *span,
                    "import",
                    format!(
                        "imported component '{import_path}' is covered by advisory \
                         {}: {}",
                        advisory.advisory_id, advisory.description
                    ),
                    advisory.severity,
                );
            }
        }
    }
}

const BUILTINS: [&str; 16] = [
    "require", "assert", "revert", "msg", "tx", "block", "now", "this", "super",
    "selfdestruct", "keccak256", "sha256", "ecrecover", "addmod", "mulmod", "gasleft",
];

/// SWE-154: declarations named after language built-ins.
pub(super) fn swe_154(ctx: &FileCtx, em: &mut Emitter) {
    let is_builtin = |name: &str| BUILTINS.contains(&name);
    let flag = |name: &str, span, construct: String, em: &mut Emitter| {
        if is_builtin(name) {
            em.emit(
                span,
                construct,
                format!("declaration '{name}' shadows a language built-in"),
            );
        }
    };
    for contract in &ctx.unit.contracts {
        for func in &contract.functions {
            flag(&func.name, func.span, qualified(Some(&contract.name), func), em);
            for p in &func.params {
                flag(&p.name, p.span, qualified(Some(&contract.name), func), em);
            }
            walk_stmts(func.body_stmts(), &mut |stmt| {
                if let Stmt::LocalVarDecl { name, span, .. } = stmt {
                    flag(name, *span, qualified(Some(&contract.name), func), em);
                }
            });
        }
        for m in &contract.modifiers {
            flag(&m.name, m.span, format!("{}.{}", contract.name, m.name), em);
        }
        for var in &contract.state_vars {
            flag(&var.name, var.span, format!("{}.{}", contract.name, var.name), em);
        }
        for ev in &contract.events {
            flag(&ev.name, ev.span, format!("{}.{}", contract.name, ev.name), em);
        }
        for st in &contract.structs {
            flag(&st.name, st.span, format!("{}.{}", contract.name, st.name), em);
        }
    }
    for func in &ctx.unit.free_functions {
        flag(&func.name, func.span, function_label(func), em);
        for p in &func.params {
            flag(&p.name, p.span, function_label(func), em);
        }
    }
    for m in &ctx.unit.free_modifiers {
        flag(&m.name, m.span, m.name.clone(), em);
    }
}

/// SWE-155: address literals in executable positions.
pub(super) fn swe_155(ctx: &FileCtx, em: &mut Emitter) {
    let flag_in = |expr: &Expr, construct: &str, em: &mut Emitter| {
        expr.walk(&mut |e| {
            if let Expr::Literal {
                kind: LitKind::Address,
                text,
                span,
                ..
            } = e
            {
                em.emit(
                    *span,
                    construct.to_string(),
                    format!("hardcoded address {text} cannot follow a redeploy or key rotation"),
                );
            }
        });
    };
    for contract in &ctx.unit.contracts {
        for var in &contract.state_vars {
            if let Some(init) = &var.initializer {
                flag_in(init, &format!("{}.{}", contract.name, var.name), em);
            }
        }
    }
    for (contract, func) in all_functions(ctx.unit) {
        let label = qualified(contract.map(|c| c.name.as_str()), func);
        walk_exprs(func.body_stmts(), &mut |e| {
            if let Expr::Literal {
                kind: LitKind::Address,
                text,
                span,
                ..
            } = e
            {
                em.emit(
                    *span,
                    label.clone(),
                    format!("hardcoded address {text} cannot follow a redeploy or key rotation"),
                );
            }
        });
    }
    for contract in &ctx.unit.contracts {
        for m in &contract.modifiers {
            walk_exprs(&m.body, &mut |e| {
                if let Expr::Literal {
                    kind: LitKind::Address,
                    ..
                } = e
                {
                    flag_in(e, &format!("{}.{}", contract.name, m.name), em);
                }
            });
        }
    }
}

/// SWE-156: funds routed through an address parameter with no zero check.
pub(super) fn swe_156(ctx: &FileCtx, em: &mut Emitter) {
    for (contract, func) in all_functions(ctx.unit) {
        let info = contract.and_then(|c| ctx.contract_info(&c.name));
        let label = qualified(contract.map(|c| c.name.as_str()), func);
        let address_params: Vec<&str> = func
            .params
            .iter()
            .filter(|p| p.type_text == "address" || p.type_text == "address payable")
            .map(|p| p.name.as_str())
            .collect();
        if address_params.is_empty() {
            continue;
        }
        let mut zero_checked: Vec<&str> = Vec::new();
        walk_stmts(func.body_stmts(), &mut |stmt| {
            let conds: Vec<&Expr> = match stmt {
                Stmt::Require(args, _) => args.iter().collect(),
                Stmt::If { cond, .. } => vec![cond],
                _ => return,
            };
            for cond in conds {
                cond.walk(&mut |e| {
                    if let Expr::Binary { op, lhs, rhs, .. } = e {
                        if op != "!=" && op != "==" {
                            return;
                        }
                        let zero_side = |x: &Expr| {
                            matches!(literal_value(strip_address_casts(x)), Some(0))
                        };
                        for p in &address_params {
                            let mentions = lhs.as_ident() == Some(p) || rhs.as_ident() == Some(p);
                            if mentions && (zero_side(lhs) || zero_side(rhs)) {
                                zero_checked.push(p);
                            }
                        }
                    }
                });
            }
        });
        walk_exprs(func.body_stmts(), &mut |e| {
            // ether send straight to the parameter
            if let Some(call) = classify_call(e) {
                if call.is_ether_send() {
                    if let Some(root) = root_ident(strip_address_casts(call.dest)) {
                        if address_params.contains(&root) && !zero_checked.contains(&root) {
                            em.emit(
                                call.span,
                                label.clone(),
                                format!("'{root}' is never checked against the zero address"),
                            );
                        }
                    }
                }
            }
            // balance bookkeeping keyed by the parameter
            if let Expr::Assignment { lhs, span, .. } = e {
                if let Expr::Index {
                    object,
                    index: Some(index),
                    ..
                } = lhs.as_ref()
                {
                    let balance_map = root_ident(object).map_or(false, |n| {
                        balance_named(n) && is_state_var(info, n)
                    });
                    if let Some(key) = index.as_ident() {
                        if balance_map
                            && address_params.contains(&key)
                            && !zero_checked.contains(&key)
                        {
                            em.emit(
                                *span,
                                label.clone(),
                                format!("'{key}' is never checked against the zero address"),
                            );
                        }
                    }
                }
            }
        });
    }
}

/// SWE-157: any external call repeated by a loop.
pub(super) fn swe_157(ctx: &FileCtx, em: &mut Emitter) {
    for (contract, func) in all_functions(ctx.unit) {
        let label = qualified(contract.map(|c| c.name.as_str()), func);
        walk_loop_exprs(func.body_stmts(), &mut |e| {
            let Some(call) = classify_call(e) else { return };
            let external = match call.method {
                CallMethod::Transfer | CallMethod::Send => true,
                CallMethod::LowCall | CallMethod::Delegatecall | CallMethod::Staticcall => true,
                CallMethod::HighLevel(name) => {
                    !name.is_empty()
                        && !matches!(name, "push" | "pop")
                        && !matches!(
                            root_ident(call.dest),
                            Some("abi" | "msg" | "block" | "tx" | "super" | "this")
                        )
                }
                CallMethod::Plain(_) => false,
            };
            if external {
                em.emit(
                    call.span,
                    label.clone(),
                    "per-iteration external call multiplies gas cost and failure \
                     surface with the collection size"
                        .to_string(),
                );
            }
        });
    }
}

/// SWE-160: contract-ness checks via code size.
pub(super) fn swe_160(ctx: &FileCtx, em: &mut Emitter) {
    for (contract, func) in all_functions(ctx.unit) {
        let label = qualified(contract.map(|c| c.name.as_str()), func);
        let mut has_branching = false;
        walk_stmts(func.body_stmts(), &mut |stmt| {
            if matches!(stmt, Stmt::Require(..) | Stmt::If { .. }) {
                has_branching = true;
            }
        });
        walk_stmts(func.body_stmts(), &mut |stmt| {
            if let Stmt::Assembly { raw_tokens, span } = stmt {
                if has_branching && raw_tokens.iter().any(|t| t == "extcodesize") {
                    em.emit(
                        *span,
                        label.clone(),
                        "extcodesize is zero during a constructor and nonzero checks \
                         can be bypassed; do not use code size as identity proof"
                            .to_string(),
                    );
                }
            }
        });
        walk_exprs(func.body_stmts(), &mut |e| {
            if let Expr::Binary { op, lhs, rhs, span } = e {
                if is_comparison_op(op) {
                    let code_length = |x: &Expr| {
                        x.dotted_path().map_or(false, |p| p.ends_with(".code.length"))
                    };
                    if code_length(lhs) || code_length(rhs) {
                        em.emit(
                            *span,
                            label.clone(),
                            "code length is zero during a constructor and nonzero \
                             checks can be bypassed; do not use code size as \
                             identity proof"
                                .to_string(),
                        );
                    }
                }
            }
        });
    }
}

/// SWE-161: direct writes to an array length member.
pub(super) fn swe_161(ctx: &FileCtx, em: &mut Emitter) {
    for (contract, func) in all_functions(ctx.unit) {
        let label = qualified(contract.map(|c| c.name.as_str()), func);
        walk_exprs(func.body_stmts(), &mut |e| {
            let target = match e {
                Expr::Assignment { lhs, span, .. } => Some((lhs.as_ref(), *span)),
                Expr::Unary {
                    op, operand, span, ..
                } if op == "++" || op == "--" => Some((operand.as_ref(), *span)),
                _ => None,
            };
            if let Some((lhs, span)) = target {
                if matches!(lhs, Expr::Member { member, .. } if member == "length") {
                    em.emit(
                        span,
                        label.clone(),
                        "assigning to length resizes the array without bounds or \
                         initialization; a decrement can expose stale storage"
                            .to_string(),
                    );
                }
            }
        });
    }
}
