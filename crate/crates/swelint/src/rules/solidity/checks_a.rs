//! Detectors SWE-100 through SWE-119.

use crate::engine::Emitter;
use crate::solidity::ast::*;
use crate::solidity::token::Span;

use super::helpers::*;
use super::FileCtx;

/// SWE-100: functions and state variables relying on the pre-0.5 implicit
/// visibility default.
pub(super) fn swe_100(ctx: &FileCtx, em: &mut Emitter) {
    for contract in &ctx.unit.contracts {
        for func in &contract.functions {
            if func.kind == FunctionKind::Regular && func.visibility == Visibility::Unspecified {
                em.emit(
                    func.span,
                    qualified(Some(&contract.name), func),
                    format!(
                        "function '{}' has no visibility specifier and defaults to public",
                        function_label(func)
                    ),
                );
            }
        }
        for var in &contract.state_vars {
            if var.visibility == Visibility::Unspecified {
                em.emit(
                    var.span,
                    format!("{}.{}", contract.name, var.name),
                    format!(
                        "state variable '{}' has no visibility specifier and defaults to internal",
                        var.name
                    ),
                );
            }
        }
    }
}

/// SWE-101: unguarded arithmetic under a pre-0.8 pragma.
pub(super) fn swe_101(ctx: &FileCtx, em: &mut Emitter) {
    for (contract, func) in all_functions(ctx.unit) {
        let label = qualified(contract.map(|c| c.name.as_str()), func);
        let mut roots: Vec<&Expr> = Vec::new();
        collect_arith_roots(func.body_stmts(), &mut roots);
        for root in roots {
            scan_arith(root, &label, em);
        }
    }
}

/// Top-level expressions subject to the overflow check: everything except
/// require/assert arguments and literal-bounded loop headers.
fn collect_arith_roots<'a>(stmts: &'a [Stmt], out: &mut Vec<&'a Expr>) {
    for stmt in stmts {
        match stmt {
            Stmt::Block(inner, _) => collect_arith_roots(inner, out),
            Stmt::If {
                cond,
                then_branch,
                else_branch,
                ..
            } => {
                out.push(cond);
                collect_arith_roots(std::slice::from_ref(then_branch), out);
                if let Some(e) = else_branch {
                    collect_arith_roots(std::slice::from_ref(e), out);
                }
            }
            Stmt::For {
                init,
                cond,
                update,
                body,
                ..
            } => {
                if let Some(i) = init {
                    collect_arith_roots(std::slice::from_ref(i), out);
                }
                let literal_bound = cond.as_ref().map_or(false, |c| {
                    if let Expr::Binary { lhs, rhs, .. } = c {
                        is_integer_literal(lhs) || is_integer_literal(rhs)
                    } else {
                        false
                    }
                });
                if !literal_bound {
                    if let Some(c) = cond {
                        out.push(c);
                    }
                    if let Some(u) = update {
                        out.push(u);
                    }
                }
                collect_arith_roots(std::slice::from_ref(body), out);
            }
            Stmt::While { cond, body, .. } => {
                out.push(cond);
                collect_arith_roots(std::slice::from_ref(body), out);
            }
            Stmt::Expr(e, _) | Stmt::Emit(e, _) => out.push(e),
            Stmt::Return(Some(e), _) => out.push(e),
            Stmt::LocalVarDecl {
                initializer: Some(e),
                ..
            } => out.push(e),
            // require/assert/revert arguments are the guard itself
            Stmt::Require(..) | Stmt::Assert(..) | Stmt::Revert(..) => {}
            _ => {}
        }
    }
}

fn is_arith_candidate(expr: &Expr) -> bool {
    match expr {
        Expr::Binary { op, lhs, rhs, .. } => {
            matches!(op.as_str(), "+" | "-" | "*" | "**")
                && !(is_integer_literal(lhs) && is_integer_literal(rhs))
        }
        Expr::Assignment { op, .. } => matches!(op.as_str(), "+=" | "-=" | "*="),
        Expr::Unary { op, .. } => matches!(op.as_str(), "++" | "--"),
        _ => false,
    }
}

fn uses_guarded_math(expr: &Expr) -> bool {
    expr_contains(expr, &|e| {
        if let Expr::Call { callee, .. } = e {
            if let Expr::Member { member, .. } = callee.as_ref() {
                return matches!(member.as_str(), "add" | "sub" | "mul" | "div");
            }
        }
        false
    })
}

/// Emit for the outermost arithmetic node of each chain; nested arithmetic
/// inside an already-flagged expression is covered by that finding.
fn scan_arith(expr: &Expr, label: &str, em: &mut Emitter) {
    if is_arith_candidate(expr) {
        if !uses_guarded_math(expr) {
            em.emit(
                expr.span(),
                label.to_string(),
                "arithmetic can wrap silently under a pre-0.8 compiler".to_string(),
            );
        }
        return;
    }
    match expr {
        Expr::Assignment { lhs, rhs, .. } | Expr::Binary { lhs, rhs, .. } => {
            scan_arith(lhs, label, em);
            scan_arith(rhs, label, em);
        }
        Expr::Unary { operand, .. } => scan_arith(operand, label, em),
        Expr::Call {
            callee,
            args,
            value_opt,
            gas_opt,
            ..
        } => {
            scan_arith(callee, label, em);
            for a in args {
                scan_arith(a, label, em);
            }
            if let Some(v) = value_opt {
                scan_arith(v, label, em);
            }
            if let Some(g) = gas_opt {
                scan_arith(g, label, em);
            }
        }
        Expr::Member { object, .. } => scan_arith(object, label, em),
        Expr::Index { object, index, .. } => {
            scan_arith(object, label, em);
            if let Some(ix) = index {
                scan_arith(ix, label, em);
            }
        }
        Expr::Tuple(items, _) => {
            for item in items {
                scan_arith(item, label, em);
            }
        }
        Expr::Conditional {
            cond,
            then_value,
            else_value,
            ..
        } => {
            scan_arith(cond, label, em);
            scan_arith(then_value, label, em);
            scan_arith(else_value, label, em);
        }
        Expr::Ident { .. } | Expr::Literal { .. } | Expr::New { .. } => {}
    }
}

/// SWE-102: pragma admits a compiler below the configured minimum.
pub(super) fn swe_102(ctx: &FileCtx, em: &mut Emitter) {
    for (pragma, span) in &ctx.unit.pragmas {
        if pragma.admits_any_below(ctx.config.min_compiler) {
            em.emit(
                *span,
                "pragma",
                format!(
                    "pragma '{}' admits compiler versions older than {}",
                    pragma.raw, ctx.config.min_compiler
                ),
            );
        }
    }
}

/// SWE-103: floating pragma.
pub(super) fn swe_103(ctx: &FileCtx, em: &mut Emitter) {
    for (pragma, span) in &ctx.unit.pragmas {
        if pragma.floating {
            em.emit(
                *span,
                "pragma",
                format!("pragma '{}' does not pin a single compiler version", pragma.raw),
            );
        }
    }
}

/// SWE-104: low-level call or send used as a bare statement.
pub(super) fn swe_104(ctx: &FileCtx, em: &mut Emitter) {
    for (contract, func) in all_functions(ctx.unit) {
        let label = qualified(contract.map(|c| c.name.as_str()), func);
        walk_stmts(func.body_stmts(), &mut |stmt| {
            if let Stmt::Expr(expr, _) = stmt {
                if let Some(call) = classify_call(expr) {
                    if call.is_low_level() || call.method == CallMethod::Send {
                        em.emit(
                            call.span,
                            label.clone(),
                            "return value of the external call is not checked".to_string(),
                        );
                    }
                }
            }
        });
    }
}

/// SWE-107: gas-forwarding external call before a state update.
pub(super) fn swe_107(ctx: &FileCtx, em: &mut Emitter) {
    for (contract, func) in all_functions(ctx.unit) {
        let info = contract.and_then(|c| ctx.contract_info(&c.name));
        let label = qualified(contract.map(|c| c.name.as_str()), func);
        let mut calls: Vec<Span> = Vec::new();
        walk_exprs(func.body_stmts(), &mut |e| {
            if let Some(call) = classify_call(e) {
                if call.method == CallMethod::LowCall {
                    calls.push(call.span);
                }
            }
        });
        let Some(&first_call) = calls.iter().min_by_key(|s| s.offset) else {
            continue;
        };
        let mut write_after = false;
        walk_exprs(func.body_stmts(), &mut |e| {
            let target = match e {
                Expr::Assignment { lhs, span, .. } => Some((lhs.as_ref(), *span)),
                Expr::Unary {
                    op, operand, span, ..
                } if op == "++" || op == "--" => Some((operand.as_ref(), *span)),
                _ => None,
            };
            if let Some((lhs, span)) = target {
                if span.offset > first_call.offset
                    && root_ident(lhs).map_or(false, |name| is_state_var(info, name))
                {
                    write_after = true;
                }
            }
        });
        if write_after {
            em.emit(
                first_call,
                label,
                "external call executes before the contract state is updated".to_string(),
            );
        }
    }
}

/// SWE-109: storage-defaulting local struct/array declaration.
pub(super) fn swe_109(ctx: &FileCtx, em: &mut Emitter) {
    let struct_names: Vec<&str> = ctx
        .unit
        .contracts
        .iter()
        .flat_map(|c| c.structs.iter().map(|s| s.name.as_str()))
        .collect();
    for (contract, func) in all_functions(ctx.unit) {
        let label = qualified(contract.map(|c| c.name.as_str()), func);
        walk_stmts(func.body_stmts(), &mut |stmt| {
            if let Stmt::LocalVarDecl {
                name,
                type_text,
                location: Location::Unspecified,
                initializer: None,
                span,
            } = stmt
            {
                let base = type_text.split('[').next().unwrap_or("").trim();
                if type_text.ends_with(']') || struct_names.contains(&base) {
                    em.emit(
                        *span,
                        label.clone(),
                        format!(
                            "local '{name}' of type {type_text} defaults to a storage \
                             pointer at slot zero"
                        ),
                    );
                }
            }
        });
    }
}

/// SWE-110: assert over caller-controlled input.
pub(super) fn swe_110(ctx: &FileCtx, em: &mut Emitter) {
    for (contract, func) in all_functions(ctx.unit) {
        let label = qualified(contract.map(|c| c.name.as_str()), func);
        let params: Vec<&str> = func.params.iter().map(|p| p.name.as_str()).collect();
        walk_stmts(func.body_stmts(), &mut |stmt| {
            if let Stmt::Assert(args, span) = stmt {
                let input_dependent = args.iter().any(|a| {
                    expr_contains(a, &|e| match e {
                        Expr::Ident { name, .. } => params.contains(&name.as_str()),
                        _ => e
                            .dotted_path()
                            .map_or(false, |p| p.starts_with("msg.")),
                    })
                });
                if input_dependent {
                    em.emit(
                        *span,
                        label.clone(),
                        "assert over externally controlled input; use require for \
                         input validation"
                            .to_string(),
                    );
                }
            }
        });
    }
}

/// SWE-111: deprecated constructs.
pub(super) fn swe_111(ctx: &FileCtx, em: &mut Emitter) {
    for (contract, func) in all_functions(ctx.unit) {
        let label = qualified(contract.map(|c| c.name.as_str()), func);
        if func.mutability == Mutability::ConstantModifier {
            em.emit(
                func.span,
                label.clone(),
                "'constant' on functions is deprecated; use view or pure".to_string(),
            );
        }
        walk_stmts(func.body_stmts(), &mut |stmt| match stmt {
            Stmt::Throw(span) => em.emit(
                *span,
                label.clone(),
                "'throw' is deprecated; use revert, require or assert".to_string(),
            ),
            Stmt::LocalVarDecl {
                type_text, span, ..
            } if type_text == "var" => em.emit(
                *span,
                label.clone(),
                "'var' is deprecated; spell out the type".to_string(),
            ),
            _ => {}
        });
        walk_exprs(func.body_stmts(), &mut |e| match e {
            Expr::Ident { name, span } if matches!(name.as_str(), "suicide" | "sha3" | "callcode") => {
                em.emit(
                    *span,
                    label.clone(),
                    format!("'{name}' is deprecated"),
                );
            }
            Expr::Member { span, .. } => {
                if let Some(path) = e.dotted_path() {
                    if path == "msg.gas" || path == "block.blockhash" {
                        em.emit(*span, label.clone(), format!("'{path}' is deprecated"));
                    }
                }
            }
            _ => {}
        });
    }
}

/// SWE-112: delegatecall target controlled by a parameter or writable
/// storage.
pub(super) fn swe_112(ctx: &FileCtx, em: &mut Emitter) {
    for (contract, func) in all_functions(ctx.unit) {
        let info = contract.and_then(|c| ctx.contract_info(&c.name));
        let label = qualified(contract.map(|c| c.name.as_str()), func);
        let params: Vec<&str> = func.params.iter().map(|p| p.name.as_str()).collect();
        walk_exprs(func.body_stmts(), &mut |e| {
            let Some(call) = classify_call(e) else { return };
            if call.method != CallMethod::Delegatecall {
                return;
            }
            let dest = strip_address_casts(call.dest);
            let Some(root) = root_ident(dest) else { return };
            let from_param = params.contains(&root);
            let from_writable_state = info.map_or(false, |i| {
                i.state_vars
                    .iter()
                    .any(|(_, v)| v.name == root && !v.is_constant)
            });
            if from_param || from_writable_state {
                em.emit(
                    call.span,
                    label.clone(),
                    format!("delegatecall target '{root}' is not a fixed trusted address"),
                );
            }
        });
    }
}

/// SWE-113: ether sent inside a loop.
pub(super) fn swe_113(ctx: &FileCtx, em: &mut Emitter) {
    for (contract, func) in all_functions(ctx.unit) {
        let label = qualified(contract.map(|c| c.name.as_str()), func);
        walk_loop_exprs(func.body_stmts(), &mut |e| {
            if let Some(call) = classify_call(e) {
                if call.is_ether_send() {
                    em.emit(
                        call.span,
                        label.clone(),
                        "one failing transfer aborts the whole loop iteration set".to_string(),
                    );
                }
            }
        });
    }
}

/// SWE-114: ether transfer gated on an equality between caller input and
/// stored state.
pub(super) fn swe_114(ctx: &FileCtx, em: &mut Emitter) {
    for (contract, func) in all_functions(ctx.unit) {
        let info = contract.and_then(|c| ctx.contract_info(&c.name));
        let label = qualified(contract.map(|c| c.name.as_str()), func);
        let params: Vec<&str> = func.params.iter().map(|p| p.name.as_str()).collect();
        let mut sends_ether = false;
        walk_exprs(func.body_stmts(), &mut |e| {
            if classify_call(e).map_or(false, |c| c.is_ether_send()) {
                sends_ether = true;
            }
        });
        if !sends_ether {
            continue;
        }
        let mut conditions: Vec<&Expr> = Vec::new();
        walk_stmts(func.body_stmts(), &mut |stmt| match stmt {
            Stmt::If { cond, .. } => conditions.push(cond),
            Stmt::Require(args, _) => conditions.extend(args.iter()),
            _ => {}
        });
        for cond in conditions {
            cond.walk(&mut |e| {
                if let Expr::Binary { op, lhs, rhs, span } = e {
                    if op == "==" {
                        let mentions_param = |x: &Expr| {
                            expr_contains(x, &|i| {
                                i.as_ident().map_or(false, |n| params.contains(&n))
                            })
                        };
                        let mentions_state = |x: &Expr| {
                            expr_contains(x, &|i| {
                                i.as_ident().map_or(false, |n| is_state_var(info, n))
                            })
                        };
                        if (mentions_param(lhs) && mentions_state(rhs))
                            || (mentions_param(rhs) && mentions_state(lhs))
                        {
                            em.emit(
                                *span,
                                label.clone(),
                                "payout guard compares caller input with stored state; \
                                 a front-runner can satisfy it first"
                                    .to_string(),
                            );
                        }
                    }
                }
            });
        }
    }
}

/// SWE-115: tx.origin used for authorization.
pub(super) fn swe_115(ctx: &FileCtx, em: &mut Emitter) {
    for (contract, func) in all_functions(ctx.unit) {
        let label = qualified(contract.map(|c| c.name.as_str()), func);
        let mut conditions: Vec<&Expr> = Vec::new();
        walk_stmts(func.body_stmts(), &mut |stmt| match stmt {
            Stmt::If { cond, .. } => conditions.push(cond),
            Stmt::Require(args, _) | Stmt::Assert(args, _) => conditions.extend(args.iter()),
            _ => {}
        });
        for cond in conditions {
            cond.walk(&mut |e| {
                if let Expr::Binary { op, lhs, rhs, span } = e {
                    if (op == "==" || op == "!=")
                        && (lhs.dotted_path().as_deref() == Some("tx.origin")
                            || rhs.dotted_path().as_deref() == Some("tx.origin"))
                    {
                        em.emit(
                            *span,
                            label.clone(),
                            "tx.origin authorization can be bypassed through an \
                             intermediary contract; compare msg.sender instead"
                                .to_string(),
                        );
                    }
                }
            });
        }
    }
}

const TIME_PATHS: [&str; 3] = ["block.timestamp", "block.number", "now"];

fn mentions_time(expr: &Expr) -> bool {
    expr_contains(expr, &|e| {
        e.dotted_path()
            .map_or(false, |p| TIME_PATHS.contains(&p.as_str()))
    })
}

/// SWE-116: block time values in comparisons.
pub(super) fn swe_116(ctx: &FileCtx, em: &mut Emitter) {
    let mut bodies: Vec<(String, &[Stmt])> = Vec::new();
    for (contract, func) in all_functions(ctx.unit) {
        bodies.push((
            qualified(contract.map(|c| c.name.as_str()), func),
            func.body_stmts(),
        ));
    }
    for contract in &ctx.unit.contracts {
        for m in &contract.modifiers {
            bodies.push((format!("{}.{}", contract.name, m.name), &m.body));
        }
    }
    for m in &ctx.unit.free_modifiers {
        bodies.push((m.name.clone(), &m.body));
    }
    for (label, stmts) in bodies {
        let mut roots: Vec<&Expr> = Vec::new();
        walk_stmts(stmts, &mut |stmt| match stmt {
            Stmt::Expr(e, _) | Stmt::Emit(e, _) => roots.push(e),
            Stmt::Return(Some(e), _) => roots.push(e),
            Stmt::Require(args, _) | Stmt::Assert(args, _) => roots.extend(args.iter()),
            Stmt::If { cond, .. } | Stmt::While { cond, .. } => roots.push(cond),
            Stmt::For { cond, update, .. } => {
                roots.extend(cond.iter());
                roots.extend(update.iter());
            }
            Stmt::LocalVarDecl {
                initializer: Some(e),
                ..
            } => roots.push(e),
            _ => {}
        });
        for root in roots {
            scan_time_comparisons(root, &label, em);
        }
    }
}

/// Flag the outermost comparison whose subtree reads a block time value.
fn scan_time_comparisons(expr: &Expr, label: &str, em: &mut Emitter) {
    if let Expr::Binary { op, span, .. } = expr {
        if is_comparison_op(op) && mentions_time(expr) {
            em.emit(
                *span,
                label.to_string(),
                "comparison depends on a block value miners can influence".to_string(),
            );
            return;
        }
    }
    match expr {
        Expr::Assignment { lhs, rhs, .. } | Expr::Binary { lhs, rhs, .. } => {
            scan_time_comparisons(lhs, label, em);
            scan_time_comparisons(rhs, label, em);
        }
        Expr::Unary { operand, .. } => scan_time_comparisons(operand, label, em),
        Expr::Call { callee, args, .. } => {
            scan_time_comparisons(callee, label, em);
            for a in args {
                scan_time_comparisons(a, label, em);
            }
        }
        Expr::Tuple(items, _) => {
            for i in items {
                scan_time_comparisons(i, label, em);
            }
        }
        Expr::Conditional {
            cond,
            then_value,
            else_value,
            ..
        } => {
            scan_time_comparisons(cond, label, em);
            scan_time_comparisons(then_value, label, em);
            scan_time_comparisons(else_value, label, em);
        }
        _ => {}
    }
}

/// SWE-117: ecrecover with an unconstrained `s` argument.
pub(super) fn swe_117(ctx: &FileCtx, em: &mut Emitter) {
    for (contract, func) in all_functions(ctx.unit) {
        let label = qualified(contract.map(|c| c.name.as_str()), func);
        let mut recovers: Vec<(&Expr, Span)> = Vec::new();
        walk_exprs(func.body_stmts(), &mut |e| {
            if let Expr::Call { callee, args, span, .. } = e {
                if callee.as_ident() == Some("ecrecover") && args.len() == 4 {
                    recovers.push((&args[3], *span));
                }
            }
        });
        if recovers.is_empty() {
            continue;
        }
        let mut conditions: Vec<&Expr> = Vec::new();
        walk_stmts(func.body_stmts(), &mut |stmt| match stmt {
            Stmt::If { cond, .. } => conditions.push(cond),
            Stmt::Require(args, _) | Stmt::Assert(args, _) => conditions.extend(args.iter()),
            _ => {}
        });
        for (s_arg, span) in recovers {
            let constrained = s_arg.as_ident().map_or(false, |s_name| {
                conditions.iter().any(|c| {
                    expr_contains(c, &|e| {
                        if let Expr::Binary { op, lhs, rhs, .. } = e {
                            is_comparison_op(op)
                                && (expr_contains(lhs, &|i| i.as_ident() == Some(s_name))
                                    || expr_contains(rhs, &|i| i.as_ident() == Some(s_name)))
                        } else {
                            false
                        }
                    })
                })
            });
            if !constrained {
                em.emit(
                    span,
                    label.clone(),
                    "s component of the signature is not restricted to the lower \
                     half order; signatures are malleable"
                        .to_string(),
                );
            }
        }
    }
}

/// SWE-118: constructor-intent function whose name differs from the
/// contract only by case.
pub(super) fn swe_118(ctx: &FileCtx, em: &mut Emitter) {
    for contract in &ctx.unit.contracts {
        if contract.kind != ContractKind::Contract {
            continue;
        }
        let has_real_ctor = contract.functions.iter().any(|f| {
            f.is_constructor_keyword() || f.name == contract.name
        });
        if has_real_ctor {
            continue;
        }
        for func in &contract.functions {
            if func.kind == FunctionKind::Regular
                && !func.name.is_empty()
                && func.name != contract.name
                && func.name.eq_ignore_ascii_case(&contract.name)
            {
                em.emit(
                    func.span,
                    format!("{}.{}", contract.name, func.name),
                    format!(
                        "'{}' is not a constructor of contract '{}' (case mismatch); \
                         it is publicly callable",
                        func.name, contract.name
                    ),
                );
            }
        }
    }
}

/// SWE-119: shadowing pairs from symbol resolution.
pub(super) fn swe_119(ctx: &FileCtx, em: &mut Emitter) {
    for contract in &ctx.unit.contracts {
        let Some(info) = ctx.contract_info(&contract.name) else {
            continue;
        };
        for pair in &info.shadowing_pairs {
            let what = match pair.kind {
                crate::solidity::symbols::ShadowKind::StateVar => "state variable",
                crate::solidity::symbols::ShadowKind::Local => "local declaration",
            };
            em.emit(
                pair.derived.span,
                format!("{}.{}", pair.derived.contract, pair.derived.name),
                format!(
                    "{what} '{}' in {} shadows '{}' declared in {}",
                    pair.derived.name,
                    pair.derived.contract,
                    pair.shadowed.name,
                    pair.shadowed.contract
                ),
            );
        }
    }
}
