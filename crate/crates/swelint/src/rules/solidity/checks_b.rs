//! Detectors SWE-120 through SWE-138.

use crate::engine::Emitter;
use crate::solidity::ast::*;
use crate::solidity::token::Span;

use super::helpers::*;
use super::FileCtx;

const BLOCK_ATTRS: [&str; 4] = [
    "block.timestamp",
    "block.number",
    "block.difficulty",
    "now",
];

fn mentions_block_attr(expr: &Expr) -> bool {
    expr_contains(expr, &|e| match e {
        Expr::Call { callee, .. } => callee.as_ident() == Some("blockhash"),
        _ => e
            .dotted_path()
            .map_or(false, |p| BLOCK_ATTRS.contains(&p.as_str())),
    })
}

fn contains_blockhash_call(expr: &Expr) -> bool {
    expr_contains(expr, &|e| {
        matches!(e, Expr::Call { callee, .. } if callee.as_ident() == Some("blockhash"))
    })
}

fn block_attr_hashed(expr: &Expr) -> bool {
    expr_contains(expr, &|e| {
        if let Expr::Call { callee, args, .. } = e {
            if matches!(callee.as_ident(), Some("keccak256" | "sha256" | "sha3")) {
                return args.iter().any(mentions_block_attr);
            }
        }
        false
    })
}

/// SWE-120: chain attributes fed into randomness-shaped arithmetic.
pub(super) fn swe_120(ctx: &FileCtx, em: &mut Emitter) {
    for (contract, func) in all_functions(ctx.unit) {
        let label = qualified(contract.map(|c| c.name.as_str()), func);
        let mut roots: Vec<&Expr> = Vec::new();
        walk_stmts(func.body_stmts(), &mut |stmt| match stmt {
            Stmt::Expr(e, _) => roots.push(e),
            Stmt::Return(Some(e), _) => roots.push(e),
            Stmt::LocalVarDecl {
                initializer: Some(e),
                ..
            } => roots.push(e),
            _ => {}
        });
        for root in roots {
            if !mentions_block_attr(root) {
                continue;
            }
            let modulo = expr_contains(root, &|e| {
                matches!(e, Expr::Binary { op, .. } if op == "%")
            });
            if modulo || contains_blockhash_call(root) || block_attr_hashed(root) {
                em.emit(
                    root.span(),
                    label.clone(),
                    "value derived from chain attributes is predictable to miners \
                     and other transactions"
                        .to_string(),
                );
            }
        }
    }
}

/// SWE-121: ecrecover result used without recording the digested message.
pub(super) fn swe_121(ctx: &FileCtx, em: &mut Emitter) {
    for (contract, func) in all_functions(ctx.unit) {
        let info = contract.and_then(|c| ctx.contract_info(&c.name));
        let label = qualified(contract.map(|c| c.name.as_str()), func);
        let mut recovers: Vec<Span> = Vec::new();
        walk_exprs(func.body_stmts(), &mut |e| {
            if let Expr::Call { callee, span, .. } = e {
                if callee.as_ident() == Some("ecrecover") {
                    recovers.push(*span);
                }
            }
        });
        if recovers.is_empty() {
            continue;
        }
        let mut hash_indexed_write = false;
        walk_exprs(func.body_stmts(), &mut |e| {
            if let Expr::Assignment { lhs, .. } = e {
                if let Expr::Index {
                    object,
                    index: Some(index),
                    ..
                } = lhs.as_ref()
                {
                    let on_state =
                        root_ident(object).map_or(false, |n| is_state_var(info, n));
                    if !on_state {
                        return;
                    }
                    let hash_typed = expr_contains(index, &|i| match i {
                        Expr::Call { callee, .. } => {
                            matches!(callee.as_ident(), Some("keccak256" | "sha256"))
                        }
                        Expr::Ident { name, .. } => declared_type(name, func, info)
                            .map_or(false, |t| t == "bytes32")
                            || name.to_ascii_lowercase().contains("hash"),
                        _ => false,
                    });
                    if hash_typed {
                        hash_indexed_write = true;
                    }
                }
            }
        });
        if !hash_indexed_write {
            for span in recovers {
                em.emit(
                    span,
                    label.clone(),
                    "recovered signature is not marked as consumed; the same \
                     signed message can be replayed"
                        .to_string(),
                );
            }
        }
    }
}

/// SWE-124: parameter-derived storage array index without a prior bounds
/// check.
pub(super) fn swe_124(ctx: &FileCtx, em: &mut Emitter) {
    for (contract, func) in all_functions(ctx.unit) {
        let info = contract.and_then(|c| ctx.contract_info(&c.name));
        let label = qualified(contract.map(|c| c.name.as_str()), func);
        let params: Vec<&str> = func.params.iter().map(|p| p.name.as_str()).collect();
        // bounds guards seen so far, by offset
        let mut guards: Vec<(usize, &Expr)> = Vec::new();
        walk_stmts(func.body_stmts(), &mut |stmt| match stmt {
            Stmt::Require(args, span) => {
                for a in args {
                    guards.push((span.offset, a));
                }
            }
            Stmt::If { cond, span, .. } => guards.push((span.offset, cond)),
            _ => {}
        });
        walk_exprs(func.body_stmts(), &mut |e| {
            let Expr::Assignment { lhs, .. } = e else { return };
            let Expr::Index {
                object,
                index: Some(index),
                span,
                ..
            } = lhs.as_ref()
            else {
                return;
            };
            let Some(array) = root_ident(object) else { return };
            let is_state_array = info.map_or(false, |i| {
                i.state_vars
                    .iter()
                    .any(|(_, v)| v.name == array && v.type_text.ends_with(']'))
            });
            if !is_state_array {
                return;
            }
            let used_params: Vec<&str> = params
                .iter()
                .copied()
                .filter(|p| expr_contains(index, &|i| i.as_ident() == Some(p)))
                .collect();
            if used_params.is_empty() {
                return;
            }
            let bounded = guards.iter().any(|(off, guard)| {
                *off < span.offset
                    && expr_contains(guard, &|g| {
                        if let Expr::Binary { op, lhs, rhs, .. } = g {
                            matches!(op.as_str(), "<" | "<=")
                                && used_params.iter().any(|p| {
                                    expr_contains(lhs, &|i| i.as_ident() == Some(p))
                                        || expr_contains(rhs, &|i| i.as_ident() == Some(p))
                                })
                        } else {
                            false
                        }
                    })
            });
            if !bounded {
                em.emit(
                    *span,
                    label.clone(),
                    format!(
                        "index into storage array '{array}' comes from a parameter \
                         with no upper-bound check"
                    ),
                );
            }
        });
    }
}

/// SWE-125: several bases declare the same function signature.
pub(super) fn swe_125(ctx: &FileCtx, em: &mut Emitter) {
    for contract in &ctx.unit.contracts {
        if contract.bases.len() < 2 {
            continue;
        }
        let mut by_sig: std::collections::BTreeMap<String, Vec<&str>> = Default::default();
        for base_name in &contract.bases {
            let Some(base) = ctx.unit.contracts.iter().find(|c| &c.name == base_name) else {
                continue;
            };
            for func in &base.functions {
                if func.kind == FunctionKind::Regular && !func.name.is_empty() {
                    by_sig
                        .entry(canonical_signature(func))
                        .or_default()
                        .push(base_name);
                }
            }
        }
        for (sig, bases) in by_sig {
            if bases.len() >= 2 {
                em.emit(
                    contract.span,
                    contract.name.clone(),
                    format!(
                        "bases {} of '{}' all declare '{sig}'; the inheritance \
                         order decides which body runs",
                        bases.join(" and "),
                        contract.name
                    ),
                );
            }
        }
    }
}

/// SWE-126: unchecked low-level call forwarding an encoded sub-call.
pub(super) fn swe_126(ctx: &FileCtx, em: &mut Emitter) {
    for (contract, func) in all_functions(ctx.unit) {
        let label = qualified(contract.map(|c| c.name.as_str()), func);
        walk_stmts(func.body_stmts(), &mut |stmt| {
            let Stmt::Expr(expr, _) = stmt else { return };
            let Some(call) = classify_call(expr) else { return };
            if !call.is_low_level() {
                return;
            }
            let encoded_payload = call.args.first().map_or(false, |arg| {
                expr_contains(arg, &|e| {
                    if let Expr::Call { callee, .. } = e {
                        callee.dotted_path().map_or(false, |p| {
                            p.ends_with("encodeWithSignature") || p.ends_with("encodeWithSelector")
                        })
                    } else {
                        false
                    }
                })
            });
            if encoded_payload {
                em.emit(
                    call.span,
                    label.clone(),
                    "relayed sub-call can be starved of gas by the submitter and its \
                     failure goes unnoticed"
                        .to_string(),
                );
            }
        });
    }
}

/// SWE-127: function-type variable writable through assembly.
pub(super) fn swe_127(ctx: &FileCtx, em: &mut Emitter) {
    for (contract, func) in all_functions(ctx.unit) {
        let label = qualified(contract.map(|c| c.name.as_str()), func);
        let mut mstore_span: Option<Span> = None;
        walk_stmts(func.body_stmts(), &mut |stmt| {
            if let Stmt::Assembly { raw_tokens, span } = stmt {
                if raw_tokens.iter().any(|t| t == "mstore") && mstore_span.is_none() {
                    mstore_span = Some(*span);
                }
            }
        });
        let Some(span) = mstore_span else { continue };
        let struct_has_fn_field = |type_text: &str| {
            contract.map_or(false, |c| {
                c.structs.iter().any(|s| {
                    s.name == type_text
                        && s.fields.iter().any(|f| f.type_text.starts_with("function"))
                })
            })
        };
        let mut has_fn_local = false;
        walk_stmts(func.body_stmts(), &mut |stmt| {
            if let Stmt::LocalVarDecl { type_text, .. } = stmt {
                if type_text.starts_with("function") || struct_has_fn_field(type_text) {
                    has_fn_local = true;
                }
            }
        });
        if has_fn_local {
            em.emit(
                span,
                label,
                "assembly mstore can overwrite an in-memory function pointer and \
                 redirect execution"
                    .to_string(),
            );
        }
    }
}

/// SWE-128: loop bounded by a storage array length that also writes storage.
pub(super) fn swe_128(ctx: &FileCtx, em: &mut Emitter) {
    for (contract, func) in all_functions(ctx.unit) {
        let info = contract.and_then(|c| ctx.contract_info(&c.name));
        let label = qualified(contract.map(|c| c.name.as_str()), func);
        walk_stmts(func.body_stmts(), &mut |stmt| {
            let (cond, body, span) = match stmt {
                Stmt::For {
                    cond: Some(cond),
                    body,
                    span,
                    ..
                } => (cond, body, span),
                Stmt::While { cond, body, span } => (cond, body, span),
                _ => return,
            };
            let state_length_bound = expr_contains(cond, &|e| {
                if let Expr::Member { object, member, .. } = e {
                    member == "length"
                        && root_ident(object).map_or(false, |n| is_state_var(info, n))
                } else {
                    false
                }
            });
            if !state_length_bound {
                return;
            }
            let mut writes_storage = false;
            walk_exprs(std::slice::from_ref(body.as_ref()), &mut |e| {
                if let Expr::Assignment { lhs, .. } = e {
                    if root_ident(lhs).map_or(false, |n| is_state_var(info, n)) {
                        writes_storage = true;
                    }
                }
            });
            if writes_storage {
                em.emit(
                    *span,
                    label.clone(),
                    "unbounded storage-array walk writing state can exceed the block \
                     gas limit and brick this function"
                        .to_string(),
                );
            }
        });
    }
}

/// SWE-129: the `=+` / `=-` adjacency typo, detected lexically.
pub(super) fn swe_129(ctx: &FileCtx, em: &mut Emitter) {
    use crate::solidity::token::TokenKind;
    let tokens = &ctx.unit.tokens;
    for window in tokens.windows(3) {
        let [eq, sign, operand] = window else { continue };
        let is_typo = eq.kind == TokenKind::Operator
            && eq.text == "="
            && eq.adjacent_to_next
            && sign.kind == TokenKind::Operator
            && (sign.text == "+" || sign.text == "-")
            && matches!(
                operand.kind,
                TokenKind::Identifier | TokenKind::IntegerLiteral | TokenKind::AddressLiteral
            )
            || (eq.kind == TokenKind::Operator
                && eq.text == "="
                && eq.adjacent_to_next
                && sign.kind == TokenKind::Operator
                && (sign.text == "+" || sign.text == "-")
                && operand.kind == TokenKind::Punctuator
                && operand.text == "(");
        if !is_typo {
            continue;
        }
        let span = eq.span.cover(sign.span);
        let construct = enclosing_construct(ctx, span).unwrap_or_else(|| "<top level>".to_string());
        em.emit(
            span,
            construct,
            format!(
                "'={}' assigns instead of compounding; did you mean '{}='?",
                sign.text, sign.text
            ),
        );
    }
}

fn enclosing_construct(ctx: &FileCtx, span: Span) -> Option<String> {
    for contract in &ctx.unit.contracts {
        if !within(span, contract.span) {
            continue;
        }
        for func in &contract.functions {
            if within(span, func.span) {
                return Some(qualified(Some(&contract.name), func));
            }
        }
        for m in &contract.modifiers {
            if within(span, m.span) {
                return Some(format!("{}.{}", contract.name, m.name));
            }
        }
        return Some(contract.name.clone());
    }
    for func in &ctx.unit.free_functions {
        if within(span, func.span) {
            return Some(function_label(func));
        }
    }
    None
}

fn within(inner: Span, outer: Span) -> bool {
    inner.offset >= outer.offset && inner.end_offset() <= outer.end_offset()
}

/// SWE-132: strict balance equality or an accumulator blind to forced ether.
pub(super) fn swe_132(ctx: &FileCtx, em: &mut Emitter) {
    // (a) equality comparison against this contract's balance
    for (contract, func) in all_functions(ctx.unit) {
        let label = qualified(contract.map(|c| c.name.as_str()), func);
        walk_exprs(func.body_stmts(), &mut |e| {
            if let Expr::Binary { op, lhs, rhs, span } = e {
                if op == "==" || op == "!=" {
                    let own_balance = |x: &Expr| {
                        expr_contains(x, &|i| {
                            matches!(i, Expr::Member { member, object, .. }
                                if member == "balance"
                                    && expr_contains(object, &|o| o.as_ident() == Some("this")))
                        })
                    };
                    if own_balance(lhs) || own_balance(rhs) {
                        em.emit(
                            *span,
                            label.clone(),
                            "strict balance comparison breaks when ether is forced in \
                             via selfdestruct or coinbase"
                                .to_string(),
                        );
                    }
                }
            }
        });
    }
    // (b) scalar accumulator only ever updated with `+= msg.value`
    for contract in &ctx.unit.contracts {
        for var in &contract.state_vars {
            if var.type_text.starts_with("mapping") || var.type_text.contains('[') {
                continue;
            }
            let mut writes = 0usize;
            let mut msg_value_adds = 0usize;
            for func in &contract.functions {
                walk_exprs(func.body_stmts(), &mut |e| {
                    if let Expr::Assignment { op, lhs, rhs, .. } = e {
                        if lhs.as_ident() == Some(var.name.as_str()) {
                            writes += 1;
                            if op == "+=" && rhs.dotted_path().as_deref() == Some("msg.value") {
                                msg_value_adds += 1;
                            }
                        }
                    }
                });
            }
            if writes > 0 && writes == msg_value_adds {
                em.emit(
                    var.span,
                    format!("{}.{}", contract.name, var.name),
                    format!(
                        "'{}' only tracks msg.value deposits and diverges from the \
                         real balance when ether arrives by other means",
                        var.name
                    ),
                );
            }
        }
    }
}

/// SWE-133: abi.encodePacked over several dynamic arguments.
pub(super) fn swe_133(ctx: &FileCtx, em: &mut Emitter) {
    for (contract, func) in all_functions(ctx.unit) {
        let info = contract.and_then(|c| ctx.contract_info(&c.name));
        let label = qualified(contract.map(|c| c.name.as_str()), func);
        walk_exprs(func.body_stmts(), &mut |e| {
            let Expr::Call { callee, args, span, .. } = e else { return };
            let packed = callee
                .dotted_path()
                .map_or(false, |p| p.ends_with("encodePacked"));
            if !packed || args.len() < 2 {
                return;
            }
            let dynamic = args
                .iter()
                .filter(|a| match a {
                    Expr::Ident { name, .. } => declared_type(name, func, info)
                        .map_or(false, |t| is_dynamic_type(&t)),
                    Expr::Literal {
                        kind: LitKind::Str, ..
                    } => true,
                    _ => false,
                })
                .count();
            if dynamic >= 2 {
                em.emit(
                    *span,
                    label.clone(),
                    "packed encoding of adjacent dynamic values is ambiguous; \
                     element boundaries can shift between the arguments"
                        .to_string(),
                );
            }
        });
    }
}

/// SWE-134: gas call option pinned to an integer literal.
pub(super) fn swe_134(ctx: &FileCtx, em: &mut Emitter) {
    for (contract, func) in all_functions(ctx.unit) {
        let label = qualified(contract.map(|c| c.name.as_str()), func);
        walk_exprs(func.body_stmts(), &mut |e| {
            if let Some(call) = classify_call(e) {
                if call.gas.map_or(false, is_integer_literal) {
                    em.emit(
                        call.span,
                        label.clone(),
                        "hardcoded gas stipend breaks when opcode repricing changes \
                         the callee's gas needs"
                            .to_string(),
                    );
                }
            }
        });
    }
}

/// SWE-135: statements with no effect.
pub(super) fn swe_135(ctx: &FileCtx, em: &mut Emitter) {
    for (contract, func) in all_functions(ctx.unit) {
        let label = qualified(contract.map(|c| c.name.as_str()), func);
        walk_stmts(func.body_stmts(), &mut |stmt| {
            let Stmt::Expr(expr, span) = stmt else { return };
            let reason = match expr {
                Expr::Member { .. } | Expr::Ident { .. } => {
                    Some("member access is never invoked")
                }
                Expr::Binary { op, .. } if is_comparison_op(op) => {
                    Some("comparison result is discarded")
                }
                _ if incomplete_low_level(expr) => {
                    Some("call options are set but the call itself never executes")
                }
                _ => None,
            };
            if let Some(reason) = reason {
                em.emit(*span, label.clone(), format!("statement has no effect: {reason}"));
            }
        });
    }
}

/// SWE-136: secret-named state variables stored unencrypted.
pub(super) fn swe_136(ctx: &FileCtx, em: &mut Emitter) {
    for contract in &ctx.unit.contracts {
        for var in &contract.state_vars {
            if var.visibility == Visibility::Public {
                continue;
            }
            let lower = var.name.to_ascii_lowercase();
            if ctx.config.secret_names.iter().any(|frag| lower.contains(frag)) {
                em.emit(
                    var.span,
                    format!("{}.{}", contract.name, var.name),
                    format!(
                        "'{}' is readable from the public chain state regardless of \
                         its Solidity visibility",
                        var.name
                    ),
                );
            }
        }
    }
}

/// SWE-137: sensitive operation reachable without any access control.
pub(super) fn swe_137(ctx: &FileCtx, em: &mut Emitter) {
    for contract in &ctx.unit.contracts {
        for func in &contract.functions {
            if func.kind != FunctionKind::Regular
                || func.name == contract.name
                || !matches!(
                    func.visibility,
                    Visibility::Public | Visibility::External | Visibility::Unspecified
                )
                || matches!(
                    func.mutability,
                    Mutability::View | Mutability::Pure | Mutability::ConstantModifier
                )
                || !func.modifiers_invoked.is_empty()
            {
                continue;
            }
            let mut checks_sender = false;
            walk_exprs(func.body_stmts(), &mut |e| {
                if let Expr::Binary { op, .. } = e {
                    if (op == "==" || op == "!=") && contains_path(e, "msg.sender") {
                        checks_sender = true;
                    }
                }
            });
            if checks_sender {
                continue;
            }
            let label = qualified(Some(&contract.name), func);
            walk_exprs(func.body_stmts(), &mut |e| {
                // selfdestruct reachable by anyone
                if let Expr::Call { callee, span, .. } = e {
                    if matches!(callee.as_ident(), Some("selfdestruct" | "suicide")) {
                        em.emit(
                            *span,
                            label.clone(),
                            "anyone can destroy the contract: no caller check guards \
                             this selfdestruct"
                                .to_string(),
                        );
                        return;
                    }
                }
                // whole-balance sweep to a non-caller destination
                if let Some(call) = classify_call(e) {
                    if call.is_ether_send() {
                        let amount = call
                            .value
                            .or_else(|| call.args.first());
                        let whole_balance = amount.map_or(false, |a| {
                            expr_contains(a, &|i| {
                                matches!(i, Expr::Member { member, .. } if member == "balance")
                            })
                        });
                        let to_caller = strip_address_casts(call.dest)
                            .dotted_path()
                            .map_or(false, |p| p == "msg.sender");
                        if whole_balance && !to_caller {
                            em.emit(
                                call.span,
                                label.clone(),
                                "anyone can sweep the full balance: no caller check \
                                 guards this transfer"
                                    .to_string(),
                            );
                            return;
                        }
                    }
                }
                // ownership handover
                if let Expr::Assignment { lhs, span, .. } = e {
                    if let Some(name) = root_ident(lhs) {
                        let lower = name.to_ascii_lowercase();
                        let owner_like = lower.contains("owner") || lower.contains("admin");
                        let is_state = ctx
                            .contract_info(&contract.name)
                            .map_or(false, |i| i.state_vars.iter().any(|(_, v)| v.name == name));
                        if owner_like && is_state {
                            em.emit(
                                *span,
                                label.clone(),
                                format!(
                                    "anyone can reassign '{name}': no caller check guards \
                                     this write"
                                ),
                            );
                        }
                    }
                }
            });
        }
    }
}

/// SWE-138: contract accepts ether but can never pay it out.
pub(super) fn swe_138(ctx: &FileCtx, em: &mut Emitter) {
    for contract in &ctx.unit.contracts {
        if contract.kind != ContractKind::Contract {
            continue;
        }
        let Some(info) = ctx.contract_info(&contract.name) else { continue };
        let family: Vec<&ContractDef> = info
            .linearization
            .iter()
            .filter_map(|name| ctx.unit.contracts.iter().find(|c| &c.name == name))
            .collect();
        let mut payable_span: Option<(Span, String)> = None;
        let mut has_egress = false;
        for def in &family {
            for func in &def.functions {
                if func.mutability == Mutability::Payable && payable_span.is_none() {
                    payable_span = Some((func.span, qualified(Some(&contract.name), func)));
                }
                walk_exprs(func.body_stmts(), &mut |e| {
                    if classify_call(e).map_or(false, |c| c.is_ether_send()) {
                        has_egress = true;
                    }
                    if let Expr::Call { callee, .. } = e {
                        if matches!(callee.as_ident(), Some("selfdestruct" | "suicide")) {
                            has_egress = true;
                        }
                    }
                });
            }
        }
        if let Some((span, label)) = payable_span {
            if !has_egress {
                em.emit(
                    span,
                    label,
                    format!(
                        "'{}' accepts ether but defines no transfer, send, call or \
                         selfdestruct to release it",
                        contract.name
                    ),
                );
            }
        }
    }
}
