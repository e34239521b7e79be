//! Shared AST predicates used by several Solidity detectors.

use crate::solidity::ast::*;
use crate::solidity::token::Span;

/// A classified call-shaped expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CallMethod<'a> {
    /// `dest.transfer(amount)`
    Transfer,
    /// `dest.send(amount)`
    Send,
    /// completed low-level `dest.call...(...)` (either option syntax)
    LowCall,
    Delegatecall,
    Staticcall,
    /// member call `obj.name(...)` that is none of the above
    HighLevel(&'a str),
    /// plain `name(...)`
    Plain(&'a str),
}

#[derive(Debug, Clone, Copy)]
pub struct ClassifiedCall<'a> {
    pub span: Span,
    pub dest: &'a Expr,
    pub method: CallMethod<'a>,
    pub value: Option<&'a Expr>,
    pub gas: Option<&'a Expr>,
    pub args: &'a [Expr],
}

impl<'a> ClassifiedCall<'a> {
    pub fn is_ether_send(&self) -> bool {
        matches!(self.method, CallMethod::Transfer | CallMethod::Send)
            || self.value.is_some()
    }

    pub fn is_low_level(&self) -> bool {
        matches!(
            self.method,
            CallMethod::LowCall | CallMethod::Delegatecall | CallMethod::Staticcall
        )
    }
}

/// Classify a call expression, peeling both call-option syntaxes:
/// `dest.call.value(v).gas(g)(...)` and `dest.call{value: v, gas: g}(...)`.
/// Returns None for non-calls and for option chains without a final
/// invocation (those are SWE-135 territory, see [`incomplete_low_level`]).
pub fn classify_call(expr: &Expr) -> Option<ClassifiedCall<'_>> {
    let Expr::Call {
        callee,
        args,
        value_opt,
        gas_opt,
        span,
    } = expr
    else {
        return None;
    };
    let mut value = value_opt.as_deref();
    let mut gas = gas_opt.as_deref();
    let mut cur: &Expr = callee;
    loop {
        match cur {
            // chained option application: `....value(v)` / `....gas(g)`
            Expr::Call {
                callee: inner,
                args: opt_args,
                ..
            } => match inner.as_ref() {
                Expr::Member { object, member, .. } if member == "value" => {
                    if value.is_none() {
                        value = opt_args.first();
                    }
                    cur = object;
                }
                Expr::Member { object, member, .. } if member == "gas" => {
                    if gas.is_none() {
                        gas = opt_args.first();
                    }
                    cur = object;
                }
                _ => {
                    // calling the result of another call; treat the inner
                    // call expression as the destination
                    return Some(ClassifiedCall {
                        span: *span,
                        dest: cur,
                        method: CallMethod::HighLevel(""),
                        value,
                        gas,
                        args,
                    });
                }
            },
            Expr::Member { object, member, .. } => {
                let method = match member.as_str() {
                    "transfer" => CallMethod::Transfer,
                    "send" => CallMethod::Send,
                    "call" => CallMethod::LowCall,
                    "delegatecall" => CallMethod::Delegatecall,
                    "staticcall" => CallMethod::Staticcall,
                    other => CallMethod::HighLevel(other),
                };
                return Some(ClassifiedCall {
                    span: *span,
                    dest: object,
                    method,
                    value,
                    gas,
                    args,
                });
            }
            Expr::Ident { name, .. } => {
                return Some(ClassifiedCall {
                    span: *span,
                    dest: cur,
                    method: CallMethod::Plain(name),
                    value,
                    gas,
                    args,
                });
            }
            other => {
                return Some(ClassifiedCall {
                    span: *span,
                    dest: other,
                    method: CallMethod::HighLevel(""),
                    value,
                    gas,
                    args,
                });
            }
        }
    }
}

/// An option application without the final invocation, like
/// `msg.sender.call.value(x)` used as a statement.
pub fn incomplete_low_level(expr: &Expr) -> bool {
    if let Expr::Call { callee, .. } = expr {
        if let Expr::Member { object, member, .. } = callee.as_ref() {
            if member == "value" || member == "gas" {
                let chain = object.dotted_path().unwrap_or_default();
                return chain.ends_with(".call")
                    || chain.ends_with(".send")
                    || chain.ends_with(".delegatecall");
            }
        }
    }
    false
}

/// Strip `payable(...)` and `address(...)` casts around a destination.
pub fn strip_address_casts(expr: &Expr) -> &Expr {
    if let Expr::Call { callee, args, .. } = expr {
        if let Some(name) = callee.as_ident() {
            if (name == "payable" || name == "address") && args.len() == 1 {
                return strip_address_casts(&args[0]);
            }
        }
    }
    expr
}

/// Root identifier of an lvalue-like chain (`a.b[c].d` -> `a`).
pub fn root_ident(expr: &Expr) -> Option<&str> {
    match expr {
        Expr::Ident { name, .. } => Some(name),
        Expr::Member { object, .. } => root_ident(object),
        Expr::Index { object, .. } => root_ident(object),
        _ => None,
    }
}

/// Display name of a function, usable in `construct` fields.
pub fn function_label(func: &FunctionDef) -> String {
    match func.kind {
        FunctionKind::ConstructorKeyword => "constructor".to_string(),
        FunctionKind::Fallback => "fallback".to_string(),
        FunctionKind::Receive => "receive".to_string(),
        FunctionKind::Regular => {
            if func.name.is_empty() {
                "<fallback>".to_string()
            } else {
                func.name.clone()
            }
        }
    }
}

pub fn qualified(contract: Option<&str>, func: &FunctionDef) -> String {
    match contract {
        Some(c) => format!("{}.{}", c, function_label(func)),
        None => function_label(func),
    }
}

/// All functions in a unit, paired with their enclosing contract when any.
pub fn all_functions(unit: &SourceUnit) -> Vec<(Option<&ContractDef>, &FunctionDef)> {
    let mut out = Vec::new();
    for contract in &unit.contracts {
        for func in &contract.functions {
            out.push((Some(contract), func));
        }
    }
    for func in &unit.free_functions {
        out.push((None, func));
    }
    out
}

/// Does any expression of the subtree satisfy the predicate?
pub fn expr_contains(expr: &Expr, pred: &dyn Fn(&Expr) -> bool) -> bool {
    let mut found = false;
    expr.walk(&mut |e| {
        if pred(e) {
            found = true;
        }
    });
    found
}

pub fn contains_path(expr: &Expr, path: &str) -> bool {
    expr_contains(expr, &|e| e.dotted_path().as_deref() == Some(path))
}

/// Statements of a loop body plus the loop's own spans, for in-loop checks.
pub fn loop_bodies(stmts: &[Stmt]) -> Vec<&Stmt> {
    let mut out = Vec::new();
    walk_stmts(stmts, &mut |s| match s {
        Stmt::For { body, .. } | Stmt::While { body, .. } => out.push(body.as_ref()),
        _ => {}
    });
    out
}

/// Visit every expression inside loop bodies of a function.
pub fn walk_loop_exprs<'a>(stmts: &'a [Stmt], visit: &mut dyn FnMut(&'a Expr)) {
    for body in loop_bodies(stmts) {
        walk_exprs(std::slice::from_ref(body), visit);
    }
}

/// Is `name` a state variable (own or inherited) of the contract per the
/// symbol table entry?
pub fn is_state_var(
    info: Option<&crate::solidity::symbols::ContractInfo>,
    name: &str,
) -> bool {
    info.map_or(false, |i| i.state_vars.iter().any(|(_, v)| v.name == name))
}

pub fn is_comparison_op(op: &str) -> bool {
    matches!(op, "==" | "!=" | "<" | ">" | "<=" | ">=")
}

/// Value of a decimal or hex integer literal, when it fits.
pub fn literal_value(expr: &Expr) -> Option<i128> {
    if let Expr::Literal {
        kind: LitKind::Number,
        text,
        ..
    } = expr
    {
        if let Some(hex) = text.strip_prefix("0x").or_else(|| text.strip_prefix("0X")) {
            return i128::from_str_radix(hex, 16).ok();
        }
        return text.parse().ok();
    }
    None
}

pub fn is_integer_literal(expr: &Expr) -> bool {
    matches!(
        expr,
        Expr::Literal {
            kind: LitKind::Number,
            ..
        }
    )
}

/// Type of an identifier as declared in the surrounding scopes: function
/// params, locals, then contract state (including inherited).
pub fn declared_type<'a>(
    name: &str,
    func: &'a FunctionDef,
    info: Option<&'a crate::solidity::symbols::ContractInfo>,
) -> Option<String> {
    for p in &func.params {
        if p.name == name {
            return Some(p.type_text.clone());
        }
    }
    let mut found = None;
    walk_stmts(func.body_stmts(), &mut |s| {
        if let Stmt::LocalVarDecl {
            name: n, type_text, ..
        } = s
        {
            if n == name && found.is_none() {
                found = Some(type_text.clone());
            }
        }
    });
    if found.is_some() {
        return found;
    }
    info.and_then(|i| {
        i.state_vars
            .iter()
            .find(|(_, v)| v.name == name)
            .map(|(_, v)| v.type_text.clone())
    })
}

/// True for ABI-dynamic types: `string`, `bytes`, and any `T[]`.
pub fn is_dynamic_type(type_text: &str) -> bool {
    let t = type_text.trim();
    t == "string" || t == "bytes" || t.ends_with("[]")
}
