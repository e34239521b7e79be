//! AST for the supported Solidity subset. Every node carries a span; syntax
//! outside the subset is preserved as opaque statements rather than dropped.

use super::pragma::PragmaConstraint;
use super::token::{Span, Token};

#[derive(Debug, Clone)]
pub struct SourceUnit {
    pub path: String,
    pub pragmas: Vec<(PragmaConstraint, Span)>,
    pub imports: Vec<(String, Span)>,
    pub contracts: Vec<ContractDef>,
    /// Top-level functions and modifiers (listing fragments outside any
    /// contract are part of the supported input).
    pub free_functions: Vec<FunctionDef>,
    pub free_modifiers: Vec<ModifierDef>,
    pub parse_diagnostics: Vec<(Span, String)>,
    /// Full token stream, kept for lexical rules and suppression comments.
    pub tokens: Vec<Token>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContractKind {
    Contract,
    Interface,
    Library,
}

#[derive(Debug, Clone)]
pub struct ContractDef {
    pub name: String,
    pub kind: ContractKind,
    /// Base names in declaration order; order matters for linearization.
    pub bases: Vec<String>,
    pub state_vars: Vec<VarDecl>,
    pub functions: Vec<FunctionDef>,
    pub modifiers: Vec<ModifierDef>,
    pub events: Vec<EventDef>,
    pub structs: Vec<StructDef>,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Visibility {
    Public,
    Private,
    Internal,
    External,
    Unspecified,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutability {
    Payable,
    View,
    Pure,
    Nonpayable,
    /// pre-0.5 `constant` on a function
    ConstantModifier,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    Memory,
    Storage,
    Calldata,
    Unspecified,
}

#[derive(Debug, Clone)]
pub struct VarDecl {
    pub name: String,
    pub type_text: String,
    pub visibility: Visibility,
    pub is_constant: bool,
    pub initializer: Option<Expr>,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub struct Param {
    pub name: String,
    pub type_text: String,
    pub location: Location,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FunctionKind {
    Regular,
    /// `constructor(...)`
    ConstructorKeyword,
    Fallback,
    Receive,
}

#[derive(Debug, Clone)]
pub struct FunctionDef {
    /// Empty for constructor-keyword, fallback and receive definitions.
    pub name: String,
    pub kind: FunctionKind,
    pub visibility: Visibility,
    pub mutability: Mutability,
    pub params: Vec<Param>,
    pub returns: Vec<Param>,
    pub modifiers_invoked: Vec<String>,
    /// None for bodyless declarations (interfaces, abstract functions).
    pub body: Option<Vec<Stmt>>,
    pub span: Span,
}

impl FunctionDef {
    pub fn is_constructor_keyword(&self) -> bool {
        self.kind == FunctionKind::ConstructorKeyword
    }

    /// Statements of the body in evaluation order, depth first.
    pub fn body_stmts(&self) -> &[Stmt] {
        self.body.as_deref().unwrap_or(&[])
    }
}

#[derive(Debug, Clone)]
pub struct ModifierDef {
    pub name: String,
    pub params: Vec<Param>,
    pub body: Vec<Stmt>,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub struct EventDef {
    pub name: String,
    pub params: Vec<Param>,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub struct StructDef {
    pub name: String,
    pub fields: Vec<Param>,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub enum Stmt {
    Block(Vec<Stmt>, Span),
    If {
        cond: Expr,
        then_branch: Box<Stmt>,
        else_branch: Option<Box<Stmt>>,
        span: Span,
    },
    For {
        init: Option<Box<Stmt>>,
        cond: Option<Expr>,
        update: Option<Expr>,
        body: Box<Stmt>,
        span: Span,
    },
    While {
        cond: Expr,
        body: Box<Stmt>,
        span: Span,
    },
    Expr(Expr, Span),
    LocalVarDecl {
        name: String,
        type_text: String,
        location: Location,
        initializer: Option<Expr>,
        span: Span,
    },
    Return(Option<Expr>, Span),
    Emit(Expr, Span),
    Require(Vec<Expr>, Span),
    Assert(Vec<Expr>, Span),
    Revert(Vec<Expr>, Span),
    /// `assembly { ... }` with its raw token texts preserved for scanning.
    Assembly {
        raw_tokens: Vec<String>,
        span: Span,
    },
    /// `_;` inside a modifier body.
    Placeholder(Span),
    Throw(Span),
    /// Anything outside the subset, preserved token-for-token.
    Opaque {
        raw_tokens: Vec<String>,
        span: Span,
    },
}

impl Stmt {
    pub fn span(&self) -> Span {
        match self {
            Stmt::Block(_, s)
            | Stmt::Expr(_, s)
            | Stmt::Return(_, s)
            | Stmt::Emit(_, s)
            | Stmt::Require(_, s)
            | Stmt::Assert(_, s)
            | Stmt::Revert(_, s)
            | Stmt::Placeholder(s)
            | Stmt::Throw(s)
            | Stmt::LocalVarDecl { span: s, .. }
            | Stmt::If { span: s, .. }
            | Stmt::For { span: s, .. }
            | Stmt::While { span: s, .. }
            | Stmt::Assembly { span: s, .. }
            | Stmt::Opaque { span: s, .. } => *s,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LitKind {
    Number,
    Address,
    Str,
    Bool,
}

#[derive(Debug, Clone)]
pub enum Expr {
    Assignment {
        op: String,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
        span: Span,
    },
    Binary {
        op: String,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
        span: Span,
    },
    Unary {
        op: String,
        prefix: bool,
        operand: Box<Expr>,
        span: Span,
    },
    Call {
        callee: Box<Expr>,
        args: Vec<Expr>,
        /// `{value: ..., gas: ...}` call options (0.6+ braced form).
        value_opt: Option<Box<Expr>>,
        gas_opt: Option<Box<Expr>>,
        span: Span,
    },
    Member {
        object: Box<Expr>,
        member: String,
        span: Span,
    },
    Index {
        object: Box<Expr>,
        index: Option<Box<Expr>>,
        span: Span,
    },
    Ident {
        name: String,
        span: Span,
    },
    Literal {
        kind: LitKind,
        text: String,
        /// denomination suffix such as `ether` or `wei`, when present
        unit: Option<String>,
        span: Span,
    },
    Tuple(Vec<Expr>, Span),
    New {
        type_name: String,
        span: Span,
    },
    Conditional {
        cond: Box<Expr>,
        then_value: Box<Expr>,
        else_value: Box<Expr>,
        span: Span,
    },
}

impl Expr {
    pub fn span(&self) -> Span {
        match self {
            Expr::Assignment { span, .. }
            | Expr::Binary { span, .. }
            | Expr::Unary { span, .. }
            | Expr::Call { span, .. }
            | Expr::Member { span, .. }
            | Expr::Index { span, .. }
            | Expr::Ident { span, .. }
            | Expr::Literal { span, .. }
            | Expr::Tuple(_, span)
            | Expr::New { span, .. }
            | Expr::Conditional { span, .. } => *span,
        }
    }

    pub fn as_ident(&self) -> Option<&str> {
        match self {
            Expr::Ident { name, .. } => Some(name),
            _ => None,
        }
    }

    /// Walk this expression and its children, pre-order.
    pub fn walk<'a>(&'a self, visit: &mut dyn FnMut(&'a Expr)) {
        visit(self);
        match self {
            Expr::Assignment { lhs, rhs, .. } | Expr::Binary { lhs, rhs, .. } => {
                lhs.walk(visit);
                rhs.walk(visit);
            }
            Expr::Unary { operand, .. } => operand.walk(visit),
            Expr::Call {
                callee,
                args,
                value_opt,
                gas_opt,
                ..
            } => {
                callee.walk(visit);
                for a in args {
                    a.walk(visit);
                }
                if let Some(v) = value_opt {
                    v.walk(visit);
                }
                if let Some(g) = gas_opt {
                    g.walk(visit);
                }
            }
            Expr::Member { object, .. } => object.walk(visit),
            Expr::Index { object, index, .. } => {
                object.walk(visit);
                if let Some(ix) = index {
                    ix.walk(visit);
                }
            }
            Expr::Tuple(items, _) => {
                for item in items {
                    item.walk(visit);
                }
            }
            Expr::Conditional {
                cond,
                then_value,
                else_value,
                ..
            } => {
                cond.walk(visit);
                then_value.walk(visit);
                else_value.walk(visit);
            }
            Expr::Ident { .. } | Expr::Literal { .. } | Expr::New { .. } => {}
        }
    }

    /// Member path like "msg.sender" when the expression is a plain
    /// dotted chain of identifiers.
    pub fn dotted_path(&self) -> Option<String> {
        match self {
            Expr::Ident { name, .. } => Some(name.clone()),
            Expr::Member { object, member, .. } => {
                Some(format!("{}.{}", object.dotted_path()?, member))
            }
            _ => None,
        }
    }
}

/// Walk every statement in a body, depth first, including nested blocks
/// and loop/branch bodies.
pub fn walk_stmts<'a>(stmts: &'a [Stmt], visit: &mut dyn FnMut(&'a Stmt)) {
    for stmt in stmts {
        visit(stmt);
        match stmt {
            Stmt::Block(inner, _) => walk_stmts(inner, visit),
            Stmt::If {
                then_branch,
                else_branch,
                ..
            } => {
                walk_stmts(std::slice::from_ref(then_branch), visit);
                if let Some(e) = else_branch {
                    walk_stmts(std::slice::from_ref(e), visit);
                }
            }
            Stmt::For { init, body, .. } => {
                if let Some(i) = init {
                    walk_stmts(std::slice::from_ref(i), visit);
                }
                walk_stmts(std::slice::from_ref(body), visit);
            }
            Stmt::While { body, .. } => walk_stmts(std::slice::from_ref(body), visit),
            _ => {}
        }
    }
}

/// Visit every expression reachable from a statement list (conditions,
/// initializers, call arguments, nested blocks).
pub fn walk_exprs<'a>(stmts: &'a [Stmt], visit: &mut dyn FnMut(&'a Expr)) {
    walk_stmts(stmts, &mut |stmt| match stmt {
        Stmt::Expr(e, _) | Stmt::Emit(e, _) => e.walk(visit),
        Stmt::Return(Some(e), _) => e.walk(visit),
        Stmt::Require(args, _) | Stmt::Assert(args, _) | Stmt::Revert(args, _) => {
            for a in args {
                a.walk(visit);
            }
        }
        Stmt::LocalVarDecl {
            initializer: Some(e),
            ..
        } => e.walk(visit),
        Stmt::If { cond, .. } | Stmt::While { cond, .. } => cond.walk(visit),
        Stmt::For { cond, update, .. } => {
            if let Some(c) = cond {
                c.walk(visit);
            }
            if let Some(u) = update {
                u.walk(visit);
            }
        }
        _ => {}
    });
}

/// Canonicalize an elementary type name for ABI signature purposes.
pub fn canonical_type(type_text: &str) -> String {
    let base = type_text
        .trim()
        .trim_end_matches(" payable")
        .trim();
    // array suffixes canonicalize their element type
    if let Some(open) = base.find('[') {
        let (elem, suffix) = base.split_at(open);
        return format!("{}{}", canonical_type(elem), suffix.replace(' ', ""));
    }
    match base {
        "uint" => "uint256".to_string(),
        "int" => "int256".to_string(),
        "byte" => "bytes1".to_string(),
        "fixed" => "fixed128x18".to_string(),
        "ufixed" => "ufixed128x18".to_string(),
        other => other.to_string(),
    }
}

/// Canonical ABI signature "name(type1,type2,...)" of a function.
pub fn canonical_signature(func: &FunctionDef) -> String {
    let params: Vec<String> = func
        .params
        .iter()
        .map(|p| canonical_type(&p.type_text))
        .collect();
    format!("{}({})", func.name, params.join(","))
}
