//! Recursive-descent parser for the Solidity subset the detectors need.
//! Recovery is contract-granular: a broken declaration records a diagnostic
//! and skips ahead, it never aborts the file.

use super::ast::*;
use super::pragma::parse_pragma;
use super::token::{tokenize, Span, Token, TokenKind};

const UNIT_SUFFIXES: &[&str] = &[
    "wei", "gwei", "szabo", "finney", "ether", "seconds", "minutes", "hours", "days", "weeks",
    "years",
];

const ASSIGN_OPS: &[&str] = &[
    "=", "+=", "-=", "*=", "/=", "%=", "|=", "&=", "^=", "<<=", ">>=",
];

/// Tokenize and parse one file.
pub fn parse_source(source: &str, path: &str) -> SourceUnit {
    let (tokens, lex_diags) = tokenize(source);
    let mut unit = parse(&tokens, path);
    for (span, msg) in lex_diags {
        unit.parse_diagnostics.push((span, msg));
    }
    unit.parse_diagnostics.sort_by_key(|(s, _)| s.offset);
    unit
}

/// Parse a token stream (from [`tokenize`]) into a [`SourceUnit`].
pub fn parse(tokens: &[Token], path: &str) -> SourceUnit {
    let significant: Vec<Token> = tokens
        .iter()
        .filter(|t| t.kind != TokenKind::Comment)
        .cloned()
        .collect();
    let mut parser = Parser {
        tokens: &significant,
        pos: 0,
        diags: Vec::new(),
    };
    let mut unit = SourceUnit {
        path: path.to_string(),
        pragmas: Vec::new(),
        imports: Vec::new(),
        contracts: Vec::new(),
        free_functions: Vec::new(),
        free_modifiers: Vec::new(),
        parse_diagnostics: Vec::new(),
        tokens: tokens.to_vec(),
    };
    parser.parse_unit(&mut unit);
    unit.parse_diagnostics.append(&mut parser.diags);
    unit
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    diags: Vec<(Span, String)>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &'a Token {
        &self.tokens[self.pos.min(self.tokens.len() - 1)]
    }

    fn peek_at(&self, ahead: usize) -> &'a Token {
        let idx = (self.pos + ahead).min(self.tokens.len() - 1);
        &self.tokens[idx]
    }

    fn at_end(&self) -> bool {
        self.peek().kind == TokenKind::End
    }

    fn advance(&mut self) -> &'a Token {
        let t = self.peek();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn at(&self, text: &str) -> bool {
        self.peek().text == text
    }

    fn eat(&mut self, text: &str) -> bool {
        if self.at(text) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, text: &str) -> Result<&'a Token, ()> {
        if self.at(text) {
            Ok(self.advance())
        } else {
            let got = self.peek();
            self.diags.push((
                got.span,
                format!("expected {text:?}, found {:?}", got.text),
            ));
            Err(())
        }
    }

    fn diag_here(&mut self, msg: impl Into<String>) {
        let span = self.peek().span;
        self.diags.push((span, msg.into()));
    }

    /// Skip past a balanced `{ ... }` starting at the current `{`.
    fn skip_braced(&mut self) {
        if !self.eat("{") {
            return;
        }
        let mut depth = 1usize;
        while !self.at_end() && depth > 0 {
            match self.advance().text.as_str() {
                "{" => depth += 1,
                "}" => depth -= 1,
                _ => {}
            }
        }
    }

    fn skip_to_semicolon(&mut self) {
        while !self.at_end() && !self.at(";") && !self.at("}") {
            if self.at("{") {
                self.skip_braced();
            } else {
                self.advance();
            }
        }
        self.eat(";");
    }

    // ---- top level -------------------------------------------------------

    fn parse_unit(&mut self, unit: &mut SourceUnit) {
        while !self.at_end() {
            let tok = self.peek();
            match tok.text.as_str() {
                "pragma" => self.parse_pragma_directive(unit),
                "import" => self.parse_import(unit),
                "contract" | "interface" | "library" => {
                    if let Some(c) = self.parse_contract() {
                        unit.contracts.push(c);
                    }
                }
                "function" => {
                    if let Some(f) = self.parse_function() {
                        unit.free_functions.push(f);
                    }
                }
                "modifier" => {
                    if let Some(m) = self.parse_modifier() {
                        unit.free_modifiers.push(m);
                    }
                }
                "using" | "enum" | "struct" | "abstract" => {
                    // tolerated at top level, not modelled there
                    self.advance();
                    while !self.at_end() && !self.at(";") && !self.at("{") {
                        self.advance();
                    }
                    if self.at("{") {
                        self.skip_braced();
                    } else {
                        self.eat(";");
                    }
                }
                _ => {
                    self.diag_here(format!("unexpected top-level token {:?}", tok.text));
                    self.advance();
                }
            }
        }
    }

    fn parse_pragma_directive(&mut self, unit: &mut SourceUnit) {
        let start = self.peek().span;
        // reconstruct the directive text with original adjacency
        let mut text = String::new();
        let mut last: Option<&Token> = None;
        while !self.at_end() && !self.at(";") {
            let tok = self.advance();
            if let Some(prev) = last {
                if !prev.adjacent_to_next {
                    text.push(' ');
                }
            }
            text.push_str(&tok.text);
            last = Some(tok);
        }
        let end = self.peek().span;
        self.eat(";");
        text.push(';');
        let span = start.cover(end);
        if text.starts_with("pragma solidity") {
            let (constraint, diag) = parse_pragma(&text);
            if let Some(msg) = diag {
                self.diags.push((span, msg));
            }
            unit.pragmas.push((constraint, span));
        }
        // other pragma dialects (experimental, abicoder) are ignored
    }

    fn parse_import(&mut self, unit: &mut SourceUnit) {
        let start = self.advance().span; // import
        let mut path = None;
        let mut end = start;
        while !self.at_end() && !self.at(";") {
            let tok = self.advance();
            end = tok.span;
            if tok.kind == TokenKind::StringLiteral && path.is_none() {
                path = Some(tok.text.trim_matches(|c| c == '"' || c == '\'').to_string());
            }
        }
        self.eat(";");
        if let Some(p) = path {
            unit.imports.push((p, start.cover(end)));
        } else {
            self.diags.push((start, "import without a path".to_string()));
        }
    }

    // ---- contracts -------------------------------------------------------

    fn parse_contract(&mut self) -> Option<ContractDef> {
        let kw = self.advance();
        let kind = match kw.text.as_str() {
            "interface" => ContractKind::Interface,
            "library" => ContractKind::Library,
            _ => ContractKind::Contract,
        };
        let start = kw.span;
        let name_tok = self.peek();
        if name_tok.kind != TokenKind::Identifier {
            self.diag_here("expected contract name");
            self.skip_braced();
            return None;
        }
        let name = self.advance().text.clone();
        let mut bases = Vec::new();
        if self.eat("is") {
            loop {
                let base = self.peek();
                if base.kind != TokenKind::Identifier {
                    break;
                }
                bases.push(self.advance().text.clone());
                if self.at("(") {
                    // constructor arguments on the base
                    self.skip_parenthesized();
                }
                if !self.eat(",") {
                    break;
                }
            }
        }
        if self.expect("{").is_err() {
            return None;
        }
        let mut contract = ContractDef {
            name,
            kind,
            bases,
            state_vars: Vec::new(),
            functions: Vec::new(),
            modifiers: Vec::new(),
            events: Vec::new(),
            structs: Vec::new(),
            span: start,
        };
        while !self.at_end() && !self.at("}") {
            let before = self.pos;
            self.parse_member(&mut contract);
            if self.pos == before {
                // no progress: drop the token so the loop terminates
                self.diag_here(format!("skipping token {:?}", self.peek().text));
                self.advance();
            }
        }
        let end = self.peek().span;
        self.eat("}");
        contract.span = start.cover(end);
        Some(contract)
    }

    fn skip_parenthesized(&mut self) {
        if !self.eat("(") {
            return;
        }
        let mut depth = 1usize;
        while !self.at_end() && depth > 0 {
            match self.advance().text.as_str() {
                "(" => depth += 1,
                ")" => depth -= 1,
                _ => {}
            }
        }
    }

    fn parse_member(&mut self, contract: &mut ContractDef) {
        match self.peek().text.as_str() {
            "function" | "constructor" | "fallback" | "receive" => {
                if let Some(f) = self.parse_function() {
                    contract.functions.push(f);
                }
            }
            "modifier" => {
                if let Some(m) = self.parse_modifier() {
                    contract.modifiers.push(m);
                }
            }
            "event" => {
                if let Some(e) = self.parse_event() {
                    contract.events.push(e);
                }
            }
            "struct" => {
                if let Some(s) = self.parse_struct() {
                    contract.structs.push(s);
                }
            }
            "enum" => {
                self.advance();
                if self.peek().kind == TokenKind::Identifier {
                    self.advance();
                }
                self.skip_braced();
            }
            "using" => {
                self.advance();
                self.skip_to_semicolon();
            }
            _ => {
                if let Some(var) = self.parse_state_var() {
                    contract.state_vars.push(var);
                } else {
                    self.diag_here(format!(
                        "unsupported contract member starting at {:?}",
                        self.peek().text
                    ));
                    self.skip_to_semicolon();
                }
            }
        }
    }

    fn parse_state_var(&mut self) -> Option<VarDecl> {
        let start_pos = self.pos;
        let start = self.peek().span;
        let type_text = self.parse_type()?;
        let mut visibility = Visibility::Unspecified;
        let mut is_constant = false;
        loop {
            match self.peek().text.as_str() {
                "public" => {
                    visibility = Visibility::Public;
                    self.advance();
                }
                "private" => {
                    visibility = Visibility::Private;
                    self.advance();
                }
                "internal" => {
                    visibility = Visibility::Internal;
                    self.advance();
                }
                "constant" | "immutable" => {
                    is_constant = true;
                    self.advance();
                }
                _ => break,
            }
        }
        let name_tok = self.peek();
        if name_tok.kind != TokenKind::Identifier {
            self.pos = start_pos;
            return None;
        }
        let name = self.advance().text.clone();
        let initializer = if self.eat("=") {
            self.parse_expr().ok()
        } else {
            None
        };
        let end = self.peek().span;
        if self.expect(";").is_err() {
            self.skip_to_semicolon();
        }
        Some(VarDecl {
            name,
            type_text,
            visibility,
            is_constant,
            initializer,
            span: start.cover(end),
        })
    }

    // ---- types -----------------------------------------------------------

    /// Parse a type and return its text. Returns None (without consuming on
    /// failure paths other than a committed `mapping`/`function`) when the
    /// tokens don't start a type.
    fn parse_type(&mut self) -> Option<String> {
        let start_pos = self.pos;
        let tok = self.peek();
        let mut text = match tok.text.as_str() {
            "mapping" => {
                self.advance();
                if self.expect("(").is_err() {
                    self.pos = start_pos;
                    return None;
                }
                let key = self.parse_type().unwrap_or_default();
                if self.expect("=>").is_err() {
                    self.pos = start_pos;
                    return None;
                }
                let value = self.parse_type().unwrap_or_default();
                if self.expect(")").is_err() {
                    self.pos = start_pos;
                    return None;
                }
                format!("mapping({key} => {value})")
            }
            "function" => {
                // function type: function (params) [attrs] [returns (params)]
                self.advance();
                if !self.at("(") {
                    self.pos = start_pos;
                    return None;
                }
                let params = self.parse_param_list().unwrap_or_default();
                let mut t = format!(
                    "function({})",
                    params
                        .iter()
                        .map(|p| p.type_text.clone())
                        .collect::<Vec<_>>()
                        .join(",")
                );
                loop {
                    match self.peek().text.as_str() {
                        "internal" | "external" | "public" | "private" | "pure" | "view"
                        | "payable" => {
                            t.push(' ');
                            t.push_str(&self.advance().text);
                        }
                        "returns" => {
                            self.advance();
                            let rets = self.parse_param_list().unwrap_or_default();
                            t.push_str(&format!(
                                " returns({})",
                                rets.iter()
                                    .map(|p| p.type_text.clone())
                                    .collect::<Vec<_>>()
                                    .join(",")
                            ));
                        }
                        _ => break,
                    }
                }
                t
            }
            "var" => {
                self.advance();
                "var".to_string()
            }
            _ => {
                if tok.kind != TokenKind::Identifier {
                    return None;
                }
                let mut t = self.advance().text.clone();
                // qualified name like Lib.Struct
                while self.at(".") && self.peek_at(1).kind == TokenKind::Identifier {
                    self.advance();
                    t.push('.');
                    t.push_str(&self.advance().text);
                }
                // `address payable`
                if t == "address" && self.at("payable") {
                    self.advance();
                    t.push_str(" payable");
                }
                t
            }
        };
        // array suffixes
        loop {
            if self.at("[") {
                let next = self.peek_at(1);
                if next.is("]") {
                    self.advance();
                    self.advance();
                    text.push_str("[]");
                    continue;
                }
                if next.kind == TokenKind::IntegerLiteral && self.peek_at(2).is("]") {
                    let size = next.text.clone();
                    self.advance();
                    self.advance();
                    self.advance();
                    text.push_str(&format!("[{size}]"));
                    continue;
                }
            }
            break;
        }
        Some(text)
    }

    fn parse_location(&mut self) -> Location {
        match self.peek().text.as_str() {
            "memory" => {
                self.advance();
                Location::Memory
            }
            "storage" => {
                self.advance();
                Location::Storage
            }
            "calldata" => {
                self.advance();
                Location::Calldata
            }
            _ => Location::Unspecified,
        }
    }

    fn parse_param_list(&mut self) -> Option<Vec<Param>> {
        if !self.eat("(") {
            return None;
        }
        let mut params = Vec::new();
        if self.eat(")") {
            return Some(params);
        }
        loop {
            let start = self.peek().span;
            let Some(type_text) = self.parse_type() else {
                self.diag_here("expected parameter type");
                // recover to the closing parenthesis
                while !self.at_end() && !self.at(")") {
                    self.advance();
                }
                self.eat(")");
                return Some(params);
            };
            let location = self.parse_location();
            self.eat("indexed");
            let mut name = String::new();
            let mut end = start;
            if self.peek().kind == TokenKind::Identifier {
                let tok = self.advance();
                name = tok.text.clone();
                end = tok.span;
            }
            params.push(Param {
                name,
                type_text,
                location,
                span: start.cover(end),
            });
            if !self.eat(",") {
                break;
            }
        }
        self.expect(")").ok();
        Some(params)
    }

    // ---- functions, modifiers, events, structs ---------------------------

    fn parse_function(&mut self) -> Option<FunctionDef> {
        let kw = self.advance();
        let start = kw.span;
        let (kind, mut name) = match kw.text.as_str() {
            "constructor" => (FunctionKind::ConstructorKeyword, String::new()),
            "fallback" => (FunctionKind::Fallback, String::new()),
            "receive" => (FunctionKind::Receive, String::new()),
            _ => (FunctionKind::Regular, String::new()),
        };
        if kind == FunctionKind::Regular && self.peek().kind == TokenKind::Identifier {
            name = self.advance().text.clone();
        }
        let params = self.parse_param_list().unwrap_or_default();
        let mut visibility = Visibility::Unspecified;
        let mut mutability = Mutability::Nonpayable;
        let mut modifiers_invoked = Vec::new();
        let mut returns = Vec::new();
        loop {
            let tok = self.peek();
            match tok.text.as_str() {
                "public" => {
                    visibility = Visibility::Public;
                    self.advance();
                }
                "private" => {
                    visibility = Visibility::Private;
                    self.advance();
                }
                "internal" => {
                    visibility = Visibility::Internal;
                    self.advance();
                }
                "external" => {
                    visibility = Visibility::External;
                    self.advance();
                }
                "payable" => {
                    mutability = Mutability::Payable;
                    self.advance();
                }
                "view" => {
                    mutability = Mutability::View;
                    self.advance();
                }
                "pure" => {
                    mutability = Mutability::Pure;
                    self.advance();
                }
                "constant" => {
                    mutability = Mutability::ConstantModifier;
                    self.advance();
                }
                "virtual" => {
                    self.advance();
                }
                "override" => {
                    self.advance();
                    if self.at("(") {
                        self.skip_parenthesized();
                    }
                }
                "returns" => {
                    self.advance();
                    returns = self.parse_param_list().unwrap_or_default();
                }
                "{" | ";" => break,
                _ => {
                    if tok.kind == TokenKind::Identifier {
                        modifiers_invoked.push(self.advance().text.clone());
                        if self.at("(") {
                            self.skip_parenthesized();
                        }
                    } else {
                        self.diag_here(format!("unexpected token {:?} in function header", tok.text));
                        self.advance();
                    }
                }
            }
        }
        let body = if self.at("{") {
            Some(self.parse_block_stmts())
        } else {
            self.eat(";");
            None
        };
        let end = if self.pos > 0 {
            self.tokens[self.pos - 1].span
        } else {
            start
        };
        Some(FunctionDef {
            name,
            kind,
            visibility,
            mutability,
            params,
            returns,
            modifiers_invoked,
            body,
            span: start.cover(end),
        })
    }

    fn parse_modifier(&mut self) -> Option<ModifierDef> {
        let start = self.advance().span; // modifier
        let name = if self.peek().kind == TokenKind::Identifier
            || self.peek().kind == TokenKind::Keyword
        {
            self.advance().text.clone()
        } else {
            self.diag_here("expected modifier name");
            return None;
        };
        let params = if self.at("(") {
            self.parse_param_list().unwrap_or_default()
        } else {
            Vec::new()
        };
        // tolerate attribute keywords before the body
        while !self.at("{") && !self.at(";") && !self.at_end() {
            self.advance();
        }
        let body = if self.at("{") {
            self.parse_block_stmts()
        } else {
            self.eat(";");
            Vec::new()
        };
        let end = self.tokens[self.pos.saturating_sub(1)].span;
        Some(ModifierDef {
            name,
            params,
            body,
            span: start.cover(end),
        })
    }

    fn parse_event(&mut self) -> Option<EventDef> {
        let start = self.advance().span; // event
        if self.peek().kind != TokenKind::Identifier {
            self.diag_here("expected event name");
            self.skip_to_semicolon();
            return None;
        }
        let name = self.advance().text.clone();
        let params = self.parse_param_list().unwrap_or_default();
        self.eat("anonymous");
        let end = self.peek().span;
        self.expect(";").ok();
        Some(EventDef {
            name,
            params,
            span: start.cover(end),
        })
    }

    fn parse_struct(&mut self) -> Option<StructDef> {
        let start = self.advance().span; // struct
        if self.peek().kind != TokenKind::Identifier {
            self.diag_here("expected struct name");
            self.skip_braced();
            return None;
        }
        let name = self.advance().text.clone();
        if self.expect("{").is_err() {
            return None;
        }
        let mut fields = Vec::new();
        while !self.at_end() && !self.at("}") {
            let fstart = self.peek().span;
            let Some(type_text) = self.parse_type() else {
                self.diag_here("expected struct field type");
                self.skip_to_semicolon();
                continue;
            };
            let location = self.parse_location();
            let mut fname = String::new();
            let mut fend = fstart;
            if self.peek().kind == TokenKind::Identifier {
                let tok = self.advance();
                fname = tok.text.clone();
                fend = tok.span;
            }
            self.expect(";").ok();
            fields.push(Param {
                name: fname,
                type_text,
                location,
                span: fstart.cover(fend),
            });
        }
        let end = self.peek().span;
        self.eat("}");
        Some(StructDef {
            name,
            fields,
            span: start.cover(end),
        })
    }

    // ---- statements ------------------------------------------------------

    fn parse_block_stmts(&mut self) -> Vec<Stmt> {
        self.expect("{").ok();
        let mut stmts = Vec::new();
        while !self.at_end() && !self.at("}") {
            let before = self.pos;
            if let Some(stmt) = self.parse_statement() {
                stmts.push(stmt);
            }
            if self.pos == before {
                self.diag_here(format!("skipping token {:?} in block", self.peek().text));
                self.advance();
            }
        }
        self.eat("}");
        stmts
    }

    fn parse_statement(&mut self) -> Option<Stmt> {
        let start = self.peek().span;
        match self.peek().text.as_str() {
            "{" => {
                let stmts = self.parse_block_stmts();
                let end = self.tokens[self.pos.saturating_sub(1)].span;
                return Some(Stmt::Block(stmts, start.cover(end)));
            }
            "if" => {
                self.advance();
                self.expect("(").ok()?;
                let cond = self.parse_expr().ok()?;
                self.expect(")").ok();
                let then_branch = Box::new(self.parse_statement()?);
                let else_branch = if self.eat("else") {
                    Some(Box::new(self.parse_statement()?))
                } else {
                    None
                };
                let end = self.tokens[self.pos.saturating_sub(1)].span;
                return Some(Stmt::If {
                    cond,
                    then_branch,
                    else_branch,
                    span: start.cover(end),
                });
            }
            "for" => {
                self.advance();
                self.expect("(").ok()?;
                let init = if self.eat(";") {
                    None
                } else {
                    let s = self.parse_simple_statement()?;
                    self.expect(";").ok();
                    Some(Box::new(s))
                };
                let cond = if self.at(";") {
                    None
                } else {
                    self.parse_expr().ok()
                };
                self.expect(";").ok();
                let update = if self.at(")") {
                    None
                } else {
                    self.parse_expr().ok()
                };
                self.expect(")").ok();
                let body = Box::new(self.parse_statement()?);
                let end = self.tokens[self.pos.saturating_sub(1)].span;
                return Some(Stmt::For {
                    init,
                    cond,
                    update,
                    body,
                    span: start.cover(end),
                });
            }
            "while" => {
                self.advance();
                self.expect("(").ok()?;
                let cond = self.parse_expr().ok()?;
                self.expect(")").ok();
                let body = Box::new(self.parse_statement()?);
                let end = self.tokens[self.pos.saturating_sub(1)].span;
                return Some(Stmt::While {
                    cond,
                    body,
                    span: start.cover(end),
                });
            }
            "return" => {
                self.advance();
                let value = if self.at(";") {
                    None
                } else {
                    self.parse_expr().ok()
                };
                let end = self.peek().span;
                self.expect(";").ok();
                return Some(Stmt::Return(value, start.cover(end)));
            }
            "emit" => {
                self.advance();
                let call = self.parse_expr().ok()?;
                let end = self.peek().span;
                self.expect(";").ok();
                return Some(Stmt::Emit(call, start.cover(end)));
            }
            "throw" => {
                self.advance();
                let end = self.peek().span;
                self.expect(";").ok();
                return Some(Stmt::Throw(start.cover(end)));
            }
            "assembly" => {
                self.advance();
                if self.peek().kind == TokenKind::StringLiteral {
                    self.advance(); // dialect tag like "evmasm"
                }
                self.expect("{").ok()?;
                let mut raw_tokens = Vec::new();
                let mut depth = 1usize;
                while !self.at_end() && depth > 0 {
                    let tok = self.advance();
                    match tok.text.as_str() {
                        "{" => depth += 1,
                        "}" => depth -= 1,
                        _ => {}
                    }
                    if depth > 0 {
                        raw_tokens.push(tok.text.clone());
                    }
                }
                let end = self.tokens[self.pos.saturating_sub(1)].span;
                return Some(Stmt::Assembly {
                    raw_tokens,
                    span: start.cover(end),
                });
            }
            "unchecked" => {
                self.advance();
                let stmts = self.parse_block_stmts();
                let end = self.tokens[self.pos.saturating_sub(1)].span;
                return Some(Stmt::Block(stmts, start.cover(end)));
            }
            "_" => {
                if self.peek_at(1).is(";") {
                    self.advance();
                    let end = self.peek().span;
                    self.advance();
                    return Some(Stmt::Placeholder(start.cover(end)));
                }
            }
            "do" | "try" | "delete" => {
                // outside the subset: preserve opaquely
                return Some(self.opaque_statement());
            }
            _ => {}
        }
        let stmt = self.parse_simple_statement()?;
        self.expect(";").ok();
        Some(stmt)
    }

    /// A statement without its trailing `;`: local declaration, builtin
    /// guard call, or expression.
    fn parse_simple_statement(&mut self) -> Option<Stmt> {
        let start = self.peek().span;
        // require/assert/revert become dedicated nodes
        let head = self.peek().text.clone();
        if (head == "require" || head == "assert" || head == "revert") && self.peek_at(1).is("(") {
            self.advance();
            let args = self.parse_call_args().ok()?;
            let end = self.tokens[self.pos.saturating_sub(1)].span;
            let span = start.cover(end);
            return Some(match head.as_str() {
                "require" => Stmt::Require(args, span),
                "assert" => Stmt::Assert(args, span),
                _ => Stmt::Revert(args, span),
            });
        }
        if let Some(stmt) = self.try_parse_tuple_assignment() {
            return Some(stmt);
        }
        if let Some(decl) = self.try_parse_local_decl() {
            return Some(decl);
        }
        match self.parse_expr() {
            Ok(expr) => {
                let span = start.cover(expr.span());
                Some(Stmt::Expr(expr, span))
            }
            Err(()) => Some(self.opaque_statement()),
        }
    }

    /// `(bool ok, ) = <expr>` — tuple destructuring assignment. The bound
    /// names become a Tuple of Idents so rules still see the right-hand call.
    fn try_parse_tuple_assignment(&mut self) -> Option<Stmt> {
        if !self.at("(") {
            return None;
        }
        let mut depth = 0usize;
        let mut close = self.pos;
        while close < self.tokens.len() {
            match self.tokens[close].text.as_str() {
                "(" => depth += 1,
                ")" => {
                    depth -= 1;
                    if depth == 0 {
                        break;
                    }
                }
                _ => {}
            }
            close += 1;
        }
        let next = self.tokens.get(close + 1)?;
        if next.text != "=" {
            return None;
        }
        let start = self.peek().span;
        // the last identifier of each comma segment is the bound name
        let mut names: Vec<Expr> = Vec::new();
        let mut current: Option<&Token> = None;
        for t in &self.tokens[self.pos + 1..close] {
            if t.text == "," {
                if let Some(n) = current.take() {
                    names.push(Expr::Ident {
                        name: n.text.clone(),
                        span: n.span,
                    });
                }
            } else if t.kind == TokenKind::Identifier {
                current = Some(t);
            }
        }
        if let Some(n) = current {
            names.push(Expr::Ident {
                name: n.text.clone(),
                span: n.span,
            });
        }
        self.pos = close + 2;
        let rhs = self.parse_expr().ok()?;
        let span = start.cover(rhs.span());
        let assignment = Expr::Assignment {
            op: "=".to_string(),
            lhs: Box::new(Expr::Tuple(names, start)),
            rhs: Box::new(rhs),
            span,
        };
        Some(Stmt::Expr(assignment, span))
    }

    fn opaque_statement(&mut self) -> Stmt {
        let start = self.peek().span;
        let mut raw_tokens = Vec::new();
        while !self.at_end() && !self.at(";") && !self.at("}") {
            if self.at("{") {
                let brace_start = self.pos;
                self.skip_braced();
                for t in &self.tokens[brace_start..self.pos] {
                    raw_tokens.push(t.text.clone());
                }
            } else {
                raw_tokens.push(self.advance().text.clone());
            }
        }
        let end = self.peek().span;
        self.eat(";");
        self.diags
            .push((start, "statement outside the supported subset".to_string()));
        Stmt::Opaque {
            raw_tokens,
            span: start.cover(end),
        }
    }

    fn try_parse_local_decl(&mut self) -> Option<Stmt> {
        let start_pos = self.pos;
        let start = self.peek().span;
        let type_text = self.parse_type()?;
        let location = self.parse_location();
        let name_tok = self.peek();
        if name_tok.kind != TokenKind::Identifier {
            self.pos = start_pos;
            return None;
        }
        // a declaration's name is followed by `=`, `;`, `,` or `)`
        let after = self.peek_at(1);
        if !(after.is("=") || after.is(";") || after.is(",") || after.is(")")) {
            self.pos = start_pos;
            return None;
        }
        let name = self.advance().text.clone();
        let initializer = if self.eat("=") {
            match self.parse_expr() {
                Ok(e) => Some(e),
                Err(()) => {
                    self.pos = start_pos;
                    return None;
                }
            }
        } else {
            None
        };
        let end = self.tokens[self.pos.saturating_sub(1)].span;
        Some(Stmt::LocalVarDecl {
            name,
            type_text,
            location,
            initializer,
            span: start.cover(end),
        })
    }

    // ---- expressions -----------------------------------------------------

    fn parse_expr(&mut self) -> Result<Expr, ()> {
        self.parse_assignment()
    }

    fn parse_assignment(&mut self) -> Result<Expr, ()> {
        let lhs = self.parse_conditional()?;
        let op = self.peek().text.clone();
        if self.peek().kind == TokenKind::Operator && ASSIGN_OPS.contains(&op.as_str()) {
            self.advance();
            let rhs = self.parse_assignment()?;
            let span = lhs.span().cover(rhs.span());
            return Ok(Expr::Assignment {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
                span,
            });
        }
        Ok(lhs)
    }

    fn parse_conditional(&mut self) -> Result<Expr, ()> {
        let cond = self.parse_binary(0)?;
        if self.eat("?") {
            let then_value = self.parse_expr()?;
            self.expect(":")?;
            let else_value = self.parse_conditional()?;
            let span = cond.span().cover(else_value.span());
            return Ok(Expr::Conditional {
                cond: Box::new(cond),
                then_value: Box::new(then_value),
                else_value: Box::new(else_value),
                span,
            });
        }
        Ok(cond)
    }

    fn parse_binary(&mut self, min_level: usize) -> Result<Expr, ()> {
        const LEVELS: &[&[&str]] = &[
            &["||"],
            &["&&"],
            &["==", "!="],
            &["<", ">", "<=", ">="],
            &["|"],
            &["^"],
            &["&"],
            &["<<", ">>"],
            &["+", "-"],
            &["*", "/", "%"],
            &["**"],
        ];
        if min_level >= LEVELS.len() {
            return self.parse_unary();
        }
        let mut lhs = self.parse_binary(min_level + 1)?;
        loop {
            let tok = self.peek();
            if tok.kind == TokenKind::Operator && LEVELS[min_level].contains(&tok.text.as_str()) {
                let op = self.advance().text.clone();
                let rhs = self.parse_binary(min_level + 1)?;
                let span = lhs.span().cover(rhs.span());
                lhs = Expr::Binary {
                    op,
                    lhs: Box::new(lhs),
                    rhs: Box::new(rhs),
                    span,
                };
            } else {
                break;
            }
        }
        Ok(lhs)
    }

    fn parse_unary(&mut self) -> Result<Expr, ()> {
        let tok = self.peek();
        let text = tok.text.clone();
        if matches!(text.as_str(), "!" | "~" | "-" | "+" | "++" | "--") {
            let start = self.advance().span;
            let operand = self.parse_unary()?;
            let span = start.cover(operand.span());
            return Ok(Expr::Unary {
                op: text,
                prefix: true,
                operand: Box::new(operand),
                span,
            });
        }
        if text == "delete" {
            let start = self.advance().span;
            let operand = self.parse_unary()?;
            let span = start.cover(operand.span());
            return Ok(Expr::Unary {
                op: "delete".to_string(),
                prefix: true,
                operand: Box::new(operand),
                span,
            });
        }
        if text == "new" {
            let start = self.advance().span;
            let type_name = self.parse_type().ok_or(())?;
            let end = self.tokens[self.pos.saturating_sub(1)].span;
            let new_expr = Expr::New {
                type_name,
                span: start.cover(end),
            };
            return self.parse_postfix(new_expr);
        }
        let primary = self.parse_primary()?;
        self.parse_postfix(primary)
    }

    fn parse_primary(&mut self) -> Result<Expr, ()> {
        let tok = self.peek();
        let span = tok.span;
        match tok.kind {
            TokenKind::IntegerLiteral => {
                let text = self.advance().text.clone();
                let unit = if self.peek().kind == TokenKind::Identifier
                    && UNIT_SUFFIXES.contains(&self.peek().text.as_str())
                {
                    Some(self.advance().text.clone())
                } else {
                    None
                };
                Ok(Expr::Literal {
                    kind: LitKind::Number,
                    text,
                    unit,
                    span,
                })
            }
            TokenKind::AddressLiteral => {
                let text = self.advance().text.clone();
                Ok(Expr::Literal {
                    kind: LitKind::Address,
                    text,
                    unit: None,
                    span,
                })
            }
            TokenKind::StringLiteral => {
                let text = self.advance().text.clone();
                Ok(Expr::Literal {
                    kind: LitKind::Str,
                    text,
                    unit: None,
                    span,
                })
            }
            TokenKind::Keyword => match tok.text.as_str() {
                "true" | "false" => {
                    let text = self.advance().text.clone();
                    Ok(Expr::Literal {
                        kind: LitKind::Bool,
                        text,
                        unit: None,
                        span,
                    })
                }
                // keyword usable as a cast or value in expressions
                "payable" | "mapping" | "function" => {
                    let name = self.advance().text.clone();
                    Ok(Expr::Ident { name, span })
                }
                _ => {
                    self.diag_here(format!("unexpected {:?} in expression", tok.text));
                    Err(())
                }
            },
            TokenKind::Identifier => {
                let name = self.advance().text.clone();
                Ok(Expr::Ident { name, span })
            }
            TokenKind::Punctuator if tok.is("(") => {
                self.advance();
                if self.eat(")") {
                    return Ok(Expr::Tuple(Vec::new(), span));
                }
                let mut items = vec![self.parse_expr()?];
                while self.eat(",") {
                    items.push(self.parse_expr()?);
                }
                let end = self.peek().span;
                self.expect(")")?;
                if items.len() == 1 {
                    Ok(items.pop().unwrap())
                } else {
                    Ok(Expr::Tuple(items, span.cover(end)))
                }
            }
            _ => {
                self.diag_here(format!("unexpected token {:?} in expression", tok.text));
                Err(())
            }
        }
    }

    fn parse_call_args(&mut self) -> Result<Vec<Expr>, ()> {
        self.expect("(")?;
        let mut args = Vec::new();
        if self.eat(")") {
            return Ok(args);
        }
        loop {
            args.push(self.parse_expr()?);
            if !self.eat(",") {
                break;
            }
        }
        self.expect(")")?;
        Ok(args)
    }

    fn parse_postfix(&mut self, mut expr: Expr) -> Result<Expr, ()> {
        loop {
            if self.at("(") {
                let args = self.parse_call_args()?;
                let end = self.tokens[self.pos.saturating_sub(1)].span;
                let span = expr.span().cover(end);
                expr = Expr::Call {
                    callee: Box::new(expr),
                    args,
                    value_opt: None,
                    gas_opt: None,
                    span,
                };
                continue;
            }
            // braced call options: `.call{value: x, gas: y}(...)`
            if self.at("{")
                && self.peek_at(1).kind == TokenKind::Identifier
                && self.peek_at(2).is(":")
            {
                self.advance(); // {
                let mut value_opt = None;
                let mut gas_opt = None;
                loop {
                    let key = self.advance().text.clone();
                    self.expect(":")?;
                    let val = self.parse_expr()?;
                    match key.as_str() {
                        "value" => value_opt = Some(Box::new(val)),
                        "gas" => gas_opt = Some(Box::new(val)),
                        _ => {} // salt and friends: parsed, not modelled
                    }
                    if !self.eat(",") {
                        break;
                    }
                }
                let end = self.peek().span;
                self.expect("}")?;
                let args = if self.at("(") {
                    self.parse_call_args()?
                } else {
                    Vec::new()
                };
                let call_end = self.tokens[self.pos.saturating_sub(1)].span;
                let span = expr.span().cover(end).cover(call_end);
                expr = Expr::Call {
                    callee: Box::new(expr),
                    args,
                    value_opt,
                    gas_opt,
                    span,
                };
                continue;
            }
            if self.at(".") {
                let member_tok = self.peek_at(1);
                if member_tok.kind == TokenKind::Identifier || member_tok.kind == TokenKind::Keyword
                {
                    self.advance();
                    let member = self.advance().text.clone();
                    let end = self.tokens[self.pos.saturating_sub(1)].span;
                    let span = expr.span().cover(end);
                    expr = Expr::Member {
                        object: Box::new(expr),
                        member,
                        span,
                    };
                    continue;
                }
            }
            if self.at("[") {
                self.advance();
                let index = if self.at("]") {
                    None
                } else {
                    Some(Box::new(self.parse_expr()?))
                };
                let end = self.peek().span;
                self.expect("]")?;
                let span = expr.span().cover(end);
                expr = Expr::Index {
                    object: Box::new(expr),
                    index,
                    span,
                };
                continue;
            }
            if self.at("++") || self.at("--") {
                let op = self.advance();
                let span = expr.span().cover(op.span);
                expr = Expr::Unary {
                    op: op.text.clone(),
                    prefix: false,
                    operand: Box::new(expr),
                    span,
                };
                continue;
            }
            break;
        }
        Ok(expr)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse_clean(src: &str) -> SourceUnit {
        let unit = parse_source(src, "test.sol");
        assert!(
            unit.parse_diagnostics.is_empty(),
            "diagnostics: {:?}",
            unit.parse_diagnostics
        );
        unit
    }

    #[test]
    fn empty_file() {
        let unit = parse_clean("");
        assert!(unit.contracts.is_empty());
    }

    #[test]
    fn reentrancy_shape() {
        let src = r#"
pragma solidity 0.4.24;
contract Example {
    mapping (address => uint) public credit;
    function donate(address to) payable public {
        credit[to] += msg.value;
    }
    function withdraw(uint amount) public {
        if (credit[msg.sender] >= amount) {
            require(msg.sender.call.value(amount)());
            credit[msg.sender] -= amount;
        }
    }
    function queryCredit(address to) view public returns(uint) {
        return credit[to];
    }
}
"#;
        let unit = parse_clean(src);
        assert_eq!(unit.contracts.len(), 1);
        let c = &unit.contracts[0];
        assert_eq!(c.name, "Example");
        let names: Vec<&str> = c.functions.iter().map(|f| f.name.as_str()).collect();
        assert_eq!(names, ["donate", "withdraw", "queryCredit"]);
        assert_eq!(c.state_vars.len(), 1);
        assert_eq!(c.state_vars[0].type_text, "mapping(address => uint)");
    }

    #[test]
    fn assembly_region_preserves_tokens() {
        let src = r#"
pragma solidity ^0.4.25;
contract FunctionTypes {
    struct Func { function () internal f; }
    function breakIt() public payable {
        Func memory func;
        assembly { mstore(func, add(mload(func), callvalue)) }
        func.f();
    }
}
"#;
        let unit = parse_clean(src);
        let f = &unit.contracts[0].functions[0];
        let mut found = false;
        walk_stmts(f.body_stmts(), &mut |s| {
            if let Stmt::Assembly { raw_tokens, .. } = s {
                assert!(raw_tokens.iter().any(|t| t == "mstore"));
                found = true;
            }
        });
        assert!(found, "assembly region not captured");
        // function-typed struct field survives
        assert!(unit.contracts[0].structs[0].fields[0]
            .type_text
            .starts_with("function("));
    }

    #[test]
    fn braced_call_options() {
        let src = r#"
pragma solidity 0.8.0;
contract C {
    function pay(address _to) payable public {
        _to.call{value: msg.value}("");
    }
}
"#;
        let unit = parse_clean(src);
        let f = &unit.contracts[0].functions[0];
        let mut saw_value_opt = false;
        walk_exprs(f.body_stmts(), &mut |e| {
            if let Expr::Call { value_opt, .. } = e {
                if value_opt.is_some() {
                    saw_value_opt = true;
                }
            }
        });
        assert!(saw_value_opt);
    }

    #[test]
    fn free_function_and_modifier() {
        let unit = parse_clean(
            "function transferFrom ( address _spender , uint _value ) returns ( bool success ) {\n    require ( _value < 20 wei ) ;\n}\n",
        );
        assert_eq!(unit.free_functions.len(), 1);
        assert_eq!(unit.free_functions[0].name, "transferFrom");

        let unit = parse_clean(
            "modifier require(bool condition) {\n    if (! condition) revert();\n    _;\n}\n",
        );
        assert_eq!(unit.free_modifiers.len(), 1);
        assert_eq!(unit.free_modifiers[0].name, "require");
    }

    #[test]
    fn broken_contract_does_not_poison_siblings() {
        let src = r#"
contract Broken { function f() public { ??? } }
contract Fine { uint x; }
"#;
        let unit = parse_source(src, "t.sol");
        assert!(!unit.parse_diagnostics.is_empty());
        assert!(unit.contracts.iter().any(|c| c.name == "Fine"));
    }

    #[test]
    fn signature_canonicalization() {
        let src = "contract C { function transfer(address _to, uint _v) public {} function tenTimes(int256 x) public pure returns (int256) { return 10 * x; } }";
        let unit = parse_clean(src);
        let sigs: Vec<String> = unit.contracts[0]
            .functions
            .iter()
            .map(canonical_signature)
            .collect();
        assert_eq!(sigs, ["transfer(address,uint256)", "tenTimes(int256)"]);
    }

    #[test]
    fn spans_nest_within_file() {
        let src = "contract C { function f(uint a) public { if (a > 1) { a = a - 1; } } }";
        let unit = parse_clean(src);
        let len = src.len();
        for c in &unit.contracts {
            assert!(c.span.end_offset() <= len);
            for f in &c.functions {
                assert!(f.span.offset >= c.span.offset);
                assert!(f.span.end_offset() <= c.span.end_offset());
                walk_stmts(f.body_stmts(), &mut |s| {
                    let sp = s.span();
                    assert!(sp.offset >= f.span.offset && sp.end_offset() <= f.span.end_offset());
                });
            }
        }
    }
}
