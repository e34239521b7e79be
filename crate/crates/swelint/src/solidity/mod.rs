//! Solidity front end: lexer, pragma constraints, AST, parser, and symbol
//! resolution.

pub mod ast;
pub mod parser;
pub mod pragma;
pub mod symbols;
pub mod token;

pub use ast::SourceUnit;
pub use parser::parse_source;
pub use pragma::{parse_pragma, PragmaConstraint, Version};
pub use symbols::{resolve, SymbolTable};
pub use token::{tokenize, Span, Token, TokenKind};
