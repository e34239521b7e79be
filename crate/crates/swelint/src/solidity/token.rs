//! Solidity lexer. Produces exact source slices with spans so the token
//! stream can reconstruct the input byte for byte.

/// Source location of a token or AST node. Lines and columns are 1-based;
/// `offset`/`len` are byte positions into the file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Span {
    pub line: u32,
    pub column: u32,
    pub offset: usize,
    pub len: usize,
}

impl Span {
    pub fn end_offset(&self) -> usize {
        self.offset + self.len
    }

    /// Smallest span covering both.
    pub fn cover(self, other: Span) -> Span {
        let (first, last) = if self.offset <= other.offset {
            (self, other)
        } else {
            (other, self)
        };
        Span {
            line: first.line,
            column: first.column,
            offset: first.offset,
            len: last.end_offset().saturating_sub(first.offset),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Identifier,
    Keyword,
    IntegerLiteral,
    AddressLiteral,
    StringLiteral,
    Punctuator,
    Operator,
    Comment,
    End,
}

#[derive(Debug, Clone)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    pub span: Span,
    /// True when no whitespace separates this token from the next.
    pub adjacent_to_next: bool,
}

impl Token {
    pub fn is(&self, text: &str) -> bool {
        self.text == text
    }
}

const KEYWORDS: &[&str] = &[
    "pragma", "import", "contract", "interface", "library", "function", "modifier", "event",
    "struct", "enum", "mapping", "public", "private", "internal", "external", "pure", "view",
    "payable", "constant", "immutable", "memory", "storage", "calldata", "returns", "return",
    "if", "else", "for", "while", "do", "break", "continue", "emit", "new", "delete", "using",
    "is", "assembly", "constructor", "fallback", "receive", "throw", "var", "indexed",
    "anonymous", "override", "virtual", "unchecked", "true", "false",
];

// Longest first so maximal munch works by scanning in order.
const OPERATORS: &[&str] = &[
    ">>=", "<<=", "**", "++", "--", "&&", "||", "==", "!=", "<=", ">=", "+=", "-=", "*=", "/=",
    "%=", "|=", "&=", "^=", "<<", ">>", "=>", "+", "-", "*", "/", "%", "=", "<", ">", "!", "&",
    "|", "^", "~", "?",
];

const PUNCTUATORS: &[char] = &['(', ')', '{', '}', '[', ']', ';', ',', '.', ':'];

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_' || c == '$'
}

fn is_ident_continue(c: char) -> bool {
    is_ident_start(c) || c.is_ascii_digit()
}

/// Tokenize Solidity source. Lexical errors (unterminated strings or block
/// comments) are reported as diagnostics and lexing resumes at the next line.
pub fn tokenize(source: &str) -> (Vec<Token>, Vec<(Span, String)>) {
    let bytes = source.as_bytes();
    let mut tokens = Vec::new();
    let mut diagnostics = Vec::new();
    let mut i = 0;
    let mut line: u32 = 1;
    let mut col: u32 = 1;

    macro_rules! span_here {
        ($start:expr, $start_line:expr, $start_col:expr) => {
            Span {
                line: $start_line,
                column: $start_col,
                offset: $start,
                len: i - $start,
            }
        };
    }

    let mut push = |kind: TokenKind, text: &str, span: Span| {
        tokens.push(Token {
            kind,
            text: text.to_string(),
            span,
            adjacent_to_next: false,
        });
    };

    while i < bytes.len() {
        let c = bytes[i] as char;
        let (start, start_line, start_col) = (i, line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if source[i..].starts_with("//") {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
                col += 1;
            }
            let span = span_here!(start, start_line, start_col);
            push(TokenKind::Comment, &source[start..i], span);
            continue;
        }
        if source[i..].starts_with("/*") {
            let mut terminated = false;
            i += 2;
            col += 2;
            while i < bytes.len() {
                if bytes[i] == b'*' && i + 1 < bytes.len() && bytes[i + 1] == b'/' {
                    i += 2;
                    col += 2;
                    terminated = true;
                    break;
                }
                if bytes[i] == b'\n' {
                    line += 1;
                    col = 1;
                } else {
                    col += 1;
                }
                i += 1;
            }
            let span = span_here!(start, start_line, start_col);
            if !terminated {
                diagnostics.push((span, "unterminated block comment".to_string()));
            }
            push(TokenKind::Comment, &source[start..i], span);
            continue;
        }
        if c == '"' || c == '\'' {
            let quote = bytes[i];
            i += 1;
            col += 1;
            let mut terminated = false;
            while i < bytes.len() {
                if bytes[i] == b'\\' && i + 1 < bytes.len() {
                    i += 2;
                    col += 2;
                    continue;
                }
                if bytes[i] == quote {
                    i += 1;
                    col += 1;
                    terminated = true;
                    break;
                }
                if bytes[i] == b'\n' {
                    break;
                }
                i += 1;
                col += 1;
            }
            let span = span_here!(start, start_line, start_col);
            if !terminated {
                diagnostics.push((span, "unterminated string literal".to_string()));
            }
            push(TokenKind::StringLiteral, &source[start..i], span);
            continue;
        }
        if c.is_ascii_digit() {
            if source[i..].starts_with("0x") || source[i..].starts_with("0X") {
                i += 2;
                col += 2;
                let hex_start = i;
                while i < bytes.len() && (bytes[i] as char).is_ascii_hexdigit() {
                    i += 1;
                    col += 1;
                }
                let kind = if i - hex_start == 40 {
                    TokenKind::AddressLiteral
                } else {
                    TokenKind::IntegerLiteral
                };
                let span = span_here!(start, start_line, start_col);
                push(kind, &source[start..i], span);
                continue;
            }
            while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                i += 1;
                col += 1;
            }
            // decimal part, as in `0.1 ether`; don't consume a trailing `.`
            if i + 1 < bytes.len() && bytes[i] == b'.' && (bytes[i + 1] as char).is_ascii_digit() {
                i += 1;
                col += 1;
                while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                    i += 1;
                    col += 1;
                }
            }
            let span = span_here!(start, start_line, start_col);
            push(TokenKind::IntegerLiteral, &source[start..i], span);
            continue;
        }
        if is_ident_start(c) {
            while i < bytes.len() && is_ident_continue(bytes[i] as char) {
                i += 1;
                col += 1;
            }
            let text = &source[start..i];
            let kind = if KEYWORDS.contains(&text) {
                TokenKind::Keyword
            } else {
                TokenKind::Identifier
            };
            let span = span_here!(start, start_line, start_col);
            push(kind, text, span);
            continue;
        }
        if let Some(op) = OPERATORS.iter().find(|op| source[i..].starts_with(**op)) {
            i += op.len();
            col += op.len() as u32;
            let span = span_here!(start, start_line, start_col);
            push(TokenKind::Operator, op, span);
            continue;
        }
        if PUNCTUATORS.contains(&c) {
            i += 1;
            col += 1;
            let span = span_here!(start, start_line, start_col);
            push(TokenKind::Punctuator, &source[start..i], span);
            continue;
        }
        // Unknown character: decode it properly (it may be multi-byte),
        // report once, and skip the whole thing.
        let ch = source[i..].chars().next().unwrap_or('\u{fffd}');
        i += ch.len_utf8().max(1);
        col += 1;
        let span = span_here!(start, start_line, start_col);
        diagnostics.push((span, format!("unexpected character {ch:?}")));
    }

    // adjacency flags: no whitespace between a token and its successor
    for idx in 0..tokens.len().saturating_sub(1) {
        let end = tokens[idx].span.end_offset();
        tokens[idx].adjacent_to_next = end == tokens[idx + 1].span.offset;
    }
    tokens.push(Token {
        kind: TokenKind::End,
        text: String::new(),
        span: Span {
            line,
            column: col,
            offset: bytes.len(),
            len: 0,
        },
        adjacent_to_next: false,
    });
    (tokens, diagnostics)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<(TokenKind, String)> {
        tokenize(src)
            .0
            .into_iter()
            .map(|t| (t.kind, t.text))
            .collect()
    }

    #[test]
    fn typo_operator_adjacency() {
        let (tokens, diags) = tokenize("n =+ 1;");
        assert!(diags.is_empty());
        let texts: Vec<&str> = tokens.iter().map(|t| t.text.as_str()).collect();
        assert_eq!(texts, ["n", "=", "+", "1", ";", ""]);
        let eq = &tokens[1];
        assert_eq!(eq.kind, TokenKind::Operator);
        assert!(eq.adjacent_to_next, "= and + are adjacent");
        assert!(!tokens[0].adjacent_to_next, "n and = are separated");
    }

    #[test]
    fn empty_input_is_just_end() {
        let (tokens, diags) = tokenize("");
        assert!(diags.is_empty());
        assert_eq!(tokens.len(), 1);
        assert_eq!(tokens[0].kind, TokenKind::End);
    }

    #[test]
    fn address_literal_is_forty_hex_digits() {
        let src = "payable(0x617F2E2fD72FD9D5503197092aC168c91465E7f2).transfer(1);";
        let toks = kinds(src);
        let addresses: Vec<_> = toks
            .iter()
            .filter(|(k, _)| *k == TokenKind::AddressLiteral)
            .collect();
        assert_eq!(addresses.len(), 1);
        assert_eq!(addresses[0].1, "0x617F2E2fD72FD9D5503197092aC168c91465E7f2");
        // short hex is an ordinary integer literal
        let toks = kinds("address(0xdeadbeef)");
        assert!(toks.iter().any(|(k, t)| *k == TokenKind::IntegerLiteral && t == "0xdeadbeef"));
    }

    #[test]
    fn reprint_is_byte_identical() {
        let src = "pragma solidity ^0.4.24;\ncontract A { // c\n  uint x = 0.1 ether; /* b */ }\n";
        let (tokens, _) = tokenize(src);
        let mut rebuilt = String::new();
        let mut pos = 0;
        for t in &tokens {
            rebuilt.push_str(&src[pos..t.span.offset]);
            rebuilt.push_str(&t.text);
            pos = t.span.end_offset();
        }
        rebuilt.push_str(&src[pos..]);
        assert_eq!(rebuilt, src);
    }

    #[test]
    fn unterminated_string_recovers() {
        let (tokens, diags) = tokenize("string s = \"oops;\nuint x;");
        assert_eq!(diags.len(), 1);
        assert!(diags[0].1.contains("unterminated"));
        assert!(tokens.iter().any(|t| t.text == "x"));
    }

    #[test]
    fn spans_are_ordered_and_disjoint() {
        let src = "contract A { function f() public { a = b + 1; } }";
        let (tokens, _) = tokenize(src);
        for w in tokens.windows(2) {
            assert!(w[0].span.end_offset() <= w[1].span.offset);
        }
    }
}
