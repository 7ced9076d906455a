//! Shared hand-written lexer used by both the model DSL and the Solidity
//! subset parser. The two languages differ only in their punctuation tables
//! and a couple of small switches, so one scanner serves both.

use crate::span::{ParseError, SourceSpan};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Ident(String),
    Number(String),
    HexNumber(String),
    Str(String),
    Punct(&'static str),
    Eof,
}

impl TokenKind {
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Ident(s) => format!("identifier `{s}`"),
            TokenKind::Number(s) => format!("number `{s}`"),
            TokenKind::HexNumber(s) => format!("number `{s}`"),
            TokenKind::Str(_) => "string literal".to_string(),
            TokenKind::Punct(p) => format!("`{p}`"),
            TokenKind::Eof => "end of input".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: SourceSpan,
}

impl Token {
    pub fn is_punct(&self, p: &str) -> bool {
        matches!(&self.kind, TokenKind::Punct(q) if *q == p)
    }

    pub fn is_ident(&self, word: &str) -> bool {
        matches!(&self.kind, TokenKind::Ident(s) if s == word)
    }

    pub fn ident(&self) -> Option<&str> {
        match &self.kind {
            TokenKind::Ident(s) => Some(s),
            _ => None,
        }
    }
}

pub struct LexOptions {
    /// Multi-character punctuation first; matching is longest-first in table
    /// order.
    pub puncts: &'static [&'static str],
    /// Whether `/* ... */` comments are recognised.
    pub block_comments: bool,
    /// Whether `$` may appear in identifiers.
    pub dollar_idents: bool,
}

/// Punctuation accepted by the model DSL. The bare `-` exists only so that
/// hyphenated message kind tags like `[trans-msg]` can be recombined by the
/// parser.
pub const DSL_PUNCTS: &[&str] = &[
    "-->", "->", "=>", "(", ")", "{", "}", "[", "]", ":", ";", ",", "@", ".", "-",
];

/// Punctuation accepted by the Solidity subset.
pub const SOL_PUNCTS: &[&str] = &[
    "**", "==", "!=", "<=", ">=", "&&", "||", "+=", "-=", "*=", "/=", "%=", "|=", "&=", "^=",
    "<<", ">>", "++", "--", "=>", "(", ")", "{", "}", "[", "]", ";", ",", ".", ":", "?", "=",
    "<", ">", "+", "-", "*", "/", "%", "!", "&", "|", "^", "~",
];

pub const DSL_OPTIONS: LexOptions = LexOptions {
    puncts: DSL_PUNCTS,
    block_comments: false,
    dollar_idents: false,
};

pub const SOL_OPTIONS: LexOptions = LexOptions {
    puncts: SOL_PUNCTS,
    block_comments: true,
    dollar_idents: true,
};

pub struct LexOutput {
    pub tokens: Vec<Token>,
    pub errors: Vec<ParseError>,
    /// Line comments with the 1-based line they sit on, in file order. The
    /// Solidity parser scans these for `abcde:allow(...)` suppressions.
    pub line_comments: Vec<(u32, String)>,
}

struct Scanner<'a> {
    src: &'a str,
    file: &'a str,
    /// Byte offset into `src`.
    pos: usize,
    line: u32,
    column: u32,
}

impl<'a> Scanner<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.src[self.pos..].chars();
        it.next();
        it.next()
    }

    fn bump(&mut self) -> Option<char> {
        let ch = self.peek()?;
        self.pos += ch.len_utf8();
        if ch == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(ch)
    }

    fn span_from(&self, start: (usize, u32, u32)) -> SourceSpan {
        SourceSpan::new(self.file, start.1, start.2, (self.pos - start.0) as u32)
    }

    fn mark(&self) -> (usize, u32, u32) {
        (self.pos, self.line, self.column)
    }
}

pub fn lex(src: &str, file: &str, opts: &LexOptions) -> LexOutput {
    // A UTF-8 BOM is tolerated at the very start of the file.
    let src = src.strip_prefix('\u{feff}').unwrap_or(src);
    let mut sc = Scanner {
        src,
        file,
        pos: 0,
        line: 1,
        column: 1,
    };
    let mut out = LexOutput {
        tokens: Vec::new(),
        errors: Vec::new(),
        line_comments: Vec::new(),
    };

    'outer: loop {
        // Skip whitespace.
        while let Some(ch) = sc.peek() {
            if ch == ' ' || ch == '\t' || ch == '\r' || ch == '\n' {
                sc.bump();
            } else {
                break;
            }
        }
        let Some(ch) = sc.peek() else { break };
        let start = sc.mark();

        // Comments.
        if ch == '/' && sc.peek2() == Some('/') {
            let line = sc.line;
            sc.bump();
            sc.bump();
            let text_start = sc.pos;
            while let Some(c) = sc.peek() {
                if c == '\n' {
                    break;
                }
                sc.bump();
            }
            let text = sc.src[text_start..sc.pos].trim().to_string();
            out.line_comments.push((line, text));
            continue;
        }
        if opts.block_comments && ch == '/' && sc.peek2() == Some('*') {
            sc.bump();
            sc.bump();
            let mut closed = false;
            while let Some(c) = sc.bump() {
                if c == '*' && sc.peek() == Some('/') {
                    sc.bump();
                    closed = true;
                    break;
                }
            }
            if !closed {
                out.errors.push(ParseError::new(
                    sc.span_from(start),
                    "`*/` closing the comment",
                    "end of input",
                ));
            }
            continue;
        }

        // Identifiers and keywords.
        if ch.is_ascii_alphabetic() || ch == '_' || (opts.dollar_idents && ch == '$') {
            while let Some(c) = sc.peek() {
                if c.is_ascii_alphanumeric() || c == '_' || (opts.dollar_idents && c == '$') {
                    sc.bump();
                } else {
                    break;
                }
            }
            let text = &sc.src[start.0..sc.pos];
            out.tokens.push(Token {
                kind: TokenKind::Ident(text.to_string()),
                span: sc.span_from(start),
            });
            continue;
        }

        // Numbers: decimal (with optional `_` separators and exponent) or hex.
        if ch.is_ascii_digit() {
            if ch == '0' && matches!(sc.peek2(), Some('x') | Some('X')) {
                sc.bump();
                sc.bump();
                let digits_start = sc.pos;
                while let Some(c) = sc.peek() {
                    if c.is_ascii_hexdigit() || c == '_' {
                        sc.bump();
                    } else {
                        break;
                    }
                }
                if sc.pos == digits_start {
                    out.errors.push(ParseError::new(
                        sc.span_from(start),
                        "hexadecimal digits after `0x`",
                        sc.peek().map_or("end of input".into(), |c| format!("`{c}`")),
                    ));
                    continue;
                }
                let text: String = sc.src[start.0..sc.pos].chars().filter(|c| *c != '_').collect();
                out.tokens.push(Token {
                    kind: TokenKind::HexNumber(text),
                    span: sc.span_from(start),
                });
                continue;
            }
            while let Some(c) = sc.peek() {
                if c.is_ascii_digit() || c == '_' {
                    sc.bump();
                } else {
                    break;
                }
            }
            // Exponent suffix, as in `1e18`.
            if matches!(sc.peek(), Some('e') | Some('E'))
                && sc.peek2().is_some_and(|c| c.is_ascii_digit())
            {
                sc.bump();
                while sc.peek().is_some_and(|c| c.is_ascii_digit()) {
                    sc.bump();
                }
            }
            let text: String = sc.src[start.0..sc.pos].chars().filter(|c| *c != '_').collect();
            out.tokens.push(Token {
                kind: TokenKind::Number(text),
                span: sc.span_from(start),
            });
            continue;
        }

        // String literals. The DSL only uses double quotes; Solidity allows
        // both quote characters.
        if ch == '"' || (ch == '\'' && opts.dollar_idents) {
            let quote = ch;
            sc.bump();
            let mut value = String::new();
            loop {
                match sc.peek() {
                    None | Some('\n') => {
                        out.errors.push(ParseError::new(
                            sc.span_from(start),
                            "closing quote",
                            if sc.peek().is_none() { "end of input" } else { "end of line" },
                        ));
                        continue 'outer;
                    }
                    Some(c) if c == quote => {
                        sc.bump();
                        break;
                    }
                    Some('\\') => {
                        sc.bump();
                        match sc.bump() {
                            Some('n') => value.push('\n'),
                            Some('t') => value.push('\t'),
                            Some('r') => value.push('\r'),
                            Some('0') => value.push('\0'),
                            Some(c @ ('\\' | '"' | '\'')) => value.push(c),
                            Some(c) => {
                                out.errors.push(ParseError::new(
                                    sc.span_from(start),
                                    "a valid escape sequence",
                                    format!("`\\{c}`"),
                                ));
                            }
                            None => {}
                        }
                    }
                    Some(c) => {
                        value.push(c);
                        sc.bump();
                    }
                }
            }
            out.tokens.push(Token {
                kind: TokenKind::Str(value),
                span: sc.span_from(start),
            });
            continue;
        }

        // Punctuation, longest match first.
        let rest = &sc.src[sc.pos..];
        if let Some(p) = opts.puncts.iter().find(|p| rest.starts_with(**p)) {
            for _ in 0..p.chars().count() {
                sc.bump();
            }
            out.tokens.push(Token {
                kind: TokenKind::Punct(p),
                span: sc.span_from(start),
            });
            continue;
        }

        out.errors.push(ParseError::new(
            SourceSpan::new(sc.file, start.1, start.2, ch.len_utf8() as u32),
            "a token",
            format!("`{ch}`"),
        ));
        sc.bump();
    }

    let end = sc.mark();
    out.tokens.push(Token {
        kind: TokenKind::Eof,
        span: sc.span_from(end),
    });
    out
}
