//! Shared lexer for formulas, bunches, rules, and model files.

use crate::error::ParseError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    /// `e*`, only when not immediately followed by an identifier or `(`.
    MulUnit,
    /// `e+`, same proviso.
    AddUnit,
    One,
    Zero,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Star,
    AndOp,   // /\
    OrOp,    // \/
    With,    // &
    Plus,    // +
    Arrow,   // ->
    Lolli,   // -o
    Wand,    // -*
    Comma,
    Semi,
    Turnstile, // |-
    Implies,   // =>
    Gt,        // >
    Dot,
    Colon,
    Equals,
    Newline,
}

#[derive(Clone, Debug)]
pub struct Spanned {
    pub tok: Tok,
    pub pos: usize,
}

/// Tokenizes `src`. When `keep_newlines` is set, line breaks become tokens
/// (the model-file grammar is line oriented).
pub fn lex(src: &str, keep_newlines: bool) -> Result<Vec<Spanned>, ParseError> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let pos = i;
        match c {
            '\n' => {
                if keep_newlines {
                    toks.push(Spanned { tok: Tok::Newline, pos });
                }
                i += 1;
            }
            ' ' | '\t' | '\r' => i += 1,
            '#' => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            '(' => {
                toks.push(Spanned { tok: Tok::LParen, pos });
                i += 1;
            }
            ')' => {
                toks.push(Spanned { tok: Tok::RParen, pos });
                i += 1;
            }
            '{' => {
                toks.push(Spanned { tok: Tok::LBrace, pos });
                i += 1;
            }
            '}' => {
                toks.push(Spanned { tok: Tok::RBrace, pos });
                i += 1;
            }
            '[' => {
                toks.push(Spanned { tok: Tok::LBracket, pos });
                i += 1;
            }
            ']' => {
                toks.push(Spanned { tok: Tok::RBracket, pos });
                i += 1;
            }
            '*' => {
                toks.push(Spanned { tok: Tok::Star, pos });
                i += 1;
            }
            '&' => {
                toks.push(Spanned { tok: Tok::With, pos });
                i += 1;
            }
            '+' => {
                toks.push(Spanned { tok: Tok::Plus, pos });
                i += 1;
            }
            ',' => {
                toks.push(Spanned { tok: Tok::Comma, pos });
                i += 1;
            }
            ';' => {
                toks.push(Spanned { tok: Tok::Semi, pos });
                i += 1;
            }
            '.' => {
                toks.push(Spanned { tok: Tok::Dot, pos });
                i += 1;
            }
            ':' => {
                toks.push(Spanned { tok: Tok::Colon, pos });
                i += 1;
            }
            '1' => {
                toks.push(Spanned { tok: Tok::One, pos });
                i += 1;
            }
            '0' => {
                toks.push(Spanned { tok: Tok::Zero, pos });
                i += 1;
            }
            '/' => {
                if bytes.get(i + 1) == Some(&b'\\') {
                    toks.push(Spanned { tok: Tok::AndOp, pos });
                    i += 2;
                } else {
                    return Err(ParseError::new(pos, "expected `/\\`"));
                }
            }
            '\\' => {
                if bytes.get(i + 1) == Some(&b'/') {
                    toks.push(Spanned { tok: Tok::OrOp, pos });
                    i += 2;
                } else {
                    return Err(ParseError::new(pos, "expected `\\/`"));
                }
            }
            '-' => match bytes.get(i + 1) {
                Some(b'>') => {
                    toks.push(Spanned { tok: Tok::Arrow, pos });
                    i += 2;
                }
                Some(b'o') if !ident_char(bytes.get(i + 2)) => {
                    toks.push(Spanned { tok: Tok::Lolli, pos });
                    i += 2;
                }
                Some(b'*') => {
                    toks.push(Spanned { tok: Tok::Wand, pos });
                    i += 2;
                }
                _ => return Err(ParseError::new(pos, "expected `->`, `-o`, or `-*`")),
            },
            '|' => {
                if bytes.get(i + 1) == Some(&b'-') {
                    toks.push(Spanned { tok: Tok::Turnstile, pos });
                    i += 2;
                } else {
                    return Err(ParseError::new(pos, "expected `|-`"));
                }
            }
            '=' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    toks.push(Spanned { tok: Tok::Implies, pos });
                    i += 2;
                } else {
                    toks.push(Spanned { tok: Tok::Equals, pos });
                    i += 1;
                }
            }
            '>' => {
                toks.push(Spanned { tok: Tok::Gt, pos });
                i += 1;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len() && ident_char(Some(&bytes[i])) {
                    i += 1;
                }
                let word = &src[start..i];
                // `e*` / `e+` denote the bunch units unless glued to more
                // expression material, as in `e*q`.
                if word == "e" && i < bytes.len() && (bytes[i] == b'*' || bytes[i] == b'+') {
                    let next = bytes.get(i + 1);
                    let glued = matches!(next, Some(b) if (*b as char).is_ascii_alphanumeric() || *b == b'_' || *b == b'(');
                    if !glued {
                        let tok = if bytes[i] == b'*' { Tok::MulUnit } else { Tok::AddUnit };
                        toks.push(Spanned { tok, pos });
                        i += 1;
                        continue;
                    }
                }
                toks.push(Spanned { tok: Tok::Ident(word.to_string()), pos });
            }
            _ => return Err(ParseError::new(pos, format!("unexpected character `{c}`"))),
        }
    }
    Ok(toks)
}

fn ident_char(b: Option<&u8>) -> bool {
    matches!(b, Some(c) if (*c as char).is_ascii_alphanumeric() || *c == b'_')
}

/// Cursor over a token stream with single-token lookahead.
pub struct Cursor {
    toks: Vec<Spanned>,
    pub idx: usize,
    len: usize,
}

impl Cursor {
    pub fn new(toks: Vec<Spanned>, src_len: usize) -> Cursor {
        Cursor { toks, idx: 0, len: src_len }
    }

    pub fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|s| &s.tok)
    }

    pub fn peek2(&self) -> Option<&Tok> {
        self.toks.get(self.idx + 1).map(|s| &s.tok)
    }

    pub fn pos(&self) -> usize {
        self.toks.get(self.idx).map(|s| s.pos).unwrap_or(self.len)
    }

    pub fn bump(&mut self) -> Option<Spanned> {
        let t = self.toks.get(self.idx).cloned();
        if t.is_some() {
            self.idx += 1;
        }
        t
    }

    pub fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.idx += 1;
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, tok: &Tok, what: &str) -> Result<(), ParseError> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(ParseError::new(self.pos(), format!("expected {what}")))
        }
    }

    pub fn at_end(&self) -> bool {
        self.idx >= self.toks.len()
    }

    pub fn expect_end(&self) -> Result<(), ParseError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(ParseError::new(self.pos(), "unexpected trailing input"))
        }
    }
}
