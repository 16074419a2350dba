//! Tokenizer shared by the term, theory and proof-script parsers.

use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl Diagnostic {
    pub fn new(line: usize, col: usize, message: impl Into<String>) -> Self {
        Diagnostic {
            line,
            col,
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}

impl std::error::Error for Diagnostic {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Colon,
    Bar,
    Eq,
    FatArrow,
    Arrow,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{}`", s),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBracket => f.write_str("`[`"),
            Tok::RBracket => f.write_str("`]`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Bar => f.write_str("`|`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::FatArrow => f.write_str("`=>`"),
            Tok::Arrow => f.write_str("`->`"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

fn ident_start(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

fn ident_continue(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\'' || c == '.'
}

/// Tokenizes `text`; `line` and `col` give the position of its first char.
/// A `#` starts a comment running to end of line.
pub fn tokenize_at(text: &str, line: usize, col: usize) -> Result<Vec<Token>, Diagnostic> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut col) = (line, col);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            col += 1;
            i += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let two = |a: char, b: char| c == a && chars.get(i + 1) == Some(&b);
        let (tok, len) = if two('=', '>') {
            (Tok::FatArrow, 2)
        } else if two('-', '>') {
            (Tok::Arrow, 2)
        } else {
            match c {
                '(' => (Tok::LParen, 1),
                ')' => (Tok::RParen, 1),
                '[' => (Tok::LBracket, 1),
                ']' => (Tok::RBracket, 1),
                ',' => (Tok::Comma, 1),
                ';' => (Tok::Semi, 1),
                ':' => (Tok::Colon, 1),
                '|' => (Tok::Bar, 1),
                '=' => (Tok::Eq, 1),
                c if ident_start(c) => {
                    let mut j = i + 1;
                    while j < chars.len() {
                        let d = chars[j];
                        let dash_ok =
                            d == '-' && chars.get(j + 1).is_some_and(|&e| ident_continue(e));
                        if ident_continue(d) || dash_ok {
                            j += 1;
                        } else {
                            break;
                        }
                    }
                    (Tok::Ident(chars[i..j].iter().collect()), j - i)
                }
                other => {
                    return Err(Diagnostic::new(
                        tl,
                        tc,
                        format!("unexpected character `{}`", other),
                    ))
                }
            }
        };
        out.push(Token {
            tok,
            line: tl,
            col: tc,
        });
        i += len;
        col += len;
    }
    Ok(out)
}

pub fn tokenize(text: &str) -> Result<Vec<Token>, Diagnostic> {
    tokenize_at(text, 1, 1)
}

/// A cursor over a token slice with the usual expect/peek helpers.
pub struct Cursor<'a> {
    toks: &'a [Token],
    pos: usize,
    end_line: usize,
    end_col: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(toks: &'a [Token], end_line: usize, end_col: usize) -> Self {
        Cursor {
            toks,
            pos: 0,
            end_line,
            end_col,
        }
    }

    pub fn peek(&self) -> Option<&'a Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    pub fn peek_token(&self) -> Option<&'a Token> {
        self.toks.get(self.pos)
    }

    pub fn peek2(&self) -> Option<&'a Tok> {
        self.toks.get(self.pos + 1).map(|t| &t.tok)
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    pub fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .map(|t| (t.line, t.col))
            .unwrap_or((self.end_line, self.end_col))
    }

    pub fn error(&self, message: impl Into<String>) -> Diagnostic {
        let (l, c) = self.here();
        Diagnostic::new(l, c, message)
    }

    pub fn bump(&mut self) -> Option<&'a Token> {
        let t = self.toks.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    pub fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, tok: &Tok) -> Result<(), Diagnostic> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.unexpected(&tok.to_string()))
        }
    }

    pub fn ident(&mut self) -> Result<String, Diagnostic> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                Ok(s.clone())
            }
            _ => Err(self.unexpected("a name")),
        }
    }

    pub fn eat_keyword(&mut self, kw: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Ident(s)) if s == kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn unexpected(&self, wanted: &str) -> Diagnostic {
        match self.peek() {
            Some(t) => self.error(format!("expected {}, found {}", wanted, t)),
            None => self.error(format!("expected {}, found end of input", wanted)),
        }
    }

    pub fn finish(&self) -> Result<(), Diagnostic> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }
}

/// Splits a line-oriented source into logical statements: a line starting
/// in column 1 opens a statement, indented lines continue it. Returns the
/// tokens of each statement.
pub fn statements(text: &str) -> (Vec<Vec<Token>>, Vec<Diagnostic>) {
    let mut stmts: Vec<Vec<Token>> = Vec::new();
    let mut diags = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let toks = match tokenize_at(raw, line, 1) {
            Ok(t) => t,
            Err(d) => {
                diags.push(d);
                continue;
            }
        };
        if toks.is_empty() {
            continue;
        }
        let indented = raw.starts_with(|c: char| c.is_whitespace());
        match stmts.last_mut() {
            Some(last) if indented => last.extend(toks),
            _ => stmts.push(toks),
        }
    }
    (stmts, diags)
}
