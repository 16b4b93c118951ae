//! A small s-expression reader shared by the formula grammar and the
//! catalog grammar.
//!
//! Tokens are `(`, `)`, double-quoted strings (with `\"` and `\\` escapes)
//! and bare words, separated by whitespace. A `;` starts a comment that runs
//! to the end of the line.

use crate::error::{Error, Pos, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SExpr {
    Word(String, Pos),
    Str(String, Pos),
    List(Vec<SExpr>, Pos),
}

impl SExpr {
    pub fn pos(&self) -> Pos {
        match self {
            SExpr::Word(_, p) | SExpr::Str(_, p) | SExpr::List(_, p) => *p,
        }
    }

    pub fn as_word(&self) -> Option<&str> {
        match self {
            SExpr::Word(w, _) => Some(w),
            _ => None,
        }
    }
}

struct Reader<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

impl Reader<'_> {
    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            col: self.col,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == ';' {
                while let Some(&c) = self.chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else {
                break;
            }
        }
    }

    fn read(&mut self) -> Result<Option<SExpr>> {
        self.skip_trivia();
        let start = self.pos();
        let Some(&c) = self.chars.peek() else {
            return Ok(None);
        };
        match c {
            '(' => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    match self.chars.peek() {
                        None => return Err(Error::syntax(start, "unclosed `(`")),
                        Some(')') => {
                            self.bump();
                            return Ok(Some(SExpr::List(items, start)));
                        }
                        Some(_) => {
                            let item = self.read()?.expect("peeked a token");
                            items.push(item);
                        }
                    }
                }
            }
            ')' => Err(Error::syntax(start, "unexpected `)`")),
            '"' => {
                self.bump();
                let mut s = String::new();
                loop {
                    match self.bump() {
                        None => return Err(Error::syntax(start, "unterminated string")),
                        Some('"') => return Ok(Some(SExpr::Str(s, start))),
                        Some('\\') => match self.bump() {
                            Some(c @ ('"' | '\\')) => s.push(c),
                            Some('n') => s.push('\n'),
                            _ => return Err(Error::syntax(self.pos(), "bad escape in string")),
                        },
                        Some(c) => s.push(c),
                    }
                }
            }
            _ => {
                let mut w = String::new();
                while let Some(&c) = self.chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == '"' || c == ';' {
                        break;
                    }
                    w.push(c);
                    self.bump();
                }
                Ok(Some(SExpr::Word(w, start)))
            }
        }
    }
}

/// Reads every top-level form in `text`.
pub fn read_all(text: &str) -> Result<Vec<SExpr>> {
    read_all_at(text, Pos { line: 1, col: 1 })
}

/// Like [`read_all`], but positions are offset as if `text` started at `origin`.
pub fn read_all_at(text: &str, origin: Pos) -> Result<Vec<SExpr>> {
    let mut r = Reader {
        chars: text.chars().peekable(),
        line: origin.line,
        col: origin.col,
    };
    let mut out = Vec::new();
    while let Some(e) = r.read()? {
        out.push(e);
    }
    Ok(out)
}

/// Reads exactly one form.
pub fn read_one(text: &str) -> Result<SExpr> {
    read_one_at(text, Pos { line: 1, col: 1 })
}

pub fn read_one_at(text: &str, origin: Pos) -> Result<SExpr> {
    let mut forms = read_all_at(text, origin)?;
    match forms.len() {
        1 => Ok(forms.pop().unwrap()),
        0 => Err(Error::syntax(origin, "empty input")),
        _ => Err(Error::syntax(forms[1].pos(), "trailing input after formula")),
    }
}
