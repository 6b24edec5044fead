//! A small s-expression reader and printer.
//!
//! Atoms are runs of characters other than whitespace, parentheses, `"` and
//! `;`, or double-quoted strings with `\"` and `\\` escapes. `;` starts a
//! comment running to the end of the line.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

#[derive(Clone, Debug)]
pub enum Sexp {
    Atom(String, Pos),
    List(Vec<Sexp>, Pos),
}

impl PartialEq for Sexp {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Sexp::Atom(a, _), Sexp::Atom(b, _)) => a == b,
            (Sexp::List(a, _), Sexp::List(b, _)) => a == b,
            _ => false,
        }
    }
}

impl Sexp {
    pub fn atom(s: impl Into<String>) -> Self {
        Sexp::Atom(s.into(), Pos::default())
    }

    pub fn list(items: Vec<Sexp>) -> Self {
        Sexp::List(items, Pos::default())
    }

    /// `(head args...)`.
    pub fn call(head: &str, args: Vec<Sexp>) -> Self {
        let mut items = Vec::with_capacity(args.len() + 1);
        items.push(Sexp::atom(head));
        items.extend(args);
        Sexp::list(items)
    }

    pub fn pos(&self) -> Pos {
        match self {
            Sexp::Atom(_, p) | Sexp::List(_, p) => *p,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(s, _) => Some(s),
            Sexp::List(..) => None,
        }
    }

    /// Splits `(head rest...)` into its head atom and arguments.
    pub fn as_call(&self) -> Option<(&str, &[Sexp])> {
        match self {
            Sexp::List(items, _) => match items.split_first() {
                Some((Sexp::Atom(h, _), rest)) => Some((h, rest)),
                _ => None,
            },
            Sexp::Atom(..) => None,
        }
    }

    pub fn error(&self, message: impl Into<String>) -> Error {
        let p = self.pos();
        Error::Parse { line: p.line, col: p.col, message: message.into() }
    }
}

fn needs_quotes(s: &str) -> bool {
    s.is_empty() || s.chars().any(|c| c.is_whitespace() || matches!(c, '(' | ')' | '"' | ';'))
}

impl fmt::Display for Sexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexp::Atom(s, _) if needs_quotes(s) => {
                write!(f, "\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
            }
            Sexp::Atom(s, _) => f.write_str(s),
            Sexp::List(items, _) => {
                f.write_str("(")?;
                for (i, it) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{it}")?;
                }
                f.write_str(")")
            }
        }
    }
}

struct Reader<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    pos: Pos,
}

impl Reader<'_> {
    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.pos.line += 1;
            self.pos.col = 1;
        } else {
            self.pos.col += 1;
        }
        Some(c)
    }

    fn err(&self, message: &str) -> Error {
        Error::Parse { line: self.pos.line, col: self.pos.col, message: message.into() }
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

    fn read(&mut self) -> Result<Sexp> {
        self.skip_trivia();
        let start = self.pos;
        match self.chars.peek().copied() {
            None => Err(self.err("unexpected end of input")),
            Some(')') => Err(self.err("unexpected ')'")),
            Some('(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    match self.chars.peek() {
                        None => {
                            return Err(Error::Parse {
                                line: start.line,
                                col: start.col,
                                message: "unclosed '('".into(),
                            })
                        }
                        Some(')') => {
                            self.bump();
                            return Ok(Sexp::List(items, start));
                        }
                        Some(_) => items.push(self.read()?),
                    }
                }
            }
            Some('"') => {
                self.bump();
                let mut s = String::new();
                loop {
                    match self.bump() {
                        None => return Err(self.err("unterminated string")),
                        Some('"') => return Ok(Sexp::Atom(s, start)),
                        Some('\\') => match self.bump() {
                            Some(c @ ('"' | '\\')) => s.push(c),
                            Some('n') => s.push('\n'),
                            _ => return Err(self.err("bad escape")),
                        },
                        Some(c) => s.push(c),
                    }
                }
            }
            Some(_) => {
                let mut s = String::new();
                while let Some(&c) = self.chars.peek() {
                    if c.is_whitespace() || matches!(c, '(' | ')' | '"' | ';') {
                        break;
                    }
                    s.push(c);
                    self.bump();
                }
                Ok(Sexp::Atom(s, start))
            }
        }
    }
}

/// Reads every top-level expression in `src`.
pub fn parse_many(src: &str) -> Result<Vec<Sexp>> {
    let mut r = Reader { chars: src.chars().peekable(), pos: Pos { line: 1, col: 1 } };
    let mut out = Vec::new();
    loop {
        r.skip_trivia();
        if r.chars.peek().is_none() {
            return Ok(out);
        }
        out.push(r.read()?);
    }
}

/// Reads exactly one expression.
pub fn parse_one(src: &str) -> Result<Sexp> {
    let mut all = parse_many(src)?;
    match all.len() {
        1 => Ok(all.pop().expect("one item")),
        0 => Err(Error::Parse { line: 1, col: 1, message: "empty input".into() }),
        _ => {
            let p = all[1].pos();
            Err(Error::Parse { line: p.line, col: p.col, message: "expected a single expression".into() })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_nested_lists_and_strings() {
        let s = parse_one("(words (fin a \"b c\")) ; trailing").unwrap();
        assert_eq!(s.to_string(), "(words (fin a \"b c\"))");
        let (h, args) = s.as_call().unwrap();
        assert_eq!(h, "words");
        assert_eq!(args.len(), 1);
    }

    #[test]
    fn positions_are_reported() {
        match parse_one("(a\n  (b c)") {
            Err(Error::Parse { line, col, .. }) => assert_eq!((line, col), (1, 1)),
            other => panic!("{other:?}"),
        }
        match parse_one("(a)\n )") {
            Err(Error::Parse { line, col, .. }) => assert_eq!((line, col), (2, 2)),
            other => panic!("{other:?}"),
        }
        let many = parse_many("a\n(b)").unwrap();
        assert_eq!(many[1].pos(), Pos { line: 2, col: 1 });
    }

    #[test]
    fn round_trips_escapes() {
        let s = Sexp::atom("x\"y\\");
        assert_eq!(parse_one(&s.to_string()).unwrap(), s);
    }
}
