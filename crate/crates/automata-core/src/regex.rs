//! Regular expressions.
//!
//! Concrete syntax: `|` for union, juxtaposition for concatenation, postfix
//! `*`, parentheses for grouping, `%e` for the empty string, `%0` for the
//! empty set. Single-character alphabet symbols appear bare; multi-character
//! symbols are written in single quotes, e.g. `'(1' ')1'`. Precedence is
//! star, then concatenation, then union.

use std::fmt;

use crate::alphabet::{Alphabet, Symbol};
use crate::{Error, Result};

/// Abstract syntax for regular expressions.
///
/// `Epsilon` and `EmptySet` exist as explicit nodes because state
/// elimination needs them as intermediate edge labels.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum RegexAst {
    EmptySet,
    Epsilon,
    Sym(Symbol),
    Union(Box<RegexAst>, Box<RegexAst>),
    Concat(Box<RegexAst>, Box<RegexAst>),
    Star(Box<RegexAst>),
}

impl RegexAst {
    /// Union with local simplification (`∅` is the identity).
    pub fn union(a: RegexAst, b: RegexAst) -> RegexAst {
        match (a, b) {
            (RegexAst::EmptySet, b) => b,
            (a, RegexAst::EmptySet) => a,
            (a, b) => {
                if a == b {
                    a
                } else {
                    RegexAst::Union(Box::new(a), Box::new(b))
                }
            }
        }
    }

    /// Concatenation with local simplification (`∅` annihilates, `ε` is the
    /// identity).
    pub fn concat(a: RegexAst, b: RegexAst) -> RegexAst {
        match (a, b) {
            (RegexAst::EmptySet, _) | (_, RegexAst::EmptySet) => RegexAst::EmptySet,
            (RegexAst::Epsilon, b) => b,
            (a, RegexAst::Epsilon) => a,
            (a, b) => RegexAst::Concat(Box::new(a), Box::new(b)),
        }
    }

    /// Kleene star with local simplification (`∅* = ε* = ε`, `e** = e*`).
    pub fn star(a: RegexAst) -> RegexAst {
        match a {
            RegexAst::EmptySet | RegexAst::Epsilon => RegexAst::Epsilon,
            s @ RegexAst::Star(_) => s,
            a => RegexAst::Star(Box::new(a)),
        }
    }

    /// Number of AST nodes.
    pub fn node_count(&self) -> usize {
        match self {
            RegexAst::EmptySet | RegexAst::Epsilon | RegexAst::Sym(_) => 1,
            RegexAst::Union(a, b) | RegexAst::Concat(a, b) => 1 + a.node_count() + b.node_count(),
            RegexAst::Star(a) => 1 + a.node_count(),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            RegexAst::Union(..) => 0,
            RegexAst::Concat(..) => 1,
            RegexAst::Star(_) => 2,
            _ => 3,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let prec = self.precedence();
        if prec < min {
            f.write_str("(")?;
        }
        match self {
            RegexAst::EmptySet => f.write_str("%0")?,
            RegexAst::Epsilon => f.write_str("%e")?,
            RegexAst::Sym(s) => {
                let text = s.as_str();
                let bare = text.chars().count() == 1 && !is_reserved(text.chars().next().unwrap());
                if bare {
                    f.write_str(text)?;
                } else {
                    write!(f, "'{text}'")?;
                }
            }
            RegexAst::Union(a, b) => {
                a.fmt_prec(f, 0)?;
                f.write_str("|")?;
                b.fmt_prec(f, 0)?;
            }
            RegexAst::Concat(a, b) => {
                a.fmt_prec(f, 1)?;
                b.fmt_prec(f, 2)?;
            }
            RegexAst::Star(a) => {
                a.fmt_prec(f, 3)?;
                f.write_str("*")?;
            }
        }
        if prec < min {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for RegexAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

fn is_reserved(c: char) -> bool {
    matches!(c, '|' | '(' | ')' | '*' | '%' | '\'') || c.is_whitespace()
}

/// Parses the concrete regex syntax against an alphabet.
///
/// Error positions are character offsets into `text`; a symbol not in the
/// alphabet is a syntax error at its position.
pub fn parse_regex(text: &str, alphabet: &Alphabet) -> Result<RegexAst> {
    let chars: Vec<char> = text.chars().collect();
    let mut p = Parser {
        chars: &chars,
        pos: 0,
        alphabet,
    };
    let ast = p.union()?;
    if p.pos != p.chars.len() {
        return Err(Error::SyntaxError(p.pos));
    }
    Ok(ast)
}

struct Parser<'a> {
    chars: &'a [char],
    pos: usize,
    alphabet: &'a Alphabet,
}

impl Parser<'_> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn union(&mut self) -> Result<RegexAst> {
        let mut ast = self.concat()?;
        while self.peek() == Some('|') {
            self.pos += 1;
            let rhs = self.concat()?;
            ast = RegexAst::Union(Box::new(ast), Box::new(rhs));
        }
        Ok(ast)
    }

    fn concat(&mut self) -> Result<RegexAst> {
        let mut ast = self.starred()?;
        while let Some(c) = self.peek() {
            if c == '|' || c == ')' {
                break;
            }
            let rhs = self.starred()?;
            ast = RegexAst::Concat(Box::new(ast), Box::new(rhs));
        }
        Ok(ast)
    }

    fn starred(&mut self) -> Result<RegexAst> {
        let mut ast = self.atom()?;
        while self.peek() == Some('*') {
            self.pos += 1;
            ast = RegexAst::Star(Box::new(ast));
        }
        Ok(ast)
    }

    fn atom(&mut self) -> Result<RegexAst> {
        let start = self.pos;
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.union()?;
                if self.peek() != Some(')') {
                    return Err(Error::SyntaxError(self.pos));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some('%') => {
                self.pos += 1;
                match self.peek() {
                    Some('e') => {
                        self.pos += 1;
                        Ok(RegexAst::Epsilon)
                    }
                    Some('0') => {
                        self.pos += 1;
                        Ok(RegexAst::EmptySet)
                    }
                    _ => Err(Error::SyntaxError(start)),
                }
            }
            Some('\'') => {
                self.pos += 1;
                let text_start = self.pos;
                while let Some(c) = self.peek() {
                    if c == '\'' {
                        break;
                    }
                    self.pos += 1;
                }
                if self.peek() != Some('\'') || self.pos == text_start {
                    return Err(Error::SyntaxError(start));
                }
                let text: String = self.chars[text_start..self.pos].iter().collect();
                self.pos += 1;
                self.symbol(&text, start)
            }
            Some(c) if !is_reserved(c) => {
                self.pos += 1;
                self.symbol(&c.to_string(), start)
            }
            _ => Err(Error::SyntaxError(self.pos)),
        }
    }

    fn symbol(&self, text: &str, at: usize) -> Result<RegexAst> {
        let sym = Symbol::new(text).map_err(|_| Error::SyntaxError(at))?;
        if !self.alphabet.contains(&sym) {
            return Err(Error::SyntaxError(at));
        }
        Ok(RegexAst::Sym(sym))
    }
}
