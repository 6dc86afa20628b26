//! Symbols, alphabets, token strings, and the canonical shortlex order.
//!
//! A [`Symbol`] is an arbitrary nonempty unicode token with no whitespace, so
//! indexed bracket pairs like `(2` and `)2` are first-class tokens. An
//! [`Alphabet`] fixes an ordered set of distinct symbols; that declared order
//! drives every canonical enumeration in the crate (shortlex bases for Hankel
//! blocks, shortest counterexamples, dataset generation).

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::{Error, Result};

/// A single vocabulary token.
///
/// Cheap to clone; equality and hashing are by token text.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(Arc<str>);

impl Symbol {
    /// Creates a symbol, rejecting empty text and embedded whitespace.
    pub fn new(text: impl AsRef<str>) -> Result<Self> {
        let text = text.as_ref();
        if text.is_empty() {
            return Err(Error::invalid("symbol", "empty token"));
        }
        if text.chars().any(char::is_whitespace) {
            return Err(Error::invalid(
                "symbol",
                format!("token {text:?} contains whitespace"),
            ));
        }
        Ok(Symbol(Arc::from(text)))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

/// An ordered set of distinct symbols.
///
/// The declared order is fixed at construction and used for all canonical
/// enumeration; two alphabets are equal only if they list the same symbols in
/// the same order.
#[derive(Clone)]
pub struct Alphabet {
    symbols: Vec<Symbol>,
    index: HashMap<Symbol, usize>,
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        self.symbols == other.symbols
    }
}

impl Eq for Alphabet {}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.symbols.iter()).finish()
    }
}

impl Alphabet {
    /// Builds an alphabet from symbols in declaration order.
    pub fn new(symbols: Vec<Symbol>) -> Result<Self> {
        let mut index = HashMap::with_capacity(symbols.len());
        for (i, s) in symbols.iter().enumerate() {
            if index.insert(s.clone(), i).is_some() {
                return Err(Error::invalid(
                    "alphabet",
                    format!("duplicate symbol {s:?}"),
                ));
            }
        }
        Ok(Alphabet { symbols, index })
    }

    /// Convenience constructor from token texts.
    pub fn from_texts<I, T>(texts: I) -> Result<Self>
    where
        I: IntoIterator<Item = T>,
        T: AsRef<str>,
    {
        Alphabet::new(
            texts
                .into_iter()
                .map(Symbol::new)
                .collect::<Result<Vec<_>>>()?,
        )
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn symbol(&self, index: usize) -> &Symbol {
        &self.symbols[index]
    }

    /// Position of a symbol in the declared order.
    pub fn index_of(&self, symbol: &Symbol) -> Option<usize> {
        self.index.get(symbol).copied()
    }

    pub fn contains(&self, symbol: &Symbol) -> bool {
        self.index.contains_key(symbol)
    }

    /// True if every symbol is a single unicode character.
    pub fn single_char(&self) -> bool {
        self.symbols.iter().all(|s| s.as_str().chars().count() == 1)
    }

    /// Checks every token of `s` against this alphabet.
    pub fn validate_str(&self, s: &Str) -> Result<()> {
        for (i, tok) in s.tokens().iter().enumerate() {
            if !self.contains(tok) {
                return Err(Error::UnknownSymbol {
                    token: tok.as_str().to_owned(),
                    position: i,
                });
            }
        }
        Ok(())
    }

    /// Shortlex comparison: by length first, ties broken token by token in
    /// the declared symbol order. Tokens must belong to this alphabet.
    pub fn shortlex_cmp(&self, a: &Str, b: &Str) -> std::cmp::Ordering {
        a.len().cmp(&b.len()).then_with(|| {
            let ka = a.tokens().iter().map(|t| self.index[t]);
            let kb = b.tokens().iter().map(|t| self.index[t]);
            ka.cmp(kb)
        })
    }
}

/// A finite token string over some alphabet.
///
/// The empty string `ε` is `Str::empty()`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Str {
    tokens: Vec<Symbol>,
}

impl Str {
    pub fn new(tokens: Vec<Symbol>) -> Self {
        Str { tokens }
    }

    pub fn empty() -> Self {
        Str { tokens: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[Symbol] {
        &self.tokens
    }

    /// Concatenation `self · other`.
    pub fn concat(&self, other: &Str) -> Str {
        let mut tokens = Vec::with_capacity(self.len() + other.len());
        tokens.extend_from_slice(&self.tokens);
        tokens.extend_from_slice(&other.tokens);
        Str { tokens }
    }

    /// `self · σ · other`, the symbol-shifted concatenation.
    pub fn concat_around(&self, symbol: &Symbol, other: &Str) -> Str {
        let mut tokens = Vec::with_capacity(self.len() + 1 + other.len());
        tokens.extend_from_slice(&self.tokens);
        tokens.push(symbol.clone());
        tokens.extend_from_slice(&other.tokens);
        Str { tokens }
    }

    pub fn push(&mut self, symbol: Symbol) {
        self.tokens.push(symbol);
    }

    /// All prefixes from `ε` up to the full string, shortest first.
    pub fn prefixes(&self) -> impl Iterator<Item = Str> + '_ {
        (0..=self.len()).map(move |i| Str::new(self.tokens[..i].to_vec()))
    }

    /// Space-joined token text; the empty string renders as `""`.
    pub fn display_spaced(&self) -> String {
        self.tokens
            .iter()
            .map(Symbol::as_str)
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Tokens joined without separators; readable for single-char alphabets.
    pub fn display_compact(&self) -> String {
        self.tokens.iter().map(Symbol::as_str).collect()
    }
}

impl fmt::Display for Str {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_spaced())
    }
}

impl fmt::Debug for Str {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            f.write_str("ε")
        } else {
            write!(f, "{:?}", self.display_spaced())
        }
    }
}

impl FromIterator<Symbol> for Str {
    fn from_iter<I: IntoIterator<Item = Symbol>>(iter: I) -> Self {
        Str::new(iter.into_iter().collect())
    }
}

/// A string paired with a boolean membership label.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LabeledSample {
    pub string: Str,
    pub label: bool,
}

impl LabeledSample {
    pub fn new(string: Str, label: bool) -> Self {
        LabeledSample { string, label }
    }
}

/// Enumerates every string of length at most `max_len` in shortlex order:
/// by length, ties broken lexicographically under the alphabet's declared
/// symbol order. The result for `max_len` is a prefix of the result for
/// `max_len + 1`.
pub fn shortlex_enumerate(alphabet: &Alphabet, max_len: usize) -> Vec<Str> {
    let mut out = vec![Str::empty()];
    let mut layer_start = 0;
    for _ in 0..max_len {
        let layer_end = out.len();
        for i in layer_start..layer_end {
            for sym in alphabet.symbols() {
                let mut s = out[i].clone();
                s.push(sym.clone());
                out.push(s);
            }
        }
        layer_start = layer_end;
    }
    out
}

/// Number of strings of length at most `max_len`, without enumerating them.
pub fn shortlex_count(alphabet_size: usize, max_len: usize) -> u128 {
    let k = alphabet_size as u128;
    let mut total = 0u128;
    let mut pow = 1u128;
    for _ in 0..=max_len {
        total = total.saturating_add(pow);
        pow = pow.saturating_mul(k);
    }
    total
}

/// Parses a token string against an alphabet.
///
/// Tokens are space-separated; as a convenience, when the alphabet consists
/// solely of single-character symbols and the text contains no space, each
/// character is one token. The empty text parses as `ε`.
pub fn parse_tokens(text: &str, alphabet: &Alphabet) -> Result<Str> {
    if text.is_empty() {
        return Ok(Str::empty());
    }
    let pieces: Vec<String> = if !text.contains(' ') && alphabet.single_char() {
        text.chars().map(String::from).collect()
    } else {
        text.split(' ').map(str::to_owned).collect()
    };
    let mut tokens = Vec::with_capacity(pieces.len());
    for (position, piece) in pieces.iter().enumerate() {
        let sym = Symbol::new(piece).map_err(|_| Error::UnknownSymbol {
            token: piece.clone(),
            position,
        })?;
        if !alphabet.contains(&sym) {
            return Err(Error::UnknownSymbol {
                token: piece.clone(),
                position,
            });
        }
        tokens.push(sym);
    }
    Ok(Str::new(tokens))
}
