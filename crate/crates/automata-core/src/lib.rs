//! A workbench for formal languages and the machines that recognize, encode,
//! and learn them.
//!
//! The crate is organized around a small set of machine families:
//!
//! - [`regex`], [`nfa`], [`dfa`] — regular expressions, nondeterministic and
//!   deterministic finite automata, and all conversions among them
//!   (Thompson construction, subset construction, minimization, equivalence
//!   with shortlex-least counterexamples, state elimination back to a regex).
//! - [`memory`] — finite-state controllers paired with an unbounded data
//!   structure (a stack or a vector of counters), deterministic and
//!   nondeterministic, with builtin machines for aⁿbⁿ, aⁿbⁿcⁿ and the Dyck
//!   languages.
//! - [`wfa`] / [`semiring`] — weighted finite automata over pluggable
//!   semirings, with a forward-algorithm scorer and a brute-force path-sum
//!   oracle.
//! - [`hankel`] — Hankel sub-blocks of string functions, exact rank over the
//!   rationals, and spectral recovery of weighted automata.
//! - [`lstar`] — active learning of minimal DFAs from membership and
//!   equivalence queries.
//! - [`saturation`] — the large-parameter limit of recurrent cells and
//!   attention, automaton extraction, and space-complexity probes.
//! - [`rfa`] — random sin/cos feature maps estimating the Gaussian kernel.
//! - [`corpus`] — membership oracles and labeled dataset generation for the
//!   benchmark languages.
//!
//! Canonical enumeration order everywhere is shortlex under each alphabet's
//! declared symbol order, so counterexamples, Hankel bases, and generated
//! datasets are reproducible byte for byte.
//!
//! With the `parallel` feature (on by default) the bulk inner loops — Hankel
//! block filling, space-complexity probes, and corpus labeling — run on a
//! rayon pool; without it they fall back to equivalent sequential code.

pub mod alphabet;
pub mod automaton_io;
pub mod budget;
pub mod corpus;
pub mod dataset;
pub mod dfa;
pub mod hankel;
pub mod lstar;
pub mod memory;
pub mod nfa;
pub mod regex;
pub mod rfa;
pub mod saturation;
pub mod semiring;
pub mod wfa;

pub use alphabet::{Alphabet, LabeledSample, Str, Symbol};
pub use dfa::Dfa;
pub use nfa::Nfa;
pub use regex::RegexAst;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A token that does not belong to the alphabet in use.
    #[error("unknown symbol {token:?} at position {position}")]
    UnknownSymbol { token: String, position: usize },

    /// Malformed regular-expression syntax; the position is a character offset.
    #[error("syntax error at position {0}")]
    SyntaxError(usize),

    /// Subset construction or state-space exploration exceeded its cap.
    #[error("state budget exceeded: {reachable} states (cap {cap})")]
    StateBudgetExceeded { reachable: usize, cap: usize },

    /// Two machines were combined despite having different alphabets.
    #[error("alphabet mismatch")]
    AlphabetMismatch,

    /// A sample string appeared with both labels.
    #[error("conflicting labels for string {0:?}")]
    ConflictingLabels(String),

    /// Nondeterministic frontier simulation exceeded its cap.
    #[error("frontier cap exceeded at step {step}: {size} > {cap}")]
    FrontierCapExceeded {
        step: usize,
        size: usize,
        cap: usize,
    },

    /// An enumeration would exceed the configured budget
    /// (see [`budget::enumeration_budget`]).
    #[error("enumeration budget exceeded: {needed} > {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    /// A sampling request cannot be satisfied by the available strings.
    #[error("infeasible request: {0}")]
    InfeasibleRequest(String),

    /// An operation requiring one semiring was applied to another.
    #[error("semiring mismatch: expected {expected}, found {found}")]
    SemiringMismatch { expected: String, found: String },

    /// A path does not exist in the automaton it was scored against.
    #[error("invalid path: {0}")]
    InvalidPath(String),

    /// The empty-string row or column fell outside the factor span.
    #[error("rank-deficient basis: {0}")]
    RankDeficientBasis(String),

    /// A rank hint may only truncate, never exceed, the exact rank.
    #[error("rank hint {hint} exceeds exact rank {rank}")]
    RankHintTooLarge { hint: usize, rank: usize },

    /// The learner ran out of equivalence queries.
    #[error("query budget exceeded after {0} equivalence queries")]
    QueryBudgetExceeded(usize),

    /// Vector dimensions disagree.
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// A saturation preactivation was exactly zero, so the limit is undefined.
    #[error("undefined saturation limit at step {step}, coordinate {coordinate}")]
    UndefinedLimit { step: usize, coordinate: String },

    /// A value failed construction-time validation.
    #[error("invalid {what}: {detail}")]
    Invalid { what: String, detail: String },

    /// A file or JSON document does not match its declared format.
    #[error("malformed {format}: {detail}")]
    Format { format: String, detail: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(what: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Invalid {
            what: what.into(),
            detail: detail.into(),
        }
    }

    pub(crate) fn format(format: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Format {
            format: format.into(),
            detail: detail.into(),
        }
    }
}

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;
