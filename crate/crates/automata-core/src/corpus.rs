//! Benchmark languages: membership oracles and labeled dataset generation.
//!
//! Each [`LanguageSpec`] decides membership by a direct decision procedure —
//! bracket matching with an explicit working stack for Dyck, pattern
//! counting for aⁿbⁿ / aⁿbⁿcⁿ / a*ba*, a DFA run for regex languages — so
//! the oracles are independent of the D-automaton machinery they are used
//! to check.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::alphabet::{shortlex_count, shortlex_enumerate, Alphabet, LabeledSample, Str};
use crate::budget;
use crate::dfa::{determinize, Dfa};
use crate::memory::dyck_alphabet;
use crate::nfa::thompson;
use crate::regex::RegexAst;
use crate::{Error, Result};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// A benchmark language with its derived alphabet.
#[derive(Clone, Debug)]
pub struct LanguageSpec {
    alphabet: Alphabet,
    kind: LanguageKind,
}

#[derive(Clone, Debug)]
enum LanguageKind {
    Dyck { k: usize },
    AnBn,
    AnBnCn,
    Regex { dfa: Dfa },
    AStarBAStar,
}

impl LanguageSpec {
    /// The k-Dyck language of well-balanced brackets with k pair types.
    pub fn dyck(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("language", "dyck needs k >= 1"));
        }
        Ok(LanguageSpec {
            alphabet: dyck_alphabet(k),
            kind: LanguageKind::Dyck { k },
        })
    }

    pub fn anbn() -> Self {
        LanguageSpec {
            alphabet: Alphabet::from_texts(["a", "b"]).unwrap(),
            kind: LanguageKind::AnBn,
        }
    }

    pub fn anbncn() -> Self {
        LanguageSpec {
            alphabet: Alphabet::from_texts(["a", "b", "c"]).unwrap(),
            kind: LanguageKind::AnBnCn,
        }
    }

    /// The regular language of a regex, decided by a compiled DFA.
    pub fn regex(pattern: &RegexAst, alphabet: Alphabet) -> Result<Self> {
        let dfa = determinize(&thompson(pattern, &alphabet)?)?.minimize();
        Ok(LanguageSpec {
            alphabet,
            kind: LanguageKind::Regex { dfa },
        })
    }

    /// a*ba*: exactly one `b`.
    pub fn astar_b_astar() -> Self {
        LanguageSpec {
            alphabet: Alphabet::from_texts(["a", "b"]).unwrap(),
            kind: LanguageKind::AStarBAStar,
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// Exact membership.
    pub fn membership(&self, x: &Str) -> bool {
        match &self.kind {
            LanguageKind::Dyck { .. } => {
                // Bracket matching with an explicit working stack. Open
                // brackets sit at even alphabet indices, their partners
                // immediately after.
                let mut stack: Vec<usize> = Vec::new();
                for tok in x.tokens() {
                    let Some(idx) = self.alphabet.index_of(tok) else {
                        return false;
                    };
                    if idx % 2 == 0 {
                        stack.push(idx);
                    } else if stack.pop() != Some(idx - 1) {
                        return false;
                    }
                }
                stack.is_empty()
            }
            LanguageKind::AnBn => {
                let n = x.len();
                if n % 2 != 0 {
                    return false;
                }
                let a_run = x
                    .tokens()
                    .iter()
                    .take_while(|t| t.as_str() == "a")
                    .count();
                a_run == n / 2 && x.tokens()[a_run..].iter().all(|t| t.as_str() == "b")
            }
            LanguageKind::AnBnCn => {
                let n = x.len();
                if n % 3 != 0 {
                    return false;
                }
                let third = n / 3;
                let tokens = x.tokens();
                tokens[..third].iter().all(|t| t.as_str() == "a")
                    && tokens[third..2 * third].iter().all(|t| t.as_str() == "b")
                    && tokens[2 * third..].iter().all(|t| t.as_str() == "c")
            }
            LanguageKind::Regex { dfa } => dfa.accepts(x),
            LanguageKind::AStarBAStar => {
                x.tokens().iter().all(|t| matches!(t.as_str(), "a" | "b"))
                    && x.tokens().iter().filter(|t| t.as_str() == "b").count() == 1
            }
        }
    }
}

/// A labeled dataset plus the parameters that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledDataset {
    pub alphabet: Alphabet,
    pub samples: Vec<LabeledSample>,
    pub provenance: String,
}

fn label_all(spec: &LanguageSpec, strings: Vec<Str>) -> Vec<LabeledSample> {
    #[cfg(feature = "parallel")]
    {
        strings
            .into_par_iter()
            .map(|s| {
                let label = spec.membership(&s);
                LabeledSample::new(s, label)
            })
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        strings
            .into_iter()
            .map(|s| {
                let label = spec.membership(&s);
                LabeledSample::new(s, label)
            })
            .collect()
    }
}

/// Every string of length ≤ `max_len` with its exact label, shortlex order.
pub fn enumerate_labeled(spec: &LanguageSpec, max_len: usize) -> Result<LabeledDataset> {
    budget::check(shortlex_count(spec.alphabet.len(), max_len))?;
    let samples = label_all(spec, shortlex_enumerate(&spec.alphabet, max_len));
    Ok(LabeledDataset {
        alphabet: spec.alphabet.clone(),
        samples,
        provenance: format!("enumerate max_len={max_len}"),
    })
}

/// Draws `count` samples without replacement: positives uniformly from the
/// enumerated positives of length ≤ `max_len`, negatives likewise, with
/// `round(count · positive_fraction)` positives. Deterministic in `seed`.
pub fn sample_labeled(
    spec: &LanguageSpec,
    count: usize,
    max_len: usize,
    positive_fraction: f64,
    seed: u64,
) -> Result<LabeledDataset> {
    if !(0.0..=1.0).contains(&positive_fraction) {
        return Err(Error::InfeasibleRequest(format!(
            "positive_fraction {positive_fraction} outside [0, 1]"
        )));
    }
    let enumerated = enumerate_labeled(spec, max_len)?;
    let (positives, negatives): (Vec<_>, Vec<_>) =
        enumerated.samples.into_iter().partition(|s| s.label);
    let n_pos = (count as f64 * positive_fraction).round() as usize;
    let n_neg = count - n_pos.min(count);
    if n_pos > positives.len() {
        return Err(Error::InfeasibleRequest(format!(
            "{n_pos} positives requested, only {} exist at length <= {max_len}",
            positives.len()
        )));
    }
    if n_neg > negatives.len() {
        return Err(Error::InfeasibleRequest(format!(
            "{n_neg} negatives requested, only {} exist at length <= {max_len}",
            negatives.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples: Vec<LabeledSample> = positives
        .choose_multiple(&mut rng, n_pos)
        .cloned()
        .collect();
    samples.extend(negatives.choose_multiple(&mut rng, n_neg).cloned());
    Ok(LabeledDataset {
        alphabet: spec.alphabet.clone(),
        samples,
        provenance: format!(
            "sample count={count} max_len={max_len} positive_fraction={positive_fraction} seed={seed}"
        ),
    })
}
