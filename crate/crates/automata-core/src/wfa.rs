//! Weighted finite automata.
//!
//! A WFA over a semiring ⟨K, ⊕, ⊗⟩ carries initial weights λ, transition
//! weights τ (absent entries are semiring zero) and final weights ρ. It
//! encodes a string as the ⊕-sum over all paths of the path score
//! λ(q₀) ⊗ τ(q₀,x₁,q₁) ⊗ ⋯ ⊗ ρ(q_t). [`Wfa::score`] computes this by
//! forward-vector iteration in O(|x|·|Q|²) semiring operations;
//! [`Wfa::score_bruteforce`] enumerates every state sequence explicitly and
//! serves as the oracle for it.
//!
//! Restricted to the boolean semiring, these machines are exactly NFAs
//! ([`wfa_to_nfa`] / [`nfa_to_wfa`]); over the rational field they compute
//! the rational series, such as the binary-value machine
//! ([`builtin_binary_value`]) and the n-gram occurrence counter
//! ([`builtin_ngram_counter`]).

use std::collections::BTreeMap;

use num::{BigRational, One, Zero};
use serde::{Deserialize, Serialize};

use crate::alphabet::{Alphabet, Str, Symbol};
use crate::budget;
use crate::nfa::Nfa;
use crate::semiring::{BoolWeight, MaxPlusWeight, RationalWeight, RealWeight, Semiring};
use crate::{Error, Result};

/// A weighted automaton over semiring `W`.
#[derive(Clone, Debug)]
pub struct Wfa<W: Semiring> {
    alphabet: Alphabet,
    state_names: Vec<String>,
    initial: Vec<W>,
    final_weights: Vec<W>,
    /// Dense per-symbol transition matrices, `matrices[σ][from][to]`.
    matrices: Vec<Vec<Vec<W>>>,
}

impl<W: Semiring> Wfa<W> {
    /// Builds a WFA; transitions are `(from, symbol index, to, weight)` and
    /// omitted entries are zero.
    pub fn new(
        alphabet: Alphabet,
        state_names: Vec<String>,
        initial: Vec<W>,
        final_weights: Vec<W>,
        transitions: Vec<(usize, usize, usize, W)>,
    ) -> Result<Self> {
        let n = state_names.len();
        if initial.len() != n || final_weights.len() != n {
            return Err(Error::invalid(
                "wfa",
                format!("weight vectors must have length {n}"),
            ));
        }
        let mut matrices = vec![vec![vec![W::zero(); n]; n]; alphabet.len()];
        for (from, sym, to, w) in transitions {
            if from >= n || to >= n {
                return Err(Error::invalid(
                    "wfa",
                    format!("transition endpoint {from}->{to} not declared"),
                ));
            }
            if sym >= alphabet.len() {
                return Err(Error::invalid("wfa", format!("symbol index {sym} out of range")));
            }
            matrices[sym][from][to] = w;
        }
        Ok(Wfa {
            alphabet,
            state_names,
            initial,
            final_weights,
            matrices,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn n_states(&self) -> usize {
        self.state_names.len()
    }

    pub fn state_names(&self) -> &[String] {
        &self.state_names
    }

    pub fn initial_weight(&self, q: usize) -> &W {
        &self.initial[q]
    }

    pub fn final_weight(&self, q: usize) -> &W {
        &self.final_weights[q]
    }

    pub fn transition_weight(&self, from: usize, sym: usize, to: usize) -> &W {
        &self.matrices[sym][from][to]
    }

    /// Nonzero transitions as `(from, symbol, to, weight)`.
    pub fn transitions(&self) -> Vec<(usize, usize, usize, W)> {
        let mut out = Vec::new();
        for (sym, m) in self.matrices.iter().enumerate() {
            for (from, row) in m.iter().enumerate() {
                for (to, w) in row.iter().enumerate() {
                    if !w.is_zero() {
                        out.push((from, sym, to, w.clone()));
                    }
                }
            }
        }
        out
    }

    /// Forward-algorithm string encoding. For ε this is ⊕_q λ(q) ⊗ ρ(q);
    /// a token outside the alphabet scores zero.
    pub fn score(&self, x: &Str) -> W {
        let mut v = self.initial.clone();
        for tok in x.tokens() {
            let Some(s) = self.alphabet.index_of(tok) else {
                return W::zero();
            };
            let m = &self.matrices[s];
            let mut next = vec![W::zero(); self.n_states()];
            for (q, vq) in v.iter().enumerate() {
                if vq.is_zero() {
                    continue;
                }
                for (q2, cell) in next.iter_mut().enumerate() {
                    *cell = cell.plus(&vq.times(&m[q][q2]));
                }
            }
            v = next;
        }
        let mut total = W::zero();
        for (q, vq) in v.iter().enumerate() {
            total = total.plus(&vq.times(&self.final_weights[q]));
        }
        total
    }

    /// Score of one explicit path: λ(q₀) ⊗ ⊗ᵢ τ(q_{i−1}, xᵢ, qᵢ) ⊗ ρ(q_t).
    pub fn path_score(&self, path: &WfaPath) -> Result<W> {
        if path.states.len() != path.symbols.len() + 1 {
            return Err(Error::InvalidPath(
                "a path has one more state than symbols".into(),
            ));
        }
        for &q in &path.states {
            if q >= self.n_states() {
                return Err(Error::InvalidPath(format!("state {q} not declared")));
            }
        }
        let mut score = self.initial[path.states[0]].clone();
        for (i, sym) in path.symbols.iter().enumerate() {
            let s = self
                .alphabet
                .index_of(sym)
                .ok_or_else(|| Error::InvalidPath(format!("symbol {sym:?} not in alphabet")))?;
            score = score.times(&self.matrices[s][path.states[i]][path.states[i + 1]]);
        }
        Ok(score.times(&self.final_weights[*path.states.last().unwrap()]))
    }

    /// Oracle scorer: enumerates all |Q|^(|x|+1) state sequences and ⊕-sums
    /// their path scores. Checks |Q|^(|x|+1) against the enumeration budget.
    pub fn score_bruteforce(&self, x: &Str) -> Result<W> {
        let n = self.n_states() as u128;
        let needed = n
            .checked_pow(x.len() as u32 + 1)
            .ok_or(Error::BudgetExceeded {
                needed: u128::MAX,
                budget: budget::enumeration_budget(),
            })?;
        budget::check(needed)?;
        let symbol_ids: Option<Vec<usize>> = x
            .tokens()
            .iter()
            .map(|t| self.alphabet.index_of(t))
            .collect();
        let Some(symbol_ids) = symbol_ids else {
            return Ok(W::zero());
        };
        let mut total = W::zero();
        let mut seq = vec![0usize; x.len() + 1];
        loop {
            let mut score = self.initial[seq[0]].clone();
            for (i, &s) in symbol_ids.iter().enumerate() {
                score = score.times(&self.matrices[s][seq[i]][seq[i + 1]]);
            }
            score = score.times(&self.final_weights[*seq.last().unwrap()]);
            total = total.plus(&score);
            // Odometer over Q^(|x|+1).
            let mut pos = 0;
            loop {
                if pos == seq.len() {
                    return Ok(total);
                }
                seq[pos] += 1;
                if seq[pos] < self.n_states() {
                    break;
                }
                seq[pos] = 0;
                pos += 1;
            }
        }
    }
}

/// An explicit path q₀ —x₁→ q₁ ⋯ —x_t→ q_t.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WfaPath {
    pub states: Vec<usize>,
    pub symbols: Vec<Symbol>,
}

impl WfaPath {
    pub fn new(states: Vec<usize>, symbols: Vec<Symbol>) -> Self {
        WfaPath { states, symbols }
    }
}

/// The two-state machine mapping digit strings to their numeric value in
/// `base`: stay-left weight 1, crossing weight = digit value, stay-right
/// weight = base. Score of ε is 0.
pub fn builtin_binary_value(base: usize) -> Wfa<RationalWeight> {
    assert!(base >= 2, "positional value needs base >= 2");
    let alphabet =
        Alphabet::from_texts((0..base).map(|d| d.to_string())).expect("digit symbols are valid");
    let mut transitions = Vec::new();
    for d in 0..base {
        transitions.push((0, d, 0, RationalWeight::one()));
        transitions.push((0, d, 1, RationalWeight::from_int(d as i64)));
        transitions.push((1, d, 1, RationalWeight::from_int(base as i64)));
    }
    Wfa::new(
        alphabet,
        vec!["q0".into(), "q1".into()],
        vec![RationalWeight::one(), RationalWeight::zero()],
        vec![RationalWeight::zero(), RationalWeight::one()],
        transitions,
    )
    .expect("builtin machine is well-formed")
}

/// The (|pattern|+1)-state machine whose score on `x` is the number of
/// (possibly overlapping) occurrences of `pattern` in `x`. Every occurrence
/// contributes exactly one weight-1 path.
pub fn builtin_ngram_counter(alphabet: &Alphabet, pattern: &Str) -> Wfa<RationalWeight> {
    assert!(!pattern.is_empty(), "pattern must be nonempty");
    let n = pattern.len() + 1;
    let mut transitions = Vec::new();
    for s in 0..alphabet.len() {
        transitions.push((0, s, 0, RationalWeight::one()));
        transitions.push((n - 1, s, n - 1, RationalWeight::one()));
    }
    for (i, tok) in pattern.tokens().iter().enumerate() {
        let s = alphabet
            .index_of(tok)
            .expect("pattern tokens must belong to the alphabet");
        transitions.push((i, s, i + 1, RationalWeight::one()));
    }
    let mut initial = vec![RationalWeight::zero(); n];
    initial[0] = RationalWeight::one();
    let mut final_weights = vec![RationalWeight::zero(); n];
    final_weights[n - 1] = RationalWeight::one();
    Wfa::new(
        alphabet.clone(),
        (0..n).map(|i| format!("q{i}")).collect(),
        initial,
        final_weights,
        transitions,
    )
    .expect("builtin machine is well-formed")
}

/// The streaming recurrence compiled from the unigram-counter machine:
/// h₀ = 0, h_t = h_{t−1} + [x_t = α].
#[derive(Clone, Debug)]
pub struct UnigramRecurrence {
    target: Symbol,
    value: BigRational,
}

impl UnigramRecurrence {
    pub fn new(target: Symbol) -> Self {
        UnigramRecurrence {
            target,
            value: BigRational::zero(),
        }
    }

    pub fn step(&mut self, token: &Symbol) -> &BigRational {
        if *token == self.target {
            self.value += BigRational::one();
        }
        &self.value
    }

    pub fn value(&self) -> &BigRational {
        &self.value
    }

    /// Runs the recurrence over a whole string from h₀.
    pub fn run(target: &Symbol, x: &Str) -> RationalWeight {
        let mut rec = UnigramRecurrence::new(target.clone());
        for tok in x.tokens() {
            rec.step(tok);
        }
        RationalWeight(rec.value)
    }
}

pub fn compile_unigram_recurrence(target: &Symbol) -> UnigramRecurrence {
    UnigramRecurrence::new(target.clone())
}

/// Boolean WFA → NFA: a transition exists iff its weight is 1; initial and
/// accepting sets come from nonzero λ and ρ.
pub fn wfa_to_nfa(w: &Wfa<BoolWeight>) -> Nfa {
    let initial = (0..w.n_states())
        .filter(|&q| !w.initial[q].is_zero())
        .collect();
    let accepting = (0..w.n_states())
        .filter(|&q| !w.final_weights[q].is_zero())
        .collect();
    let triples = w
        .transitions()
        .into_iter()
        .map(|(from, sym, to, _)| (from, Some(sym), to))
        .collect();
    Nfa::new(
        w.alphabet.clone(),
        w.state_names.clone(),
        initial,
        accepting,
        triples,
    )
    .expect("boolean WFA is a valid NFA")
}

/// NFA → boolean WFA. ε-moves are folded away first so that path products
/// over declared symbols match NFA acceptance exactly.
pub fn nfa_to_wfa(n: &Nfa) -> Wfa<BoolWeight> {
    let stripped = n.without_epsilons();
    let states = stripped.n_states();
    let initial = (0..states)
        .map(|q| BoolWeight(stripped.initial().contains(&q)))
        .collect();
    let final_weights = (0..states)
        .map(|q| BoolWeight(stripped.accepting().contains(&q)))
        .collect();
    let transitions = stripped
        .transition_triples()
        .into_iter()
        .map(|(from, label, to)| {
            let sym = label.expect("ε-moves were removed");
            (from, sym, to, BoolWeight(true))
        })
        .collect();
    Wfa::new(
        stripped.alphabet().clone(),
        stripped.state_names().to_vec(),
        initial,
        final_weights,
        transitions,
    )
    .expect("NFA converts to a well-formed WFA")
}

// ---------------------------------------------------------------------------
// JSON exchange format
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct WfaDoc {
    #[serde(rename = "type")]
    kind: String,
    semiring: String,
    alphabet: Vec<String>,
    states: Vec<String>,
    initial: BTreeMap<String, String>,
    #[serde(rename = "final")]
    final_weights: BTreeMap<String, String>,
    transitions: Vec<WfaTransitionDoc>,
}

#[derive(Serialize, Deserialize)]
struct WfaTransitionDoc {
    from: String,
    on: String,
    to: String,
    weight: String,
}

/// A WFA of any builtin semiring, as read from JSON.
#[derive(Clone, Debug)]
pub enum AnyWfa {
    Boolean(Wfa<BoolWeight>),
    Rational(Wfa<RationalWeight>),
    MaxPlus(Wfa<MaxPlusWeight>),
    Real(Wfa<RealWeight>),
}

impl AnyWfa {
    pub fn semiring_name(&self) -> &'static str {
        match self {
            AnyWfa::Boolean(_) => BoolWeight::NAME,
            AnyWfa::Rational(_) => RationalWeight::NAME,
            AnyWfa::MaxPlus(_) => MaxPlusWeight::NAME,
            AnyWfa::Real(_) => RealWeight::NAME,
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        match self {
            AnyWfa::Boolean(w) => w.alphabet(),
            AnyWfa::Rational(w) => w.alphabet(),
            AnyWfa::MaxPlus(w) => w.alphabet(),
            AnyWfa::Real(w) => w.alphabet(),
        }
    }

    /// Scores and renders in one step, for CLI output.
    pub fn score_rendered(&self, x: &Str) -> String {
        match self {
            AnyWfa::Boolean(w) => w.score(x).render_weight(),
            AnyWfa::Rational(w) => w.score(x).render_weight(),
            AnyWfa::MaxPlus(w) => w.score(x).render_weight(),
            AnyWfa::Real(w) => w.score(x).render_weight(),
        }
    }

    pub fn try_into_nfa(&self) -> Result<Nfa> {
        match self {
            AnyWfa::Boolean(w) => Ok(wfa_to_nfa(w)),
            other => Err(Error::SemiringMismatch {
                expected: BoolWeight::NAME.into(),
                found: other.semiring_name().into(),
            }),
        }
    }

    pub fn try_into_rational(&self) -> Result<&Wfa<RationalWeight>> {
        match self {
            AnyWfa::Rational(w) => Ok(w),
            other => Err(Error::SemiringMismatch {
                expected: RationalWeight::NAME.into(),
                found: other.semiring_name().into(),
            }),
        }
    }
}

pub fn wfa_to_json<W: Semiring>(w: &Wfa<W>) -> String {
    let name_of = |q: usize| w.state_names[q].clone();
    let weight_map = |v: &[W]| {
        v.iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(q, x)| (name_of(q), x.render_weight()))
            .collect::<BTreeMap<_, _>>()
    };
    let doc = WfaDoc {
        kind: "wfa".into(),
        semiring: W::NAME.into(),
        alphabet: w
            .alphabet
            .symbols()
            .iter()
            .map(|s| s.as_str().to_owned())
            .collect(),
        states: w.state_names.clone(),
        initial: weight_map(&w.initial),
        final_weights: weight_map(&w.final_weights),
        transitions: w
            .transitions()
            .into_iter()
            .map(|(from, sym, to, weight)| WfaTransitionDoc {
                from: name_of(from),
                on: w.alphabet.symbol(sym).as_str().to_owned(),
                to: name_of(to),
                weight: weight.render_weight(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("wfa serialization is infallible")
}

pub fn wfa_from_json(text: &str) -> Result<AnyWfa> {
    let doc: WfaDoc =
        serde_json::from_str(text).map_err(|e| Error::format("wfa JSON", e.to_string()))?;
    if doc.kind != "wfa" {
        return Err(Error::format(
            "wfa JSON",
            format!("unknown type {:?}", doc.kind),
        ));
    }
    match doc.semiring.as_str() {
        "boolean" => Ok(AnyWfa::Boolean(build_typed::<BoolWeight>(&doc)?)),
        "rational" => Ok(AnyWfa::Rational(build_typed::<RationalWeight>(&doc)?)),
        "maxplus" => Ok(AnyWfa::MaxPlus(build_typed::<MaxPlusWeight>(&doc)?)),
        "real" => Ok(AnyWfa::Real(build_typed::<RealWeight>(&doc)?)),
        other => Err(Error::format(
            "wfa JSON",
            format!("unknown semiring {other:?}"),
        )),
    }
}

fn build_typed<W: Semiring>(doc: &WfaDoc) -> Result<Wfa<W>> {
    let alphabet = Alphabet::from_texts(&doc.alphabet)?;
    let state_id = |name: &str| -> Result<usize> {
        doc.states
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| Error::format("wfa JSON", format!("unknown state {name:?}")))
    };
    let n = doc.states.len();
    let mut initial = vec![W::zero(); n];
    for (name, w) in &doc.initial {
        initial[state_id(name)?] = W::parse_weight(w)?;
    }
    let mut final_weights = vec![W::zero(); n];
    for (name, w) in &doc.final_weights {
        final_weights[state_id(name)?] = W::parse_weight(w)?;
    }
    let mut transitions = Vec::with_capacity(doc.transitions.len());
    for t in &doc.transitions {
        let sym = doc
            .alphabet
            .iter()
            .position(|s| *s == t.on)
            .ok_or_else(|| Error::format("wfa JSON", format!("unknown symbol {:?}", t.on)))?;
        transitions.push((state_id(&t.from)?, sym, state_id(&t.to)?, W::parse_weight(&t.weight)?));
    }
    Wfa::new(alphabet, doc.states.clone(), initial, final_weights, transitions)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::{parse_tokens, shortlex_enumerate};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn digits() -> Alphabet {
        Alphabet::from_texts(["0", "1"]).unwrap()
    }

    fn ab() -> Alphabet {
        Alphabet::from_texts(["a", "b"]).unwrap()
    }

    fn rat(n: i64) -> RationalWeight {
        RationalWeight::from_int(n)
    }

    #[test]
    fn binary_value_machine_scores() {
        let w = builtin_binary_value(2);
        let score = |text: &str| w.score(&parse_tokens(text, &digits()).unwrap());
        assert_eq!(score("101"), rat(5));
        assert_eq!(score("0"), rat(0));
        assert_eq!(score("1111"), rat(15), "positional expansion 8+4+2+1");
        assert_eq!(score(""), rat(0), "all λ·ρ products vanish on ε");

        let w3 = builtin_binary_value(3);
        let a3 = w3.alphabet().clone();
        assert_eq!(w3.score(&parse_tokens("12", &a3).unwrap()), rat(5));
    }

    #[test]
    fn path_scores() {
        let w = builtin_binary_value(2);
        let sym = |t: &str| Symbol::new(t).unwrap();
        // Length-0 path at q0: λ(q0) ⊗ ρ(q0) = 1·0 = 0.
        assert_eq!(
            w.path_score(&WfaPath::new(vec![0], vec![])).unwrap(),
            rat(0)
        );
        // Path through the zero-weight crossing on digit 0 is annihilated.
        assert_eq!(
            w.path_score(&WfaPath::new(vec![0, 1], vec![sym("0")]))
                .unwrap(),
            rat(0)
        );
        // Unigram counter: stay, then cross on α.
        let counter = builtin_ngram_counter(&ab(), &parse_tokens("a", &ab()).unwrap());
        assert_eq!(
            counter
                .path_score(&WfaPath::new(vec![0, 0, 1], vec![sym("b"), sym("a")]))
                .unwrap(),
            rat(1)
        );
        assert!(matches!(
            w.path_score(&WfaPath::new(vec![0, 7], vec![sym("0")])),
            Err(Error::InvalidPath(_))
        ));
    }

    fn random_rational_wfa(rng: &mut StdRng, n: usize) -> Wfa<RationalWeight> {
        let a = ab();
        let mut transitions = Vec::new();
        for s in 0..2 {
            for from in 0..n {
                for to in 0..n {
                    if rng.gen_bool(0.6) {
                        transitions.push((from, s, to, rat(rng.gen_range(-2..=2))));
                    }
                }
            }
        }
        let initial = (0..n).map(|_| rat(rng.gen_range(-1..=1))).collect();
        let final_weights = (0..n).map(|_| rat(rng.gen_range(-1..=1))).collect();
        Wfa::new(
            a,
            (0..n).map(|i| format!("q{i}")).collect(),
            initial,
            final_weights,
            transitions,
        )
        .unwrap()
    }

    #[test]
    fn forward_agrees_with_bruteforce() {
        let mut rng = StdRng::seed_from_u64(17);
        let probes = shortlex_enumerate(&ab(), 5);
        for _ in 0..20 {
            let w = random_rational_wfa(&mut rng, 3);
            for x in &probes {
                assert_eq!(w.score(x), w.score_bruteforce(x).unwrap(), "on {x:?}");
            }
        }
    }

    #[test]
    fn bruteforce_empty_string_is_lambda_rho() {
        let w = builtin_binary_value(2);
        let direct = w
            .initial
            .iter()
            .zip(&w.final_weights)
            .fold(RationalWeight::zero(), |acc, (l, r)| acc.plus(&l.times(r)));
        assert_eq!(w.score_bruteforce(&Str::empty()).unwrap(), direct);
    }

    #[test]
    fn ngram_counter_counts_overlapping_occurrences() {
        let a = ab();
        let p = |t: &str| parse_tokens(t, &a).unwrap();
        let count = |pattern: &str, text: &str| {
            builtin_ngram_counter(&a, &p(pattern)).score(&p(text))
        };
        assert_eq!(count("a", "aba"), rat(2));
        assert_eq!(count("ab", "abab"), rat(2));
        assert_eq!(count("a", "bbb"), rat(0));
        assert_eq!(count("aa", "aaa"), rat(2), "overlaps count");

        // Sliding-window scan oracle over all strings up to length 8.
        let machine = builtin_ngram_counter(&a, &p("ab"));
        for x in shortlex_enumerate(&a, 8) {
            let scan = x
                .tokens()
                .windows(2)
                .filter(|w| w[0].as_str() == "a" && w[1].as_str() == "b")
                .count() as i64;
            assert_eq!(machine.score(&x), rat(scan), "on {x:?}");
        }
    }

    #[test]
    fn ngram_counter_matches_bruteforce() {
        let a = ab();
        let machine = builtin_ngram_counter(&a, &parse_tokens("a", &a).unwrap());
        for x in shortlex_enumerate(&a, 4) {
            assert_eq!(machine.score(&x), machine.score_bruteforce(&x).unwrap());
        }
    }

    #[test]
    fn unigram_recurrence_matches_counter_machine() {
        let a = ab();
        let alpha = Symbol::new("a").unwrap();
        let machine = builtin_ngram_counter(&a, &Str::new(vec![alpha.clone()]));
        assert_eq!(
            UnigramRecurrence::run(&alpha, &parse_tokens("aba", &a).unwrap()),
            rat(2)
        );
        assert_eq!(UnigramRecurrence::run(&alpha, &Str::empty()), rat(0));
        for x in shortlex_enumerate(&a, 6) {
            assert_eq!(UnigramRecurrence::run(&alpha, &x), machine.score(&x));
        }
    }

    #[test]
    fn boolean_wfa_is_an_nfa() {
        use crate::nfa::thompson;
        use crate::regex::parse_regex;
        let a = ab();
        let nfa = thompson(&parse_regex("ab*", &a).unwrap(), &a).unwrap();
        let w = nfa_to_wfa(&nfa);
        let back = wfa_to_nfa(&w);
        for x in shortlex_enumerate(&a, 6) {
            let expect = nfa.accepts(&x);
            assert_eq!(w.score(&x), BoolWeight(expect), "score on {x:?}");
            assert_eq!(
                w.score_bruteforce(&x).unwrap(),
                BoolWeight(expect),
                "bruteforce on {x:?}"
            );
            assert_eq!(back.accepts(&x), expect, "round trip on {x:?}");
        }
    }

    #[test]
    fn empty_boolean_wfa_rejects_everything() {
        let a = ab();
        let w: Wfa<BoolWeight> = Wfa::new(
            a.clone(),
            vec!["q0".into()],
            vec![BoolWeight::zero()],
            vec![BoolWeight::zero()],
            vec![],
        )
        .unwrap();
        let nfa = wfa_to_nfa(&w);
        for x in shortlex_enumerate(&a, 4) {
            assert!(!nfa.accepts(&x));
        }
    }

    #[test]
    fn random_nfa_round_trips_through_boolean_wfa() {
        use std::collections::BTreeSet;
        let mut rng = StdRng::seed_from_u64(23);
        let a = ab();
        let probes = shortlex_enumerate(&a, 5);
        for _ in 0..15 {
            let n = rng.gen_range(1..=4);
            let mut triples = Vec::new();
            for from in 0..n {
                for to in 0..n {
                    for label in [None, Some(0), Some(1)] {
                        let prob = if label.is_none() { 0.08 } else { 0.3 };
                        if rng.gen_bool(prob) {
                            triples.push((from, label, to));
                        }
                    }
                }
            }
            let accepting = (0..n).filter(|_| rng.gen_bool(0.4)).collect();
            let nfa = Nfa::new(
                a.clone(),
                (0..n).map(|i| i.to_string()).collect(),
                BTreeSet::from([0]),
                accepting,
                triples,
            )
            .unwrap();
            let back = wfa_to_nfa(&nfa_to_wfa(&nfa));
            for x in &probes {
                assert_eq!(nfa.accepts(x), back.accepts(x));
            }
        }
    }

    #[test]
    fn json_round_trip_and_mismatch() {
        let w = builtin_binary_value(2);
        let json = wfa_to_json(&w);
        assert!(json.contains("\"semiring\": \"rational\""));
        let back = wfa_from_json(&json).unwrap();
        let AnyWfa::Rational(back) = &back else {
            panic!("expected rational");
        };
        for x in shortlex_enumerate(&digits(), 5) {
            assert_eq!(w.score(&x), back.score(&x));
        }
        assert_eq!(json, wfa_to_json(back), "byte-identical reserialization");

        assert!(matches!(
            wfa_from_json(&json).unwrap().try_into_nfa(),
            Err(Error::SemiringMismatch { .. })
        ));
        assert!(wfa_from_json(&json.replace("\"rational\"", "\"fuzzy\"")).is_err());
    }

    #[test]
    fn maxplus_scores_longest_path_style() {
        // Two parallel one-step paths with different weights: max wins.
        let a = ab();
        let w: Wfa<MaxPlusWeight> = Wfa::new(
            a.clone(),
            vec!["s".into(), "t".into()],
            vec![MaxPlusWeight::one(), MaxPlusWeight::zero()],
            vec![MaxPlusWeight::zero(), MaxPlusWeight::one()],
            vec![
                (0, 0, 1, MaxPlusWeight::finite(3)),
                (0, 0, 0, MaxPlusWeight::finite(1)),
                (0, 1, 1, MaxPlusWeight::finite(0)),
            ],
        )
        .unwrap();
        let x = parse_tokens("ab", &a).unwrap();
        // Only surviving path: s -a(1)-> s -b(0)-> t, total 1; the a(3)
        // crossing strands the run in t with no b-transition out.
        let expect = MaxPlusWeight::finite(1);
        assert_eq!(w.score(&x), expect);
        assert_eq!(w.score_bruteforce(&x).unwrap(), expect);
    }
}
