//! Nondeterministic finite automata, with ε-moves.
//!
//! The initial configuration is a state *set* so products and reversals stay
//! uniform; a single-initial machine is the special case of a singleton set.
//! A string is accepted if any ε-closed run over it ends in an accepting
//! state.

use std::collections::BTreeSet;

use crate::alphabet::{Alphabet, Str, Symbol};
use crate::regex::RegexAst;
use crate::{Error, Result};

pub type StateId = usize;

/// An ε-NFA. Transition labels are `Some(symbol index)` or `None` for ε.
#[derive(Clone, Debug)]
pub struct Nfa {
    alphabet: Alphabet,
    state_names: Vec<String>,
    initial: BTreeSet<StateId>,
    accepting: BTreeSet<StateId>,
    transitions: Vec<Vec<(Option<usize>, StateId)>>,
}

impl Nfa {
    /// Builds and validates an NFA from explicit parts. Transition triples
    /// use `None` as the ε label.
    pub fn new(
        alphabet: Alphabet,
        state_names: Vec<String>,
        initial: BTreeSet<StateId>,
        accepting: BTreeSet<StateId>,
        transition_triples: Vec<(StateId, Option<usize>, StateId)>,
    ) -> Result<Self> {
        let n = state_names.len();
        for &q in initial.iter().chain(accepting.iter()) {
            if q >= n {
                return Err(Error::invalid("nfa", format!("state {q} not declared")));
            }
        }
        let mut transitions = vec![Vec::new(); n];
        for (from, label, to) in transition_triples {
            if from >= n || to >= n {
                return Err(Error::invalid(
                    "nfa",
                    format!("transition endpoint {from}->{to} not declared"),
                ));
            }
            if let Some(s) = label {
                if s >= alphabet.len() {
                    return Err(Error::invalid("nfa", format!("symbol index {s} out of range")));
                }
            }
            transitions[from].push((label, to));
        }
        for row in &mut transitions {
            row.sort_unstable();
            row.dedup();
        }
        Ok(Nfa {
            alphabet,
            state_names,
            initial,
            accepting,
            transitions,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn n_states(&self) -> usize {
        self.state_names.len()
    }

    pub fn state_name(&self, q: StateId) -> &str {
        &self.state_names[q]
    }

    pub fn state_names(&self) -> &[String] {
        &self.state_names
    }

    pub fn initial(&self) -> &BTreeSet<StateId> {
        &self.initial
    }

    pub fn accepting(&self) -> &BTreeSet<StateId> {
        &self.accepting
    }

    /// All transitions as `(from, label, to)` triples, ε as `None`.
    pub fn transition_triples(&self) -> Vec<(StateId, Option<usize>, StateId)> {
        let mut out = Vec::new();
        for (from, row) in self.transitions.iter().enumerate() {
            for &(label, to) in row {
                out.push((from, label, to));
            }
        }
        out
    }

    /// ε-closure of a state set.
    pub fn epsilon_closure(&self, set: &BTreeSet<StateId>) -> BTreeSet<StateId> {
        let mut closed = set.clone();
        let mut stack: Vec<StateId> = set.iter().copied().collect();
        while let Some(q) = stack.pop() {
            for &(label, to) in &self.transitions[q] {
                if label.is_none() && closed.insert(to) {
                    stack.push(to);
                }
            }
        }
        closed
    }

    /// One symbol step on an already ε-closed set, returning the ε-closed
    /// successor set.
    pub fn step(&self, closed: &BTreeSet<StateId>, symbol_index: usize) -> BTreeSet<StateId> {
        let mut moved = BTreeSet::new();
        for &q in closed {
            for &(label, to) in &self.transitions[q] {
                if label == Some(symbol_index) {
                    moved.insert(to);
                }
            }
        }
        self.epsilon_closure(&moved)
    }

    /// Frontier simulation: true iff some ε-closed run over `x` ends in an
    /// accepting state. Tokens outside the alphabet simply have no
    /// transitions, so they reject.
    pub fn accepts(&self, x: &Str) -> bool {
        let mut frontier = self.epsilon_closure(&self.initial);
        for tok in x.tokens() {
            match self.alphabet.index_of(tok) {
                Some(s) => frontier = self.step(&frontier, s),
                None => return false,
            }
            if frontier.is_empty() {
                return false;
            }
        }
        frontier.iter().any(|q| self.accepting.contains(q))
    }

    /// Language-preserving ε-removal. The result has the same state count
    /// and no ε-transitions; states from which acceptance was reachable via ε
    /// become accepting.
    pub fn without_epsilons(&self) -> Nfa {
        let n = self.n_states();
        let mut transitions: Vec<Vec<(Option<usize>, StateId)>> = vec![Vec::new(); n];
        let mut accepting = BTreeSet::new();
        for q in 0..n {
            let closed = self.epsilon_closure(&BTreeSet::from([q]));
            if closed.iter().any(|p| self.accepting.contains(p)) {
                accepting.insert(q);
            }
            for s in 0..self.alphabet.len() {
                let mut moved = BTreeSet::new();
                for &p in &closed {
                    for &(label, to) in &self.transitions[p] {
                        if label == Some(s) {
                            moved.insert(to);
                        }
                    }
                }
                for to in self.epsilon_closure(&moved) {
                    transitions[q].push((Some(s), to));
                }
            }
            transitions[q].sort_unstable();
            transitions[q].dedup();
        }
        Nfa {
            alphabet: self.alphabet.clone(),
            state_names: self.state_names.clone(),
            initial: self.epsilon_closure(&self.initial),
            accepting,
            transitions,
        }
    }
}

/// Thompson construction. The resulting NFA recognizes `L(ast)` and has at
/// most two states per AST node.
pub fn thompson(ast: &RegexAst, alphabet: &Alphabet) -> Result<Nfa> {
    let mut b = Builder {
        alphabet,
        transitions: Vec::new(),
    };
    let (start, accept) = b.build(ast)?;
    let n = b.transitions.len();
    Ok(Nfa {
        alphabet: alphabet.clone(),
        state_names: (0..n).map(|i| i.to_string()).collect(),
        initial: BTreeSet::from([start]),
        accepting: BTreeSet::from([accept]),
        transitions: b.transitions,
    })
}

struct Builder<'a> {
    alphabet: &'a Alphabet,
    transitions: Vec<Vec<(Option<usize>, StateId)>>,
}

impl Builder<'_> {
    fn fresh(&mut self) -> StateId {
        self.transitions.push(Vec::new());
        self.transitions.len() - 1
    }

    fn edge(&mut self, from: StateId, label: Option<usize>, to: StateId) {
        self.transitions[from].push((label, to));
    }

    fn symbol_index(&self, s: &Symbol) -> Result<usize> {
        self.alphabet
            .index_of(s)
            .ok_or_else(|| Error::invalid("regex", format!("symbol {s:?} not in alphabet")))
    }

    fn build(&mut self, ast: &RegexAst) -> Result<(StateId, StateId)> {
        match ast {
            RegexAst::EmptySet => {
                let s = self.fresh();
                let t = self.fresh();
                Ok((s, t))
            }
            RegexAst::Epsilon => {
                let s = self.fresh();
                let t = self.fresh();
                self.edge(s, None, t);
                Ok((s, t))
            }
            RegexAst::Sym(sym) => {
                let idx = self.symbol_index(sym)?;
                let s = self.fresh();
                let t = self.fresh();
                self.edge(s, Some(idx), t);
                Ok((s, t))
            }
            RegexAst::Union(a, b) => {
                let (sa, ta) = self.build(a)?;
                let (sb, tb) = self.build(b)?;
                let s = self.fresh();
                let t = self.fresh();
                self.edge(s, None, sa);
                self.edge(s, None, sb);
                self.edge(ta, None, t);
                self.edge(tb, None, t);
                Ok((s, t))
            }
            RegexAst::Concat(a, b) => {
                let (sa, ta) = self.build(a)?;
                let (sb, tb) = self.build(b)?;
                self.edge(ta, None, sb);
                Ok((sa, tb))
            }
            RegexAst::Star(a) => {
                let (sa, ta) = self.build(a)?;
                let s = self.fresh();
                let t = self.fresh();
                self.edge(s, None, sa);
                self.edge(s, None, t);
                self.edge(ta, None, sa);
                self.edge(ta, None, t);
                Ok((s, t))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::{parse_tokens, shortlex_enumerate};
    use crate::regex::parse_regex;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn ab() -> Alphabet {
        Alphabet::from_texts(["a", "b"]).unwrap()
    }

    fn nfa_of(pattern: &str) -> Nfa {
        let a = ab();
        thompson(&parse_regex(pattern, &a).unwrap(), &a).unwrap()
    }

    fn s(text: &str) -> Str {
        parse_tokens(text, &ab()).unwrap()
    }

    /// Independent oracle: explicit enumeration of transition sequences,
    /// tracking visited states per input position to tame ε-cycles.
    fn accepts_bruteforce(nfa: &Nfa, x: &Str) -> bool {
        fn go(
            nfa: &Nfa,
            q: StateId,
            pos: usize,
            x: &Str,
            eps_seen: &mut Vec<(StateId, usize)>,
        ) -> bool {
            if pos == x.len() && nfa.accepting().contains(&q) {
                return true;
            }
            for (from, label, to) in nfa.transition_triples() {
                if from != q {
                    continue;
                }
                match label {
                    None => {
                        if !eps_seen.contains(&(to, pos)) {
                            eps_seen.push((to, pos));
                            if go(nfa, to, pos, x, eps_seen) {
                                return true;
                            }
                        }
                    }
                    Some(s) => {
                        if pos < x.len()
                            && nfa.alphabet().index_of(&x.tokens()[pos]) == Some(s)
                        {
                            let mut fresh = vec![(to, pos + 1)];
                            if go(nfa, to, pos + 1, x, &mut fresh) {
                                return true;
                            }
                        }
                    }
                }
            }
            false
        }
        nfa.initial()
            .iter()
            .any(|&q| go(nfa, q, 0, x, &mut vec![(q, 0)]))
    }

    #[test]
    fn thompson_ab_star_matches_figures() {
        let n = nfa_of("ab*");
        assert!(n.accepts(&s("a")));
        assert!(n.accepts(&s("ab")));
        assert!(n.accepts(&s("abb")));
        assert!(!n.accepts(&Str::empty()));
        assert!(!n.accepts(&s("b")));
        assert!(!n.accepts(&s("ba")));
    }

    #[test]
    fn thompson_epsilon_and_empty_set() {
        let eps = nfa_of("%e");
        let empty = nfa_of("%0");
        for x in shortlex_enumerate(&ab(), 4) {
            assert_eq!(eps.accepts(&x), x.is_empty());
            assert!(!empty.accepts(&x));
        }
    }

    #[test]
    fn thompson_state_count_bound() {
        let a = ab();
        for pattern in ["ab*", "(a|b)*", "a|b|%e", "((ab)*b)*"] {
            let ast = parse_regex(pattern, &a).unwrap();
            let n = thompson(&ast, &a).unwrap();
            assert!(
                n.n_states() <= 2 * ast.node_count(),
                "{pattern}: {} states vs {} nodes",
                n.n_states(),
                ast.node_count()
            );
        }
    }

    fn random_nfa(rng: &mut StdRng, n_states: usize) -> Nfa {
        let a = ab();
        let names = (0..n_states).map(|i| i.to_string()).collect();
        let mut triples = Vec::new();
        for from in 0..n_states {
            for to in 0..n_states {
                for label in [None, Some(0), Some(1)] {
                    let p = if label.is_none() { 0.08 } else { 0.25 };
                    if rng.gen_bool(p) {
                        triples.push((from, label, to));
                    }
                }
            }
        }
        let initial = BTreeSet::from([0]);
        let accepting = (0..n_states).filter(|_| rng.gen_bool(0.4)).collect();
        Nfa::new(a, names, initial, accepting, triples).unwrap()
    }

    #[test]
    fn frontier_simulation_agrees_with_path_enumeration() {
        let mut rng = StdRng::seed_from_u64(7);
        let probes = shortlex_enumerate(&ab(), 5);
        for _ in 0..30 {
            let states = rng.gen_range(1..=4);
            let n = random_nfa(&mut rng, states);
            for x in &probes {
                assert_eq!(n.accepts(x), accepts_bruteforce(&n, x), "nfa {n:?} on {x:?}");
            }
        }
    }

    #[test]
    fn epsilon_removal_preserves_language() {
        let mut rng = StdRng::seed_from_u64(11);
        let probes = shortlex_enumerate(&ab(), 5);
        for _ in 0..20 {
            let states = rng.gen_range(1..=4);
            let n = random_nfa(&mut rng, states);
            let stripped = n.without_epsilons();
            assert!(stripped
                .transition_triples()
                .iter()
                .all(|(_, label, _)| label.is_some()));
            for x in &probes {
                assert_eq!(n.accepts(x), stripped.accepts(x));
            }
        }
    }
}
