//! Deterministic finite automata with partial transition functions.
//!
//! An undefined transition terminates the run and rejects; the dead state is
//! only ever materialized internally (during minimization) and never appears
//! in returned machines.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::alphabet::{Alphabet, LabeledSample, Str};
use crate::nfa::Nfa;
use crate::regex::RegexAst;
use crate::{Error, Result};

pub type StateId = usize;

/// Default cap on subset-construction states.
pub const DEFAULT_STATE_CAP: usize = 1 << 20;

/// Outcome of an equivalence check.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Equivalence {
    Equal,
    /// The shortlex-least string accepted by exactly one machine.
    Counterexample(Str),
}

/// A DFA over an alphabet, with a partial `δ : state × symbol → state`.
#[derive(Clone, Debug)]
pub struct Dfa {
    alphabet: Alphabet,
    state_names: Vec<String>,
    initial: StateId,
    accepting: BTreeSet<StateId>,
    delta: Vec<Vec<Option<StateId>>>,
}

impl Dfa {
    pub fn new(
        alphabet: Alphabet,
        state_names: Vec<String>,
        initial: StateId,
        accepting: BTreeSet<StateId>,
        transition_triples: Vec<(StateId, usize, StateId)>,
    ) -> Result<Self> {
        let n = state_names.len();
        if initial >= n {
            return Err(Error::invalid("dfa", format!("initial state {initial} not declared")));
        }
        for &q in &accepting {
            if q >= n {
                return Err(Error::invalid("dfa", format!("accepting state {q} not declared")));
            }
        }
        let mut delta = vec![vec![None; alphabet.len()]; n];
        for (from, sym, to) in transition_triples {
            if from >= n || to >= n {
                return Err(Error::invalid(
                    "dfa",
                    format!("transition endpoint {from}->{to} not declared"),
                ));
            }
            if sym >= alphabet.len() {
                return Err(Error::invalid("dfa", format!("symbol index {sym} out of range")));
            }
            if let Some(prev) = delta[from][sym] {
                if prev != to {
                    return Err(Error::invalid(
                        "dfa",
                        format!("conflicting transitions from state {from} on symbol {sym}"),
                    ));
                }
            }
            delta[from][sym] = Some(to);
        }
        Ok(Dfa {
            alphabet,
            state_names,
            initial,
            accepting,
            delta,
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

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn accepting(&self) -> &BTreeSet<StateId> {
        &self.accepting
    }

    pub fn next_state(&self, q: StateId, symbol_index: usize) -> Option<StateId> {
        self.delta[q][symbol_index]
    }

    pub fn transition_triples(&self) -> Vec<(StateId, usize, StateId)> {
        let mut out = Vec::new();
        for (from, row) in self.delta.iter().enumerate() {
            for (sym, target) in row.iter().enumerate() {
                if let Some(to) = target {
                    out.push((from, sym, *to));
                }
            }
        }
        out
    }

    /// Runs the unique computation; an undefined transition or a token
    /// outside the alphabet rejects.
    pub fn accepts(&self, x: &Str) -> bool {
        let mut q = self.initial;
        for tok in x.tokens() {
            let Some(s) = self.alphabet.index_of(tok) else {
                return false;
            };
            match self.delta[q][s] {
                Some(next) => q = next,
                None => return false,
            }
        }
        self.accepting.contains(&q)
    }

    /// View as an NFA (same states, singleton initial set).
    pub fn to_nfa(&self) -> Nfa {
        Nfa::new(
            self.alphabet.clone(),
            self.state_names.clone(),
            BTreeSet::from([self.initial]),
            self.accepting.clone(),
            self.transition_triples()
                .into_iter()
                .map(|(f, s, t)| (f, Some(s), t))
                .collect(),
        )
        .expect("a valid DFA is a valid NFA")
    }

    /// Language-equivalent minimal DFA: reachable states only, no two states
    /// Myhill–Nerode equivalent, dead states dropped (except a lone initial
    /// state when the language is empty), states renamed `0, 1, …` in BFS
    /// order under the alphabet's symbol order.
    pub fn minimize(&self) -> Dfa {
        let k = self.alphabet.len();

        // Reachable states, then a completed transition table with an
        // explicit dead state for partition refinement.
        let mut reach_order = vec![self.initial];
        let mut seen: BTreeSet<StateId> = BTreeSet::from([self.initial]);
        let mut i = 0;
        while i < reach_order.len() {
            let q = reach_order[i];
            i += 1;
            for s in 0..k {
                if let Some(to) = self.delta[q][s] {
                    if seen.insert(to) {
                        reach_order.push(to);
                    }
                }
            }
        }
        let index_of: HashMap<StateId, usize> =
            reach_order.iter().enumerate().map(|(i, &q)| (q, i)).collect();
        let n = reach_order.len();
        let dead = n;
        let mut table = vec![vec![dead; k]; n + 1];
        for (i, &q) in reach_order.iter().enumerate() {
            for s in 0..k {
                table[i][s] = self.delta[q][s].map_or(dead, |to| index_of[&to]);
            }
        }
        let mut is_accepting = vec![false; n + 1];
        for (i, &q) in reach_order.iter().enumerate() {
            is_accepting[i] = self.accepting.contains(&q);
        }

        // Moore refinement until the partition stabilizes.
        let mut class: Vec<usize> = is_accepting.iter().map(|&a| usize::from(a)).collect();
        loop {
            let mut sig_to_class: BTreeMap<(usize, Vec<usize>), usize> = BTreeMap::new();
            let mut next = vec![0usize; n + 1];
            for q in 0..=n {
                let sig = (
                    class[q],
                    (0..k).map(|s| class[table[q][s]]).collect::<Vec<_>>(),
                );
                let fresh = sig_to_class.len();
                let c = *sig_to_class.entry(sig).or_insert(fresh);
                next[q] = c;
            }
            if next == class {
                break;
            }
            class = next;
        }
        let n_classes = class.iter().max().unwrap() + 1;

        // A class is live if it can reach an accepting class.
        let mut class_accepting = vec![false; n_classes];
        for q in 0..=n {
            if is_accepting[q] {
                class_accepting[class[q]] = true;
            }
        }
        let mut class_delta = vec![vec![0usize; k]; n_classes];
        for q in 0..=n {
            for s in 0..k {
                class_delta[class[q]][s] = class[table[q][s]];
            }
        }
        let mut live = class_accepting.clone();
        loop {
            let mut changed = false;
            for c in 0..n_classes {
                if !live[c] && (0..k).any(|s| live[class_delta[c][s]]) {
                    live[c] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }

        // Canonical BFS renaming over live classes, rooted at the initial
        // class (kept even when dead, so the empty language is one state).
        let init_class = class[0];
        let mut order = vec![init_class];
        let mut pos: HashMap<usize, usize> = HashMap::from([(init_class, 0)]);
        let mut i = 0;
        while i < order.len() {
            let c = order[i];
            i += 1;
            for s in 0..k {
                let d = class_delta[c][s];
                if live[d] && !pos.contains_key(&d) {
                    pos.insert(d, order.len());
                    order.push(d);
                }
            }
        }

        let mut triples = Vec::new();
        for (i, &c) in order.iter().enumerate() {
            if !live[c] {
                continue;
            }
            for s in 0..k {
                let d = class_delta[c][s];
                if let Some(&j) = pos.get(&d) {
                    triples.push((i, s, j));
                }
            }
        }
        let accepting = order
            .iter()
            .enumerate()
            .filter(|(_, &c)| class_accepting[c])
            .map(|(i, _)| i)
            .collect();
        Dfa::new(
            self.alphabet.clone(),
            (0..order.len()).map(|i| i.to_string()).collect(),
            0,
            accepting,
            triples,
        )
        .expect("minimization produces a valid DFA")
    }

    /// Decides `L(self) = L(other)` by a product-space BFS; on inequality
    /// returns the shortlex-least distinguishing string.
    pub fn equivalent(&self, other: &Dfa) -> Result<Equivalence> {
        if self.alphabet != other.alphabet {
            return Err(Error::AlphabetMismatch);
        }
        let k = self.alphabet.len();
        // Pair states are (Option<qa>, Option<qb>), None = implicit dead.
        // BFS visits pairs in shortlex order of their first-reach strings.
        type Pair = (Option<StateId>, Option<StateId>);
        let start: Pair = (Some(self.initial), Some(other.initial));
        let mut nodes: Vec<(Pair, Option<(usize, usize)>)> = vec![(start, None)];
        let mut visited: HashMap<Pair, usize> = HashMap::from([(start, 0)]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(idx) = queue.pop_front() {
            let (pair, _) = nodes[idx];
            let acc_a = pair.0.is_some_and(|q| self.accepting.contains(&q));
            let acc_b = pair.1.is_some_and(|q| other.accepting.contains(&q));
            if acc_a != acc_b {
                let mut tokens = Vec::new();
                let mut cur = idx;
                while let (_, Some((parent, sym))) = nodes[cur] {
                    tokens.push(self.alphabet.symbol(sym).clone());
                    cur = parent;
                }
                tokens.reverse();
                return Ok(Equivalence::Counterexample(Str::new(tokens)));
            }
            if pair == (None, None) {
                continue;
            }
            for s in 0..k {
                let next: Pair = (
                    pair.0.and_then(|q| self.delta[q][s]),
                    pair.1.and_then(|q| other.delta[q][s]),
                );
                if !visited.contains_key(&next) {
                    visited.insert(next, nodes.len());
                    queue.push_back(nodes.len());
                    nodes.push((next, Some((idx, s))));
                }
            }
        }
        Ok(Equivalence::Equal)
    }

    /// Converts back to a regular expression by state elimination; states
    /// are eliminated in reverse canonical (state-vector) order.
    pub fn to_regex(&self) -> RegexAst {
        let n = self.n_states();
        let source = n;
        let sink = n + 1;
        let mut edges: HashMap<(usize, usize), RegexAst> = HashMap::new();
        let add = |edges: &mut HashMap<(usize, usize), RegexAst>, i, j, r| {
            let entry = edges.remove(&(i, j)).unwrap_or(RegexAst::EmptySet);
            let merged = RegexAst::union(entry, r);
            if merged != RegexAst::EmptySet {
                edges.insert((i, j), merged);
            }
        };
        add(&mut edges, source, self.initial, RegexAst::Epsilon);
        for &q in &self.accepting {
            add(&mut edges, q, sink, RegexAst::Epsilon);
        }
        for (from, s, to) in self.transition_triples() {
            add(
                &mut edges,
                from,
                to,
                RegexAst::Sym(self.alphabet.symbol(s).clone()),
            );
        }
        for kill in (0..n).rev() {
            let self_loop = edges
                .remove(&(kill, kill))
                .map_or(RegexAst::Epsilon, RegexAst::star);
            let into: Vec<(usize, RegexAst)> = edges
                .iter()
                .filter(|((_, j), _)| *j == kill)
                .map(|((i, _), r)| (*i, r.clone()))
                .collect();
            let out_of: Vec<(usize, RegexAst)> = edges
                .iter()
                .filter(|((i, _), _)| *i == kill)
                .map(|((_, j), r)| (*j, r.clone()))
                .collect();
            edges.retain(|(i, j), _| *i != kill && *j != kill);
            for (i, rin) in &into {
                for (j, rout) in &out_of {
                    let through = RegexAst::concat(
                        rin.clone(),
                        RegexAst::concat(self_loop.clone(), rout.clone()),
                    );
                    add(&mut edges, *i, *j, through);
                }
            }
        }
        edges.remove(&(source, sink)).unwrap_or(RegexAst::EmptySet)
    }
}

/// Subset construction over ε-closures, visiting reachable subsets only.
/// Subset states are named by their sorted member lists, e.g. `{q0,q2}`.
pub fn determinize(nfa: &Nfa) -> Result<Dfa> {
    determinize_capped(nfa, DEFAULT_STATE_CAP)
}

/// [`determinize`] with an explicit cap on the number of subset states.
pub fn determinize_capped(nfa: &Nfa, cap: usize) -> Result<Dfa> {
    let k = nfa.alphabet().len();
    let start = nfa.epsilon_closure(nfa.initial());
    let name_of = |set: &BTreeSet<StateId>| {
        let names: Vec<&str> = set.iter().map(|&q| nfa.state_name(q)).collect();
        format!("{{{}}}", names.join(","))
    };
    let mut subsets: Vec<BTreeSet<StateId>> = vec![start.clone()];
    let mut index: HashMap<BTreeSet<StateId>, usize> = HashMap::from([(start, 0)]);
    let mut triples = Vec::new();
    let mut i = 0;
    while i < subsets.len() {
        let current = subsets[i].clone();
        for s in 0..k {
            let next = nfa.step(&current, s);
            if next.is_empty() {
                continue;
            }
            let id = match index.get(&next) {
                Some(&id) => id,
                None => {
                    if subsets.len() >= cap {
                        return Err(Error::StateBudgetExceeded {
                            reachable: subsets.len() + 1,
                            cap,
                        });
                    }
                    let id = subsets.len();
                    index.insert(next.clone(), id);
                    subsets.push(next);
                    id
                }
            };
            triples.push((i, s, id));
        }
        i += 1;
    }
    let accepting = subsets
        .iter()
        .enumerate()
        .filter(|(_, set)| set.iter().any(|q| nfa.accepting().contains(q)))
        .map(|(i, _)| i)
        .collect();
    Dfa::new(
        nfa.alphabet().clone(),
        subsets.iter().map(name_of).collect(),
        0,
        accepting,
        triples,
    )
}

/// Builds the prefix-tree acceptor for a sample: a DFA accepting exactly the
/// positively labeled strings. Errors if a string carries both labels.
pub fn build_trie(samples: &[LabeledSample]) -> Result<Dfa> {
    if samples.is_empty() {
        let alphabet = Alphabet::new(Vec::new())?;
        return Dfa::new(alphabet, vec!["0".into()], 0, BTreeSet::new(), Vec::new());
    }
    // Alphabet sorted by token text so the trie is independent of sample order.
    let mut symbols = Vec::new();
    for sample in samples {
        for tok in sample.string.tokens() {
            if !symbols.contains(tok) {
                symbols.push(tok.clone());
            }
        }
    }
    symbols.sort();
    let alphabet = Alphabet::new(symbols)?;
    let k = alphabet.len();

    let mut delta: Vec<Vec<Option<StateId>>> = vec![vec![None; k]];
    let mut label_at: Vec<Option<bool>> = vec![None];
    for sample in samples {
        let mut q = 0;
        for tok in sample.string.tokens() {
            let s = alphabet.index_of(tok).expect("alphabet built from samples");
            q = match delta[q][s] {
                Some(next) => next,
                None => {
                    delta.push(vec![None; k]);
                    label_at.push(None);
                    let fresh = delta.len() - 1;
                    delta[q][s] = Some(fresh);
                    fresh
                }
            };
        }
        match label_at[q] {
            None => label_at[q] = Some(sample.label),
            Some(prev) if prev != sample.label => {
                return Err(Error::ConflictingLabels(sample.string.display_spaced()));
            }
            _ => {}
        }
    }

    // BFS renaming keeps the construction independent of sample order.
    let mut order = vec![0usize];
    let mut pos: HashMap<usize, usize> = HashMap::from([(0, 0)]);
    let mut i = 0;
    while i < order.len() {
        let q = order[i];
        i += 1;
        for s in 0..k {
            if let Some(to) = delta[q][s] {
                if !pos.contains_key(&to) {
                    pos.insert(to, order.len());
                    order.push(to);
                }
            }
        }
    }
    let mut triples = Vec::new();
    for (i, &q) in order.iter().enumerate() {
        for s in 0..k {
            if let Some(to) = delta[q][s] {
                triples.push((i, s, pos[&to]));
            }
        }
    }
    let accepting = order
        .iter()
        .enumerate()
        .filter(|(_, &q)| label_at[q] == Some(true))
        .map(|(i, _)| i)
        .collect();
    Dfa::new(
        alphabet,
        (0..order.len()).map(|i| i.to_string()).collect(),
        0,
        accepting,
        triples,
    )
}
