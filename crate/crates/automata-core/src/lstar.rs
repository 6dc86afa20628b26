//! The L* active learner.
//!
//! Learns the minimal DFA of an unknown regular language from membership and
//! equivalence queries against a [`Teacher`]. The observation table keeps a
//! prefix-closed set of access strings S and a suffix-closed set of
//! distinguishing suffixes E (always containing ε); counterexamples are
//! processed by adding all their prefixes to S. All scans run in shortlex
//! order, so the learner is fully deterministic for a deterministic teacher.

use std::collections::{BTreeSet, HashMap};

use crate::alphabet::{Alphabet, Str};
use crate::dfa::{Dfa, Equivalence};
use crate::{Error, Result};

/// Answers membership and equivalence queries about a fixed language.
pub trait Teacher {
    fn alphabet(&self) -> &Alphabet;
    fn membership(&mut self, x: &Str) -> bool;
    fn equivalence(&mut self, hypothesis: &Dfa) -> Result<Equivalence>;
    fn membership_count(&self) -> usize;
    fn equivalence_count(&self) -> usize;
}

/// A teacher simulated from a reference DFA: membership by running the
/// machine, equivalence by the product check with shortlex-least
/// counterexamples.
pub struct DfaTeacher {
    target: Dfa,
    membership_count: usize,
    equivalence_count: usize,
}

impl DfaTeacher {
    pub fn new(target: Dfa) -> Self {
        DfaTeacher {
            target,
            membership_count: 0,
            equivalence_count: 0,
        }
    }

    pub fn target(&self) -> &Dfa {
        &self.target
    }
}

impl Teacher for DfaTeacher {
    fn alphabet(&self) -> &Alphabet {
        self.target.alphabet()
    }

    fn membership(&mut self, x: &Str) -> bool {
        self.membership_count += 1;
        self.target.accepts(x)
    }

    fn equivalence(&mut self, hypothesis: &Dfa) -> Result<Equivalence> {
        self.equivalence_count += 1;
        self.target.equivalent(hypothesis)
    }

    fn membership_count(&self) -> usize {
        self.membership_count
    }

    fn equivalence_count(&self) -> usize {
        self.equivalence_count
    }
}

pub fn make_teacher_from_dfa(target: Dfa) -> DfaTeacher {
    DfaTeacher::new(target)
}

/// What a finished L* run returns.
#[derive(Clone, Debug)]
pub struct LStarOutcome {
    pub dfa: Dfa,
    pub membership_queries: usize,
    pub equivalence_queries: usize,
    /// State count of each hypothesis submitted, in order.
    pub hypothesis_sizes: Vec<usize>,
}

struct Table<'a, T: Teacher + ?Sized> {
    teacher: &'a mut T,
    alphabet: Alphabet,
    access: Vec<Str>,
    suffixes: Vec<Str>,
    answers: HashMap<Str, bool>,
}

impl<T: Teacher + ?Sized> Table<'_, T> {
    fn query(&mut self, x: Str) -> bool {
        if let Some(&a) = self.answers.get(&x) {
            return a;
        }
        let a = self.teacher.membership(&x);
        self.answers.insert(x, a);
        a
    }

    fn row(&mut self, s: &Str) -> Vec<bool> {
        let suffixes = self.suffixes.clone();
        suffixes.iter().map(|e| self.query(s.concat(e))).collect()
    }

    fn insert_access(&mut self, s: Str) {
        if let Err(pos) = self
            .access
            .binary_search_by(|x| self.alphabet.shortlex_cmp(x, &s))
        {
            self.access.insert(pos, s);
        }
    }

    fn insert_suffix(&mut self, e: Str) {
        if !self.suffixes.contains(&e) {
            self.suffixes.push(e);
        }
    }

    /// Repairs closure and consistency until both hold.
    fn stabilize(&mut self) {
        loop {
            if let Some(missing) = self.find_unclosed() {
                self.insert_access(missing);
                continue;
            }
            if let Some(suffix) = self.find_inconsistency() {
                self.insert_suffix(suffix);
                continue;
            }
            return;
        }
    }

    /// First s·σ (shortlex scan) whose row is not among the rows of S.
    fn find_unclosed(&mut self) -> Option<Str> {
        let access = self.access.clone();
        let mut known_rows = BTreeSet::new();
        for s in &access {
            known_rows.insert(self.row(s));
        }
        for s in &access {
            for sym in self.alphabet.symbols().to_vec() {
                let mut extended = s.clone();
                extended.push(sym);
                if !known_rows.contains(&self.row(&extended)) {
                    return Some(extended);
                }
            }
        }
        None
    }

    /// First σ·e distinguishing two access strings with equal rows.
    fn find_inconsistency(&mut self) -> Option<Str> {
        let access = self.access.clone();
        for i in 0..access.len() {
            for j in i + 1..access.len() {
                if self.row(&access[i]) != self.row(&access[j]) {
                    continue;
                }
                for sym in self.alphabet.symbols().to_vec() {
                    let mut si = access[i].clone();
                    si.push(sym.clone());
                    let mut sj = access[j].clone();
                    sj.push(sym.clone());
                    let ri = self.row(&si);
                    let rj = self.row(&sj);
                    if ri != rj {
                        let k = ri.iter().zip(&rj).position(|(a, b)| a != b).unwrap();
                        let mut suffix = Str::new(vec![sym]);
                        suffix = suffix.concat(&self.suffixes[k]);
                        return Some(suffix);
                    }
                }
            }
        }
        None
    }

    /// Builds the hypothesis DFA: one state per distinct row of S, in order
    /// of first appearance under the shortlex scan.
    fn hypothesis(&mut self) -> Dfa {
        let access = self.access.clone();
        let mut row_ids: HashMap<Vec<bool>, usize> = HashMap::new();
        let mut representatives: Vec<Str> = Vec::new();
        for s in &access {
            let row = self.row(s);
            if !row_ids.contains_key(&row) {
                row_ids.insert(row, representatives.len());
                representatives.push(s.clone());
            }
        }
        let epsilon_index = self
            .suffixes
            .iter()
            .position(Str::is_empty)
            .expect("E always contains ε");
        let initial = row_ids[&self.row(&Str::empty())];
        let mut accepting = BTreeSet::new();
        let mut triples = Vec::new();
        for (id, rep) in representatives.iter().cloned().enumerate() {
            let row = self.row(&rep);
            if row[epsilon_index] {
                accepting.insert(id);
            }
            for (sym_idx, sym) in self.alphabet.symbols().to_vec().into_iter().enumerate() {
                let mut extended = rep.clone();
                extended.push(sym);
                let target_row = self.row(&extended);
                let target = row_ids[&target_row];
                triples.push((id, sym_idx, target));
            }
        }
        Dfa::new(
            self.alphabet.clone(),
            (0..representatives.len()).map(|i| i.to_string()).collect(),
            initial,
            accepting,
            triples,
        )
        .expect("hypothesis construction is well-formed")
    }
}

/// Runs L* to convergence: returns a DFA equivalent to the teacher's
/// language and minimal up to renaming. Errors with
/// [`Error::QueryBudgetExceeded`] when more than `max_equivalence_queries`
/// equivalence queries would be needed.
pub fn lstar_learn<T: Teacher + ?Sized>(
    teacher: &mut T,
    max_equivalence_queries: usize,
) -> Result<LStarOutcome> {
    let alphabet = teacher.alphabet().clone();
    let mut table = Table {
        teacher,
        alphabet,
        access: vec![Str::empty()],
        suffixes: vec![Str::empty()],
        answers: HashMap::new(),
    };
    let mut hypothesis_sizes = Vec::new();
    loop {
        table.stabilize();
        let hypothesis = table.hypothesis();
        if table.teacher.equivalence_count() >= max_equivalence_queries {
            return Err(Error::QueryBudgetExceeded(table.teacher.equivalence_count()));
        }
        hypothesis_sizes.push(hypothesis.n_states());
        match table.teacher.equivalence(&hypothesis)? {
            Equivalence::Equal => {
                // Hypotheses are total; canonicalize to the partial
                // convention (dead state dropped, BFS names).
                return Ok(LStarOutcome {
                    dfa: hypothesis.minimize(),
                    membership_queries: table.teacher.membership_count(),
                    equivalence_queries: table.teacher.equivalence_count(),
                    hypothesis_sizes,
                });
            }
            Equivalence::Counterexample(x) => {
                for prefix in x.prefixes().collect::<Vec<_>>() {
                    table.insert_access(prefix);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::{parse_tokens, shortlex_enumerate};
    use crate::dfa::determinize;
    use crate::nfa::thompson;
    use crate::regex::parse_regex;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn ab() -> Alphabet {
        Alphabet::from_texts(["a", "b"]).unwrap()
    }

    fn dfa_of(pattern: &str) -> Dfa {
        let a = ab();
        determinize(&thompson(&parse_regex(pattern, &a).unwrap(), &a).unwrap())
            .unwrap()
            .minimize()
    }

    #[test]
    fn teacher_answers_match_target() {
        let target = dfa_of("ab*");
        let mut teacher = make_teacher_from_dfa(target.clone());
        assert!(teacher.membership(&parse_tokens("ab", &ab()).unwrap()));
        assert_eq!(teacher.equivalence(&target).unwrap(), Equivalence::Equal);

        let reject_all = Dfa::new(
            ab(),
            vec!["0".into()],
            0,
            BTreeSet::new(),
            vec![(0, 0, 0), (0, 1, 0)],
        )
        .unwrap();
        assert_eq!(
            teacher.equivalence(&reject_all).unwrap(),
            Equivalence::Counterexample(parse_tokens("a", &ab()).unwrap())
        );
        assert_eq!(teacher.membership_count(), 1);
        assert_eq!(teacher.equivalence_count(), 2);
    }

    #[test]
    fn learns_ab_star() {
        let target = dfa_of("ab*");
        let mut teacher = make_teacher_from_dfa(target.clone());
        let outcome = lstar_learn(&mut teacher, 100).unwrap();
        assert_eq!(outcome.dfa.n_states(), 2);
        assert_eq!(target.equivalent(&outcome.dfa).unwrap(), Equivalence::Equal);
    }

    #[test]
    fn learns_sigma_star_in_one_query() {
        let target = dfa_of("(a|b)*");
        assert_eq!(target.n_states(), 1);
        let mut teacher = make_teacher_from_dfa(target.clone());
        let outcome = lstar_learn(&mut teacher, 100).unwrap();
        assert_eq!(outcome.dfa.n_states(), 1);
        assert_eq!(outcome.equivalence_queries, 1);
    }

    #[test]
    fn query_budget_is_enforced() {
        let target = dfa_of("ab*");
        let mut teacher = make_teacher_from_dfa(target);
        assert!(matches!(
            lstar_learn(&mut teacher, 0),
            Err(Error::QueryBudgetExceeded(_))
        ));
    }

    fn random_minimal_dfa(rng: &mut StdRng, max_states: usize) -> Dfa {
        let a = ab();
        loop {
            let n = rng.gen_range(1..=max_states);
            let mut triples = Vec::new();
            for q in 0..n {
                for s in 0..2 {
                    triples.push((q, s, rng.gen_range(0..n)));
                }
            }
            let accepting: BTreeSet<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
            let dfa = Dfa::new(
                a.clone(),
                (0..n).map(|i| i.to_string()).collect(),
                0,
                accepting,
                triples,
            )
            .unwrap()
            .minimize();
            if dfa.n_states() >= 1 {
                return dfa;
            }
        }
    }

    #[test]
    fn recovers_random_minimal_dfas() {
        let mut rng = StdRng::seed_from_u64(41);
        for _ in 0..12 {
            let target = random_minimal_dfa(&mut rng, 6);
            let n = target.n_states();
            let mut teacher = make_teacher_from_dfa(target.clone());
            let outcome = lstar_learn(&mut teacher, 100).unwrap();
            assert_eq!(
                target.equivalent(&outcome.dfa).unwrap(),
                Equivalence::Equal,
                "target {target:?}"
            );
            assert_eq!(outcome.dfa.n_states(), n, "learned machine is minimal");
            assert!(
                outcome.equivalence_queries <= n,
                "{} equivalence queries for {n} states",
                outcome.equivalence_queries
            );
            // Hypothesis sizes strictly increase.
            for pair in outcome.hypothesis_sizes.windows(2) {
                assert!(pair[0] < pair[1], "sizes {:?}", outcome.hypothesis_sizes);
            }
        }
    }

    #[test]
    fn final_hypothesis_is_consistent_with_all_answers() {
        let target = dfa_of("(a|b)*ab");
        let mut teacher = make_teacher_from_dfa(target.clone());
        let outcome = lstar_learn(&mut teacher, 100).unwrap();
        for x in shortlex_enumerate(&ab(), 7) {
            assert_eq!(outcome.dfa.accepts(&x), target.accepts(&x), "on {x:?}");
        }
    }
}
