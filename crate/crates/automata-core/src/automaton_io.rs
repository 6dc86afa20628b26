//! JSON exchange format for finite automata.
//!
//! ```json
//! {"type":"dfa"|"nfa","alphabet":[...],"states":[...],"initial":[...],
//!  "accepting":[...],"transitions":[{"from":s,"on":symbol_or_"%e","to":s}]}
//! ```
//!
//! `"on":"%e"` marks an ε-transition and is only legal in NFAs. The reader
//! rejects unknown `"type"` values. `initial` is a list for both kinds; a
//! DFA must list exactly one initial state.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::alphabet::{Alphabet, Str};
use crate::dfa::Dfa;
use crate::nfa::Nfa;
use crate::{Error, Result};

pub const EPSILON_LABEL: &str = "%e";

#[derive(Serialize, Deserialize)]
struct AutomatonDoc {
    #[serde(rename = "type")]
    kind: String,
    alphabet: Vec<String>,
    states: Vec<String>,
    initial: Vec<String>,
    accepting: Vec<String>,
    transitions: Vec<TransitionDoc>,
}

#[derive(Serialize, Deserialize)]
struct TransitionDoc {
    from: String,
    on: String,
    to: String,
}

/// A deserialized automaton of either kind.
#[derive(Clone, Debug)]
pub enum Machine {
    Dfa(Dfa),
    Nfa(Nfa),
}

impl Machine {
    pub fn alphabet(&self) -> &Alphabet {
        match self {
            Machine::Dfa(m) => m.alphabet(),
            Machine::Nfa(m) => m.alphabet(),
        }
    }

    pub fn accepts(&self, x: &Str) -> bool {
        match self {
            Machine::Dfa(m) => m.accepts(x),
            Machine::Nfa(m) => m.accepts(x),
        }
    }
}

pub fn dfa_to_json(dfa: &Dfa) -> String {
    let doc = AutomatonDoc {
        kind: "dfa".into(),
        alphabet: dfa
            .alphabet()
            .symbols()
            .iter()
            .map(|s| s.as_str().to_owned())
            .collect(),
        states: dfa.state_names().to_vec(),
        initial: vec![dfa.state_name(dfa.initial()).to_owned()],
        accepting: dfa
            .accepting()
            .iter()
            .map(|&q| dfa.state_name(q).to_owned())
            .collect(),
        transitions: dfa
            .transition_triples()
            .into_iter()
            .map(|(from, sym, to)| TransitionDoc {
                from: dfa.state_name(from).to_owned(),
                on: dfa.alphabet().symbol(sym).as_str().to_owned(),
                to: dfa.state_name(to).to_owned(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("automaton serialization is infallible")
}

pub fn nfa_to_json(nfa: &Nfa) -> String {
    let doc = AutomatonDoc {
        kind: "nfa".into(),
        alphabet: nfa
            .alphabet()
            .symbols()
            .iter()
            .map(|s| s.as_str().to_owned())
            .collect(),
        states: nfa.state_names().to_vec(),
        initial: nfa
            .initial()
            .iter()
            .map(|&q| nfa.state_name(q).to_owned())
            .collect(),
        accepting: nfa
            .accepting()
            .iter()
            .map(|&q| nfa.state_name(q).to_owned())
            .collect(),
        transitions: nfa
            .transition_triples()
            .into_iter()
            .map(|(from, label, to)| TransitionDoc {
                from: nfa.state_name(from).to_owned(),
                on: label.map_or(EPSILON_LABEL.to_owned(), |s| {
                    nfa.alphabet().symbol(s).as_str().to_owned()
                }),
                to: nfa.state_name(to).to_owned(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("automaton serialization is infallible")
}

pub fn machine_to_json(machine: &Machine) -> String {
    match machine {
        Machine::Dfa(m) => dfa_to_json(m),
        Machine::Nfa(m) => nfa_to_json(m),
    }
}

pub fn machine_from_json(text: &str) -> Result<Machine> {
    let doc: AutomatonDoc = serde_json::from_str(text)
        .map_err(|e| Error::format("automaton JSON", e.to_string()))?;
    let alphabet = Alphabet::from_texts(&doc.alphabet)?;
    let state_id = |name: &str| -> Result<usize> {
        doc.states
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| Error::format("automaton JSON", format!("unknown state {name:?}")))
    };
    let symbol_id = |name: &str| -> Result<usize> {
        doc.alphabet
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| Error::format("automaton JSON", format!("unknown symbol {name:?}")))
    };
    let initial: Vec<usize> = doc
        .initial
        .iter()
        .map(|s| state_id(s))
        .collect::<Result<_>>()?;
    let accepting: BTreeSet<usize> = doc
        .accepting
        .iter()
        .map(|s| state_id(s))
        .collect::<Result<_>>()?;
    match doc.kind.as_str() {
        "dfa" => {
            if initial.len() != 1 {
                return Err(Error::format(
                    "automaton JSON",
                    format!("a DFA needs exactly one initial state, found {}", initial.len()),
                ));
            }
            let mut triples = Vec::with_capacity(doc.transitions.len());
            for t in &doc.transitions {
                if t.on == EPSILON_LABEL {
                    return Err(Error::format(
                        "automaton JSON",
                        "ε-transitions are not allowed in a DFA",
                    ));
                }
                triples.push((state_id(&t.from)?, symbol_id(&t.on)?, state_id(&t.to)?));
            }
            Ok(Machine::Dfa(Dfa::new(
                alphabet,
                doc.states,
                initial[0],
                accepting,
                triples,
            )?))
        }
        "nfa" => {
            let mut triples = Vec::with_capacity(doc.transitions.len());
            for t in &doc.transitions {
                let label = if t.on == EPSILON_LABEL {
                    None
                } else {
                    Some(symbol_id(&t.on)?)
                };
                triples.push((state_id(&t.from)?, label, state_id(&t.to)?));
            }
            Ok(Machine::Nfa(Nfa::new(
                alphabet,
                doc.states,
                initial.into_iter().collect(),
                accepting,
                triples,
            )?))
        }
        other => Err(Error::format(
            "automaton JSON",
            format!("unknown automaton type {other:?}"),
        )),
    }
}

pub fn dfa_from_json(text: &str) -> Result<Dfa> {
    match machine_from_json(text)? {
        Machine::Dfa(m) => Ok(m),
        Machine::Nfa(_) => Err(Error::format("automaton JSON", "expected type \"dfa\"")),
    }
}

/// Best-effort Graphviz rendering.
pub fn machine_to_dot(machine: &Machine) -> String {
    let mut out = String::from("digraph automaton {\n  rankdir=LR;\n  __start [shape=none,label=\"\"];\n");
    let (names, initial, accepting, edges): (Vec<String>, Vec<usize>, Vec<usize>, Vec<(usize, String, usize)>) =
        match machine {
            Machine::Dfa(m) => (
                m.state_names().to_vec(),
                vec![m.initial()],
                m.accepting().iter().copied().collect(),
                m.transition_triples()
                    .into_iter()
                    .map(|(f, s, t)| (f, m.alphabet().symbol(s).as_str().to_owned(), t))
                    .collect(),
            ),
            Machine::Nfa(m) => (
                m.state_names().to_vec(),
                m.initial().iter().copied().collect(),
                m.accepting().iter().copied().collect(),
                m.transition_triples()
                    .into_iter()
                    .map(|(f, label, t)| {
                        let on = label.map_or("ε".to_owned(), |s| {
                            m.alphabet().symbol(s).as_str().to_owned()
                        });
                        (f, on, t)
                    })
                    .collect(),
            ),
        };
    for (i, name) in names.iter().enumerate() {
        let shape = if accepting.contains(&i) {
            "doublecircle"
        } else {
            "circle"
        };
        out.push_str(&format!("  q{i} [shape={shape},label=\"{name}\"];\n"));
    }
    for q in initial {
        out.push_str(&format!("  __start -> q{q};\n"));
    }
    for (f, on, t) in edges {
        out.push_str(&format!("  q{f} -> q{t} [label=\"{on}\"];\n"));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::parse_tokens;
    use crate::nfa::thompson;
    use crate::regex::parse_regex;

    fn fig1() -> Dfa {
        let a = Alphabet::from_texts(["a", "b"]).unwrap();
        Dfa::new(
            a,
            vec!["q0".into(), "q1".into()],
            0,
            BTreeSet::from([1]),
            vec![(0, 0, 1), (1, 1, 1)],
        )
        .unwrap()
    }

    #[test]
    fn dfa_round_trip() {
        let m = fig1();
        let json = dfa_to_json(&m);
        assert!(json.contains("\"type\": \"dfa\""));
        let back = dfa_from_json(&json).unwrap();
        let a = m.alphabet();
        for text in ["", "a", "ab", "ba", "abb"] {
            let x = parse_tokens(text, a).unwrap();
            assert_eq!(m.accepts(&x), back.accepts(&x));
        }
        // Byte-identical re-serialization.
        assert_eq!(json, dfa_to_json(&back));
    }

    #[test]
    fn nfa_round_trip_with_epsilon() {
        let a = Alphabet::from_texts(["a", "b"]).unwrap();
        let n = thompson(&parse_regex("a|b*", &a).unwrap(), &a).unwrap();
        let json = nfa_to_json(&n);
        assert!(json.contains("\"%e\""));
        let Machine::Nfa(back) = machine_from_json(&json).unwrap() else {
            panic!("expected nfa");
        };
        for text in ["", "a", "b", "bb", "ab"] {
            let x = parse_tokens(text, &a).unwrap();
            assert_eq!(n.accepts(&x), back.accepts(&x));
        }
    }

    #[test]
    fn reader_rejects_unknown_type_and_bad_references() {
        let json = dfa_to_json(&fig1()).replace("\"dfa\"", "\"moore\"");
        assert!(matches!(machine_from_json(&json), Err(Error::Format { .. })));

        // Rename the declaration only; later references dangle.
        let json = dfa_to_json(&fig1()).replacen("\"q1\"", "\"zz\"", 1);
        assert!(machine_from_json(&json).is_err());

        let json = dfa_to_json(&fig1()).replace("\"on\": \"a\"", "\"on\": \"%e\"");
        assert!(machine_from_json(&json).is_err());
    }

    #[test]
    fn dot_export_mentions_all_states() {
        let dot = machine_to_dot(&Machine::Dfa(fig1()));
        assert!(dot.contains("doublecircle"));
        assert!(dot.contains("label=\"a\""));
    }
}
