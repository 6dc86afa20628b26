//! Automata over unbounded memory: a finite-state controller paired with a
//! data structure ⟨c₀, U, r⟩.
//!
//! The data structure contributes a null configuration c₀, a finite named
//! set of update operations U, and a readout r whose range R must be finite.
//! A D-automaton consults ⟨σ, r(c), q⟩ to pick both an update op and a
//! successor state, one transition per input token (real-time), and accepts
//! when the final ⟨r(c_n), q_n⟩ lies in the acceptance mask.
//!
//! Two structures are built in: a stack over an arbitrary finite stack
//! alphabet Γ (readout = the top-k window, so |R| = Σ_{i≤k} |Γ|^i), and a
//! vector of exact integer counters (readout = per-coordinate zero-check).
//! Undefined transition entries reject, mirroring the partial-DFA
//! convention, and memory faults (pop on empty) reject rather than error.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use num::{BigInt, Zero};
use serde::{Deserialize, Serialize};

use crate::alphabet::{shortlex_enumerate, Alphabet, Str, Symbol};
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// Data structures
// ---------------------------------------------------------------------------

/// A memory configuration.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Config {
    /// Stack contents, top at the front.
    Stack(Vec<Symbol>),
    /// Exact integer counter values.
    Counter(Vec<BigInt>),
}

impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Config::Stack(v) if v.is_empty() => f.write_str("ε"),
            Config::Stack(v) => {
                let parts: Vec<&str> = v.iter().map(Symbol::as_str).collect();
                f.write_str(&parts.join(" "))
            }
            Config::Counter(v) => {
                let parts: Vec<String> = v.iter().map(BigInt::to_string).collect();
                write!(f, "({})", parts.join(","))
            }
        }
    }
}

/// A readout value — an element of the finite range R.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Readout {
    /// The top-most stack symbols, at most the window size, top first.
    Stack(Vec<Symbol>),
    /// Per-coordinate nonzero flags (`true` = counter is nonzero).
    Counter(Vec<bool>),
}

impl Readout {
    /// Textual form used by the JSON format: stacks render as
    /// space-separated tokens (empty string for the empty window), counters
    /// as a bitstring with `1` marking a nonzero coordinate.
    pub fn render(&self) -> String {
        match self {
            Readout::Stack(v) => v
                .iter()
                .map(Symbol::as_str)
                .collect::<Vec<_>>()
                .join(" "),
            Readout::Counter(v) => v.iter().map(|&b| if b { '1' } else { '0' }).collect(),
        }
    }
}

/// One stack update.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum StackOp {
    Noop,
    Pop,
    Push(Symbol),
}

/// One per-coordinate counter update.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum CounterOp {
    /// −1
    Dec,
    /// +0
    Hold,
    /// +1
    Inc,
    /// ×0
    Clear,
}

impl CounterOp {
    fn apply(self, v: &BigInt) -> BigInt {
        match self {
            CounterOp::Dec => v - 1,
            CounterOp::Hold => v.clone(),
            CounterOp::Inc => v + 1,
            CounterOp::Clear => BigInt::zero(),
        }
    }

    fn render(self) -> &'static str {
        match self {
            CounterOp::Dec => "-1",
            CounterOp::Hold => "+0",
            CounterOp::Inc => "+1",
            CounterOp::Clear => "x0",
        }
    }

    fn parse(text: &str) -> Result<Self> {
        match text {
            "-1" => Ok(CounterOp::Dec),
            "+0" => Ok(CounterOp::Hold),
            "+1" => Ok(CounterOp::Inc),
            "x0" => Ok(CounterOp::Clear),
            other => Err(Error::format("counter op", format!("{other:?}"))),
        }
    }
}

/// A named update operation u : C → C.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum UpdateOp {
    Stack(StackOp),
    /// One op per coordinate; the whole vector is a single element of U.
    Counter(Vec<CounterOp>),
}

impl UpdateOp {
    pub fn render(&self) -> String {
        match self {
            UpdateOp::Stack(StackOp::Noop) => "noop".into(),
            UpdateOp::Stack(StackOp::Pop) => "pop".into(),
            UpdateOp::Stack(StackOp::Push(s)) => format!("push {}", s.as_str()),
            UpdateOp::Counter(ops) => ops
                .iter()
                .map(|o| o.render())
                .collect::<Vec<_>>()
                .join(","),
        }
    }
}

/// The memory half of a D-automaton: c₀, U, and r with finite range.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Memory {
    Stack {
        gamma: Alphabet,
        /// Readout window k ≥ 1.
        window: usize,
    },
    Counter {
        counters: usize,
    },
}

impl Memory {
    pub fn stack(gamma: Alphabet, window: usize) -> Result<Self> {
        if window == 0 {
            return Err(Error::invalid("stack memory", "window must be at least 1"));
        }
        Ok(Memory::Stack { gamma, window })
    }

    pub fn counter(counters: usize) -> Result<Self> {
        if counters == 0 {
            return Err(Error::invalid("counter memory", "needs at least 1 counter"));
        }
        Ok(Memory::Counter { counters })
    }

    /// The null configuration c₀.
    pub fn null_config(&self) -> Config {
        match self {
            Memory::Stack { .. } => Config::Stack(Vec::new()),
            Memory::Counter { counters } => Config::Counter(vec![BigInt::zero(); *counters]),
        }
    }

    /// The readout r(c).
    pub fn readout(&self, c: &Config) -> Readout {
        match (self, c) {
            (Memory::Stack { window, .. }, Config::Stack(v)) => {
                Readout::Stack(v.iter().take(*window).cloned().collect())
            }
            (Memory::Counter { .. }, Config::Counter(v)) => {
                Readout::Counter(v.iter().map(|x| !x.is_zero()).collect())
            }
            _ => panic!("configuration does not match memory kind"),
        }
    }

    /// Applies an update; `None` is a memory fault (pop on the empty stack),
    /// which rejects the run.
    pub fn apply(&self, op: &UpdateOp, c: &Config) -> Option<Config> {
        match (op, c) {
            (UpdateOp::Stack(StackOp::Noop), Config::Stack(v)) => Some(Config::Stack(v.clone())),
            (UpdateOp::Stack(StackOp::Pop), Config::Stack(v)) => {
                if v.is_empty() {
                    None
                } else {
                    Some(Config::Stack(v[1..].to_vec()))
                }
            }
            (UpdateOp::Stack(StackOp::Push(s)), Config::Stack(v)) => {
                let mut next = Vec::with_capacity(v.len() + 1);
                next.push(s.clone());
                next.extend_from_slice(v);
                Some(Config::Stack(next))
            }
            (UpdateOp::Counter(ops), Config::Counter(v)) => Some(Config::Counter(
                ops.iter().zip(v).map(|(op, x)| op.apply(x)).collect(),
            )),
            _ => panic!("update op does not match memory kind"),
        }
    }

    /// Enumerates the full finite readout range R.
    pub fn readout_range(&self) -> Vec<Readout> {
        match self {
            Memory::Stack { gamma, window } => shortlex_enumerate(gamma, *window)
                .into_iter()
                .map(|s| Readout::Stack(s.tokens().to_vec()))
                .collect(),
            Memory::Counter { counters } => {
                let mut out = Vec::with_capacity(1 << counters);
                for bits in 0..(1u64 << counters) {
                    out.push(Readout::Counter(
                        (0..*counters).map(|i| bits >> i & 1 == 1).collect(),
                    ));
                }
                out
            }
        }
    }

    fn validate_readout(&self, r: &Readout) -> Result<()> {
        match (self, r) {
            (Memory::Stack { gamma, window }, Readout::Stack(v)) => {
                if v.len() > *window {
                    return Err(Error::invalid("readout", "window overflow"));
                }
                for s in v {
                    if !gamma.contains(s) {
                        return Err(Error::invalid(
                            "readout",
                            format!("symbol {s:?} not in stack alphabet"),
                        ));
                    }
                }
                Ok(())
            }
            (Memory::Counter { counters }, Readout::Counter(v)) if v.len() == *counters => Ok(()),
            _ => Err(Error::invalid("readout", "does not match memory kind")),
        }
    }

    fn validate_op(&self, op: &UpdateOp) -> Result<()> {
        match (self, op) {
            (Memory::Stack { gamma, .. }, UpdateOp::Stack(sop)) => {
                if let StackOp::Push(s) = sop {
                    if !gamma.contains(s) {
                        return Err(Error::invalid(
                            "update op",
                            format!("push symbol {s:?} not in stack alphabet"),
                        ));
                    }
                }
                Ok(())
            }
            (Memory::Counter { counters }, UpdateOp::Counter(ops)) if ops.len() == *counters => {
                Ok(())
            }
            _ => Err(Error::invalid("update op", "does not match memory kind")),
        }
    }

    /// Parses the textual op form (`noop`, `pop`, `push γ`, or a
    /// comma-joined counter vector like `+1,-1`).
    pub fn parse_op(&self, text: &str) -> Result<UpdateOp> {
        let op = match self {
            Memory::Stack { .. } => match text {
                "noop" => UpdateOp::Stack(StackOp::Noop),
                "pop" => UpdateOp::Stack(StackOp::Pop),
                other => match other.strip_prefix("push ") {
                    Some(sym) => UpdateOp::Stack(StackOp::Push(Symbol::new(sym)?)),
                    None => return Err(Error::format("stack op", format!("{other:?}"))),
                },
            },
            Memory::Counter { .. } => UpdateOp::Counter(
                text.split(',')
                    .map(CounterOp::parse)
                    .collect::<Result<Vec<_>>>()?,
            ),
        };
        self.validate_op(&op)?;
        Ok(op)
    }

    /// Parses the textual readout form (see [`Readout::render`]).
    pub fn parse_readout(&self, text: &str) -> Result<Readout> {
        let r = match self {
            Memory::Stack { .. } => {
                if text.is_empty() {
                    Readout::Stack(Vec::new())
                } else {
                    Readout::Stack(
                        text.split(' ')
                            .map(Symbol::new)
                            .collect::<Result<Vec<_>>>()?,
                    )
                }
            }
            Memory::Counter { .. } => Readout::Counter(
                text.chars()
                    .map(|ch| match ch {
                        '0' => Ok(false),
                        '1' => Ok(true),
                        other => Err(Error::format("counter readout", format!("{other:?}"))),
                    })
                    .collect::<Result<Vec<_>>>()?,
            ),
        };
        self.validate_readout(&r)?;
        Ok(r)
    }
}

// ---------------------------------------------------------------------------
// Deterministic machines
// ---------------------------------------------------------------------------

type Key = (usize, Readout, usize);

/// A deterministic D-automaton ⟨Σ, Q, q₀, υ, δ, F⟩ over a [`Memory`].
///
/// υ and δ are partial maps keyed by ⟨symbol, readout, state⟩; a missing
/// entry rejects.
#[derive(Clone, Debug)]
pub struct DAutomaton {
    alphabet: Alphabet,
    state_names: Vec<String>,
    initial: usize,
    memory: Memory,
    upsilon: HashMap<Key, UpdateOp>,
    delta: HashMap<Key, usize>,
    accept: BTreeSet<(Readout, usize)>,
}

/// One observed step of a run.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TraceStep {
    pub config: Config,
    pub state: usize,
    pub readout: Readout,
}

/// Result of a deterministic run: the decision plus the visited
/// configurations (initial entry included; truncated when the run dies on an
/// undefined transition or a memory fault).
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub accepted: bool,
    pub trace: Vec<TraceStep>,
}

impl DAutomaton {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        alphabet: Alphabet,
        state_names: Vec<String>,
        initial: usize,
        memory: Memory,
        upsilon: Vec<(usize, Readout, usize, UpdateOp)>,
        delta: Vec<(usize, Readout, usize, usize)>,
        accept: Vec<(Readout, usize)>,
    ) -> Result<Self> {
        let n = state_names.len();
        if initial >= n {
            return Err(Error::invalid("dautomaton", "initial state not declared"));
        }
        let mut upsilon_map = HashMap::new();
        for (sym, r, q, op) in upsilon {
            Self::check_key(&alphabet, n, &memory, sym, &r, q)?;
            memory.validate_op(&op)?;
            if upsilon_map.insert((sym, r, q), op).is_some() {
                return Err(Error::invalid("dautomaton", "duplicate υ entry"));
            }
        }
        let mut delta_map = HashMap::new();
        for (sym, r, q, to) in delta {
            Self::check_key(&alphabet, n, &memory, sym, &r, q)?;
            if to >= n {
                return Err(Error::invalid("dautomaton", "transition target not declared"));
            }
            if delta_map.insert((sym, r, q), to).is_some() {
                return Err(Error::invalid("dautomaton", "duplicate δ entry"));
            }
        }
        let mut accept_set = BTreeSet::new();
        for (r, q) in accept {
            memory.validate_readout(&r)?;
            if q >= n {
                return Err(Error::invalid("dautomaton", "accept state not declared"));
            }
            accept_set.insert((r, q));
        }
        Ok(DAutomaton {
            alphabet,
            state_names,
            initial,
            memory,
            upsilon: upsilon_map,
            delta: delta_map,
            accept: accept_set,
        })
    }

    fn check_key(
        alphabet: &Alphabet,
        n: usize,
        memory: &Memory,
        sym: usize,
        r: &Readout,
        q: usize,
    ) -> Result<()> {
        if sym >= alphabet.len() {
            return Err(Error::invalid("dautomaton", "symbol index out of range"));
        }
        if q >= n {
            return Err(Error::invalid("dautomaton", "state not declared"));
        }
        memory.validate_readout(r)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn state_names(&self) -> &[String] {
        &self.state_names
    }

    pub fn memory(&self) -> &Memory {
        &self.memory
    }

    /// Runs the machine: exactly one transition per token. An undefined
    /// ⟨σ, r(c), q⟩ entry or a memory fault rejects with a truncated trace.
    pub fn run(&self, x: &Str) -> RunOutcome {
        let mut config = self.memory.null_config();
        let mut state = self.initial;
        let mut trace = vec![TraceStep {
            config: config.clone(),
            state,
            readout: self.memory.readout(&config),
        }];
        for tok in x.tokens() {
            let Some(sym) = self.alphabet.index_of(tok) else {
                return RunOutcome {
                    accepted: false,
                    trace,
                };
            };
            let readout = self.memory.readout(&config);
            let key = (sym, readout, state);
            let (Some(op), Some(&next)) = (self.upsilon.get(&key), self.delta.get(&key)) else {
                return RunOutcome {
                    accepted: false,
                    trace,
                };
            };
            let Some(next_config) = self.memory.apply(op, &config) else {
                return RunOutcome {
                    accepted: false,
                    trace,
                };
            };
            config = next_config;
            state = next;
            trace.push(TraceStep {
                config: config.clone(),
                state,
                readout: self.memory.readout(&config),
            });
        }
        let final_key = (self.memory.readout(&config), state);
        RunOutcome {
            accepted: self.accept.contains(&final_key),
            trace,
        }
    }

    pub fn accepts(&self, x: &Str) -> bool {
        self.run(x).accepted
    }

    /// Relaxes the functions υ, δ into relations.
    pub fn to_nondeterministic(&self) -> NondetDAutomaton {
        NondetDAutomaton {
            alphabet: self.alphabet.clone(),
            state_names: self.state_names.clone(),
            initial: self.initial,
            memory: self.memory.clone(),
            upsilon: self
                .upsilon
                .iter()
                .map(|((s, r, q), op)| (*s, r.clone(), *q, op.clone()))
                .collect(),
            delta: self
                .delta
                .iter()
                .map(|((s, r, q), to)| (*s, r.clone(), *q, *to))
                .collect(),
            accept: self.accept.clone(),
        }
    }

    /// Distinct memory configurations reachable within at most `depth`
    /// steps, over all inputs; index i of the result is the count for
    /// depth ≤ i. A breadth-first sweep over ⟨config, state⟩ pairs, so no
    /// string enumeration is needed.
    pub fn reachable_config_counts(&self, depth: usize) -> Vec<usize> {
        let mut seen_pairs: HashSet<(Config, usize)> = HashSet::new();
        let mut configs: HashSet<Config> = HashSet::new();
        let start = (self.memory.null_config(), self.initial);
        configs.insert(start.0.clone());
        seen_pairs.insert(start.clone());
        let mut frontier = vec![start];
        let mut counts = vec![configs.len()];
        for _ in 0..depth {
            let mut next = Vec::new();
            for (config, state) in &frontier {
                let readout = self.memory.readout(config);
                for sym in 0..self.alphabet.len() {
                    let key = (sym, readout.clone(), *state);
                    let (Some(op), Some(&to)) =
                        (self.upsilon.get(&key), self.delta.get(&key))
                    else {
                        continue;
                    };
                    let Some(nc) = self.memory.apply(op, config) else {
                        continue;
                    };
                    let pair = (nc, to);
                    if seen_pairs.insert(pair.clone()) {
                        configs.insert(pair.0.clone());
                        next.push(pair);
                    }
                }
            }
            frontier = next;
            counts.push(configs.len());
        }
        counts
    }

    /// υ as relation tuples, sorted for stable serialization.
    pub fn upsilon_entries(&self) -> Vec<(usize, Readout, usize, UpdateOp)> {
        let mut v: Vec<_> = self
            .upsilon
            .iter()
            .map(|((s, r, q), op)| (*s, r.clone(), *q, op.clone()))
            .collect();
        v.sort();
        v
    }

    /// δ as relation tuples, sorted for stable serialization.
    pub fn delta_entries(&self) -> Vec<(usize, Readout, usize, usize)> {
        let mut v: Vec<_> = self
            .delta
            .iter()
            .map(|((s, r, q), to)| (*s, r.clone(), *q, *to))
            .collect();
        v.sort();
        v
    }

    pub fn accept_entries(&self) -> Vec<(Readout, usize)> {
        self.accept.iter().cloned().collect()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }
}

// ---------------------------------------------------------------------------
// Nondeterministic machines
// ---------------------------------------------------------------------------

/// Default cap on the deduplicated nondeterministic frontier.
pub const DEFAULT_FRONTIER_CAP: usize = 1_000_000;

/// A nondeterministic D-automaton: υ and δ are finite relations, and the
/// update op and successor state are chosen independently among the enabled
/// entries.
#[derive(Clone, Debug)]
pub struct NondetDAutomaton {
    alphabet: Alphabet,
    state_names: Vec<String>,
    initial: usize,
    memory: Memory,
    upsilon: Vec<(usize, Readout, usize, UpdateOp)>,
    delta: Vec<(usize, Readout, usize, usize)>,
    accept: BTreeSet<(Readout, usize)>,
}

impl NondetDAutomaton {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        alphabet: Alphabet,
        state_names: Vec<String>,
        initial: usize,
        memory: Memory,
        upsilon: Vec<(usize, Readout, usize, UpdateOp)>,
        delta: Vec<(usize, Readout, usize, usize)>,
        accept: Vec<(Readout, usize)>,
    ) -> Result<Self> {
        let n = state_names.len();
        if initial >= n {
            return Err(Error::invalid("dautomaton", "initial state not declared"));
        }
        for (sym, r, q, op) in &upsilon {
            DAutomaton::check_key(&alphabet, n, &memory, *sym, r, *q)?;
            memory.validate_op(op)?;
        }
        for (sym, r, q, to) in &delta {
            DAutomaton::check_key(&alphabet, n, &memory, *sym, r, *q)?;
            if *to >= n {
                return Err(Error::invalid("dautomaton", "transition target not declared"));
            }
        }
        let mut accept_set = BTreeSet::new();
        for (r, q) in accept {
            memory.validate_readout(&r)?;
            if q >= n {
                return Err(Error::invalid("dautomaton", "accept state not declared"));
            }
            accept_set.insert((r, q));
        }
        Ok(NondetDAutomaton {
            alphabet,
            state_names,
            initial,
            memory,
            upsilon,
            delta,
            accept: accept_set,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn state_names(&self) -> &[String] {
        &self.state_names
    }

    pub fn memory(&self) -> &Memory {
        &self.memory
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn upsilon_entries(&self) -> &[(usize, Readout, usize, UpdateOp)] {
        &self.upsilon
    }

    pub fn delta_entries(&self) -> &[(usize, Readout, usize, usize)] {
        &self.delta
    }

    pub fn accept_entries(&self) -> Vec<(Readout, usize)> {
        self.accept.iter().cloned().collect()
    }

    /// True when υ and δ are functional, i.e. the machine is secretly
    /// deterministic.
    pub fn try_deterministic(&self) -> Option<DAutomaton> {
        DAutomaton::new(
            self.alphabet.clone(),
            self.state_names.clone(),
            self.initial,
            self.memory.clone(),
            self.upsilon.clone(),
            self.delta.clone(),
            self.accept.iter().cloned().collect(),
        )
        .ok()
    }

    /// Breadth-wise frontier simulation over deduplicated ⟨config, state⟩
    /// sets; accepts iff some final configuration is accepting. Faulting
    /// branches die silently. Errors when the frontier exceeds the cap.
    pub fn accepts(&self, x: &Str, frontier_cap: usize) -> Result<bool> {
        let mut frontier: HashSet<(Config, usize)> =
            HashSet::from([(self.memory.null_config(), self.initial)]);
        for (step, tok) in x.tokens().iter().enumerate() {
            let Some(sym) = self.alphabet.index_of(tok) else {
                return Ok(false);
            };
            let mut next: HashSet<(Config, usize)> = HashSet::new();
            for (config, state) in &frontier {
                let readout = self.memory.readout(config);
                let ops: Vec<&UpdateOp> = self
                    .upsilon
                    .iter()
                    .filter(|(s, r, q, _)| *s == sym && *q == *state && *r == readout)
                    .map(|(_, _, _, op)| op)
                    .collect();
                let targets: Vec<usize> = self
                    .delta
                    .iter()
                    .filter(|(s, r, q, _)| *s == sym && *q == *state && *r == readout)
                    .map(|(_, _, _, to)| *to)
                    .collect();
                for op in &ops {
                    let Some(nc) = self.memory.apply(op, config) else {
                        continue;
                    };
                    for &to in &targets {
                        next.insert((nc.clone(), to));
                    }
                }
            }
            if next.len() > frontier_cap {
                return Err(Error::FrontierCapExceeded {
                    step,
                    size: next.len(),
                    cap: frontier_cap,
                });
            }
            frontier = next;
            if frontier.is_empty() {
                return Ok(false);
            }
        }
        Ok(frontier
            .iter()
            .any(|(c, q)| self.accept.contains(&(self.memory.readout(c), *q))))
    }
}

// ---------------------------------------------------------------------------
// Builtin machines
// ---------------------------------------------------------------------------

fn total_entries(
    alphabet: &Alphabet,
    memory: &Memory,
    rules: &[(usize, usize, UpdateOp, usize)],
) -> (
    Vec<(usize, Readout, usize, UpdateOp)>,
    Vec<(usize, Readout, usize, usize)>,
) {
    // Expands "any readout" rules (sym, state, op, target) over the full
    // finite readout range.
    let range = memory.readout_range();
    let mut upsilon = Vec::new();
    let mut delta = Vec::new();
    for (sym, state, op, target) in rules {
        for r in &range {
            upsilon.push((*sym, r.clone(), *state, op.clone()));
            delta.push((*sym, r.clone(), *state, *target));
        }
    }
    let _ = alphabet;
    (upsilon, delta)
}

/// aⁿbⁿ with one counter: +1 per `a`, −1 per `b`, finite state forbidding
/// `a` after `b`; accept on a zero counter.
pub fn builtin_anbn_counter() -> DAutomaton {
    let alphabet = Alphabet::from_texts(["a", "b"]).unwrap();
    let memory = Memory::counter(1).unwrap();
    let inc = UpdateOp::Counter(vec![CounterOp::Inc]);
    let dec = UpdateOp::Counter(vec![CounterOp::Dec]);
    let rules = [
        (0, 0, inc.clone(), 0), // a in A
        (1, 0, dec.clone(), 1), // b in A
        (1, 1, dec, 1),         // b in B
    ];
    let (upsilon, delta) = total_entries(&alphabet, &memory, &rules);
    let zero = Readout::Counter(vec![false]);
    DAutomaton::new(
        alphabet,
        vec!["A".into(), "B".into()],
        0,
        memory,
        upsilon,
        delta,
        vec![(zero.clone(), 0), (zero, 1)],
    )
    .unwrap()
}

/// aⁿbⁿ with a stack: push a marker per `a`, pop per `b`; accept on an
/// empty stack.
pub fn builtin_anbn_stack() -> DAutomaton {
    let alphabet = Alphabet::from_texts(["a", "b"]).unwrap();
    let gamma = Alphabet::from_texts(["a"]).unwrap();
    let marker = gamma.symbol(0).clone();
    let memory = Memory::stack(gamma, 1).unwrap();
    let push = UpdateOp::Stack(StackOp::Push(marker.clone()));
    let pop = UpdateOp::Stack(StackOp::Pop);
    let top_a = Readout::Stack(vec![marker]);
    let mut upsilon = Vec::new();
    let mut delta = Vec::new();
    for r in memory.readout_range() {
        upsilon.push((0, r.clone(), 0, push.clone()));
        delta.push((0, r, 0, 0)); // a in A
    }
    // b only when a marker is on top.
    upsilon.push((1, top_a.clone(), 0, pop.clone()));
    delta.push((1, top_a.clone(), 0, 1));
    upsilon.push((1, top_a.clone(), 1, pop));
    delta.push((1, top_a, 1, 1));
    let empty = Readout::Stack(vec![]);
    DAutomaton::new(
        alphabet,
        vec!["A".into(), "B".into()],
        0,
        memory,
        upsilon,
        delta,
        vec![(empty.clone(), 0), (empty, 1)],
    )
    .unwrap()
}

/// The alphabet of the k-Dyck language: plain brackets for k = 1, indexed
/// brackets `(i`, `)i` otherwise.
pub fn dyck_alphabet(k: usize) -> Alphabet {
    assert!(k >= 1, "dyck needs at least one bracket pair");
    if k == 1 {
        Alphabet::from_texts(["(", ")"]).unwrap()
    } else {
        let mut texts = Vec::with_capacity(2 * k);
        for i in 1..=k {
            texts.push(format!("({i}"));
            texts.push(format!("){i}"));
        }
        Alphabet::from_texts(texts).unwrap()
    }
}

/// The k-Dyck recognizer: push each open bracket, pop on the matching close;
/// accept on an empty stack. One control state.
pub fn builtin_dyck_stack(k: usize, window: usize) -> DAutomaton {
    let alphabet = dyck_alphabet(k);
    let gamma = Alphabet::new(
        (0..k)
            .map(|i| alphabet.symbol(2 * i).clone())
            .collect::<Vec<_>>(),
    )
    .unwrap();
    let memory = Memory::stack(gamma.clone(), window.max(1)).unwrap();
    let mut upsilon = Vec::new();
    let mut delta = Vec::new();
    for r in memory.readout_range() {
        let Readout::Stack(win) = &r else { unreachable!() };
        for i in 0..k {
            let open = 2 * i;
            let close = 2 * i + 1;
            upsilon.push((
                open,
                r.clone(),
                0,
                UpdateOp::Stack(StackOp::Push(alphabet.symbol(open).clone())),
            ));
            delta.push((open, r.clone(), 0, 0));
            if win.first() == Some(alphabet.symbol(open)) {
                upsilon.push((close, r.clone(), 0, UpdateOp::Stack(StackOp::Pop)));
                delta.push((close, r.clone(), 0, 0));
            }
        }
    }
    DAutomaton::new(
        alphabet,
        vec!["q".into()],
        0,
        memory,
        upsilon,
        delta,
        vec![(Readout::Stack(vec![]), 0)],
    )
    .unwrap()
}

/// aⁿbⁿcⁿ with two counters: the first counts up on `a` and down on `b`,
/// the second up on `b` and down on `c`; accept when both are zero.
pub fn builtin_anbncn_counter() -> DAutomaton {
    let alphabet = Alphabet::from_texts(["a", "b", "c"]).unwrap();
    let memory = Memory::counter(2).unwrap();
    let op = |a: CounterOp, b: CounterOp| UpdateOp::Counter(vec![a, b]);
    use CounterOp::{Dec, Hold, Inc};
    let rules = [
        (0, 0, op(Inc, Hold), 0), // a in A
        (1, 0, op(Dec, Inc), 1),  // b in A
        (1, 1, op(Dec, Inc), 1),  // b in B
        (2, 1, op(Hold, Dec), 2), // c in B
        (2, 2, op(Hold, Dec), 2), // c in C
    ];
    let (upsilon, delta) = total_entries(&alphabet, &memory, &rules);
    let zeros = Readout::Counter(vec![false, false]);
    DAutomaton::new(
        alphabet,
        vec!["A".into(), "B".into(), "C".into()],
        0,
        memory,
        upsilon,
        delta,
        vec![(zeros.clone(), 0), (zeros.clone(), 1), (zeros, 2)],
    )
    .unwrap()
}

// ---------------------------------------------------------------------------
// JSON exchange format
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct DAutomatonDoc {
    #[serde(rename = "type")]
    kind: String,
    memory: MemoryDoc,
    alphabet: Vec<String>,
    states: Vec<String>,
    initial: String,
    upsilon: Vec<UpsilonDoc>,
    delta: Vec<DeltaDoc>,
    accept: Vec<AcceptDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind")]
enum MemoryDoc {
    #[serde(rename = "stack")]
    Stack { gamma: Vec<String>, window: usize },
    #[serde(rename = "counter")]
    Counter { k: usize },
}

#[derive(Serialize, Deserialize)]
struct UpsilonDoc {
    on: String,
    read: String,
    state: String,
    op: String,
}

#[derive(Serialize, Deserialize)]
struct DeltaDoc {
    on: String,
    read: String,
    state: String,
    to: String,
}

#[derive(Serialize, Deserialize)]
struct AcceptDoc {
    read: String,
    state: String,
}

fn memory_to_doc(m: &Memory) -> MemoryDoc {
    match m {
        Memory::Stack { gamma, window } => MemoryDoc::Stack {
            gamma: gamma.symbols().iter().map(|s| s.as_str().into()).collect(),
            window: *window,
        },
        Memory::Counter { counters } => MemoryDoc::Counter { k: *counters },
    }
}

fn memory_from_doc(doc: &MemoryDoc) -> Result<Memory> {
    match doc {
        MemoryDoc::Stack { gamma, window } => Memory::stack(Alphabet::from_texts(gamma)?, *window),
        MemoryDoc::Counter { k } => Memory::counter(*k),
    }
}

/// Serializes either machine kind; relations simply repeat keys.
pub fn dautomaton_to_json(m: &NondetDAutomaton) -> String {
    let name = |q: usize| m.state_names[q].clone();
    let sym = |s: usize| m.alphabet.symbol(s).as_str().to_owned();
    let mut upsilon = m.upsilon.clone();
    upsilon.sort();
    let mut delta = m.delta.clone();
    delta.sort();
    let doc = DAutomatonDoc {
        kind: "dautomaton".into(),
        memory: memory_to_doc(&m.memory),
        alphabet: m
            .alphabet
            .symbols()
            .iter()
            .map(|s| s.as_str().into())
            .collect(),
        states: m.state_names.clone(),
        initial: name(m.initial),
        upsilon: upsilon
            .into_iter()
            .map(|(s, r, q, op)| UpsilonDoc {
                on: sym(s),
                read: r.render(),
                state: name(q),
                op: op.render(),
            })
            .collect(),
        delta: delta
            .into_iter()
            .map(|(s, r, q, to)| DeltaDoc {
                on: sym(s),
                read: r.render(),
                state: name(q),
                to: name(to),
            })
            .collect(),
        accept: m
            .accept
            .iter()
            .map(|(r, q)| AcceptDoc {
                read: r.render(),
                state: name(*q),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("dautomaton serialization is infallible")
}

pub fn dautomaton_from_json(text: &str) -> Result<NondetDAutomaton> {
    let doc: DAutomatonDoc =
        serde_json::from_str(text).map_err(|e| Error::format("dautomaton JSON", e.to_string()))?;
    if doc.kind != "dautomaton" {
        return Err(Error::format(
            "dautomaton JSON",
            format!("unknown type {:?}", doc.kind),
        ));
    }
    let memory = memory_from_doc(&doc.memory)?;
    let alphabet = Alphabet::from_texts(&doc.alphabet)?;
    let state_id = |name: &str| -> Result<usize> {
        doc.states
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| Error::format("dautomaton JSON", format!("unknown state {name:?}")))
    };
    let symbol_id = |name: &str| -> Result<usize> {
        doc.alphabet
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| Error::format("dautomaton JSON", format!("unknown symbol {name:?}")))
    };
    let mut upsilon = Vec::with_capacity(doc.upsilon.len());
    for e in &doc.upsilon {
        upsilon.push((
            symbol_id(&e.on)?,
            memory.parse_readout(&e.read)?,
            state_id(&e.state)?,
            memory.parse_op(&e.op)?,
        ));
    }
    let mut delta = Vec::with_capacity(doc.delta.len());
    for e in &doc.delta {
        delta.push((
            symbol_id(&e.on)?,
            memory.parse_readout(&e.read)?,
            state_id(&e.state)?,
            state_id(&e.to)?,
        ));
    }
    let mut accept = Vec::with_capacity(doc.accept.len());
    for e in &doc.accept {
        accept.push((memory.parse_readout(&e.read)?, state_id(&e.state)?));
    }
    let initial = state_id(&doc.initial)?;
    NondetDAutomaton::new(alphabet, doc.states, initial, memory, upsilon, delta, accept)
}
