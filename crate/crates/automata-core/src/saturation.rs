//! Saturated recurrent cells and attention: the limit of a network as its
//! weights are scaled to infinity.
//!
//! In that limit every squashing unit becomes a step function of the sign of
//! its preactivation: logistic units collapse to {0,1}, tanh units to
//! {−1,1}, and a preactivation of exactly zero has no defined limit
//! ([`Error::UndefinedLimit`]). LSTM gates therefore become bits, the
//! candidate becomes a sign, and the cell state evolves by exact integer
//! arithmetic c′ = f⊙c + i⊙g. The discrete hidden output is taken as
//! o⊙sign(c); note the unsaturated network's hidden output approaches
//! o⊙tanh(c) instead, which is why [`numeric_saturation_check`] compares
//! gate, candidate, and cell-state coordinates (the hidden output is a
//! function of those). The builtin cells keep hidden feedback out of the
//! gates, so the two readings drive identical trajectories.
//!
//! Weight matrices and biases are the parameters that scale with ρ; input
//! embeddings are treated as the input encoding and stay fixed, keeping
//! every preactivation homogeneous of degree one in ρ.
//!
//! [`space_complexity_probe`] measures the information capacity of any
//! discrete stepper by running it over every string of a given length and
//! counting distinct final states; with the `parallel` feature the string
//! range is partitioned across workers and the distinct-state sets merged.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::hash::Hash;
use std::str::FromStr;

use num::{BigInt, BigRational, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::alphabet::{Alphabet, Str, Symbol};
use crate::budget;
use crate::dfa::Dfa;
use crate::{Error, Result};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

// ---------------------------------------------------------------------------
// Cell specifications
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Activation {
    Sigmoid,
    Tanh,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CellKind {
    SimpleRnn,
    Lstm,
}

type Mat = Vec<Vec<BigRational>>;

/// A recurrent cell with exact rational parameters and per-symbol input
/// embeddings.
///
/// Weight names: simple RNNs use `w_hh` (d×d), `w_xh` (d×e), `b_h` (1×d)
/// and per-unit `activations`; LSTMs use `w_h{i,f,o,g}`, `w_x{i,f,o,g}`,
/// `b_{i,f,o,g}`. Both kinds accept an optional discrete initial state
/// `h0` (1×d), and LSTMs an optional integer `c0` (1×d).
#[derive(Clone, Debug)]
pub struct CellSpec {
    kind: CellKind,
    alphabet: Alphabet,
    hidden: usize,
    embed: usize,
    embeddings: Vec<Vec<BigRational>>,
    weights: BTreeMap<String, Mat>,
    activations: Vec<Activation>,
    h0: Vec<i8>,
    c0: Vec<BigInt>,
}

impl CellSpec {
    pub fn new(
        kind: CellKind,
        alphabet: Alphabet,
        hidden: usize,
        embed: usize,
        embeddings: Vec<Vec<BigRational>>,
        weights: BTreeMap<String, Mat>,
        activations: Vec<Activation>,
    ) -> Result<Self> {
        if embeddings.len() != alphabet.len() {
            return Err(Error::invalid("cell", "one embedding per symbol required"));
        }
        for v in &embeddings {
            if v.len() != embed {
                return Err(Error::DimensionMismatch {
                    expected: embed,
                    found: v.len(),
                });
            }
        }
        let expect_mat = |name: &str, rows: usize, cols: usize| -> Result<()> {
            let m = weights
                .get(name)
                .ok_or_else(|| Error::invalid("cell", format!("missing weight {name:?}")))?;
            if m.len() != rows || m.iter().any(|r| r.len() != cols) {
                return Err(Error::invalid(
                    "cell",
                    format!("weight {name:?} must be {rows}×{cols}"),
                ));
            }
            Ok(())
        };
        match kind {
            CellKind::SimpleRnn => {
                expect_mat("w_hh", hidden, hidden)?;
                expect_mat("w_xh", hidden, embed)?;
                expect_mat("b_h", 1, hidden)?;
                if activations.len() != hidden {
                    return Err(Error::invalid("cell", "one activation marker per unit"));
                }
            }
            CellKind::Lstm => {
                for gate in ["i", "f", "o", "g"] {
                    expect_mat(&format!("w_h{gate}"), hidden, hidden)?;
                    expect_mat(&format!("w_x{gate}"), hidden, embed)?;
                    expect_mat(&format!("b_{gate}"), 1, hidden)?;
                }
            }
        }
        let h0 = match weights.get("h0") {
            None => vec![0; hidden],
            Some(m) => {
                expect_mat("h0", 1, hidden)?;
                m[0].iter()
                    .map(|x| {
                        x.to_integer()
                            .to_i8()
                            .filter(|v| (-1..=1).contains(v) && x.is_integer())
                            .ok_or_else(|| {
                                Error::invalid("cell", "h0 coordinates must be -1, 0, or 1")
                            })
                    })
                    .collect::<Result<Vec<i8>>>()?
            }
        };
        let c0 = match weights.get("c0") {
            None => vec![BigInt::zero(); hidden],
            Some(m) => {
                expect_mat("c0", 1, hidden)?;
                m[0].iter()
                    .map(|x| {
                        if x.is_integer() {
                            Ok(x.to_integer())
                        } else {
                            Err(Error::invalid("cell", "c0 coordinates must be integers"))
                        }
                    })
                    .collect::<Result<Vec<BigInt>>>()?
            }
        };
        Ok(CellSpec {
            kind,
            alphabet,
            hidden,
            embed,
            embeddings,
            weights,
            activations,
            h0,
            c0,
        })
    }

    pub fn kind(&self) -> CellKind {
        self.kind
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn hidden(&self) -> usize {
        self.hidden
    }

    /// The discrete state before any input.
    pub fn initial_state(&self) -> SaturatedState {
        match self.kind {
            CellKind::SimpleRnn => SaturatedState::Rnn {
                units: self.h0.clone(),
            },
            CellKind::Lstm => SaturatedState::Lstm {
                hidden: self.h0.clone(),
                cell: self.c0.clone(),
            },
        }
    }

    fn weight(&self, name: &str) -> &Mat {
        &self.weights[name]
    }

    fn embedding(&self, symbol: &Symbol) -> Result<&Vec<BigRational>> {
        let idx = self.alphabet.index_of(symbol).ok_or_else(|| {
            Error::invalid("cell input", format!("symbol {symbol:?} has no embedding"))
        })?;
        Ok(&self.embeddings[idx])
    }
}

/// A discrete network state in the saturated limit.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum SaturatedState {
    /// One value per unit: {0,1} for logistic units, {−1,0,1} for tanh.
    Rnn { units: Vec<i8> },
    /// Hidden output o⊙sign(c) and the exact integer cell state.
    Lstm { hidden: Vec<i8>, cell: Vec<BigInt> },
}

impl fmt::Display for SaturatedState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SaturatedState::Rnn { units } => {
                let parts: Vec<String> = units.iter().map(i8::to_string).collect();
                write!(f, "[{}]", parts.join(" "))
            }
            SaturatedState::Lstm { hidden, cell } => {
                let h: Vec<String> = hidden.iter().map(i8::to_string).collect();
                let c: Vec<String> = cell.iter().map(BigInt::to_string).collect();
                write!(f, "h=[{}] c=[{}]", h.join(" "), c.join(" "))
            }
        }
    }
}

// ---------------------------------------------------------------------------
// The saturated step
// ---------------------------------------------------------------------------

fn affine(
    w_h: &Mat,
    h: &[BigRational],
    w_x: &Mat,
    x: &[BigRational],
    b: &Mat,
) -> Vec<BigRational> {
    let d = w_h.len();
    (0..d)
        .map(|j| {
            let mut acc = b[0][j].clone();
            for (k, hk) in h.iter().enumerate() {
                acc += &w_h[j][k] * hk;
            }
            for (k, xk) in x.iter().enumerate() {
                acc += &w_x[j][k] * xk;
            }
            acc
        })
        .collect()
}

fn rationals_of(discrete: &[i8]) -> Vec<BigRational> {
    discrete
        .iter()
        .map(|&v| BigRational::from_integer(BigInt::from(v)))
        .collect()
}

fn sign_limit(pre: &BigRational, activation: Activation, unit: String) -> Result<i8> {
    if pre.is_zero() {
        return Err(Error::UndefinedLimit {
            step: 0,
            coordinate: unit,
        });
    }
    Ok(match (activation, pre.is_positive()) {
        (Activation::Sigmoid, true) => 1,
        (Activation::Sigmoid, false) => 0,
        (Activation::Tanh, true) => 1,
        (Activation::Tanh, false) => -1,
    })
}

/// Gate-level view of one saturated LSTM step.
struct LstmStep {
    input_gate: Vec<i8>,
    forget_gate: Vec<i8>,
    output_gate: Vec<i8>,
    candidate: Vec<i8>,
    cell: Vec<BigInt>,
    hidden: Vec<i8>,
}

fn lstm_step(cell: &CellSpec, hidden: &[i8], c: &[BigInt], input: &Symbol) -> Result<LstmStep> {
    let x = cell.embedding(input)?.clone();
    let h = rationals_of(hidden);
    let gate = |name: &str, act: Activation| -> Result<Vec<i8>> {
        let pre = affine(
            cell.weight(&format!("w_h{name}")),
            &h,
            cell.weight(&format!("w_x{name}")),
            &x,
            cell.weight(&format!("b_{name}")),
        );
        pre.iter()
            .enumerate()
            .map(|(j, p)| sign_limit(p, act, format!("{name}[{j}]")))
            .collect()
    };
    let input_gate = gate("i", Activation::Sigmoid)?;
    let forget_gate = gate("f", Activation::Sigmoid)?;
    let output_gate = gate("o", Activation::Sigmoid)?;
    let candidate = gate("g", Activation::Tanh)?;
    let cell_state: Vec<BigInt> = (0..cell.hidden)
        .map(|j| {
            let kept = if forget_gate[j] == 1 {
                c[j].clone()
            } else {
                BigInt::zero()
            };
            let added = BigInt::from(input_gate[j] as i64 * candidate[j] as i64);
            kept + added
        })
        .collect();
    let hidden_out: Vec<i8> = (0..cell.hidden)
        .map(|j| {
            if output_gate[j] == 0 {
                0
            } else if cell_state[j].is_zero() {
                0
            } else if cell_state[j].is_positive() {
                1
            } else {
                -1
            }
        })
        .collect();
    Ok(LstmStep {
        input_gate,
        forget_gate,
        output_gate,
        candidate,
        cell: cell_state,
        hidden: hidden_out,
    })
}

/// One saturated transition. Errors when any preactivation is exactly zero.
pub fn saturate_step(
    cell: &CellSpec,
    state: &SaturatedState,
    input: &Symbol,
) -> Result<SaturatedState> {
    match (cell.kind, state) {
        (CellKind::SimpleRnn, SaturatedState::Rnn { units }) => {
            let x = cell.embedding(input)?.clone();
            let h = rationals_of(units);
            let pre = affine(
                cell.weight("w_hh"),
                &h,
                cell.weight("w_xh"),
                &x,
                cell.weight("b_h"),
            );
            let next = pre
                .iter()
                .enumerate()
                .map(|(j, p)| sign_limit(p, cell.activations[j], format!("unit[{j}]")))
                .collect::<Result<Vec<i8>>>()?;
            Ok(SaturatedState::Rnn { units: next })
        }
        (CellKind::Lstm, SaturatedState::Lstm { hidden, cell: c }) => {
            let step = lstm_step(cell, hidden, c, input)?;
            Ok(SaturatedState::Lstm {
                hidden: step.hidden,
                cell: step.cell,
            })
        }
        _ => Err(Error::invalid("cell", "state does not match cell kind")),
    }
}

/// Full saturated trajectory over `x`, initial state included.
pub fn run_saturated(cell: &CellSpec, x: &Str) -> Result<Vec<SaturatedState>> {
    let mut states = vec![cell.initial_state()];
    for (i, tok) in x.tokens().iter().enumerate() {
        let next = saturate_step(cell, states.last().unwrap(), tok).map_err(|e| match e {
            Error::UndefinedLimit { coordinate, .. } => Error::UndefinedLimit {
                step: i,
                coordinate,
            },
            other => other,
        })?;
        states.push(next);
    }
    Ok(states)
}

// ---------------------------------------------------------------------------
// Numeric check of the limit
// ---------------------------------------------------------------------------

/// Verdict of [`numeric_saturation_check`].
#[derive(Clone, Debug)]
pub struct NumericCheck {
    pub converged: bool,
    /// The saturate-step trajectory the float runs were compared against
    /// (truncated if a preactivation was exactly zero).
    pub discrete: Vec<SaturatedState>,
    /// Flagged ⟨step, coordinate⟩ when the discrete limit was undefined.
    pub undefined: Option<(usize, String)>,
    /// Largest deviation at the final scale.
    pub max_error: f64,
}

fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Evaluates the unsaturated cell at each scale ρ·θ (weights and biases
/// scaled, embeddings fixed) and compares against the saturate-step
/// trajectory: every hidden unit for simple RNNs; gate, candidate, and
/// cell-state coordinates for LSTMs. Converged means the final two scales
/// both stay within `tol`.
pub fn numeric_saturation_check(
    cell: &CellSpec,
    x: &Str,
    rho_schedule: &[f64],
    tol: f64,
) -> Result<NumericCheck> {
    if rho_schedule.is_empty() {
        return Err(Error::invalid("saturation check", "empty ρ schedule"));
    }
    let discrete = match run_saturated(cell, x) {
        Ok(states) => states,
        Err(Error::UndefinedLimit { step, coordinate }) => {
            let partial = run_saturated(
                cell,
                &Str::new(x.tokens()[..step].to_vec()),
            )?;
            return Ok(NumericCheck {
                converged: false,
                discrete: partial,
                undefined: Some((step, coordinate)),
                max_error: f64::INFINITY,
            });
        }
        Err(other) => return Err(other),
    };
    let mut errors = Vec::with_capacity(rho_schedule.len());
    for &rho in rho_schedule {
        errors.push(max_deviation(cell, x, &discrete, rho)?);
    }
    let last_two_ok = errors
        .iter()
        .rev()
        .take(2)
        .all(|e| *e <= tol);
    Ok(NumericCheck {
        converged: last_two_ok,
        discrete,
        undefined: None,
        max_error: *errors.last().unwrap(),
    })
}

fn max_deviation(cell: &CellSpec, x: &Str, discrete: &[SaturatedState], rho: f64) -> Result<f64> {
    let mat = |name: &str| -> Vec<Vec<f64>> {
        cell.weight(name)
            .iter()
            .map(|row| row.iter().map(to_f64).collect())
            .collect()
    };
    let emb = |tok: &Symbol| -> Result<Vec<f64>> {
        Ok(cell.embedding(tok)?.iter().map(to_f64).collect())
    };
    let affine_f = |w_h: &[Vec<f64>], h: &[f64], w_x: &[Vec<f64>], xv: &[f64], b: &[Vec<f64>]| {
        (0..w_h.len())
            .map(|j| {
                let mut acc = b[0][j];
                for (k, hk) in h.iter().enumerate() {
                    acc += w_h[j][k] * hk;
                }
                for (k, xk) in xv.iter().enumerate() {
                    acc += w_x[j][k] * xk;
                }
                rho * acc
            })
            .collect::<Vec<f64>>()
    };
    let mut worst = 0.0f64;
    let mut track = |err: f64| {
        if err > worst {
            worst = err;
        }
    };
    match cell.kind {
        CellKind::SimpleRnn => {
            let (w_hh, w_xh, b_h) = (mat("w_hh"), mat("w_xh"), mat("b_h"));
            let mut h: Vec<f64> = cell.h0.iter().map(|&v| v as f64).collect();
            for (t, tok) in x.tokens().iter().enumerate() {
                let pre = affine_f(&w_hh, &h, &w_xh, &emb(tok)?, &b_h);
                h = pre
                    .iter()
                    .enumerate()
                    .map(|(j, z)| match cell.activations[j] {
                        Activation::Sigmoid => sigmoid(*z),
                        Activation::Tanh => z.tanh(),
                    })
                    .collect();
                let SaturatedState::Rnn { units } = &discrete[t + 1] else {
                    unreachable!()
                };
                for (j, &target) in units.iter().enumerate() {
                    track((h[j] - target as f64).abs());
                }
            }
        }
        CellKind::Lstm => {
            let gates = ["i", "f", "o", "g"];
            let w_h: Vec<_> = gates.iter().map(|g| mat(&format!("w_h{g}"))).collect();
            let w_x: Vec<_> = gates.iter().map(|g| mat(&format!("w_x{g}"))).collect();
            let b: Vec<_> = gates.iter().map(|g| mat(&format!("b_{g}"))).collect();
            let mut h: Vec<f64> = cell.h0.iter().map(|&v| v as f64).collect();
            let mut c: Vec<f64> = cell.c0.iter().map(|v| v.to_f64().unwrap()).collect();
            // Discrete gate targets are recomputed along the discrete
            // trajectory.
            let mut disc_h = cell.h0.clone();
            let mut disc_c = cell.c0.clone();
            for tok in x.tokens() {
                let target = lstm_step(cell, &disc_h, &disc_c, tok)?;
                let xv = emb(tok)?;
                let pre: Vec<Vec<f64>> = (0..4)
                    .map(|g| affine_f(&w_h[g], &h, &w_x[g], &xv, &b[g]))
                    .collect();
                let i_gate: Vec<f64> = pre[0].iter().map(|z| sigmoid(*z)).collect();
                let f_gate: Vec<f64> = pre[1].iter().map(|z| sigmoid(*z)).collect();
                let o_gate: Vec<f64> = pre[2].iter().map(|z| sigmoid(*z)).collect();
                let g_cand: Vec<f64> = pre[3].iter().map(|z| z.tanh()).collect();
                for j in 0..cell.hidden {
                    c[j] = f_gate[j] * c[j] + i_gate[j] * g_cand[j];
                }
                h = (0..cell.hidden).map(|j| o_gate[j] * c[j].tanh()).collect();
                for j in 0..cell.hidden {
                    track((i_gate[j] - target.input_gate[j] as f64).abs());
                    track((f_gate[j] - target.forget_gate[j] as f64).abs());
                    track((o_gate[j] - target.output_gate[j] as f64).abs());
                    track((g_cand[j] - target.candidate[j] as f64).abs());
                    track((c[j] - target.cell[j].to_f64().unwrap()).abs());
                }
                disc_h = target.hidden;
                disc_c = target.cell;
            }
        }
    }
    Ok(worst)
}

// ---------------------------------------------------------------------------
// DFA extraction
// ---------------------------------------------------------------------------

/// BFS over the reachable saturated state space of a simple RNN cell; each
/// distinct state becomes a DFA state, acceptance decided by the predicate.
pub fn extract_dfa_from_srnn(
    cell: &CellSpec,
    max_states: usize,
    accept: impl Fn(&SaturatedState) -> bool,
) -> Result<Dfa> {
    if cell.kind != CellKind::SimpleRnn {
        return Err(Error::invalid("extraction", "expected a simple RNN cell"));
    }
    let mut states = vec![cell.initial_state()];
    let mut index: HashMap<SaturatedState, usize> =
        HashMap::from([(cell.initial_state(), 0)]);
    let mut triples = Vec::new();
    let mut i = 0;
    while i < states.len() {
        for (sym_idx, sym) in cell.alphabet.symbols().to_vec().into_iter().enumerate() {
            let next = saturate_step(cell, &states[i], &sym)?;
            let id = match index.get(&next) {
                Some(&id) => id,
                None => {
                    if states.len() >= max_states {
                        return Err(Error::StateBudgetExceeded {
                            reachable: states.len() + 1,
                            cap: max_states,
                        });
                    }
                    let id = states.len();
                    index.insert(next.clone(), id);
                    states.push(next);
                    id
                }
            };
            triples.push((i, sym_idx, id));
        }
        i += 1;
    }
    let accepting = states
        .iter()
        .enumerate()
        .filter(|(_, s)| accept(s))
        .map(|(i, _)| i)
        .collect();
    Dfa::new(
        cell.alphabet.clone(),
        (0..states.len()).map(|i| format!("s{i}")).collect(),
        0,
        accepting,
        triples,
    )
}

// ---------------------------------------------------------------------------
// Saturated attention
// ---------------------------------------------------------------------------

/// One attention evaluation: a query against equal-length key and value
/// sequences, all exact rationals.
#[derive(Clone, Debug, PartialEq)]
pub struct AttentionInstance {
    pub query: Vec<BigRational>,
    pub keys: Vec<Vec<BigRational>>,
    pub values: Vec<Vec<BigRational>>,
}

impl AttentionInstance {
    pub fn new(
        query: Vec<BigRational>,
        keys: Vec<Vec<BigRational>>,
        values: Vec<Vec<BigRational>>,
    ) -> Result<Self> {
        if keys.is_empty() {
            return Err(Error::invalid("attention", "needs at least one key"));
        }
        if keys.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: keys.len(),
                found: values.len(),
            });
        }
        for k in &keys {
            if k.len() != query.len() {
                return Err(Error::DimensionMismatch {
                    expected: query.len(),
                    found: k.len(),
                });
            }
        }
        let value_dim = values[0].len();
        for v in &values {
            if v.len() != value_dim {
                return Err(Error::DimensionMismatch {
                    expected: value_dim,
                    found: v.len(),
                });
            }
        }
        Ok(AttentionInstance {
            query,
            keys,
            values,
        })
    }
}

/// Saturated attention: uniform average of the values whose keys maximize
/// the dot-product similarity with the query. A unique maximum is hard
/// attention; ties average exactly.
pub fn saturated_attention(inst: &AttentionInstance) -> Vec<BigRational> {
    let dot = |k: &Vec<BigRational>| -> BigRational {
        inst.query
            .iter()
            .zip(k)
            .map(|(a, b)| a * b)
            .fold(BigRational::zero(), |acc, x| acc + x)
    };
    let sims: Vec<BigRational> = inst.keys.iter().map(dot).collect();
    let best = sims.iter().max().expect("nonempty keys").clone();
    let argmax: Vec<usize> = sims
        .iter()
        .enumerate()
        .filter(|(_, s)| **s == best)
        .map(|(i, _)| i)
        .collect();
    let dim = inst.values[0].len();
    let count = BigRational::from_integer(BigInt::from(argmax.len() as i64));
    (0..dim)
        .map(|j| {
            let mut acc = BigRational::zero();
            for &i in &argmax {
                acc += &inst.values[i][j];
            }
            acc / &count
        })
        .collect()
}

/// The two-head counting recognizer for aⁿbⁿ: constant keys spread
/// attention uniformly, indicator values make each head output the fraction
/// of `a`s (resp. `b`s), and the final check verifies the two fractions
/// agree and the string lies in a*b*.
pub fn count_anbn_with_attention(x: &Str) -> bool {
    let a = Symbol::new("a").unwrap();
    let b = Symbol::new("b").unwrap();
    if !x.tokens().iter().all(|t| *t == a || *t == b) {
        return false;
    }
    // Finite-state part: the prefix shape a*b*.
    let mut seen_b = false;
    for tok in x.tokens() {
        if *tok == b {
            seen_b = true;
        } else if seen_b {
            return false;
        }
    }
    if x.is_empty() {
        return true;
    }
    let one = BigRational::from_integer(BigInt::from(1));
    let zero = BigRational::zero();
    let head = |target: &Symbol| -> BigRational {
        let inst = AttentionInstance::new(
            vec![one.clone()],
            vec![vec![one.clone()]; x.len()],
            x.tokens()
                .iter()
                .map(|t| vec![if t == target { one.clone() } else { zero.clone() }])
                .collect(),
        )
        .expect("well-formed head");
        saturated_attention(&inst).remove(0)
    };
    head(&a) == head(&b)
}

// ---------------------------------------------------------------------------
// Space-complexity probes
// ---------------------------------------------------------------------------

/// One row of a probe report.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeRow {
    pub n: usize,
    pub distinct_states: usize,
    /// log₂ of the distinct-state count.
    pub bits: f64,
}

fn nth_string(alphabet: &Alphabet, n: usize, mut index: usize) -> Str {
    let k = alphabet.len();
    let mut tokens = Vec::with_capacity(n);
    for _ in 0..n {
        tokens.push(alphabet.symbol(index % k).clone());
        index /= k;
    }
    Str::new(tokens)
}

fn final_state<S, F>(step: &F, initial: &S, x: &Str) -> Result<S>
where
    S: Clone,
    F: Fn(&S, &Symbol) -> Result<S>,
{
    let mut state = initial.clone();
    for tok in x.tokens() {
        state = step(&state, tok)?;
    }
    Ok(state)
}

fn probe_counts<S, F>(
    step: &F,
    initial: &S,
    alphabet: &Alphabet,
    n: usize,
) -> Result<HashSet<S>>
where
    S: Clone + Eq + Hash + Send + Sync,
    F: Fn(&S, &Symbol) -> Result<S> + Sync,
{
    let total = alphabet
        .len()
        .checked_pow(n as u32)
        .ok_or(Error::BudgetExceeded {
            needed: u128::MAX,
            budget: budget::enumeration_budget(),
        })?;
    #[cfg(feature = "parallel")]
    {
        let _ = &total;
        (0..total)
            .into_par_iter()
            .try_fold(HashSet::new, |mut set: HashSet<S>, i| {
                set.insert(final_state(step, initial, &nth_string(alphabet, n, i))?);
                Ok(set)
            })
            .try_reduce(HashSet::new, |mut a, b| {
                a.extend(b);
                Ok(a)
            })
    }
    #[cfg(not(feature = "parallel"))]
    {
        let mut set = HashSet::new();
        for i in 0..total {
            set.insert(final_state(step, initial, &nth_string(alphabet, n, i))?);
        }
        Ok(set)
    }
}

/// Runs the step function over every string of length exactly n, for each
/// requested n, and counts distinct final states. The enumeration budget
/// covers |Σ|^max(n).
pub fn space_complexity_probe<S, F>(
    step: F,
    initial: S,
    alphabet: &Alphabet,
    n_values: &[usize],
) -> Result<Vec<ProbeRow>>
where
    S: Clone + Eq + Hash + Send + Sync,
    F: Fn(&S, &Symbol) -> Result<S> + Sync,
{
    if let Some(&max_n) = n_values.iter().max() {
        budget::check((alphabet.len() as u128).pow(max_n as u32))?;
    }
    n_values
        .iter()
        .map(|&n| {
            let set = probe_counts(&step, &initial, alphabet, n)?;
            Ok(ProbeRow {
                n,
                distinct_states: set.len(),
                bits: (set.len() as f64).log2(),
            })
        })
        .collect()
}

/// [`space_complexity_probe`] specialised to a saturated cell.
pub fn probe_cell(cell: &CellSpec, n_values: &[usize]) -> Result<Vec<ProbeRow>> {
    space_complexity_probe(
        |state: &SaturatedState, sym: &Symbol| saturate_step(cell, state, sym),
        cell.initial_state(),
        &cell.alphabet().clone(),
        n_values,
    )
}

// ---------------------------------------------------------------------------
// Builtin cells
// ---------------------------------------------------------------------------

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn rat_frac(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn zeros(rows: usize, cols: usize) -> Mat {
    vec![vec![BigRational::zero(); cols]; rows]
}

/// One-unit LSTM over {a,b} counting #a − #b in the cell state: all gates
/// are held open by their biases, the candidate is +1 on `a` and −1 on `b`,
/// and no gate reads the hidden state.
pub fn counting_lstm_cell() -> CellSpec {
    let alphabet = Alphabet::from_texts(["a", "b"]).unwrap();
    let embeddings = vec![vec![rat(1), rat(0)], vec![rat(0), rat(1)]];
    let mut weights = BTreeMap::new();
    for gate in ["i", "f", "o"] {
        weights.insert(format!("w_h{gate}"), zeros(1, 1));
        weights.insert(format!("w_x{gate}"), zeros(1, 2));
        weights.insert(format!("b_{gate}"), vec![vec![rat(1)]]);
    }
    weights.insert("w_hg".into(), zeros(1, 1));
    weights.insert("w_xg".into(), vec![vec![rat(1), rat(-1)]]);
    weights.insert("b_g".into(), vec![vec![rat(0)]]);
    CellSpec::new(
        CellKind::Lstm,
        alphabet,
        1,
        2,
        embeddings,
        weights,
        vec![],
    )
    .expect("builtin cell is well-formed")
}

/// Four-unit threshold RNN tracking the parity of `a`s, one unit per
/// ⟨state, last-symbol⟩ pair; the even units fire iff the parity is even.
///
/// A two-unit single-layer version cannot exist: one coordinate would have
/// to both flip under `a` and hold under `b`, forcing its recurrent weight
/// row to order the two states in opposite directions at once.
pub fn parity_srnn_cell() -> CellSpec {
    let alphabet = Alphabet::from_texts(["a", "b"]).unwrap();
    let embeddings = vec![vec![rat(1), rat(0)], vec![rat(0), rat(1)]];
    // Units: 0 = (E,a), 1 = (E,b), 2 = (O,a), 3 = (O,b). A unit fires iff
    // its state is the δ-image of the current state under the current
    // symbol AND the input matches its symbol tag.
    let w_hh = vec![
        vec![rat(0), rat(0), rat(1), rat(1)], // δ(O,a) = E
        vec![rat(1), rat(1), rat(0), rat(0)], // δ(E,b) = E
        vec![rat(1), rat(1), rat(0), rat(0)], // δ(E,a) = O
        vec![rat(0), rat(0), rat(1), rat(1)], // δ(O,b) = O
    ];
    let w_xh = vec![
        vec![rat(1), rat(0)],
        vec![rat(0), rat(1)],
        vec![rat(1), rat(0)],
        vec![rat(0), rat(1)],
    ];
    let b_h = vec![vec![rat_frac(-3, 2); 4]];
    let mut weights = BTreeMap::new();
    weights.insert("w_hh".into(), w_hh);
    weights.insert("w_xh".into(), w_xh);
    weights.insert("b_h".into(), b_h);
    // Start in (E, b): even parity, dummy last symbol.
    weights.insert(
        "h0".into(),
        vec![vec![rat(0), rat(1), rat(0), rat(0)]],
    );
    CellSpec::new(
        CellKind::SimpleRnn,
        alphabet,
        4,
        2,
        embeddings,
        weights,
        vec![Activation::Sigmoid; 4],
    )
    .expect("builtin cell is well-formed")
}

/// Accepts states of [`parity_srnn_cell`] with even parity.
pub fn parity_accept(state: &SaturatedState) -> bool {
    match state {
        SaturatedState::Rnn { units } => units[0] == 1 || units[1] == 1,
        _ => false,
    }
}

/// Two-unit threshold RNN for a*b: unit 0 holds while reading `a`s from the
/// start, unit 1 fires on the first `b` after them, anything further kills
/// both.
pub fn astar_b_srnn_cell() -> CellSpec {
    let alphabet = Alphabet::from_texts(["a", "b"]).unwrap();
    let embeddings = vec![vec![rat(1), rat(0)], vec![rat(0), rat(1)]];
    let mut weights = BTreeMap::new();
    weights.insert(
        "w_hh".into(),
        vec![vec![rat(1), rat(0)], vec![rat(1), rat(0)]],
    );
    weights.insert(
        "w_xh".into(),
        vec![vec![rat(1), rat(0)], vec![rat(0), rat(1)]],
    );
    weights.insert("b_h".into(), vec![vec![rat_frac(-3, 2), rat_frac(-3, 2)]]);
    weights.insert("h0".into(), vec![vec![rat(1), rat(0)]]);
    CellSpec::new(
        CellKind::SimpleRnn,
        alphabet,
        2,
        2,
        embeddings,
        weights,
        vec![Activation::Sigmoid; 2],
    )
    .expect("builtin cell is well-formed")
}

/// Accepts states of [`astar_b_srnn_cell`] that just read the single `b`.
pub fn astar_b_accept(state: &SaturatedState) -> bool {
    match state {
        SaturatedState::Rnn { units } => units[1] == 1,
        _ => false,
    }
}

// ---------------------------------------------------------------------------
// JSON exchange formats
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct CellDoc {
    #[serde(rename = "type")]
    kind_tag: String,
    kind: String,
    alphabet: Vec<String>,
    dims: DimsDoc,
    weights: BTreeMap<String, Vec<Vec<String>>>,
    embedding: BTreeMap<String, Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    activations: Option<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct DimsDoc {
    hidden: usize,
    embedding: usize,
}

pub fn cell_to_json(cell: &CellSpec) -> String {
    let render_mat = |m: &Mat| -> Vec<Vec<String>> {
        m.iter()
            .map(|row| row.iter().map(BigRational::to_string).collect())
            .collect()
    };
    let doc = CellDoc {
        kind_tag: "cell".into(),
        kind: match cell.kind {
            CellKind::SimpleRnn => "simple_rnn".into(),
            CellKind::Lstm => "lstm".into(),
        },
        alphabet: cell
            .alphabet
            .symbols()
            .iter()
            .map(|s| s.as_str().into())
            .collect(),
        dims: DimsDoc {
            hidden: cell.hidden,
            embedding: cell.embed,
        },
        weights: cell
            .weights
            .iter()
            .map(|(name, m)| (name.clone(), render_mat(m)))
            .collect(),
        embedding: cell
            .alphabet
            .symbols()
            .iter()
            .zip(&cell.embeddings)
            .map(|(sym, v)| {
                (
                    sym.as_str().to_owned(),
                    v.iter().map(BigRational::to_string).collect(),
                )
            })
            .collect(),
        activations: match cell.kind {
            CellKind::SimpleRnn => Some(
                cell.activations
                    .iter()
                    .map(|a| {
                        match a {
                            Activation::Sigmoid => "sigmoid",
                            Activation::Tanh => "tanh",
                        }
                        .to_owned()
                    })
                    .collect(),
            ),
            CellKind::Lstm => None,
        },
    };
    serde_json::to_string_pretty(&doc).expect("cell serialization is infallible")
}

pub fn cell_from_json(text: &str) -> Result<CellSpec> {
    let doc: CellDoc =
        serde_json::from_str(text).map_err(|e| Error::format("cell JSON", e.to_string()))?;
    if doc.kind_tag != "cell" {
        return Err(Error::format(
            "cell JSON",
            format!("unknown type {:?}", doc.kind_tag),
        ));
    }
    let kind = match doc.kind.as_str() {
        "simple_rnn" => CellKind::SimpleRnn,
        "lstm" => CellKind::Lstm,
        other => {
            return Err(Error::format(
                "cell JSON",
                format!("unknown cell kind {other:?}"),
            ))
        }
    };
    let alphabet = Alphabet::from_texts(&doc.alphabet)?;
    let parse_rat = |s: &str| -> Result<BigRational> {
        BigRational::from_str(s).map_err(|e| Error::format("cell JSON", format!("{s:?}: {e}")))
    };
    let mut embeddings = Vec::with_capacity(alphabet.len());
    for sym in alphabet.symbols() {
        let v = doc.embedding.get(sym.as_str()).ok_or_else(|| {
            Error::format("cell JSON", format!("missing embedding for {sym}"))
        })?;
        embeddings.push(v.iter().map(|s| parse_rat(s)).collect::<Result<Vec<_>>>()?);
    }
    let mut weights = BTreeMap::new();
    for (name, m) in &doc.weights {
        let parsed: Mat = m
            .iter()
            .map(|row| row.iter().map(|s| parse_rat(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        weights.insert(name.clone(), parsed);
    }
    let activations = match (&doc.activations, kind) {
        (Some(list), CellKind::SimpleRnn) => list
            .iter()
            .map(|a| match a.as_str() {
                "sigmoid" => Ok(Activation::Sigmoid),
                "tanh" => Ok(Activation::Tanh),
                other => Err(Error::format(
                    "cell JSON",
                    format!("unknown activation {other:?}"),
                )),
            })
            .collect::<Result<Vec<_>>>()?,
        (None, CellKind::SimpleRnn) => {
            return Err(Error::format("cell JSON", "simple_rnn needs activations"))
        }
        _ => Vec::new(),
    };
    CellSpec::new(
        kind,
        alphabet,
        doc.dims.hidden,
        doc.dims.embedding,
        embeddings,
        weights,
        activations,
    )
}

#[derive(Serialize, Deserialize)]
struct AttentionDoc {
    query: Vec<String>,
    keys: Vec<Vec<String>>,
    values: Vec<Vec<String>>,
}

pub fn attention_to_json(inst: &AttentionInstance) -> String {
    let render = |v: &Vec<BigRational>| v.iter().map(BigRational::to_string).collect();
    let doc = AttentionDoc {
        query: render(&inst.query),
        keys: inst.keys.iter().map(render).collect(),
        values: inst.values.iter().map(render).collect(),
    };
    serde_json::to_string_pretty(&doc).expect("attention serialization is infallible")
}

pub fn attention_from_json(text: &str) -> Result<AttentionInstance> {
    let doc: AttentionDoc =
        serde_json::from_str(text).map_err(|e| Error::format("attention JSON", e.to_string()))?;
    let parse = |v: &Vec<String>| -> Result<Vec<BigRational>> {
        v.iter()
            .map(|s| {
                BigRational::from_str(s)
                    .map_err(|e| Error::format("attention JSON", format!("{s:?}: {e}")))
            })
            .collect()
    };
    AttentionInstance::new(
        parse(&doc.query)?,
        doc.keys.iter().map(parse).collect::<Result<_>>()?,
        doc.values.iter().map(parse).collect::<Result<_>>()?,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::{parse_tokens, shortlex_enumerate};

    fn ab() -> Alphabet {
        Alphabet::from_texts(["a", "b"]).unwrap()
    }

    fn s(text: &str) -> Str {
        parse_tokens(text, &ab()).unwrap()
    }

    /// Single logistic neuron with weight vector w, no recurrence.
    fn single_neuron(w: Vec<i64>) -> CellSpec {
        let alphabet = ab();
        let embeddings = vec![vec![rat(1), rat(0)], vec![rat(0), rat(1)]];
        let mut weights = BTreeMap::new();
        weights.insert("w_hh".into(), zeros(1, 1));
        weights.insert(
            "w_xh".into(),
            vec![w.into_iter().map(rat).collect::<Vec<_>>()],
        );
        weights.insert("b_h".into(), zeros(1, 1));
        CellSpec::new(
            CellKind::SimpleRnn,
            alphabet,
            1,
            2,
            embeddings,
            weights,
            vec![Activation::Sigmoid],
        )
        .unwrap()
    }

    #[test]
    fn single_neuron_sign_rule() {
        let positive = single_neuron(vec![3, 0]);
        let state = positive.initial_state();
        let sym = Symbol::new("a").unwrap();
        let SaturatedState::Rnn { units } =
            saturate_step(&positive, &state, &sym).unwrap()
        else {
            panic!()
        };
        assert_eq!(units, vec![1], "w·x > 0 limits to 1");

        let negative = single_neuron(vec![-3, 0]);
        let SaturatedState::Rnn { units } =
            saturate_step(&negative, &negative.initial_state(), &sym).unwrap()
        else {
            panic!()
        };
        assert_eq!(units, vec![0], "w·x < 0 limits to 0");

        let zero = single_neuron(vec![0, 5]);
        assert!(matches!(
            saturate_step(&zero, &zero.initial_state(), &sym),
            Err(Error::UndefinedLimit { .. })
        ));
    }

    #[test]
    fn counting_cell_increments_by_one() {
        let cell = counting_lstm_cell();
        let a = Symbol::new("a").unwrap();
        let next = saturate_step(&cell, &cell.initial_state(), &a).unwrap();
        let SaturatedState::Lstm { hidden, cell: c } = next else {
            panic!()
        };
        assert_eq!(c, vec![BigInt::from(1)]);
        assert_eq!(hidden, vec![1]);
    }

    #[test]
    fn counting_cell_trace_on_aabb() {
        let cell = counting_lstm_cell();
        let states = run_saturated(&cell, &s("aabb")).unwrap();
        let cells: Vec<i64> = states[1..]
            .iter()
            .map(|st| {
                let SaturatedState::Lstm { cell, .. } = st else { panic!() };
                cell[0].to_i64().unwrap()
            })
            .collect();
        assert_eq!(cells, vec![1, 2, 1, 0]);
    }

    #[test]
    fn numeric_check_converges_for_counting_cell() {
        let cell = counting_lstm_cell();
        let schedule: Vec<f64> = (0..=10).map(|i| (1u64 << i) as f64).collect();
        for text in ["aabb", "abab", "bbaa", "aaaa"] {
            let report = numeric_saturation_check(&cell, &s(text), &schedule, 1e-3).unwrap();
            assert!(report.converged, "{text}: max err {}", report.max_error);
        }
    }

    #[test]
    fn numeric_check_trivial_on_empty_string() {
        let cell = counting_lstm_cell();
        let report =
            numeric_saturation_check(&cell, &Str::empty(), &[1.0, 2.0], 1e-3).unwrap();
        assert!(report.converged);
        assert_eq!(report.discrete.len(), 1);
    }

    #[test]
    fn numeric_check_flags_zero_preactivation() {
        let zero = single_neuron(vec![0, 5]);
        let report =
            numeric_saturation_check(&zero, &s("a"), &[1.0, 1024.0], 1e-3).unwrap();
        assert!(!report.converged);
        let (step, coord) = report.undefined.expect("flagged coordinate");
        assert_eq!(step, 0);
        assert!(coord.contains("unit"));
    }

    #[test]
    fn numeric_check_converges_for_parity_cell() {
        let cell = parity_srnn_cell();
        let schedule: Vec<f64> = (0..=10).map(|i| (1u64 << i) as f64).collect();
        for x in shortlex_enumerate(&ab(), 5) {
            let report = numeric_saturation_check(&cell, &x, &schedule, 1e-3).unwrap();
            assert!(report.converged, "{x:?}: max err {}", report.max_error);
        }
    }

    fn parity_oracle(x: &Str) -> bool {
        x.tokens().iter().filter(|t| t.as_str() == "a").count() % 2 == 0
    }

    #[test]
    fn parity_cell_extracts_to_parity_dfa() {
        let cell = parity_srnn_cell();
        let dfa = extract_dfa_from_srnn(&cell, 64, parity_accept).unwrap();
        assert_eq!(dfa.n_states(), 4, "four ⟨state, symbol⟩ configurations");
        let minimal = dfa.minimize();
        assert_eq!(minimal.n_states(), 2);
        for x in shortlex_enumerate(&ab(), 10) {
            assert_eq!(minimal.accepts(&x), parity_oracle(&x), "on {x:?}");
        }
    }

    #[test]
    fn astar_b_cell_extracts_to_astar_b_dfa() {
        let cell = astar_b_srnn_cell();
        let dfa = extract_dfa_from_srnn(&cell, 64, astar_b_accept).unwrap();
        assert_eq!(dfa.n_states(), 3, "live, accept, and dead configurations");
        let minimal = dfa.minimize();
        assert_eq!(minimal.n_states(), 2);
        for x in shortlex_enumerate(&ab(), 8) {
            let oracle = x.len() >= 1
                && x.tokens()[..x.len() - 1].iter().all(|t| t.as_str() == "a")
                && x.tokens().last().unwrap().as_str() == "b";
            assert_eq!(minimal.accepts(&x), oracle, "on {x:?}");
        }
    }

    #[test]
    fn extraction_agrees_with_step_simulation() {
        let cell = parity_srnn_cell();
        let dfa = extract_dfa_from_srnn(&cell, 64, parity_accept).unwrap();
        for x in shortlex_enumerate(&ab(), 8) {
            let states = run_saturated(&cell, &x).unwrap();
            assert_eq!(dfa.accepts(&x), parity_accept(states.last().unwrap()));
        }
    }

    #[test]
    fn extraction_respects_state_budget() {
        let cell = parity_srnn_cell();
        assert!(matches!(
            extract_dfa_from_srnn(&cell, 2, parity_accept),
            Err(Error::StateBudgetExceeded { .. })
        ));
    }

    #[test]
    fn constant_cell_extracts_to_one_state() {
        // Ignores input and recurrence: always jumps to the all-ones state.
        let alphabet = ab();
        let mut weights = BTreeMap::new();
        weights.insert("w_hh".into(), zeros(1, 1));
        weights.insert("w_xh".into(), zeros(1, 2));
        weights.insert("b_h".into(), vec![vec![rat(1)]]);
        weights.insert("h0".into(), vec![vec![rat(1)]]);
        let cell = CellSpec::new(
            CellKind::SimpleRnn,
            alphabet,
            1,
            2,
            vec![vec![rat(1), rat(0)], vec![rat(0), rat(1)]],
            weights,
            vec![Activation::Sigmoid],
        )
        .unwrap();
        let dfa = extract_dfa_from_srnn(&cell, 8, |_| true).unwrap();
        assert_eq!(dfa.n_states(), 1);
    }

    #[test]
    fn scale_invariance_of_saturate_step() {
        let base = parity_srnn_cell();
        let mut scaled_weights = base.weights.clone();
        for m in scaled_weights.values_mut() {
            if m.len() == 1 && m[0].iter().all(|x| x.is_integer()) && m[0].len() == 4 {
                // h0 must stay discrete; skip it.
                continue;
            }
            for row in m.iter_mut() {
                for x in row.iter_mut() {
                    *x = &*x * rat_frac(7, 3);
                }
            }
        }
        let scaled = CellSpec::new(
            CellKind::SimpleRnn,
            base.alphabet.clone(),
            4,
            2,
            base.embeddings.clone(),
            scaled_weights,
            base.activations.clone(),
        )
        .unwrap();
        for x in shortlex_enumerate(&ab(), 6) {
            assert_eq!(
                run_saturated(&base, &x).unwrap(),
                run_saturated(&scaled, &x).unwrap(),
                "positive scaling preserves sign patterns on {x:?}"
            );
        }
    }

    #[test]
    fn attention_examples() {
        let one = rat(1);
        // All keys equal: mean of all values.
        let uniform = AttentionInstance::new(
            vec![one.clone()],
            vec![vec![one.clone()]; 3],
            vec![vec![rat(3)], vec![rat(0)], vec![rat(3)]],
        )
        .unwrap();
        assert_eq!(saturated_attention(&uniform), vec![rat(2)]);

        // Unique maximal key: hard attention.
        let hard = AttentionInstance::new(
            vec![one.clone()],
            vec![vec![rat(1)], vec![rat(5)], vec![rat(2)]],
            vec![vec![rat(10)], vec![rat(20)], vec![rat(30)]],
        )
        .unwrap();
        assert_eq!(saturated_attention(&hard), vec![rat(20)]);

        // Two-way tie: exact average of the tied values.
        let tie = AttentionInstance::new(
            vec![one],
            vec![vec![rat(5)], vec![rat(5)], vec![rat(1)]],
            vec![vec![rat(10)], vec![rat(21)], vec![rat(0)]],
        )
        .unwrap();
        assert_eq!(saturated_attention(&tie), vec![rat_frac(31, 2)]);
    }

    #[test]
    fn attention_is_scale_and_permutation_invariant() {
        let keys = vec![vec![rat(2)], vec![rat(5)], vec![rat(5)]];
        let values = vec![vec![rat(1)], vec![rat(2)], vec![rat(4)]];
        let base = AttentionInstance::new(vec![rat(1)], keys.clone(), values.clone()).unwrap();
        let scaled = AttentionInstance::new(vec![rat(7)], keys.clone(), values.clone()).unwrap();
        assert_eq!(saturated_attention(&base), saturated_attention(&scaled));

        let permuted = AttentionInstance::new(
            vec![rat(1)],
            vec![keys[1].clone(), keys[2].clone(), keys[0].clone()],
            vec![values[1].clone(), values[2].clone(), values[0].clone()],
        )
        .unwrap();
        assert_eq!(saturated_attention(&base), saturated_attention(&permuted));
    }

    #[test]
    fn attention_validation() {
        assert!(AttentionInstance::new(vec![rat(1)], vec![], vec![]).is_err());
        assert!(AttentionInstance::new(
            vec![rat(1)],
            vec![vec![rat(1)]],
            vec![vec![rat(1)], vec![rat(2)]],
        )
        .is_err());
        assert!(AttentionInstance::new(
            vec![rat(1), rat(2)],
            vec![vec![rat(1)]],
            vec![vec![rat(1)]],
        )
        .is_err());
    }

    #[test]
    fn two_head_anbn_recognizer() {
        assert!(count_anbn_with_attention(&s("aabb")));
        assert!(count_anbn_with_attention(&Str::empty()));
        assert!(!count_anbn_with_attention(&s("aab")));
        assert!(!count_anbn_with_attention(&s("abab")), "not in a*b*");
        let anbn = crate::corpus::LanguageSpec::anbn();
        for x in shortlex_enumerate(&ab(), 10) {
            assert_eq!(count_anbn_with_attention(&x), anbn.membership(&x), "on {x:?}");
        }
    }

    #[test]
    fn probe_counts_parity_and_counting_cells() {
        let parity = parity_srnn_cell();
        let rows = probe_cell(&parity, &[1, 2, 3, 4, 5, 6]).unwrap();
        assert_eq!(rows[0].distinct_states, 2);
        for row in &rows[1..] {
            assert_eq!(row.distinct_states, 4, "constant from n = 2 on");
            assert!((row.bits - 2.0).abs() < 1e-12);
        }

        let counting = counting_lstm_cell();
        let rows = probe_cell(&counting, &[1, 2, 3, 4, 5, 6, 7, 8]).unwrap();
        for row in &rows {
            assert_eq!(
                row.distinct_states,
                row.n + 1,
                "#a − #b takes n+1 values at length {}",
                row.n
            );
        }
        // Nondecreasing in n.
        for pair in rows.windows(2) {
            assert!(pair[0].distinct_states <= pair[1].distinct_states);
        }
    }

    #[test]
    fn probe_constant_cell() {
        let alphabet = ab();
        let rows = space_complexity_probe(
            |_s: &u8, _sym: &Symbol| Ok(0u8),
            0u8,
            &alphabet,
            &[1, 2, 3],
        )
        .unwrap();
        for row in rows {
            assert_eq!(row.distinct_states, 1);
            assert_eq!(row.bits, 0.0);
        }
    }

    #[test]
    fn cell_json_round_trip() {
        for cell in [counting_lstm_cell(), parity_srnn_cell(), astar_b_srnn_cell()] {
            let json = cell_to_json(&cell);
            let back = cell_from_json(&json).unwrap();
            for x in shortlex_enumerate(cell.alphabet(), 5) {
                assert_eq!(
                    run_saturated(&cell, &x).unwrap(),
                    run_saturated(&back, &x).unwrap()
                );
            }
            assert_eq!(json, cell_to_json(&back), "stable reserialization");
        }
        assert!(cell_from_json("{\"type\":\"cells\"}").is_err());
    }

    #[test]
    fn attention_json_round_trip() {
        let inst = AttentionInstance::new(
            vec![rat(1), rat_frac(1, 2)],
            vec![vec![rat(1), rat(0)], vec![rat(0), rat(1)]],
            vec![vec![rat(3)], vec![rat(4)]],
        )
        .unwrap();
        let json = attention_to_json(&inst);
        let back = attention_from_json(&json).unwrap();
        assert_eq!(inst, back);
    }
}
