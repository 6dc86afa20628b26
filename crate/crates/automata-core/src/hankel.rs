//! Hankel sub-blocks, exact rank, and spectral recovery of weighted
//! automata.
//!
//! For a string function f, the infinite Hankel matrix has entries
//! H[p, s] = f(p·s). A finite sub-block over shortlex prefix/suffix bases
//! (always containing ε) is enough to bound the minimal WFA size from below
//! — rank is monotone under basis growth — and, when the block's rank
//! matches the full Hankel rank, to reconstruct the machine exactly.
//!
//! Two factorization backends are provided: the default works over exact
//! rationals and selects independent pivot rows I and columns J by
//! Gaussian elimination, giving A_σ = H_σ[I,J]·H[I,J]⁻¹ with the initial
//! vector read from the ε-row and the final vector from the ε-column; the
//! floating backend replaces the pivot factorization with a singular value
//! decomposition truncated at [`DEFAULT_SVD_CUTOFF`].
//!
//! Block filling is a pure map over cells; with the `parallel` feature it
//! fans out across a rayon pool ([`build_block_par`]), and
//! [`build_block_seq`] is the sequential fallback.

use std::collections::BTreeMap;
use std::io::BufRead;
use std::str::FromStr;

use num::{BigRational, One, Zero};
use serde::{Deserialize, Serialize};

use crate::alphabet::{shortlex_count, shortlex_enumerate, Alphabet, Str, Symbol};
use crate::budget;
use crate::semiring::{RationalWeight, RealWeight};
use crate::wfa::Wfa;
use crate::{Error, Result};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Singular values at or below this are treated as zero by the floating
/// backend.
pub const DEFAULT_SVD_CUTOFF: f64 = 1e-9;

/// A deterministic string-to-rational function that Hankel blocks are built
/// from. Evaluation must be safe to call concurrently.
pub trait Blackbox: Sync {
    fn alphabet(&self) -> &Alphabet;
    fn evaluate(&self, x: &Str) -> Result<BigRational>;
}

impl Blackbox for Wfa<RationalWeight> {
    fn alphabet(&self) -> &Alphabet {
        Wfa::alphabet(self)
    }

    fn evaluate(&self, x: &Str) -> Result<BigRational> {
        Ok(self.score(x).0)
    }
}

/// A finite table of string values, optionally completed with zeros.
pub struct DatasetBlackbox {
    alphabet: Alphabet,
    values: std::collections::HashMap<Str, BigRational>,
    default_zero: bool,
}

impl DatasetBlackbox {
    pub fn new(alphabet: Alphabet, pairs: Vec<(Str, BigRational)>, default_zero: bool) -> Self {
        DatasetBlackbox {
            alphabet,
            values: pairs.into_iter().collect(),
            default_zero,
        }
    }
}

impl Blackbox for DatasetBlackbox {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn evaluate(&self, x: &Str) -> Result<BigRational> {
        match self.values.get(x) {
            Some(v) => Ok(v.clone()),
            None if self.default_zero => Ok(BigRational::zero()),
            None => Err(Error::invalid(
                "hankel evaluation",
                format!("no value for {x:?} and zero-completion is off"),
            )),
        }
    }
}

/// Value datasets for black-box functions: `<value><TAB><tokens>` lines with
/// rational values.
pub fn read_value_samples<R: BufRead>(r: R) -> Result<(Alphabet, Vec<(Str, BigRational)>)> {
    let mut symbols: Vec<Symbol> = Vec::new();
    let mut pairs = Vec::new();
    for (lineno, line) in r.lines().enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let (value_part, token_part) = line.split_once('\t').ok_or_else(|| {
            Error::format("value dataset", format!("line {}: missing TAB", lineno + 1))
        })?;
        let value = BigRational::from_str(value_part).map_err(|e| {
            Error::format("value dataset", format!("line {}: {e}", lineno + 1))
        })?;
        let string = if token_part.is_empty() {
            Str::empty()
        } else {
            token_part
                .split(' ')
                .map(Symbol::new)
                .collect::<Result<Str>>()?
        };
        for tok in string.tokens() {
            if !symbols.contains(tok) {
                symbols.push(tok.clone());
            }
        }
        pairs.push((string, value));
    }
    Ok((Alphabet::new(symbols)?, pairs))
}

type Mat = Vec<Vec<BigRational>>;

/// A finite sub-block of the Hankel matrix of some function, with optional
/// per-symbol shifted blocks H_σ[i, j] = f(pᵢ·σ·sⱼ).
#[derive(Clone, Debug)]
pub struct HankelBlock {
    alphabet: Alphabet,
    prefixes: Vec<Str>,
    suffixes: Vec<Str>,
    entries: Mat,
    shifts: Option<Vec<Mat>>,
}

impl HankelBlock {
    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn prefixes(&self) -> &[Str] {
        &self.prefixes
    }

    pub fn suffixes(&self) -> &[Str] {
        &self.suffixes
    }

    pub fn entry(&self, i: usize, j: usize) -> &BigRational {
        &self.entries[i][j]
    }

    pub fn entries(&self) -> &Mat {
        &self.entries
    }

    pub fn has_shifts(&self) -> bool {
        self.shifts.is_some()
    }

    pub fn shift(&self, symbol: usize) -> Option<&Mat> {
        self.shifts.as_ref().map(|s| &s[symbol])
    }
}

fn fill_matrix_seq(
    f: &dyn Blackbox,
    prefixes: &[Str],
    suffixes: &[Str],
    mid: Option<&Symbol>,
) -> Result<Mat> {
    prefixes
        .iter()
        .map(|p| {
            suffixes
                .iter()
                .map(|s| {
                    f.evaluate(&match mid {
                        Some(m) => p.concat_around(m, s),
                        None => p.concat(s),
                    })
                })
                .collect()
        })
        .collect()
}

#[cfg(feature = "parallel")]
fn fill_matrix_par(
    f: &dyn Blackbox,
    prefixes: &[Str],
    suffixes: &[Str],
    mid: Option<&Symbol>,
) -> Result<Mat> {
    prefixes
        .par_iter()
        .map(|p| {
            suffixes
                .iter()
                .map(|s| {
                    f.evaluate(&match mid {
                        Some(m) => p.concat_around(m, s),
                        None => p.concat(s),
                    })
                })
                .collect()
        })
        .collect()
}

fn build_block_impl(
    f: &dyn Blackbox,
    max_prefix_len: usize,
    max_suffix_len: usize,
    with_shifts: bool,
    fill: impl Fn(&dyn Blackbox, &[Str], &[Str], Option<&Symbol>) -> Result<Mat>,
) -> Result<HankelBlock> {
    let alphabet = f.alphabet().clone();
    let np = shortlex_count(alphabet.len(), max_prefix_len);
    let ns = shortlex_count(alphabet.len(), max_suffix_len);
    let mats = 1 + if with_shifts { alphabet.len() as u128 } else { 0 };
    budget::check(np.saturating_mul(ns).saturating_mul(mats))?;
    let prefixes = shortlex_enumerate(&alphabet, max_prefix_len);
    let suffixes = shortlex_enumerate(&alphabet, max_suffix_len);
    let entries = fill(f, &prefixes, &suffixes, None)?;
    let shifts = if with_shifts {
        let mut per_symbol = Vec::with_capacity(alphabet.len());
        for sym in alphabet.symbols() {
            per_symbol.push(fill(f, &prefixes, &suffixes, Some(sym))?);
        }
        Some(per_symbol)
    } else {
        None
    };
    Ok(HankelBlock {
        alphabet,
        prefixes,
        suffixes,
        entries,
        shifts,
    })
}

/// Builds the shortlex sub-block (and shifted blocks when requested),
/// filling cells in parallel when the `parallel` feature is on.
pub fn build_block(
    f: &dyn Blackbox,
    max_prefix_len: usize,
    max_suffix_len: usize,
    with_shifts: bool,
) -> Result<HankelBlock> {
    #[cfg(feature = "parallel")]
    {
        build_block_par(f, max_prefix_len, max_suffix_len, with_shifts)
    }
    #[cfg(not(feature = "parallel"))]
    {
        build_block_seq(f, max_prefix_len, max_suffix_len, with_shifts)
    }
}

/// Sequential block construction.
pub fn build_block_seq(
    f: &dyn Blackbox,
    max_prefix_len: usize,
    max_suffix_len: usize,
    with_shifts: bool,
) -> Result<HankelBlock> {
    build_block_impl(f, max_prefix_len, max_suffix_len, with_shifts, fill_matrix_seq)
}

/// Parallel block construction on the rayon pool.
#[cfg(feature = "parallel")]
pub fn build_block_par(
    f: &dyn Blackbox,
    max_prefix_len: usize,
    max_suffix_len: usize,
    with_shifts: bool,
) -> Result<HankelBlock> {
    build_block_impl(f, max_prefix_len, max_suffix_len, with_shifts, fill_matrix_par)
}

// ---------------------------------------------------------------------------
// Exact rational elimination
// ---------------------------------------------------------------------------

struct Pivots {
    rows: Vec<usize>,
    cols: Vec<usize>,
}

/// Gauss–Jordan elimination with exact fractions. Pivots are the first
/// nonzero entry in row-major order among unused rows/columns, which makes
/// the selection deterministic; the pivot minor is nonsingular by
/// construction.
fn eliminate(m: &Mat, max_pivots: usize) -> Pivots {
    let nr = m.len();
    let nc = if nr == 0 { 0 } else { m[0].len() };
    let mut work = m.clone();
    let mut row_used = vec![false; nr];
    let mut col_used = vec![false; nc];
    let mut pivots = Pivots {
        rows: Vec::new(),
        cols: Vec::new(),
    };
    while pivots.rows.len() < max_pivots {
        let mut found = None;
        'scan: for i in 0..nr {
            if row_used[i] {
                continue;
            }
            for j in 0..nc {
                if !col_used[j] && !work[i][j].is_zero() {
                    found = Some((i, j));
                    break 'scan;
                }
            }
        }
        let Some((pi, pj)) = found else { break };
        row_used[pi] = true;
        col_used[pj] = true;
        pivots.rows.push(pi);
        pivots.cols.push(pj);
        let pivot = work[pi][pj].clone();
        for i in 0..nr {
            if i == pi || work[i][pj].is_zero() {
                continue;
            }
            let factor = &work[i][pj] / &pivot;
            for j in 0..nc {
                let delta = &factor * &work[pi][j];
                work[i][j] = &work[i][j] - delta;
            }
        }
    }
    pivots
}

/// Exact rank over ℚ; no floating point anywhere.
pub fn exact_rank(block: &HankelBlock) -> usize {
    mat_rank(&block.entries)
}

fn mat_rank(m: &Mat) -> usize {
    eliminate(m, usize::MAX).rows.len()
}

/// The block rank, documented as a lower bound on the state count of any
/// WFA computing the underlying function.
pub fn states_lower_bound(block: &HankelBlock) -> usize {
    exact_rank(block)
}

fn submatrix(m: &Mat, rows: &[usize], cols: &[usize]) -> Mat {
    rows.iter()
        .map(|&i| cols.iter().map(|&j| m[i][j].clone()).collect())
        .collect()
}

/// Inverse by Gauss–Jordan; the caller guarantees nonsingularity.
fn invert(m: &Mat) -> Mat {
    let n = m.len();
    let mut work = m.clone();
    let mut inv: Mat = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                })
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot_row = (col..n)
            .find(|&i| !work[i][col].is_zero())
            .expect("pivot minor is nonsingular");
        work.swap(col, pivot_row);
        inv.swap(col, pivot_row);
        let pivot = work[col][col].clone();
        for j in 0..n {
            work[col][j] = &work[col][j] / &pivot;
            inv[col][j] = &inv[col][j] / &pivot;
        }
        for i in 0..n {
            if i == col || work[i][col].is_zero() {
                continue;
            }
            let factor = work[i][col].clone();
            for j in 0..n {
                let dw = &factor * &work[col][j];
                work[i][j] = &work[i][j] - dw;
                let di = &factor * &inv[col][j];
                inv[i][j] = &inv[i][j] - di;
            }
        }
    }
    inv
}

fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let nr = a.len();
    let inner = if nr == 0 { 0 } else { a[0].len() };
    let nc = if b.is_empty() { 0 } else { b[0].len() };
    (0..nr)
        .map(|i| {
            (0..nc)
                .map(|j| {
                    let mut acc = BigRational::zero();
                    for k in 0..inner {
                        acc += &a[i][k] * &b[k][j];
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

fn resolve_rank(exact: usize, rank_hint: Option<usize>) -> Result<usize> {
    match rank_hint {
        None => Ok(exact),
        Some(hint) if hint <= exact => Ok(hint),
        Some(hint) => Err(Error::RankHintTooLarge { hint, rank: exact }),
    }
}

fn require_shifts(block: &HankelBlock) -> Result<&Vec<Mat>> {
    block.shifts.as_ref().ok_or_else(|| {
        Error::invalid("hankel block", "spectral learning needs shifted blocks")
    })
}

/// Exact spectral recovery over the rationals.
///
/// Selects independent pivot rows I and columns J, then builds the WFA
/// A_σ = H_σ[I,J]·H[I,J]⁻¹, λ = H[ε,J]·H[I,J]⁻¹, ρ = H[I,ε]. When the
/// block's rank equals the rank of the full Hankel matrix, the result
/// computes f exactly on every string. A `rank_hint` may truncate the rank;
/// if truncation pushes the ε row or column outside the span of the
/// selected basis the learner reports [`Error::RankDeficientBasis`].
pub fn spectral_learn(
    block: &HankelBlock,
    rank_hint: Option<usize>,
) -> Result<Wfa<RationalWeight>> {
    let shifts = require_shifts(block)?;
    let exact = exact_rank(block);
    let r = resolve_rank(exact, rank_hint)?;
    let pivots = eliminate(&block.entries, r);
    let (rows, cols) = (&pivots.rows, &pivots.cols);

    // Truncation can strand ε outside the selected span; full rank cannot.
    if r < exact {
        let all_cols: Vec<usize> = (0..block.suffixes.len()).collect();
        let all_rows: Vec<usize> = (0..block.prefixes.len()).collect();
        let basis_rows = submatrix(&block.entries, rows, &all_cols);
        let mut with_eps = basis_rows.clone();
        with_eps.push(block.entries[0].clone());
        if mat_rank(&with_eps) > mat_rank(&basis_rows) {
            return Err(Error::RankDeficientBasis(
                "ε row outside the span of the selected basis rows".into(),
            ));
        }
        let basis_cols = submatrix(&block.entries, &all_rows, cols);
        let mut cols_with_eps = cols.clone();
        cols_with_eps.push(0);
        let extended = submatrix(&block.entries, &all_rows, &cols_with_eps);
        if mat_rank(&extended) > mat_rank(&basis_cols) {
            return Err(Error::RankDeficientBasis(
                "ε column outside the span of the selected basis columns".into(),
            ));
        }
    }

    let minor_inv = invert(&submatrix(&block.entries, rows, cols));
    let lambda_row = mat_mul(&submatrix(&block.entries, &[0], cols), &minor_inv);
    let initial: Vec<RationalWeight> = lambda_row[0]
        .iter()
        .map(|x| RationalWeight(x.clone()))
        .collect();
    let final_weights: Vec<RationalWeight> = rows
        .iter()
        .map(|&i| RationalWeight(block.entries[i][0].clone()))
        .collect();
    let mut transitions = Vec::new();
    for (sym, shifted) in shifts.iter().enumerate() {
        let a_sigma = mat_mul(&submatrix(shifted, rows, cols), &minor_inv);
        for (from, row) in a_sigma.iter().enumerate() {
            for (to, w) in row.iter().enumerate() {
                if !w.is_zero() {
                    transitions.push((from, sym, to, RationalWeight(w.clone())));
                }
            }
        }
    }
    Wfa::new(
        block.alphabet.clone(),
        (0..r).map(|i| i.to_string()).collect(),
        initial,
        final_weights,
        transitions,
    )
}

/// Floating spectral recovery via a truncated SVD (cutoff
/// [`DEFAULT_SVD_CUTOFF`]): H ≈ (UΣ)(Vᵀ), A_σ = Σ⁻¹Uᵀ·H_σ·V.
pub fn spectral_learn_float(
    block: &HankelBlock,
    rank_hint: Option<usize>,
) -> Result<Wfa<RealWeight>> {
    use nalgebra::DMatrix;
    let shifts = require_shifts(block)?;
    let np = block.prefixes.len();
    let ns = block.suffixes.len();
    let to_f64 = |m: &Mat| {
        DMatrix::from_fn(np, ns, |i, j| RationalWeight(m[i][j].clone()).to_f64())
    };
    let h = to_f64(&block.entries);
    let svd = h.svd(true, true);
    let u = svd.u.as_ref().expect("svd with vectors");
    let v_t = svd.v_t.as_ref().expect("svd with vectors");
    let numeric_rank = svd
        .singular_values
        .iter()
        .filter(|s| **s > DEFAULT_SVD_CUTOFF)
        .count();
    let r = resolve_rank(numeric_rank, rank_hint)?;

    // λ = row ε of UΣ; ρ = column ε of Vᵀ; A_σ = Σ⁻¹ Uᵀ H_σ V.
    let initial: Vec<RealWeight> = (0..r)
        .map(|k| RealWeight(u[(0, k)] * svd.singular_values[k]))
        .collect();
    let final_weights: Vec<RealWeight> = (0..r).map(|k| RealWeight(v_t[(k, 0)])).collect();
    let mut transitions = Vec::new();
    for (sym, shifted) in shifts.iter().enumerate() {
        let hs = to_f64(shifted);
        let mut a_sigma = vec![vec![0.0f64; r]; r];
        for (from, row) in a_sigma.iter_mut().enumerate() {
            for (to, cell) in row.iter_mut().enumerate() {
                let mut acc = 0.0;
                for i in 0..np {
                    for j in 0..ns {
                        acc += u[(i, from)] * hs[(i, j)] * v_t[(to, j)];
                    }
                }
                *cell = acc / svd.singular_values[from];
            }
        }
        for (from, row) in a_sigma.iter().enumerate() {
            for (to, w) in row.iter().enumerate() {
                if *w != 0.0 {
                    transitions.push((from, sym, to, RealWeight(*w)));
                }
            }
        }
    }
    Wfa::new(
        block.alphabet.clone(),
        (0..r).map(|i| i.to_string()).collect(),
        initial,
        final_weights,
        transitions,
    )
}

// ---------------------------------------------------------------------------
// JSON exchange format
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct HankelDoc {
    #[serde(rename = "type")]
    kind: String,
    alphabet: Vec<String>,
    prefixes: Vec<String>,
    suffixes: Vec<String>,
    entries: Vec<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    shifts: Option<BTreeMap<String, Vec<Vec<String>>>>,
}

pub fn block_to_json(block: &HankelBlock) -> String {
    let render = |m: &Mat| -> Vec<Vec<String>> {
        m.iter()
            .map(|row| row.iter().map(|x| x.to_string()).collect())
            .collect()
    };
    let doc = HankelDoc {
        kind: "hankel".into(),
        alphabet: block
            .alphabet
            .symbols()
            .iter()
            .map(|s| s.as_str().into())
            .collect(),
        prefixes: block.prefixes.iter().map(Str::display_spaced).collect(),
        suffixes: block.suffixes.iter().map(Str::display_spaced).collect(),
        entries: render(&block.entries),
        shifts: block.shifts.as_ref().map(|shifts| {
            block
                .alphabet
                .symbols()
                .iter()
                .zip(shifts)
                .map(|(sym, m)| (sym.as_str().to_owned(), render(m)))
                .collect()
        }),
    };
    serde_json::to_string_pretty(&doc).expect("hankel serialization is infallible")
}

pub fn block_from_json(text: &str) -> Result<HankelBlock> {
    let doc: HankelDoc =
        serde_json::from_str(text).map_err(|e| Error::format("hankel JSON", e.to_string()))?;
    if doc.kind != "hankel" {
        return Err(Error::format(
            "hankel JSON",
            format!("unknown type {:?}", doc.kind),
        ));
    }
    let alphabet = Alphabet::from_texts(&doc.alphabet)?;
    let parse_strs = |texts: &[String]| -> Result<Vec<Str>> {
        texts
            .iter()
            .map(|t| crate::alphabet::parse_tokens(t, &alphabet))
            .collect()
    };
    let parse_mat = |m: &Vec<Vec<String>>, np: usize, ns: usize| -> Result<Mat> {
        if m.len() != np || m.iter().any(|row| row.len() != ns) {
            return Err(Error::format("hankel JSON", "entry matrix shape mismatch"));
        }
        m.iter()
            .map(|row| {
                row.iter()
                    .map(|cell| {
                        BigRational::from_str(cell)
                            .map_err(|e| Error::format("hankel JSON", format!("{cell:?}: {e}")))
                    })
                    .collect()
            })
            .collect()
    };
    let prefixes = parse_strs(&doc.prefixes)?;
    let suffixes = parse_strs(&doc.suffixes)?;
    let np = prefixes.len();
    let ns = suffixes.len();
    let entries = parse_mat(&doc.entries, np, ns)?;
    let shifts = match &doc.shifts {
        None => None,
        Some(map) => {
            let mut per_symbol = Vec::with_capacity(alphabet.len());
            for sym in alphabet.symbols() {
                let m = map.get(sym.as_str()).ok_or_else(|| {
                    Error::format("hankel JSON", format!("missing shift for {sym}"))
                })?;
                per_symbol.push(parse_mat(m, np, ns)?);
            }
            Some(per_symbol)
        }
    };
    Ok(HankelBlock {
        alphabet,
        prefixes,
        suffixes,
        entries,
        shifts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::parse_tokens;
    use crate::wfa::{builtin_binary_value, builtin_ngram_counter};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn ab() -> Alphabet {
        Alphabet::from_texts(["a", "b"]).unwrap()
    }

    fn unigram_a() -> Wfa<RationalWeight> {
        builtin_ngram_counter(&ab(), &parse_tokens("a", &ab()).unwrap())
    }

    fn int(n: i64) -> BigRational {
        RationalWeight::from_int(n).0
    }

    struct ZeroFn(Alphabet);

    impl Blackbox for ZeroFn {
        fn alphabet(&self) -> &Alphabet {
            &self.0
        }

        fn evaluate(&self, _x: &Str) -> Result<BigRational> {
            Ok(BigRational::zero())
        }
    }

    #[test]
    fn unigram_counter_block_entries() {
        let block = build_block(&unigram_a(), 1, 1, false).unwrap();
        let expect: Vec<Vec<BigRational>> = vec![
            vec![int(0), int(1), int(0)],
            vec![int(1), int(2), int(1)],
            vec![int(0), int(1), int(0)],
        ];
        assert_eq!(block.entries(), &expect);
    }

    #[test]
    fn zero_function_block_and_rank() {
        let block = build_block(&ZeroFn(ab()), 2, 2, false).unwrap();
        assert!(block
            .entries()
            .iter()
            .all(|row| row.iter().all(|x| x.is_zero())));
        assert_eq!(exact_rank(&block), 0);
    }

    #[test]
    fn entries_match_fresh_evaluator_calls() {
        let f = unigram_a();
        let block = build_block(&f, 2, 2, false).unwrap();
        for (i, p) in block.prefixes().iter().enumerate() {
            for (j, s) in block.suffixes().iter().enumerate() {
                assert_eq!(block.entry(i, j), &f.evaluate(&p.concat(s)).unwrap());
            }
        }
    }

    #[test]
    fn sequential_and_parallel_fill_agree() {
        let f = builtin_binary_value(2);
        let seq = build_block_seq(&f, 3, 3, true).unwrap();
        let par = build_block(&f, 3, 3, true).unwrap();
        assert_eq!(seq.entries(), par.entries());
        assert_eq!(seq.shift(0), par.shift(0));
    }

    #[test]
    fn exact_ranks_of_paper_machines() {
        assert_eq!(exact_rank(&build_block(&unigram_a(), 3, 3, false).unwrap()), 2);
        assert_eq!(
            exact_rank(&build_block(&builtin_binary_value(2), 3, 3, false).unwrap()),
            2
        );
        // The bigram counter needs a third state.
        let bigram = builtin_ngram_counter(&ab(), &parse_tokens("ab", &ab()).unwrap());
        assert_eq!(exact_rank(&build_block(&bigram, 3, 3, false).unwrap()), 3);
    }

    #[test]
    fn rank_is_permutation_invariant() {
        let block = build_block(&builtin_binary_value(2), 3, 3, false).unwrap();
        let base = exact_rank(&block);
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..5 {
            let mut rows = block.entries.clone();
            // Shuffle rows, then one shared column permutation.
            for i in (1..rows.len()).rev() {
                let j = rng.gen_range(0..=i);
                rows.swap(i, j);
            }
            let nc = rows[0].len();
            let mut perm: Vec<usize> = (0..nc).collect();
            for i in (1..nc).rev() {
                let j = rng.gen_range(0..=i);
                perm.swap(i, j);
            }
            let shuffled: Mat = rows
                .iter()
                .map(|row| perm.iter().map(|&j| row[j].clone()).collect())
                .collect();
            assert_eq!(mat_rank(&shuffled), base);
        }
    }

    #[test]
    fn rank_is_monotone_under_basis_growth() {
        let f = unigram_a();
        let mut last = 0;
        for len in 0..=3 {
            let r = exact_rank(&build_block(&f, len, len, false).unwrap());
            assert!(r >= last, "rank dropped from {last} to {r} at length {len}");
            last = r;
        }
    }

    #[test]
    fn states_lower_bound_examples() {
        let f = unigram_a();
        for len in 0..=3 {
            assert!(states_lower_bound(&build_block(&f, len, len, false).unwrap()) <= 2);
        }
        // 1×1 block of a function with f(ε) ≠ 0.
        let one = builtin_binary_value(2);
        let block = build_block(&DatasetBlackbox::new(
            one.alphabet().clone(),
            vec![(Str::empty(), int(3))],
            true,
        ), 0, 0, false)
        .unwrap();
        assert_eq!(states_lower_bound(&block), 1);
    }

    fn assert_scores_match(
        learned: &Wfa<RationalWeight>,
        f: &Wfa<RationalWeight>,
        max_len: usize,
    ) {
        for x in shortlex_enumerate(f.alphabet(), max_len) {
            assert_eq!(learned.score(&x), f.score(&x), "on {x:?}");
        }
    }

    #[test]
    fn spectral_learn_recovers_unigram_counter() {
        let f = unigram_a();
        let block = build_block(&f, 3, 3, true).unwrap();
        let learned = spectral_learn(&block, None).unwrap();
        assert_eq!(learned.n_states(), 2);
        assert_scores_match(&learned, &f, 6);
    }

    #[test]
    fn spectral_learn_recovers_binary_value() {
        let f = builtin_binary_value(2);
        let block = build_block(&f, 3, 3, true).unwrap();
        let learned = spectral_learn(&block, None).unwrap();
        assert_eq!(learned.n_states(), 2);
        assert_scores_match(&learned, &f, 6);
    }

    #[test]
    fn spectral_learn_recovers_random_machines() {
        let mut rng = StdRng::seed_from_u64(31);
        let a = ab();
        for _ in 0..8 {
            let n = rng.gen_range(1..=3);
            let mut transitions = Vec::new();
            for s in 0..2 {
                for from in 0..n {
                    for to in 0..n {
                        if rng.gen_bool(0.7) {
                            transitions.push((
                                from,
                                s,
                                to,
                                RationalWeight::from_int(rng.gen_range(-2..=2)),
                            ));
                        }
                    }
                }
            }
            let target = Wfa::new(
                a.clone(),
                (0..n).map(|i| i.to_string()).collect(),
                (0..n)
                    .map(|_| RationalWeight::from_int(rng.gen_range(-1..=1)))
                    .collect(),
                (0..n)
                    .map(|_| RationalWeight::from_int(rng.gen_range(-1..=1)))
                    .collect(),
                transitions,
            )
            .unwrap();
            let block = build_block(&target, 4, 4, true).unwrap();
            let learned = spectral_learn(&block, None).unwrap();
            assert!(learned.n_states() <= n);
            assert_scores_match(&learned, &target, 6);
        }
    }

    #[test]
    fn learned_model_reproduces_block_entries() {
        let f = builtin_binary_value(2);
        let block = build_block(&f, 2, 2, true).unwrap();
        let learned = spectral_learn(&block, None).unwrap();
        for (i, p) in block.prefixes().iter().enumerate() {
            for (j, s) in block.suffixes().iter().enumerate() {
                assert_eq!(&learned.score(&p.concat(s)).0, block.entry(i, j));
            }
        }
    }

    #[test]
    fn float_backend_matches_within_tolerance() {
        let f = builtin_binary_value(2);
        let block = build_block(&f, 3, 3, true).unwrap();
        let learned = spectral_learn_float(&block, None).unwrap();
        assert_eq!(learned.n_states(), 2);
        for x in shortlex_enumerate(f.alphabet(), 6) {
            let expect = RationalWeight(f.evaluate(&x).unwrap()).to_f64();
            let got = learned.score(&x).0;
            assert!(
                (got - expect).abs() <= 1e-6,
                "on {x:?}: {got} vs {expect}"
            );
        }
    }

    #[test]
    fn rank_hints_truncate_but_never_fabricate() {
        let f = unigram_a();
        let block = build_block(&f, 3, 3, true).unwrap();
        assert!(matches!(
            spectral_learn(&block, Some(5)),
            Err(Error::RankHintTooLarge { hint: 5, rank: 2 })
        ));
        // Truncating the unigram counter to rank 1 strands the ε column
        // (the first pivot sits away from the ε row/column).
        assert!(matches!(
            spectral_learn(&block, Some(1)),
            Err(Error::RankDeficientBasis(_))
        ));
    }

    #[test]
    fn missing_shifts_is_an_error() {
        let block = build_block(&unigram_a(), 2, 2, false).unwrap();
        assert!(spectral_learn(&block, None).is_err());
    }

    #[test]
    fn json_round_trip() {
        let block = build_block(&unigram_a(), 2, 2, true).unwrap();
        let json = block_to_json(&block);
        let back = block_from_json(&json).unwrap();
        assert_eq!(back.entries(), block.entries());
        assert_eq!(back.prefixes(), block.prefixes());
        assert_eq!(json, block_to_json(&back), "stable reserialization");
        let learned = spectral_learn(&back, None).unwrap();
        assert_scores_match(&learned, &unigram_a(), 5);
    }

    #[test]
    fn dataset_blackbox_and_value_file() {
        let text = "0\t\n1\ta\n2\ta a\n1/2\tb\n";
        let (alphabet, pairs) = read_value_samples(text.as_bytes()).unwrap();
        assert_eq!(alphabet.len(), 2);
        let f = DatasetBlackbox::new(alphabet.clone(), pairs, true);
        assert_eq!(
            f.evaluate(&parse_tokens("a a", &alphabet).unwrap()).unwrap(),
            int(2)
        );
        assert_eq!(
            f.evaluate(&parse_tokens("b b", &alphabet).unwrap()).unwrap(),
            BigRational::zero(),
            "zero completion"
        );
        let strict = DatasetBlackbox::new(
            alphabet.clone(),
            vec![(Str::empty(), int(1))],
            false,
        );
        assert!(strict
            .evaluate(&parse_tokens("a", &alphabet).unwrap())
            .is_err());
    }
}
