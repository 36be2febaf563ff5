//! Peres–Mermin magic square and the EVENODD memory-verification game.
//!
//! Qubit order for the shared state is `A1 B1 A2 B2` (most significant
//! first): Alice holds qubits 0 and 2, Bob holds 1 and 3, and each pair
//! `(A_t, B_t)` starts in `(|00> + |11>)/√2`. Every amplitude of the
//! product state is `1/2`, so all expectations stay rational.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::analysis::run_exact_unary;
use crate::constructions::{build_evenodd_dfa, build_evenodd_mcqfa};
use crate::exactnum::{GaussianRational, Rational};
use crate::machines::compile;
use crate::qstate::{Matrix, StateVector};

/// Largest `k` for which the classical Bob runs the explicit
/// `2^(k+1)`-state DFA; above it the same residue is tracked arithmetically.
pub const CLASSICAL_EXPLICIT_MAX_K: u32 = 8;

/// Instance multipliers `i` are drawn as `2r` or `2r + 1` with `r < I_RANGE`.
const I_RANGE: u64 = 50;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ContextualityError {
    #[error("malformed strategy table: {0}")]
    MalformedTable(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

// ---------------------------------------------------------------- χ

/// A ±1 filling of the square, row-major (`entries[3r + c]`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SquareAssignment {
    pub entries: [i8; 9],
}

impl SquareAssignment {
    pub fn new(entries: [i8; 9]) -> Result<Self, ContextualityError> {
        if entries.iter().any(|&e| e != 1 && e != -1) {
            return Err(ContextualityError::InvalidParameter("entries must be +1 or -1".into()));
        }
        Ok(SquareAssignment { entries })
    }

    /// Bit `b` of `mask` set means cell `b` is −1.
    pub fn from_mask(mask: u16) -> Self {
        let mut entries = [1i8; 9];
        for (b, e) in entries.iter_mut().enumerate() {
            if mask >> b & 1 == 1 {
                *e = -1;
            }
        }
        SquareAssignment { entries }
    }

    pub fn all() -> impl Iterator<Item = SquareAssignment> {
        (0u16..512).map(SquareAssignment::from_mask)
    }

    pub fn row_product(&self, r: usize) -> i32 {
        (0..3).map(|c| self.entries[3 * r + c] as i32).product()
    }

    pub fn col_product(&self, c: usize) -> i32 {
        (0..3).map(|r| self.entries[3 * r + c] as i32).product()
    }
}

/// `R1 + R2 + R3 + C1 + C2 − C3`.
pub fn chi_value(a: &SquareAssignment) -> i32 {
    (0..3).map(|r| a.row_product(r)).sum::<i32>() + a.col_product(0) + a.col_product(1) - a.col_product(2)
}

/// Exhaustive maximum over all 512 assignments.
pub fn max_classical_chi() -> i32 {
    SquareAssignment::all().map(|a| chi_value(&a)).max().expect("non-empty")
}

// ---------------------------------------------------------------- observables

fn g(re: i64, im: i64) -> GaussianRational {
    GaussianRational::new(Rational::from_integer(re), Rational::from_integer(im))
}

fn pauli(name: char) -> Matrix {
    let rows = match name {
        'I' => vec![vec![g(1, 0), g(0, 0)], vec![g(0, 0), g(1, 0)]],
        'X' => vec![vec![g(0, 0), g(1, 0)], vec![g(1, 0), g(0, 0)]],
        'Y' => vec![vec![g(0, 0), g(0, -1)], vec![g(0, 1), g(0, 0)]],
        'Z' => vec![vec![g(1, 0), g(0, 0)], vec![g(0, 0), g(-1, 0)]],
        _ => unreachable!("fixed Pauli labels"),
    };
    Matrix::from_rows(rows).expect("square")
}

fn conj(m: &Matrix) -> Matrix {
    Matrix::from_rows(m.rows().into_iter().map(|r| r.iter().map(GaussianRational::conj).collect()).collect())
        .expect("square")
}

fn product(ms: &[&Matrix]) -> Matrix {
    ms.iter().skip(1).fold(ms[0].clone(), |acc, m| acc.mul(m).expect("equal dimensions"))
}

/// 3×3 grid of two-qubit observables; labels such as `"ZX"` mean `Z⊗X`.
#[derive(Clone, Debug)]
pub struct ObservableGrid {
    pub labels: [[&'static str; 3]; 3],
    pub cells: Vec<Vec<Matrix>>,
}

/// Outcome of checking the grid identities. Every flag must be true.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GridCheck {
    pub hermitian: bool,
    pub unitary: bool,
    pub rows_commute: bool,
    pub columns_commute: bool,
    pub row_products_identity: bool,
    /// `+I, +I, −I`.
    pub column_products_signed: bool,
}

impl GridCheck {
    pub fn all_hold(&self) -> bool {
        self.hermitian
            && self.unitary
            && self.rows_commute
            && self.columns_commute
            && self.row_products_identity
            && self.column_products_signed
    }
}

impl ObservableGrid {
    pub fn peres_mermin() -> Self {
        let labels = [["ZI", "IZ", "ZZ"], ["IX", "XI", "XX"], ["ZX", "XZ", "YY"]];
        let cells = labels
            .iter()
            .map(|row| {
                row.iter()
                    .map(|l| {
                        let mut cs = l.chars();
                        let (a, b) = (cs.next().unwrap(), cs.next().unwrap());
                        pauli(a).tensor(&pauli(b))
                    })
                    .collect()
            })
            .collect();
        ObservableGrid { labels, cells }
    }

    pub fn cell(&self, r: usize, c: usize) -> &Matrix {
        &self.cells[r][c]
    }

    pub fn row(&self, r: usize) -> [&Matrix; 3] {
        [self.cell(r, 0), self.cell(r, 1), self.cell(r, 2)]
    }

    pub fn column(&self, c: usize) -> [&Matrix; 3] {
        [self.cell(0, c), self.cell(1, c), self.cell(2, c)]
    }

    pub fn check(&self) -> GridCheck {
        let all = || self.cells.iter().flatten();
        let commute = |ms: [&Matrix; 3]| {
            (0..3).all(|x| (x + 1..3).all(|y| ms[x].mul(ms[y]).ok() == ms[y].mul(ms[x]).ok()))
        };
        let id = Matrix::identity(4);
        let minus_id = id.scale(&g(-1, 0));
        GridCheck {
            hermitian: all().all(Matrix::is_hermitian),
            unitary: all().all(Matrix::is_unitary),
            rows_commute: (0..3).all(|r| commute(self.row(r))),
            columns_commute: (0..3).all(|c| commute(self.column(c))),
            row_products_identity: (0..3).all(|r| product(&self.row(r)).is_identity()),
            column_products_signed: product(&self.column(0)).is_identity()
                && product(&self.column(1)).is_identity()
                && product(&self.column(2)) == minus_id,
        }
    }
}

// ---------------------------------------------------------------- Bell ⊗ Bell

fn bit(x: usize, qubit: usize) -> usize {
    (x >> (3 - qubit)) & 1
}

/// Lifts a two-qubit operator onto qubits `(p0, p1)` of the four-qubit space.
fn embed(op: &Matrix, p0: usize, p1: usize) -> Matrix {
    let others: Vec<usize> = (0..4).filter(|&q| q != p0 && q != p1).collect();
    let local = |x: usize| 2 * bit(x, p0) + bit(x, p1);
    let rows = (0..16)
        .map(|r| {
            (0..16)
                .map(|c| {
                    if others.iter().all(|&q| bit(r, q) == bit(c, q)) {
                        op.get(local(r), local(c)).clone()
                    } else {
                        GaussianRational::zero()
                    }
                })
                .collect()
        })
        .collect();
    Matrix::from_rows(rows).expect("square")
}

fn alice_op(op: &Matrix) -> Matrix {
    embed(op, 0, 2)
}

/// Bob measures the complex conjugate so that his results on the shared
/// maximally entangled pairs mirror Alice's.
fn bob_op(op: &Matrix) -> Matrix {
    embed(&conj(op), 1, 3)
}

pub fn bell_bell_state() -> StateVector {
    let half = Rational::frac(1, 2);
    StateVector::from_rationals(
        (0..16).map(|x| if bit(x, 0) == bit(x, 1) && bit(x, 2) == bit(x, 3) { half.clone() } else { Rational::zero() }).collect(),
    )
}

fn expectation(psi: &StateVector, op: &Matrix) -> Rational {
    let v = op.apply(psi).expect("dimension 16");
    let e = psi.inner(&v).expect("dimension 16");
    assert!(e.im.is_zero(), "observables are Hermitian");
    e.re
}

/// The six correlators `⟨R1⟩, ⟨R2⟩, ⟨R3⟩, ⟨C1⟩, ⟨C2⟩, ⟨C3⟩` on Bell⊗Bell.
/// Rows are measured by Alice, columns by Bob.
pub fn quantum_chi_terms() -> [Rational; 6] {
    let grid = ObservableGrid::peres_mermin();
    let psi = bell_bell_state();
    let r = |i| expectation(&psi, &alice_op(&product(&grid.row(i))));
    let c = |j| expectation(&psi, &bob_op(&product(&grid.column(j))));
    [r(0), r(1), r(2), c(0), c(1), c(2)]
}

pub fn quantum_chi() -> Rational {
    let t = quantum_chi_terms();
    &(&(&(&(&t[0] + &t[1]) + &t[2]) + &t[3]) + &t[4]) - &t[5]
}

/// One joint outcome of Alice's row and Bob's column with its exact weight.
#[derive(Clone, Debug)]
struct JointOutcome {
    alice: [i8; 3],
    bob: [i8; 3],
    prob: Rational,
}

/// Exact joint distribution of measuring Alice's row `i` then Bob's
/// column `j`, each observable in grid order, via `(I ± O)/2` projectors.
fn joint_distribution(grid: &ObservableGrid, psi: &StateVector, i: usize, j: usize) -> Vec<JointOutcome> {
    let half = g(1, 0).scale(&Rational::frac(1, 2));
    let id = Matrix::identity(16);
    let projectors = |op: Matrix| {
        let plus = id.add(&op).expect("dim").scale(&half);
        let minus = id.add(&op.scale(&g(-1, 0))).expect("dim").scale(&half);
        [plus, minus]
    };
    let ops: Vec<[Matrix; 2]> = grid
        .row(i)
        .iter()
        .map(|o| projectors(alice_op(o)))
        .chain(grid.column(j).iter().map(|o| projectors(bob_op(o))))
        .collect();
    let mut out = Vec::new();
    for signs in 0u8..64 {
        let mut v = psi.clone();
        for (t, pair) in ops.iter().enumerate() {
            v = pair[(signs >> t & 1) as usize].apply(&v).expect("dim");
        }
        let prob = v.norm_sqr();
        if prob.is_zero() {
            continue;
        }
        let s = |t: usize| if signs >> t & 1 == 0 { 1i8 } else { -1 };
        out.push(JointOutcome { alice: [s(0), s(1), s(2)], bob: [s(3), s(4), s(5)], prob });
    }
    out
}

fn quantum_tables() -> &'static Vec<Vec<JointOutcome>> {
    static TABLES: OnceLock<Vec<Vec<JointOutcome>>> = OnceLock::new();
    TABLES.get_or_init(|| {
        let grid = ObservableGrid::peres_mermin();
        let psi = bell_bell_state();
        (0..9).map(|ij| joint_distribution(&grid, &psi, ij / 3, ij % 3)).collect()
    })
}

/// Draws index `t` with probability `probs[t]` (which sum to one) by
/// revealing a uniform draw 64 bits at a time until it is unambiguous.
fn sample_exact(probs: &[Rational], rng: &mut impl RngCore) -> usize {
    let mut u = BigInt::from(rng.next_u64());
    let mut bits: u64 = 64;
    loop {
        let lo = Rational::dyadic(u.clone(), bits);
        let hi = Rational::dyadic(&u + 1, bits);
        let mut cum = Rational::zero();
        let mut ambiguous = false;
        for (t, p) in probs.iter().enumerate().take(probs.len() - 1) {
            cum = &cum + p;
            if hi <= cum {
                return t;
            }
            if lo < cum {
                ambiguous = true;
                break;
            }
        }
        if !ambiguous {
            return probs.len() - 1;
        }
        u = (u << 64) + BigInt::from(rng.next_u64());
        bits += 64;
    }
}

// ---------------------------------------------------------------- magic-square game

/// Alice's answers per row, Bob's answers per column (indexed by row).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct StrategyTables {
    pub alice: [[i8; 3]; 3],
    pub bob: [[i8; 3]; 3],
}

impl StrategyTables {
    pub fn validate(&self) -> Result<(), ContextualityError> {
        let pm = |t: &[[i8; 3]; 3]| t.iter().flatten().all(|&e| e == 1 || e == -1);
        if !pm(&self.alice) || !pm(&self.bob) {
            return Err(ContextualityError::MalformedTable("entries must be +1 or -1".into()));
        }
        for (r, row) in self.alice.iter().enumerate() {
            if parity(row) != 1 {
                return Err(ContextualityError::MalformedTable(format!("Alice row {} has parity -1", r + 1)));
            }
        }
        for (c, col) in self.bob.iter().enumerate() {
            if parity(col) != column_parity(c) {
                return Err(ContextualityError::MalformedTable(format!("Bob column {} has the wrong parity", c + 1)));
            }
        }
        Ok(())
    }

    /// Exact win probability over the nine uniform input pairs.
    pub fn win_probability(&self) -> Rational {
        let wins = (0..3).flat_map(|i| (0..3).map(move |j| (i, j))).filter(|&(i, j)| self.alice[i][j] == self.bob[j][i]).count();
        Rational::frac(wins as i64, 9)
    }
}

fn parity(t: &[i8; 3]) -> i8 {
    t[0] * t[1] * t[2]
}

fn column_parity(c: usize) -> i8 {
    if c == 2 {
        -1
    } else {
        1
    }
}

/// The four ±1 triples with the given parity.
fn triples(p: i8) -> Vec<[i8; 3]> {
    let mut v = Vec::new();
    for a in [1i8, -1] {
        for b in [1i8, -1] {
            v.push([a, b, p * a * b]);
        }
    }
    v
}

fn tables_with(parities: [i8; 3]) -> Vec<[[i8; 3]; 3]> {
    let mut out = Vec::new();
    for x in triples(parities[0]) {
        for y in triples(parities[1]) {
            for z in triples(parities[2]) {
                out.push([x, y, z]);
            }
        }
    }
    out
}

/// All 64 Alice tables satisfying the row constraints.
pub fn alice_tables() -> Vec<[[i8; 3]; 3]> {
    tables_with([1, 1, 1])
}

/// All 64 Bob tables satisfying the column constraints.
pub fn bob_tables() -> Vec<[[i8; 3]; 3]> {
    tables_with([1, 1, -1])
}

/// Exhaustive maximum over the 64 × 64 constrained deterministic pairs.
pub fn best_classical_win_probability() -> Rational {
    let bobs = bob_tables();
    alice_tables()
        .into_iter()
        .flat_map(|alice| bobs.iter().map(move |&bob| StrategyTables { alice, bob }.win_probability()))
        .max()
        .expect("non-empty")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MagicStrategy {
    QuantumBell,
    ClassicalDeterministic(StrategyTables),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MagicRound {
    /// 1-based row given to Alice.
    pub i: u8,
    /// 1-based column given to Bob.
    pub j: u8,
    pub alice: [i8; 3],
    pub bob: [i8; 3],
    pub win: bool,
}

impl MagicRound {
    fn judge(i: usize, j: usize, alice: [i8; 3], bob: [i8; 3]) -> Self {
        let win = parity(&alice) == 1 && parity(&bob) == column_parity(j) && alice[j] == bob[i];
        MagicRound { i: i as u8 + 1, j: j as u8 + 1, alice, bob, win }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GameTranscript {
    pub strategy: String,
    pub seed: u64,
    pub rounds: Vec<MagicRound>,
    pub wins: u64,
    /// `wins / rounds`.
    pub value: Rational,
}

/// Round `r` uses ChaCha8 stream `r` of `seed`.
pub fn play_magic_square(strategy: &MagicStrategy, rounds: u64, seed: u64) -> Result<GameTranscript, ContextualityError> {
    if rounds == 0 {
        return Err(ContextualityError::InvalidParameter("at least one round is required".into()));
    }
    if let MagicStrategy::ClassicalDeterministic(t) = strategy {
        t.validate()?;
    }
    let mut out = Vec::with_capacity(rounds as usize);
    for r in 0..rounds {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(r);
        let (i, j) = (rng.random_range(0..3usize), rng.random_range(0..3usize));
        let round = match strategy {
            MagicStrategy::QuantumBell => {
                let dist = &quantum_tables()[3 * i + j];
                let probs: Vec<Rational> = dist.iter().map(|o| o.prob.clone()).collect();
                let o = &dist[sample_exact(&probs, &mut rng)];
                MagicRound::judge(i, j, o.alice, o.bob)
            }
            MagicStrategy::ClassicalDeterministic(t) => MagicRound::judge(i, j, t.alice[i], t.bob[j]),
        };
        out.push(round);
    }
    let wins = out.iter().filter(|r| r.win).count() as u64;
    let strategy = match strategy {
        MagicStrategy::QuantumBell => "quantum-bell".to_string(),
        MagicStrategy::ClassicalDeterministic(_) => "classical-deterministic".to_string(),
    };
    Ok(GameTranscript {
        strategy,
        seed,
        value: Rational::frac(wins as i64, rounds as i64),
        rounds: out,
        wins,
    })
}

// ---------------------------------------------------------------- memory game

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MemoryBob {
    QuantumQubit,
    /// A classical Bob with a budget of `N` automaton states.
    ClassicalBounded(BigUint),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MemoryRound {
    pub j: u32,
    pub k: u32,
    /// Yes instance `a^(i_yes * 2^k)` with `i_yes` even.
    pub i_yes: u64,
    pub i_no: u64,
    pub answer_yes: i8,
    pub answer_no: i8,
    /// Whether Bob's memory suffices for this `k`.
    pub informed: bool,
    /// Sampled `(A_y − A_n) / 2`.
    pub term: Rational,
    /// Exact expectation of `term`.
    pub expected_term: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InequalityReport {
    pub bob: String,
    pub q: u32,
    pub seed: u64,
    pub rounds: Vec<MemoryRound>,
    /// Sum of sampled terms.
    pub v: Rational,
    /// Sum of exact expected terms.
    pub expected_v: Rational,
}

/// Number of rounds `j ≤ q` with `2^(4j+1) ≤ n`: `min(q, ⌊(⌊log₂ n⌋ − 1)/4⌋)`.
pub fn classical_cutoff(n: &BigUint, q: u32) -> u32 {
    let log = n.bits().saturating_sub(1);
    (log.saturating_sub(1) / 4).min(q as u64) as u32
}

fn quantum_answer(k: u32, i: u64) -> i8 {
    let m = compile(&build_evenodd_mcqfa(k)).expect("builtin validates");
    let d = run_exact_unary(&m, &(BigInt::from(i) << k)).expect("unary MCQFA");
    assert!(d.p_accept.is_one() || d.p_reject.is_one(), "EVENODD MCQFA is deterministic on promised inputs");
    if d.p_accept.is_one() {
        1
    } else {
        -1
    }
}

/// Residue of the input length modulo `2^(k+1)`, as the `2^(k+1)`-state DFA computes it.
fn classical_answer(k: u32, i: u64) -> i8 {
    let len = BigInt::from(i) << k;
    let accept = if k <= CLASSICAL_EXPLICIT_MAX_K {
        let m = compile(&build_evenodd_dfa(k).expect("k within cap")).expect("builtin validates");
        run_exact_unary(&m, &len).expect("unary DFA").p_accept.is_one()
    } else {
        counter_accepts(k, &len)
    };
    if accept {
        1
    } else {
        -1
    }
}

fn counter_accepts(k: u32, len: &BigInt) -> bool {
    (len % (BigInt::one() << (k + 1))).is_zero()
}

/// Plays `q` rounds with `k = 4j`. Round `j` draws from ChaCha8 stream `j`.
pub fn memory_game(bob: &MemoryBob, q: u32, seed: u64) -> Result<InequalityReport, ContextualityError> {
    if q == 0 {
        return Err(ContextualityError::InvalidParameter("Q must be at least 1".into()));
    }
    if let MemoryBob::ClassicalBounded(n) = bob {
        if *n < BigUint::from(2u32) {
            return Err(ContextualityError::InvalidParameter("N must be at least 2".into()));
        }
    }
    let mut rounds = Vec::with_capacity(q as usize);
    for j in 1..=q {
        let k = 4 * j;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(j as u64);
        let i_yes = 2 * rng.random_range(0..I_RANGE);
        let i_no = 2 * rng.random_range(0..I_RANGE) + 1;
        let (informed, ay, an) = match bob {
            MemoryBob::QuantumQubit => (true, quantum_answer(k, i_yes), quantum_answer(k, i_no)),
            MemoryBob::ClassicalBounded(n) => {
                if (BigUint::one() << (k + 1)) <= *n {
                    (true, classical_answer(k, i_yes), classical_answer(k, i_no))
                } else {
                    let mut guess = || if rng.random_bool(0.5) { 1i8 } else { -1 };
                    let ay = guess();
                    (false, ay, guess())
                }
            }
        };
        rounds.push(MemoryRound {
            j,
            k,
            i_yes,
            i_no,
            answer_yes: ay,
            answer_no: an,
            informed,
            term: Rational::frac((ay - an) as i64, 2),
            expected_term: if informed { Rational::one() } else { Rational::zero() },
        });
    }
    let sum = |f: fn(&MemoryRound) -> &Rational| rounds.iter().fold(Rational::zero(), |acc, r| &acc + f(r));
    let v = sum(|r| &r.term);
    let expected_v = sum(|r| &r.expected_term);
    let bob = match bob {
        MemoryBob::QuantumQubit => "quantum-qubit".to_string(),
        MemoryBob::ClassicalBounded(n) => format!("classical-bounded(N={n})"),
    };
    Ok(InequalityReport { bob, q, seed, rounds, v, expected_v })
}

/// One line of the classical/quantum inequality summary.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub problem: String,
    pub model: String,
    pub memory: String,
    /// Formula as stated for rows that are reported rather than computed.
    pub value: String,
    pub exact: Option<Rational>,
}

/// Summary rows for a game of `q` rounds against a classical budget of
/// `n` states. Only the EVENODD rows are computed.
pub fn inequality_table(q: u32, n: &BigUint) -> Result<Vec<TableRow>, ContextualityError> {
    let classical = memory_game(&MemoryBob::ClassicalBounded(n.clone()), q, 0)?.expected_v;
    let quantum = memory_game(&MemoryBob::QuantumQubit, q, 0)?.expected_v;
    let row = |p: &str, m: &str, mem: &str, v: String, e: Option<Rational>| TableRow {
        problem: p.into(),
        model: m.into(),
        memory: mem.into(),
        value: v,
        exact: e,
    };
    Ok(vec![
        row("PAL", "classical 2PFA", "log n", "2^N/4".into(), None),
        row("EVENODD^k", "classical rtPFA", "2^(k+1)", "(log N - 1)/4".into(), Some(classical)),
        row("PromisePAL", "classical 2PFA", "log n", "2^N/4".into(), None),
        row("PAL", "2QCFA", "qubit", "Q - delta".into(), None),
        row("EVENODD^k", "realtime QFA", "qubit", "Q".into(), Some(quantum)),
        row("PromisePAL", "2QCFA", "qubit", "Q".into(), None),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_algebra() {
        let (x, y, z) = (pauli('X'), pauli('Y'), pauli('Z'));
        // ZX = iY
        assert_eq!(z.mul(&x).unwrap(), y.scale(&GaussianRational::i()));
        assert!(y.mul(&y).unwrap().is_identity());
    }

    #[test]
    fn embedding_preserves_products() {
        let a = pauli('Z').tensor(&pauli('X'));
        let b = pauli('X').tensor(&pauli('Z'));
        assert_eq!(alice_op(&a).mul(&alice_op(&b)).unwrap(), alice_op(&a.mul(&b).unwrap()));
        // Alice and Bob operators commute.
        assert_eq!(alice_op(&a).mul(&bob_op(&b)).unwrap(), bob_op(&b).mul(&alice_op(&a)).unwrap());
    }

    #[test]
    fn bell_state_normalised() {
        assert!(bell_bell_state().is_normalized());
    }

    #[test]
    fn sampler_respects_dyadic_weights() {
        let probs = [Rational::frac(1, 4), Rational::frac(3, 4)];
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = 20_000;
        let ones = (0..n).filter(|_| sample_exact(&probs, &mut rng) == 1).count();
        assert!((ones as f64 / n as f64 - 0.75).abs() < 0.02);
    }

    #[test]
    fn counter_agrees_with_dfa() {
        for k in 0..=6 {
            let m = compile(&build_evenodd_dfa(k).unwrap()).unwrap();
            for i in 0..12u64 {
                let len = BigInt::from(i) << k;
                assert_eq!(run_exact_unary(&m, &len).unwrap().p_accept.is_one(), counter_accepts(k, &len));
            }
        }
    }

    #[test]
    fn cutoff_formula() {
        assert_eq!(classical_cutoff(&(BigUint::one() << 33u32), 100), 8);
        assert_eq!(classical_cutoff(&(BigUint::one() << 9u32), 100), 2);
        assert_eq!(classical_cutoff(&BigUint::from(2u32), 100), 0);
        assert_eq!(classical_cutoff(&(BigUint::one() << 33u32), 3), 3);
    }
}
