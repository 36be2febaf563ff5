//! Builders for the concrete machines: the palindrome family over
//! `{a, b, c}`, the EQ phase machines, and the EVENODD pair.
//!
//! Branching machines share one coin on `¢`: `U_a` applied to `|q1>`
//! followed by a `{q1} | {q2, q3}` measurement selects branch 1 with
//! probability 16/25 and branch 2 with 9/25. Branch 2 starts from `|q2>`
//! and swaps back to `|q1>` on its first letter. Malformed inputs fall
//! into a `garbage` state that rejects at `$`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::exactnum::{Rational, SymbolicAngle};
use crate::machines::{compile, MachineError, MachineSpec, ModelClass, Move, QuantumStep, Symbol};
use crate::qstate::{Matrix, StateVector, UnitaryMatrix};

/// Largest `k` accepted by [`build_evenodd_dfa`]: `2^(k+1)` explicit states.
pub const EVENODD_DFA_MAX_K: u32 = 20;

const A: Symbol = Symbol::Letter('a');
const B: Symbol = Symbol::Letter('b');
const C: Symbol = Symbol::Letter('c');
const LETTERS: [Symbol; 2] = [A, B];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ConstructionId {
    AwPal,
    ExactPalSweeping,
    ExactTwinpal,
    LvExptwinpal,
    ExactExptwinpal,
    AwEqPhase,
    ExactEqRestarting,
    EvenoddMcqfa(u32),
    EvenoddDfa(u32),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("unknown construction `{0}`")]
    Unknown(String),
    #[error("{0} needs a parameter k")]
    MissingK(&'static str),
    #[error("EVENODD_DFA supports k <= {EVENODD_DFA_MAX_K}, got {0}")]
    KTooLarge(u32),
    #[error("machine measures or halts before $")]
    NotMatrixOnly,
    #[error(transparent)]
    Machine(#[from] MachineError),
}

impl ConstructionId {
    pub const NAMES: [&'static str; 9] = [
        "AW_PAL",
        "EXACT_PAL_SWEEPING",
        "EXACT_TWINPAL",
        "LV_EXPTWINPAL",
        "EXACT_EXPTWINPAL",
        "AW_EQ_PHASE",
        "EXACT_EQ_RESTARTING",
        "EVENODD_MCQFA",
        "EVENODD_DFA",
    ];

    /// Parses a bare name, taking `k` from the argument for the EVENODD ids.
    pub fn parse(name: &str, k: Option<u32>) -> Result<Self, ConstructionError> {
        let needs_k = |id: fn(u32) -> ConstructionId, n: &'static str| k.map(id).ok_or(ConstructionError::MissingK(n));
        Ok(match name.to_ascii_uppercase().as_str() {
            "AW_PAL" => ConstructionId::AwPal,
            "EXACT_PAL_SWEEPING" | "EXACT_PAL" => ConstructionId::ExactPalSweeping,
            "EXACT_TWINPAL" => ConstructionId::ExactTwinpal,
            "LV_EXPTWINPAL" => ConstructionId::LvExptwinpal,
            "EXACT_EXPTWINPAL" => ConstructionId::ExactExptwinpal,
            "AW_EQ_PHASE" | "AW_EQ" => ConstructionId::AwEqPhase,
            "EXACT_EQ_RESTARTING" | "EXACT_EQ" => ConstructionId::ExactEqRestarting,
            "EVENODD_MCQFA" => needs_k(ConstructionId::EvenoddMcqfa, "EVENODD_MCQFA")?,
            "EVENODD_DFA" => needs_k(ConstructionId::EvenoddDfa, "EVENODD_DFA")?,
            _ => return Err(ConstructionError::Unknown(name.to_string())),
        })
    }

    pub fn build(self) -> Result<MachineSpec, ConstructionError> {
        Ok(match self {
            ConstructionId::AwPal => build_aw_pal(),
            ConstructionId::ExactPalSweeping => build_exact_pal_sweeping(),
            ConstructionId::ExactTwinpal => build_exact_twinpal(),
            ConstructionId::LvExptwinpal => build_lv_exptwinpal(),
            ConstructionId::ExactExptwinpal => build_exact_exptwinpal(),
            ConstructionId::AwEqPhase => build_aw_eq_phase(),
            ConstructionId::ExactEqRestarting => build_exact_eq_restarting(),
            ConstructionId::EvenoddMcqfa(k) => build_evenodd_mcqfa(k),
            ConstructionId::EvenoddDfa(k) => build_evenodd_dfa(k)?,
        })
    }
}

impl fmt::Display for ConstructionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstructionId::EvenoddMcqfa(k) => write!(f, "EVENODD_MCQFA({k})"),
            ConstructionId::EvenoddDfa(k) => write!(f, "EVENODD_DFA({k})"),
            other => {
                let i = match other {
                    ConstructionId::AwPal => 0,
                    ConstructionId::ExactPalSweeping => 1,
                    ConstructionId::ExactTwinpal => 2,
                    ConstructionId::LvExptwinpal => 3,
                    ConstructionId::ExactExptwinpal => 4,
                    ConstructionId::AwEqPhase => 5,
                    _ => 6,
                };
                f.write_str(Self::NAMES[i])
            }
        }
    }
}

/// Accepts `NAME` or `NAME(k)`.
impl FromStr for ConstructionId {
    type Err = ConstructionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some((name, rest)) = s.split_once('(') {
            let k = rest
                .strip_suffix(')')
                .and_then(|k| k.trim().parse().ok())
                .ok_or_else(|| ConstructionError::Unknown(s.to_string()))?;
            ConstructionId::parse(name, Some(k))
        } else {
            ConstructionId::parse(s, None)
        }
    }
}

// ---------------------------------------------------------------------------
// Matrices

fn fifths(rows: &[&[i64]]) -> Matrix {
    Matrix::scaled_integers(&Rational::frac(1, 5), rows).expect("square integer rows")
}

/// `U_a`: a 3-4-5 rotation in the `q1, q2` plane.
pub fn u_a() -> Matrix {
    fifths(&[&[4, 3, 0], &[-3, 4, 0], &[0, 0, 5]])
}

/// `U_b`: a 3-4-5 rotation in the `q1, q3` plane.
pub fn u_b() -> Matrix {
    fifths(&[&[4, 0, 3], &[0, 5, 0], &[-3, 0, 4]])
}

fn u_sigma(sym: Symbol, inverse: bool) -> Matrix {
    let m = if sym == A { u_a() } else { u_b() };
    if inverse {
        m.adjoint()
    } else {
        m
    }
}

fn swap12() -> Matrix {
    Matrix::permutation(&[1, 0, 2])
}

fn pal_partition() -> Vec<Vec<usize>> {
    vec![vec![0], vec![1, 2]]
}

fn qubit_partition() -> Vec<Vec<usize>> {
    vec![vec![0], vec![1]]
}

fn pal_coin() -> QuantumStep {
    QuantumStep::unitary(u_a()).then_measure(pal_partition())
}

// ---------------------------------------------------------------------------
// Spec helpers

fn go(spec: &mut MachineSpec, state: &str, sym: Symbol, next: &str, mv: Move) {
    spec.state(state);
    spec.state(next);
    spec.set_all_outcomes(state, sym, next, mv);
}

fn act(spec: &mut MachineSpec, state: &str, sym: Symbol, step: QuantumStep, next: &str, mv: Move) {
    spec.set_quantum(state, sym, step);
    go(spec, state, sym, next, mv);
}

/// `U_sigma` (or its inverse) on every letter, staying in `state`.
fn pass(spec: &mut MachineSpec, state: &str, inverse: bool, mv: Move) {
    for s in LETTERS {
        act(spec, state, s, QuantumStep::unitary(u_sigma(s, inverse)), state, mv);
    }
}

fn skip(spec: &mut MachineSpec, state: &str, symbols: &[Symbol], mv: Move) {
    for &s in symbols {
        go(spec, state, s, state, mv);
    }
}

/// Measures `{q1} | rest` on `(state, sym)`: outcome 1 to `stay`,
/// outcome 2 to `decide`.
fn decide(spec: &mut MachineSpec, state: &str, sym: Symbol, blocks: Vec<Vec<usize>>, stay: (&str, Move), decide: (&str, Move)) {
    spec.state(state);
    spec.state(stay.0);
    spec.state(decide.0);
    spec.set_quantum(state, sym, QuantumStep::measure(blocks));
    spec.set_classical(state, sym, 1, stay.0, stay.1);
    spec.set_classical(state, sym, 2, decide.0, decide.1);
}

/// Fills every missing `(state, symbol)` of a realtime machine:
/// `¢` loops, letters fall into `garbage`, `$` goes to `at_end`.
fn fill_realtime(spec: &mut MachineSpec, at_end: &str) {
    let garbage = spec.state("garbage");
    let states: Vec<String> = spec.states.iter().filter(|s| !spec.is_halting(s)).cloned().collect();
    for s in &states {
        for sym in spec.symbols() {
            if spec.classical_delta.contains_key(&(s.clone(), sym, 1)) {
                continue;
            }
            let next = match sym {
                Symbol::LeftEnd => s.as_str(),
                Symbol::Letter(_) => garbage.as_str(),
                Symbol::RightEnd => at_end,
            };
            spec.set_all_outcomes(s, sym, next, Move::Right);
        }
    }
}

// ---------------------------------------------------------------------------
// Palindrome family

/// The two-pass palindrome test on `x c x`: `U_sigma` per letter of the
/// first copy, `U_sigma^-1` per letter of the second, then a
/// `{q1} | {q2, q3}` measurement on `$` (outcome 1 accepts).
pub fn build_aw_pal() -> MachineSpec {
    let mut spec = MachineSpec::new("AW_PAL", ModelClass::RtQcfa, &['a', 'b', 'c'], 3);
    go(&mut spec, "s1", Symbol::LeftEnd, "p1", Move::Right);
    add_aw_pal_fragment(&mut spec, "p1", "p2", None, Move::Right);
    decide(&mut spec, "p2", Symbol::RightEnd, pal_partition(), ("sa", Move::Right), ("sr", Move::Right));
    fill_realtime(&mut spec, "sr");
    spec
}

/// The palindrome fragment over `x c x`: state `first` applies `U_sigma`
/// until `c`, then `second` applies the inverses. The caller wires what
/// `second` does on the closing symbol, unless `after_c` names the
/// target of `second` on `c`.
pub fn add_aw_pal_fragment(spec: &mut MachineSpec, first: &str, second: &str, after_c: Option<&str>, mv: Move) {
    pass(spec, first, false, mv);
    go(spec, first, C, second, mv);
    pass(spec, second, true, mv);
    if let Some(next) = after_c {
        go(spec, second, C, next, mv);
    }
}

/// `w c w`, the input on which [`build_aw_pal`] tests `w`.
pub fn aw_pal_input(w: &str) -> String {
    format!("{w}c{w}")
}

/// Register state just before the measurement on `$`, for machines that
/// only apply matrices before `$`.
pub fn premeasurement_state(spec: &MachineSpec, input: &str) -> Result<StateVector, ConstructionError> {
    let m = compile(spec)?;
    let tape = m.tape(input)?;
    let mut state = m.initial;
    let mut v = StateVector::basis(m.quantum_dim(), 0);
    for (pos, &sym) in tape.iter().enumerate() {
        let step = m.quantum_step(state, sym);
        if let Some(u) = step.and_then(|s| s.unitary.as_ref()) {
            v = u.matrix().apply(&v).expect("dimension checked");
        }
        if pos + 1 == tape.len() {
            break;
        }
        if step.is_some_and(|s| s.measurement.is_some() || s.rotation.is_some()) {
            return Err(ConstructionError::NotMatrixOnly);
        }
        state = m.classical(state, sym, 1).expect("complete machine").0;
        if m.halting(state).is_some() {
            return Err(ConstructionError::NotMatrixOnly);
        }
    }
    Ok(v)
}

/// `U_w^-1 U_w |q1>` computed directly from the matrices, where `U_w`
/// is the product over `w` from left to right.
pub fn aw_pal_final_state(w: &str) -> StateVector {
    let mut v = StateVector::basis(3, 0);
    for pass_inverse in [false, true] {
        for ch in w.chars() {
            let sym = Symbol::Letter(ch);
            v = u_sigma(sym, pass_inverse).apply(&v).expect("3-dim");
        }
    }
    v
}

/// Restarting machine for `u c u c v c v`. Branch 1 (16/25) runs the
/// palindrome test on `v c v` and accepts on outcome 2; branch 2 (9/25)
/// runs it on `u c u` and rejects on outcome 2. Everything else restarts.
pub fn build_exact_twinpal() -> MachineSpec {
    let mut spec = MachineSpec::new("EXACT_TWINPAL", ModelClass::RestartingRtQcfa, &['a', 'b', 'c'], 3);
    let r = Move::Right;
    spec.set_quantum("s1", Symbol::LeftEnd, pal_coin());
    spec.state("b1_u1");
    spec.state("b2_fresh");
    spec.set_classical("s1", Symbol::LeftEnd, 1, "b1_u1", r);
    spec.set_classical("s1", Symbol::LeftEnd, 2, "b2_fresh", r);

    skip(&mut spec, "b1_u1", &LETTERS, r);
    go(&mut spec, "b1_u1", C, "b1_u2", r);
    skip(&mut spec, "b1_u2", &LETTERS, r);
    go(&mut spec, "b1_u2", C, "b1_v1", r);
    add_aw_pal_fragment(&mut spec, "b1_v1", "b1_v2", Some("garbage"), r);
    decide(&mut spec, "b1_v2", Symbol::RightEnd, pal_partition(), ("s1", r), ("sa", r));

    for s in LETTERS {
        let step = QuantumStep::unitary(u_sigma(s, false).mul(&swap12()).expect("3x3"));
        act(&mut spec, "b2_fresh", s, step, "b2_u1", r);
    }
    pass(&mut spec, "b2_u1", false, r);
    go(&mut spec, "b2_u1", C, "b2_u2", r);
    pass(&mut spec, "b2_u2", true, r);
    decide(&mut spec, "b2_u2", C, pal_partition(), ("b2_rest", r), ("sr", r));
    skip(&mut spec, "b2_rest", &[A, B, C], r);
    go(&mut spec, "b2_rest", Symbol::RightEnd, "s1", r);

    fill_realtime(&mut spec, "sr");
    spec
}

/// Both branches run once per block `u c u c v c v c`: branch 1 measures
/// at the fourth `c` of each block, branch 2 at the second. `end` is
/// where live branches go on `$`.
fn exptwinpal(name: &str, class: ModelClass, end: &str) -> MachineSpec {
    let mut spec = MachineSpec::new(name, class, &['a', 'b', 'c'], 3);
    let r = Move::Right;
    if end != "s1" {
        spec.with_dont_know(end);
    }
    spec.set_quantum("s1", Symbol::LeftEnd, pal_coin());
    spec.state("b1_u1");
    spec.state("b2_fresh");
    spec.set_classical("s1", Symbol::LeftEnd, 1, "b1_u1", r);
    spec.set_classical("s1", Symbol::LeftEnd, 2, "b2_fresh", r);

    skip(&mut spec, "b1_u1", &LETTERS, r);
    go(&mut spec, "b1_u1", C, "b1_u2", r);
    skip(&mut spec, "b1_u2", &LETTERS, r);
    go(&mut spec, "b1_u2", C, "b1_v1", r);
    add_aw_pal_fragment(&mut spec, "b1_v1", "b1_v2", None, r);
    decide(&mut spec, "b1_v2", C, pal_partition(), ("b1_u1", r), ("sa", r));

    for s in LETTERS {
        let step = QuantumStep::unitary(u_sigma(s, false).mul(&swap12()).expect("3x3"));
        act(&mut spec, "b2_fresh", s, step, "b2_u1", r);
    }
    add_aw_pal_fragment(&mut spec, "b2_u1", "b2_u2", None, r);
    decide(&mut spec, "b2_u2", C, pal_partition(), ("b2_v1", r), ("sr", r));
    skip(&mut spec, "b2_v1", &LETTERS, r);
    go(&mut spec, "b2_v1", C, "b2_v2", r);
    skip(&mut spec, "b2_v2", &LETTERS, r);
    go(&mut spec, "b2_v2", C, "b2_u1", r);

    for s in ["b1_u1", "b2_fresh", "b1_u2", "b1_v1", "b1_v2", "b2_u1", "b2_u2", "b2_v1", "b2_v2"] {
        go(&mut spec, s, Symbol::RightEnd, end, r);
    }
    fill_realtime(&mut spec, "sr");
    spec
}

/// Las Vegas machine for `(u c u c v c v c)^t`: a `don't know` state `sd`
/// absorbs whatever is undecided at `$`.
pub fn build_lv_exptwinpal() -> MachineSpec {
    exptwinpal("LV_EXPTWINPAL", ModelClass::RtQcfa, "sd")
}

/// [`build_lv_exptwinpal`] restarted instead of answering `don't know`.
pub fn build_exact_exptwinpal() -> MachineSpec {
    exptwinpal("EXACT_EXPTWINPAL", ModelClass::RestartingRtQcfa, "s1")
}

/// Sweeping machine for `u c v`. One iteration is four sweeps. Branch 1
/// applies `U_sigma` on `v` going right, walks back, applies the
/// inverses on `v`, and measures on `$`. Branch 2 does the same on `u`
/// and measures on `c`. `s1` is the leftward sweep that ends every
/// iteration and flips the coin on `¢`.
pub fn build_exact_pal_sweeping() -> MachineSpec {
    let mut spec = MachineSpec::new("EXACT_PAL_SWEEPING", ModelClass::Sweeping2Qcfa, &['a', 'b', 'c'], 3);
    let (l, r) = (Move::Left, Move::Right);
    let all = [A, B, C];
    let garbage = spec.state("garbage");

    skip(&mut spec, "s1", &all, l);
    go(&mut spec, "s1", Symbol::RightEnd, "s1", l);
    spec.set_quantum("s1", Symbol::LeftEnd, pal_coin());
    spec.state("b1_skip1");
    spec.state("b2_fresh");
    spec.set_classical("s1", Symbol::LeftEnd, 1, "b1_skip1", r);
    spec.set_classical("s1", Symbol::LeftEnd, 2, "b2_fresh", r);

    skip(&mut spec, "b1_skip1", &LETTERS, r);
    go(&mut spec, "b1_skip1", C, "b1_p1", r);
    pass(&mut spec, "b1_p1", false, r);
    go(&mut spec, "b1_p1", C, &garbage, r);
    go(&mut spec, "b1_p1", Symbol::RightEnd, "b1_back", l);
    skip(&mut spec, "b1_back", &all, l);
    go(&mut spec, "b1_back", Symbol::LeftEnd, "b1_skip2", r);
    skip(&mut spec, "b1_skip2", &LETTERS, r);
    go(&mut spec, "b1_skip2", C, "b1_p2", r);
    pass(&mut spec, "b1_p2", true, r);
    go(&mut spec, "b1_p2", C, &garbage, r);
    decide(&mut spec, "b1_p2", Symbol::RightEnd, pal_partition(), ("s1", l), ("sa", r));

    for s in LETTERS {
        let step = QuantumStep::unitary(u_sigma(s, false).mul(&swap12()).expect("3x3"));
        act(&mut spec, "b2_fresh", s, step, "b2_p1", r);
    }
    act(&mut spec, "b2_fresh", C, QuantumStep::unitary(swap12()), "b2_rest1", r);
    pass(&mut spec, "b2_p1", false, r);
    go(&mut spec, "b2_p1", C, "b2_rest1", r);
    skip(&mut spec, "b2_rest1", &LETTERS, r);
    go(&mut spec, "b2_rest1", C, &garbage, r);
    go(&mut spec, "b2_rest1", Symbol::RightEnd, "b2_back", l);
    skip(&mut spec, "b2_back", &all, l);
    go(&mut spec, "b2_back", Symbol::LeftEnd, "b2_p2", r);
    pass(&mut spec, "b2_p2", true, r);
    decide(&mut spec, "b2_p2", C, pal_partition(), ("b2_rest2", r), ("sr", r));
    skip(&mut spec, "b2_rest2", &LETTERS, r);
    go(&mut spec, "b2_rest2", C, &garbage, r);
    go(&mut spec, "b2_rest2", Symbol::RightEnd, "s1", l);

    skip(&mut spec, &garbage, &all, r);
    // Remaining end-marker squares: rightward states reject on `$` and
    // restart their sweep on `¢`.
    let states: Vec<String> = spec.states.iter().filter(|s| !spec.is_halting(s)).cloned().collect();
    for s in &states {
        for sym in [Symbol::LeftEnd, Symbol::RightEnd] {
            if !spec.classical_delta.contains_key(&(s.clone(), sym, 1)) {
                let (next, mv) = if sym == Symbol::LeftEnd { (s.as_str(), r) } else { ("sr", r) };
                spec.set_all_outcomes(s, sym, next, mv);
            }
        }
    }
    spec
}

// ---------------------------------------------------------------------------
// EQ family

/// Per-letter phase: `+sqrt(2) pi` in the first `a` block, `-sqrt(2) pi`
/// in the second.
pub fn eq_angle(sign: i64) -> SymbolicAngle {
    SymbolicAngle::sqrt2_pi(Rational::from_integer(sign))
}

/// Phase machine for `a^m b a^n`: the register ends at angle
/// `(m - n) sqrt(2) pi`, so outcome 2 has probability `sin^2` of that.
/// Outcome 1 accepts.
pub fn build_aw_eq_phase() -> MachineSpec {
    let mut spec = MachineSpec::new("AW_EQ_PHASE", ModelClass::RtQcfa, &['a', 'b'], 2);
    let r = Move::Right;
    go(&mut spec, "s1", Symbol::LeftEnd, "blk1", r);
    act(&mut spec, "blk1", A, QuantumStep::rotation(eq_angle(1)), "blk1", r);
    go(&mut spec, "blk1", B, "blk2", r);
    act(&mut spec, "blk2", A, QuantumStep::rotation(eq_angle(-1)), "blk2", r);
    decide(&mut spec, "blk2", Symbol::RightEnd, qubit_partition(), ("sa", r), ("sr", r));
    fill_realtime(&mut spec, "sr");
    spec
}

/// Restarting machine for `a^p b a^q b a^r`. After a 16/25 coin, branch 1
/// compares blocks 1 and 3 and accepts on outcome 2; branch 2 compares
/// blocks 1 and 2 and rejects on outcome 2.
pub fn build_exact_eq_restarting() -> MachineSpec {
    let mut spec = MachineSpec::new("EXACT_EQ_RESTARTING", ModelClass::RestartingRtQcfa, &['a', 'b'], 2);
    let r = Move::Right;
    let coin = Matrix::scaled_integers(&Rational::frac(1, 5), &[&[4, -3], &[3, 4]]).expect("2x2");
    spec.set_quantum("s1", Symbol::LeftEnd, QuantumStep::unitary(coin).then_measure(qubit_partition()));
    spec.state("b1_blk1");
    spec.state("b2_fresh");
    spec.set_classical("s1", Symbol::LeftEnd, 1, "b1_blk1", r);
    spec.set_classical("s1", Symbol::LeftEnd, 2, "b2_fresh", r);

    act(&mut spec, "b1_blk1", A, QuantumStep::rotation(eq_angle(1)), "b1_blk1", r);
    go(&mut spec, "b1_blk1", B, "b1_blk2", r);
    skip(&mut spec, "b1_blk2", &[A], r);
    go(&mut spec, "b1_blk2", B, "b1_blk3", r);
    act(&mut spec, "b1_blk3", A, QuantumStep::rotation(eq_angle(-1)), "b1_blk3", r);
    decide(&mut spec, "b1_blk3", Symbol::RightEnd, qubit_partition(), ("s1", r), ("sa", r));

    let x = Matrix::permutation(&[1, 0]);
    let reset_and_turn = QuantumStep { unitary: Some(x.clone()), rotation: Some(eq_angle(1)), measurement: None };
    act(&mut spec, "b2_fresh", A, reset_and_turn, "b2_blk1", r);
    act(&mut spec, "b2_fresh", B, QuantumStep::unitary(x), "b2_blk2", r);
    act(&mut spec, "b2_blk1", A, QuantumStep::rotation(eq_angle(1)), "b2_blk1", r);
    go(&mut spec, "b2_blk1", B, "b2_blk2", r);
    act(&mut spec, "b2_blk2", A, QuantumStep::rotation(eq_angle(-1)), "b2_blk2", r);
    decide(&mut spec, "b2_blk2", B, qubit_partition(), ("b2_rest", r), ("sr", r));
    skip(&mut spec, "b2_rest", &[A], r);
    go(&mut spec, "b2_rest", Symbol::RightEnd, "s1", r);

    fill_realtime(&mut spec, "sr");
    spec
}

// ---------------------------------------------------------------------------
// EVENODD

/// Two-state MCQFA: each `a` turns the qubit by `pi / 2^(k+1)`; on `$`
/// outcome 1 (`|q1>`) accepts, meaning "i is even".
pub fn build_evenodd_mcqfa(k: u32) -> MachineSpec {
    let mut spec = MachineSpec::new(&format!("EVENODD_MCQFA({k})"), ModelClass::Mcqfa, &['a'], 2);
    let r = Move::Right;
    go(&mut spec, "s1", Symbol::LeftEnd, "s1", r);
    act(&mut spec, "s1", Symbol::Letter('a'), QuantumStep::rotation(SymbolicAngle::pi_over_pow2(k as u64 + 1)), "s1", r);
    decide(&mut spec, "s1", Symbol::RightEnd, qubit_partition(), ("sa", r), ("sr", r));
    spec
}

/// Counter DFA modulo `2^(k+1)` with states `r0 .. r{2^(k+1)-1}`
/// (`r0` is the initial state); accepts iff the residue is below `2^k`.
pub fn build_evenodd_dfa(k: u32) -> Result<MachineSpec, ConstructionError> {
    if k > EVENODD_DFA_MAX_K {
        return Err(ConstructionError::KTooLarge(k));
    }
    let size = 1usize << (k + 1);
    let half = size / 2;
    let mut spec = MachineSpec::new(&format!("EVENODD_DFA({k})"), ModelClass::RtDfa, &['a'], 1);
    let names: Vec<String> = (0..size).map(|i| format!("r{i}")).collect();
    spec.states = names.clone();
    spec.states.extend(["sa".to_string(), "sr".to_string()]);
    spec.initial = names[0].clone();
    let r = Move::Right;
    for (i, s) in names.iter().enumerate() {
        spec.set_classical(s, Symbol::LeftEnd, 1, s, r);
        spec.set_classical(s, Symbol::Letter('a'), 1, &names[(i + 1) % size], r);
        spec.set_classical(s, Symbol::RightEnd, 1, if i < half { "sa" } else { "sr" }, r);
    }
    Ok(spec)
}

/// `u_a` and friends as unitary matrices, for callers that want them checked.
pub fn pal_unitaries() -> (UnitaryMatrix, UnitaryMatrix) {
    (UnitaryMatrix::new(u_a()).expect("unitary"), UnitaryMatrix::new(u_b()).expect("unitary"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machines::validate;

    fn all_ids() -> Vec<ConstructionId> {
        let mut v = vec![
            ConstructionId::AwPal,
            ConstructionId::ExactPalSweeping,
            ConstructionId::ExactTwinpal,
            ConstructionId::LvExptwinpal,
            ConstructionId::ExactExptwinpal,
            ConstructionId::AwEqPhase,
            ConstructionId::ExactEqRestarting,
        ];
        for k in [0, 1, 3, 16] {
            v.push(ConstructionId::EvenoddMcqfa(k));
        }
        for k in [0, 1, 5] {
            v.push(ConstructionId::EvenoddDfa(k));
        }
        v
    }

    #[test]
    fn every_builder_validates() {
        for id in all_ids() {
            let spec = id.build().unwrap();
            let v = validate(&spec);
            assert!(v.is_empty(), "{id}: {v:?}");
        }
    }

    #[test]
    fn ids_round_trip_through_names() {
        for id in all_ids() {
            assert_eq!(id.to_string().parse::<ConstructionId>().unwrap(), id);
        }
        assert!(matches!("EVENODD_DFA(25)".parse::<ConstructionId>().unwrap().build(), Err(ConstructionError::KTooLarge(25))));
        assert!("NOPE".parse::<ConstructionId>().is_err());
        assert!(matches!(ConstructionId::parse("EVENODD_MCQFA", None), Err(ConstructionError::MissingK(_))));
    }

    #[test]
    fn u_a_first_column_and_unitarity() {
        let (ua, ub) = pal_unitaries();
        assert_eq!(ua.matrix().get(1, 0).re, Rational::frac(-3, 5));
        assert_eq!(ub.matrix().get(2, 0).re, Rational::frac(-3, 5));
    }

    #[test]
    fn evenodd_dfa_counts_states() {
        let spec = build_evenodd_dfa(1).unwrap();
        assert_eq!(spec.working_state_count(), 4);
    }

    #[test]
    fn machine_and_direct_final_states_agree() {
        let spec = build_aw_pal();
        for w in ["", "a", "ab", "aba", "abba", "abbb", "babaa"] {
            assert_eq!(premeasurement_state(&spec, &aw_pal_input(w)).unwrap(), aw_pal_final_state(w), "{w}");
        }
    }
}
