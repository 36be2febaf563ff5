//! Verification suites: each check recomputes a claimed bound from the
//! constructions and reports exact values alongside a pass flag.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::One;
use serde::Serialize;

use crate::analysis::{analyze_restarting, analyze_restarting_certified, run_exact_realtime, run_exact_unary};
use crate::constructions::*;
use crate::contextuality::*;
use crate::exactnum::{angle_probability, one_minus_inv_e_bracket, one_minus_inv_e_lower, Rational, SymbolicAngle};
use crate::machines::{compile, MachineSpec, ModelClass, Move, Symbol};
use crate::problems::*;
use crate::qstate::StateVector;

/// Constant for the EQ expected-round fit: the no-branch weight `9/25`
/// combined with `sin² ≥ 1/(2d²)` gives `expected_rounds ≤ (50/9)·d²`.
pub fn eq_fit_constant() -> Rational {
    Rational::frac(50, 9)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub criterion: u8,
    pub name: String,
    pub passed: bool,
    /// Number of cases examined.
    pub cases: u64,
    pub values: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
}

impl CheckResult {
    fn new(criterion: u8, name: &str) -> Self {
        CheckResult { criterion, name: name.into(), passed: true, cases: 0, values: BTreeMap::new(), counterexample: None }
    }

    fn value(mut self, key: &str, v: impl fmt::Display) -> Self {
        self.values.insert(key.into(), v.to_string());
        self
    }

    /// Records the first failure only.
    fn fail(&mut self, why: String) {
        if self.passed {
            self.counterexample = Some(why);
        }
        self.passed = false;
    }

    pub fn line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        let vals: Vec<String> = self.values.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let mut s = format!("[{status}] criterion {}: {} ({} cases) {}", self.criterion, self.name, self.cases, vals.join(" "));
        if let Some(c) = &self.counterexample {
            s.push_str(&format!(" counterexample: {c}"));
        }
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    AwPal,
    Twinpal,
    LasVegas,
    Eq,
    EvenOdd,
    Witnesses,
    Contextuality,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 8] = ["awpal", "twinpal", "lasvegas", "eq", "evenodd", "witnesses", "contextuality", "all"];
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "awpal" => Suite::AwPal,
            "twinpal" => Suite::Twinpal,
            "lasvegas" => Suite::LasVegas,
            "eq" => Suite::Eq,
            "evenodd" => Suite::EvenOdd,
            "witnesses" => Suite::Witnesses,
            "contextuality" => Suite::Contextuality,
            "all" => Suite::All,
            _ => return Err(format!("unknown suite `{s}` (expected one of {})", Suite::NAMES.join(", "))),
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = [Suite::AwPal, Suite::Twinpal, Suite::LasVegas, Suite::Eq, Suite::EvenOdd, Suite::Witnesses, Suite::Contextuality, Suite::All]
            .iter()
            .position(|s| s == self)
            .expect("listed");
        f.write_str(Suite::NAMES[i])
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

/// Runs a suite at the default sizes. `workers` splits exhaustive loops.
pub fn run_suite(suite: Suite, workers: usize) -> SuiteReport {
    let checks = match suite {
        Suite::AwPal => vec![check_awpal_palindromes(11, workers), check_awpal_bound(9, workers)],
        Suite::Twinpal => vec![check_twinpal(3, workers)],
        Suite::LasVegas => vec![check_lasvegas(&[1, 2], workers)],
        Suite::Eq => vec![check_eq_bound(10_000, 64, workers), check_eq_scaling(8)],
        Suite::EvenOdd => vec![check_evenodd(16, 100, 10)],
        Suite::Witnesses => vec![check_witnesses(6, 50, 5)],
        Suite::Contextuality => vec![check_magic_square(10_000, 2024), check_memory_game(8)],
        Suite::All => {
            let all = [Suite::AwPal, Suite::Twinpal, Suite::LasVegas, Suite::Eq, Suite::EvenOdd, Suite::Witnesses, Suite::Contextuality];
            all.iter().flat_map(|&s| run_suite(s, workers).checks).collect()
        }
    };
    SuiteReport { suite, passed: checks.iter().all(|c| c.passed), checks }
}

/// Order-preserving parallel map over contiguous chunks.
fn par_map<T: Sync, R: Send>(items: &[T], workers: usize, f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let workers = workers.clamp(1, items.len().max(1));
    if workers == 1 {
        return items.iter().map(f).collect();
    }
    let per = items.len().div_ceil(workers);
    std::thread::scope(|s| {
        let f = &f;
        let handles: Vec<_> = items.chunks(per).map(|c| s.spawn(move || c.iter().map(f).collect::<Vec<R>>())).collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

fn all_words(max_len: usize) -> Vec<String> {
    (0..=max_len).flat_map(words).collect()
}

fn pow25_inv(e: usize) -> Rational {
    Rational::from_integer(25).pow(-(e as i64)).expect("nonzero base")
}

// ---------------------------------------------------------------- criterion 1, 2

pub fn check_awpal_palindromes(max_len: usize, workers: usize) -> CheckResult {
    let mut r = CheckResult::new(1, "AW_PAL palindromes end in |q1>").value("max_len", max_len);
    let pals: Vec<String> = all_words(max_len).into_iter().filter(|w| is_palindrome(w)).collect();
    let e1 = StateVector::basis(3, 0);
    let ok = par_map(&pals, workers, |w| aw_pal_final_state(w) == e1);
    r.cases = pals.len() as u64;
    if let Some(i) = ok.iter().position(|&b| !b) {
        r.fail(format!("w = {:?}", pals[i]));
    }
    r
}

pub fn check_awpal_bound(max_len: usize, workers: usize) -> CheckResult {
    let mut r = CheckResult::new(2, "AW_PAL non-palindromes detected w.p. >= 25^-|w|").value("max_len", max_len);
    let m = compile(&build_aw_pal()).expect("builtin validates");
    let words: Vec<String> = all_words(max_len).into_iter().filter(|w| !is_palindrome(w)).collect();
    let res = par_map(&words, workers, |w| {
        let d = run_exact_realtime(&m, &aw_pal_input(w)).expect("exact run");
        let bound = pow25_inv(w.len());
        let ratio = d.p_reject.checked_div(&bound).expect("nonzero bound");
        (d.p_reject >= bound, ratio)
    });
    r.cases = words.len() as u64;
    let min_ratio = res.iter().map(|(_, q)| q.clone()).min();
    if let Some(q) = min_ratio {
        r = r.value("min_ratio_to_bound", q.to_decimal_string(6));
    }
    if let Some(i) = res.iter().position(|(ok, _)| !ok) {
        r.fail(format!("w = {:?}", words[i]));
    }
    r
}

// ---------------------------------------------------------------- criterion 3

pub fn check_twinpal(max_len: usize, workers: usize) -> CheckResult {
    let mut r = CheckResult::new(3, "EXACT_TWINPAL decides every promise instance with certainty").value("max_len", max_len);
    let m = compile(&build_exact_twinpal()).expect("builtin validates");
    let mut instances = Vec::new();
    for n in 1..=max_len {
        for u in words(n) {
            for v in words(n) {
                let s = format!("{u}c{u}c{v}c{v}");
                let status = membership(Problem::PromiseTwinpal, &s);
                if status != Status::OutsidePromise {
                    instances.push((u.clone(), v.clone(), s, status));
                }
            }
        }
    }
    let res = par_map(&instances, workers, |(u, v, s, status)| -> Result<(), String> {
        let a = analyze_restarting(&m, s).map_err(|e| e.to_string())?;
        let (overall, p, bound) = if *status == Status::Yes {
            (&a.overall_accept, &a.per_round.p_accept, &Rational::from_integer(16) * &pow25_inv(v.len() + 1))
        } else {
            (&a.overall_reject, &a.per_round.p_reject, &Rational::from_integer(9) * &pow25_inv(u.len() + 1))
        };
        if !overall.is_one() {
            return Err(format!("{s}: overall = {overall}"));
        }
        if *p < bound {
            return Err(format!("{s}: per-round {p} < {bound}"));
        }
        Ok(())
    });
    r.cases = instances.len() as u64;
    r = r
        .value("yes", instances.iter().filter(|i| i.3 == Status::Yes).count())
        .value("no", instances.iter().filter(|i| i.3 == Status::No).count());
    if let Some(Err(e)) = res.into_iter().find(Result::is_err) {
        r.fail(e);
    }
    r
}

// ---------------------------------------------------------------- criterion 4

pub fn check_lasvegas(u_lens: &[usize], workers: usize) -> CheckResult {
    let mut r = CheckResult::new(4, "LV_EXPTWINPAL bounds with zero wrong answers");
    let m = compile(&build_lv_exptwinpal()).expect("builtin validates");
    let c = one_minus_inv_e_lower();
    if c >= one_minus_inv_e_bracket().lo {
        r.fail("0.632 is not below the certified bracket of 1 - 1/e".into());
    }
    let yes_bound = &Rational::frac(16, 25) * &c;
    let no_bound = &Rational::frac(9, 25) * &c;
    let mut instances = Vec::new();
    for &n in u_lens {
        let t = 25usize.pow(n as u32);
        for u in words(n) {
            for v in words(n) {
                let s = exp_twinpal_string(&u, &v, t);
                let status = membership(Problem::ExpPromiseTwinpal, &s);
                if status != Status::OutsidePromise {
                    instances.push((n, s, status));
                }
            }
        }
    }
    let res = par_map(&instances, workers, |(_, s, status)| run_exact_realtime(&m, s).map(|d| (d, *status)));
    r.cases = instances.len() as u64;
    let mut min_yes: Option<Rational> = None;
    let mut min_no: Option<Rational> = None;
    for ((n, s, _), d) in instances.iter().zip(res) {
        let (d, status) = match d {
            Ok(x) => x,
            Err(e) => {
                r.fail(format!("|u| = {n}: {e}"));
                continue;
            }
        };
        let (right, wrong, bound, slot) = match status {
            Status::Yes => (&d.p_accept, &d.p_reject, &yes_bound, &mut min_yes),
            _ => (&d.p_reject, &d.p_accept, &no_bound, &mut min_no),
        };
        if !wrong.is_zero() || right < bound {
            r.fail(format!("|u| = {n}, |w| = {}: right = {}, wrong = {wrong}", s.len(), right.to_decimal_string(6)));
        }
        *slot = Some(slot.take().map_or(right.clone(), |x: Rational| x.min(right.clone())));
    }
    let show = |x: &Option<Rational>| x.as_ref().map_or("none".into(), |q| q.to_decimal_string(6));
    r.value("min_p_accept_yes", show(&min_yes))
        .value("min_p_reject_no", show(&min_no))
        .value("yes_bound", yes_bound.to_decimal_string(6))
        .value("no_bound", no_bound.to_decimal_string(6))
}

// ---------------------------------------------------------------- criterion 5, 6

pub fn check_eq_bound(max_c: u64, bits: u32, workers: usize) -> CheckResult {
    let mut r = CheckResult::new(5, "sin^2(c pi sqrt2) >= 1/(2c^2)").value("max_c", max_c).value("bits", bits);
    let cs: Vec<u64> = (1..=max_c).collect();
    let res = par_map(&cs, workers, |&c| {
        let p = angle_probability(&SymbolicAngle::sqrt2_pi(Rational::from_integer(c)), bits).lower();
        let bound = Rational::new(1, 2 * BigInt::from(c) * BigInt::from(c)).expect("positive");
        (p.checked_div(&bound).expect("positive"), p >= bound)
    });
    r.cases = cs.len() as u64;
    if let Some((i, (ratio, _))) = res.iter().enumerate().min_by(|a, b| a.1 .0.cmp(&b.1 .0)) {
        r = r.value("tightest_c", cs[i]).value("min_ratio", ratio.to_decimal_string(6));
    }
    if let Some(i) = res.iter().position(|(_, ok)| !ok) {
        r.fail(format!("c = {}", cs[i]));
    }
    r
}

pub fn check_eq_scaling(max_d: u64) -> CheckResult {
    let c = eq_fit_constant();
    let mut r = CheckResult::new(6, "EXACT_EQ_RESTARTING expected rounds <= C (m-n)^2").value("C", &c);
    let m = compile(&build_exact_eq_restarting()).expect("builtin validates");
    let mut fitted = Rational::zero();
    for d in 1..=max_d {
        let far = "a".repeat(1 + d as usize);
        for (s, yes) in [(format!("abab{far}"), true), (format!("ab{far}ba"), false)] {
            r.cases += 1;
            let a = match analyze_restarting_certified(&m, &s, 64) {
                Ok(a) => a,
                Err(e) => {
                    r.fail(format!("{s}: {e}"));
                    continue;
                }
            };
            let decided = if yes { &a.overall_accept } else { &a.overall_reject };
            if !decided.as_point().is_some_and(Rational::is_one) {
                r.fail(format!("{s}: not decided with certainty"));
            }
            let d2 = Rational::from_integer(d * d);
            let ratio = a.expected_rounds.hi.checked_div(&d2).expect("positive");
            if ratio > c {
                r.fail(format!("{s}: expected_rounds <= {} exceeds C d^2", a.expected_rounds.hi.to_decimal_string(6)));
            }
            r.values.insert(format!("rounds_d{d}_{}", if yes { "yes" } else { "no" }), a.expected_rounds.hi.to_decimal_string(6));
            fitted = fitted.max(ratio);
        }
    }
    r.value("fitted_C", fitted.to_decimal_string(6))
}

// ---------------------------------------------------------------- criterion 7

/// Unary counter DFA with `len` states accepting when the length is `0 mod len`.
pub fn counter_dfa(len: usize) -> MachineSpec {
    let mut spec = MachineSpec::new(&format!("COUNTER({len})"), ModelClass::RtDfa, &['a'], 1);
    let name = |i: usize| if i == 0 { "s1".to_string() } else { format!("r{i}") };
    for i in 0..len {
        spec.state(&name(i));
    }
    for i in 0..len {
        spec.set_classical(&name(i), Symbol::LeftEnd, 1, &name(i), Move::Right);
        spec.set_classical(&name(i), Symbol::Letter('a'), 1, &name((i + 1) % len), Move::Right);
        spec.set_classical(&name(i), Symbol::RightEnd, 1, if i == 0 { "sa" } else { "sr" }, Move::Right);
    }
    spec
}

pub fn check_evenodd(max_k: u32, max_i: u64, dfa_max_k: u32) -> CheckResult {
    let mut r = CheckResult::new(7, "EVENODD MCQFA exact, DFA cycle check, counterexamples")
        .value("max_k", max_k)
        .value("max_i", max_i)
        .value("dfa_max_k", dfa_max_k);
    for k in 0..=max_k {
        let m = compile(&build_evenodd_mcqfa(k)).expect("builtin validates");
        for i in 0..=max_i {
            r.cases += 1;
            let d = run_exact_unary(&m, &(BigInt::from(i) << k)).expect("unary run");
            let want = if i % 2 == 0 { &d.p_accept } else { &d.p_reject };
            if !want.is_one() {
                r.fail(format!("MCQFA k = {k}, i = {i}"));
            }
        }
    }
    for k in 0..=dfa_max_k {
        r.cases += 1;
        let dfa = build_evenodd_dfa(k).expect("within cap");
        if !matches!(unary_cycle_check(&dfa, k), Ok(CycleVerdict::Solves { .. })) {
            r.fail(format!("DFA k = {k} fails its own cycle check"));
        }
    }
    // Counters whose length is not a multiple of 2^(k+1) must be refuted.
    let mut refuted = 0u64;
    for k in 0..=4u32 {
        let full = 1usize << (k + 1);
        for len in (1..=2 * full + 3).filter(|l| l % full != 0) {
            r.cases += 1;
            let spec = counter_dfa(len);
            match unary_cycle_check(&spec, k) {
                Ok(CycleVerdict::FailsWithCounterexample { i, .. }) => {
                    let m = compile(&spec).expect("valid counter");
                    let got = run_exact_unary(&m, &(BigInt::from(i) << k)).expect("unary run").p_accept.is_one();
                    if got == (i % 2 == 0) {
                        r.fail(format!("counter {len}, k = {k}: i = {i} is not a counterexample"));
                    }
                    refuted += 1;
                }
                other => r.fail(format!("counter {len}, k = {k}: {other:?}")),
            }
        }
    }
    r.value("refuted_dfas", refuted)
}

// ---------------------------------------------------------------- criterion 8, 9

pub fn check_magic_square(rounds: u64, seed: u64) -> CheckResult {
    let mut r = CheckResult::new(8, "magic square bounds");
    let grid = ObservableGrid::peres_mermin().check();
    if !grid.all_hold() {
        r.fail(format!("grid identities: {grid:?}"));
    }
    let chi_c = max_classical_chi();
    let chi_q = quantum_chi();
    let game = match play_magic_square(&MagicStrategy::QuantumBell, rounds, seed) {
        Ok(g) => g,
        Err(e) => {
            r.fail(e.to_string());
            return r;
        }
    };
    let best = best_classical_win_probability();
    r.cases = 512 + 4096 + rounds;
    if chi_c != 4 {
        r.fail(format!("classical chi max = {chi_c}"));
    }
    if chi_q != Rational::from_integer(6) {
        r.fail(format!("quantum chi = {chi_q}"));
    }
    if game.wins != rounds {
        r.fail(format!("quantum game lost {} rounds", rounds - game.wins));
    }
    if best != Rational::frac(8, 9) {
        r.fail(format!("classical win max = {best}"));
    }
    r.value("classical_chi_max", chi_c)
        .value("quantum_chi", chi_q)
        .value("quantum_wins", format!("{}/{}", game.wins, rounds))
        .value("classical_win_max", best)
}

pub fn check_memory_game(max_q: u32) -> CheckResult {
    let mut r = CheckResult::new(9, "memory game V values").value("max_q", max_q);
    for q in 1..=max_q {
        r.cases += 1;
        match memory_game(&MemoryBob::QuantumQubit, q, q as u64) {
            Ok(rep) if rep.v == Rational::from_integer(q) && rep.expected_v == rep.v => {}
            Ok(rep) => r.fail(format!("quantum Q = {q}: V = {}", rep.v)),
            Err(e) => r.fail(e.to_string()),
        }
    }
    let budgets: Vec<BigUint> = (1u32..=40)
        .map(|b| BigUint::one() << b)
        .chain([1000u64, 3 << 20, (1 << 33) - 1].into_iter().map(BigUint::from))
        .collect();
    for n in &budgets {
        r.cases += 1;
        let log2 = n.bits() - 1;
        let cutoff = ((log2.saturating_sub(1)) / 4).min(max_q as u64);
        match memory_game(&MemoryBob::ClassicalBounded(n.clone()), max_q, 1) {
            Ok(rep) => {
                if rep.expected_v != Rational::from_integer(cutoff) {
                    r.fail(format!("N = {n}: expected V = {} but cutoff is {cutoff}", rep.expected_v));
                }
                // 4 cutoff + 1 <= floor(log2 N) <= log2 N, so the real bound holds.
                if 4 * cutoff + 1 > log2 && cutoff > 0 {
                    r.fail(format!("N = {n}: cutoff {cutoff} exceeds (log2 N - 1)/4"));
                }
            }
            Err(e) => r.fail(e.to_string()),
        }
    }
    let n33 = BigUint::one() << 33u32;
    let v33 = memory_game(&MemoryBob::ClassicalBounded(n33.clone()), max_q, 1).map(|x| x.expected_v.to_string()).unwrap_or_default();
    r.value("classical_expected_V_N_2^33", v33)
}

// ---------------------------------------------------------------- criterion 10

pub fn check_witnesses(pal_m: usize, eq_m: usize, twin_len: usize) -> CheckResult {
    let mut r = CheckResult::new(10, "dissimilarity witnesses and twin expansion")
        .value("pal_m", pal_m)
        .value("eq_m", eq_m)
        .value("twin_len", twin_len);
    let mut pairs = 0u64;
    for (problem, max_m) in [(Problem::PromisePal, pal_m), (Problem::PromiseEq, eq_m)] {
        for m in 1..=max_m {
            match build_dissimilarity_witness(problem, m).map(|set| verify_witness(&set)) {
                Ok(Ok(n)) => pairs += n as u64,
                Ok(Err((i, j))) => r.fail(format!("{problem} m = {m}: pair ({i}, {j}) not separated")),
                Err(e) => r.fail(e.to_string()),
            }
        }
    }
    let ws = all_words(twin_len);
    let mut expanded = 0u64;
    for u in &ws {
        for v in &ws {
            let w = format!("{u}c{v}");
            let before = membership(Problem::PromisePal, &w);
            let after = twin_expand(&w).map(|t| membership(Problem::PromiseTwinpal, &t));
            expanded += 1;
            if after != Ok(before) {
                r.fail(format!("twin_expand({w:?}): {before} -> {after:?}"));
            }
        }
    }
    r.cases = pairs + expanded;
    r.value("witness_pairs", pairs).value("twin_expansions", expanded)
}
