use num_bigint::BigInt;
use qfa_core::analysis::*;
use qfa_core::exactnum::{Rational, SymbolicAngle};
use qfa_core::machines::{compile, CompiledMachine, MachineSpec, ModelClass, Move, QuantumStep, StochasticMatrix, Symbol};
use qfa_core::qstate::Matrix;

fn q(n: i64, d: i64) -> Rational {
    Rational::frac(n, d)
}

fn fair_coin() -> CompiledMachine {
    let mut spec = MachineSpec::new("coin", ModelClass::RtPfa, &['a'], 1);
    let half = q(1, 2);
    let coin = vec![
        vec![Rational::zero(), half.clone(), half],
        vec![Rational::zero(), Rational::one(), Rational::zero()],
        vec![Rational::zero(), Rational::zero(), Rational::one()],
    ];
    let stay = vec![
        vec![Rational::zero(), Rational::zero(), Rational::one()],
        vec![Rational::zero(), Rational::one(), Rational::zero()],
        vec![Rational::zero(), Rational::zero(), Rational::one()],
    ];
    spec.stochastic.insert(Symbol::LeftEnd, StochasticMatrix { rows: coin });
    spec.stochastic.insert(Symbol::Letter('a'), StochasticMatrix { rows: stay.clone() });
    spec.stochastic.insert(Symbol::RightEnd, StochasticMatrix { rows: stay });
    compile(&spec).unwrap()
}

/// Accepts unary words whose length is 1 mod 3.
fn mod3_dfa() -> CompiledMachine {
    let mut spec = MachineSpec::new("mod3", ModelClass::RtDfa, &['a'], 1);
    let names = ["s1", "r1", "r2"];
    for n in names {
        spec.state(n);
    }
    for i in 0..3 {
        spec.set_classical(names[i], Symbol::LeftEnd, 1, names[i], Move::Right);
        spec.set_classical(names[i], Symbol::Letter('a'), 1, names[(i + 1) % 3], Move::Right);
        let verdict = if i == 1 { "sa" } else { "sr" };
        spec.set_classical(names[i], Symbol::RightEnd, 1, verdict, Move::Right);
    }
    compile(&spec).unwrap()
}

/// Measures after every `a` with a 3-4-5 rotation; restarts on
/// outcome 1 at `$`, so every round has the same shape.
fn pythagorean_restarting() -> CompiledMachine {
    let mut spec = MachineSpec::new("pyth", ModelClass::RestartingRtQcfa, &['a', 'b'], 2);
    let rot = Matrix::scaled_integers(&q(1, 5), &[&[3, -4], &[4, 3]]).unwrap();
    spec.set_classical("s1", Symbol::LeftEnd, 1, "s1", Move::Right);
    spec.set_quantum("s1", Symbol::Letter('a'), QuantumStep::unitary(rot.clone()).then_measure(vec![vec![0], vec![1]]));
    spec.set_all_outcomes("s1", Symbol::Letter('a'), "s1", Move::Right);
    spec.set_quantum("s1", Symbol::Letter('b'), QuantumStep::unitary(rot));
    spec.set_all_outcomes("s1", Symbol::Letter('b'), "s1", Move::Right);
    spec.set_quantum("s1", Symbol::RightEnd, QuantumStep::measure(vec![vec![0], vec![1]]));
    spec.set_classical("s1", Symbol::RightEnd, 1, "s1", Move::Right);
    spec.set_classical("s1", Symbol::RightEnd, 2, "sa", Move::Right);
    compile(&spec).unwrap()
}

fn irrational_mcqfa() -> CompiledMachine {
    let mut spec = MachineSpec::new("irr", ModelClass::Mcqfa, &['a'], 2);
    spec.set_quantum("s1", Symbol::Letter('a'), QuantumStep::rotation(SymbolicAngle::sqrt2_pi(Rational::one())));
    spec.set_all_outcomes("s1", Symbol::LeftEnd, "s1", Move::Right);
    spec.set_all_outcomes("s1", Symbol::Letter('a'), "s1", Move::Right);
    spec.set_quantum("s1", Symbol::RightEnd, QuantumStep::measure(vec![vec![0], vec![1]]));
    spec.set_classical("s1", Symbol::RightEnd, 1, "sa", Move::Right);
    spec.set_classical("s1", Symbol::RightEnd, 2, "sr", Move::Right);
    compile(&spec).unwrap()
}

#[test]
fn fair_coin_exact_and_sampled() {
    let m = fair_coin();
    let d = run_exact_realtime(&m, "aaa").unwrap();
    assert_eq!(d.p_accept, q(1, 2));
    assert_eq!(d.p_reject, q(1, 2));
    let r = run_monte_carlo(&m, "aaa", &McConfig::new(100_000, 7, 100)).unwrap();
    assert!((r.empirical.p_accept.to_f64() - 0.5).abs() < 0.01);
    assert_eq!(r.accept + r.reject, 100_000);
    assert_eq!(r.mean_halting_steps, Some(Rational::one()));
}

#[test]
fn dfa_sampling_matches_exact() {
    let m = mod3_dfa();
    for (w, expect) in [("", false), ("a", true), ("aaaa", true), ("aaaaa", false)] {
        let d = run_exact_realtime(&m, w).unwrap();
        assert_eq!(d.p_accept.is_one(), expect, "{w}");
        for seed in [0, 1, 99] {
            let r = run_monte_carlo(&m, w, &McConfig::new(50, seed, 100)).unwrap();
            assert_eq!(r.empirical, d);
        }
    }
}

#[test]
fn unary_fast_path_agrees_with_walk() {
    let m = mod3_dfa();
    for n in 0..20usize {
        let w = "a".repeat(n);
        assert_eq!(run_exact_unary(&m, &BigInt::from(n)).unwrap(), run_exact_realtime(&m, &w).unwrap());
    }
    let huge = BigInt::from(10).pow(40);
    let d = run_exact_unary(&m, &huge).unwrap();
    // 10^40 = 1 mod 3
    assert!(d.p_accept.is_one());
}

#[test]
fn exact_run_rejects_irrational_but_certified_brackets() {
    let m = irrational_mcqfa();
    assert_eq!(run_exact_realtime(&m, "aa"), Err(AnalysisError::NeedsCertified));
    let c = run_certified_realtime(&m, "aa", 64).unwrap();
    let truth = (2.0 * std::f64::consts::SQRT_2 * std::f64::consts::PI).cos().powi(2);
    assert!(c.p_accept.lo.to_f64() <= truth + 1e-12 && truth - 1e-12 <= c.p_accept.hi.to_f64());
    assert!(c.p_accept.width() < q(1, 1_000_000_000));
}

#[test]
fn sampling_irrational_thresholds_is_consistent() {
    let m = irrational_mcqfa();
    let c = run_certified_realtime(&m, "a", 64).unwrap();
    let p = c.p_accept.midpoint().to_f64();
    let n = 100_000u64;
    let r = run_monte_carlo(&m, "a", &McConfig::new(n, 3, 10)).unwrap();
    let sigma = (p * (1.0 - p) / n as f64).sqrt();
    assert!((r.empirical.p_accept.to_f64() - p).abs() <= 5.0 * sigma);
}

#[test]
fn worker_count_does_not_change_reports() {
    let m = pythagorean_restarting();
    let base = McConfig::new(2_000, 11, 10_000);
    let one = run_monte_carlo(&m, "ab", &base).unwrap();
    for w in [2, 3, 8] {
        assert_eq!(run_monte_carlo(&m, "ab", &base.clone().with_workers(w)).unwrap(), one);
    }
}

#[test]
fn restart_closed_form() {
    let m = pythagorean_restarting();
    // `a` measures: |0> w.p. 9/25, |1> w.p. 16/25; b rotates once more.
    // From |0>: rotate -> (3/5, 4/5), accept 16/25. From |1>: (-4/5, 3/5), accept 9/25.
    let a = analyze_restarting(&m, "ab").unwrap();
    let p_acc = &(&q(9, 25) * &q(16, 25)) + &(&q(16, 25) * &q(9, 25));
    assert_eq!(a.per_round.p_accept, p_acc);
    assert!(a.per_round.p_reject.is_zero());
    assert!(a.overall_accept.is_one());
    assert_eq!(a.expected_rounds, p_acc.recip().unwrap());
    assert_eq!(a.expected_steps, &p_acc.recip().unwrap() * &q(4, 1));
    let r = run_monte_carlo(&m, "ab", &McConfig::new(20_000, 5, 1_000_000)).unwrap();
    assert_eq!(r.accept, 20_000);
    let mean = r.mean_halting_steps.unwrap().to_f64();
    assert!((mean - a.expected_steps.to_f64()).abs() < 0.3, "{mean}");
}

#[test]
fn merging_never_changes_exact_output() {
    let m = pythagorean_restarting();
    for w in ["", "a", "ab", "aab", "abab", "aaaa", "babba"] {
        let mut a = BranchTree::<Rational>::new(&m, w).unwrap();
        let mut b = BranchTree::<Rational>::new(&m, w).unwrap().with_merging(false);
        while !a.is_finished() {
            a.step().unwrap();
            b.step().unwrap();
            assert!(a.total_mass().is_one());
            assert!(b.total_mass().is_one());
        }
        assert!(b.is_finished());
        assert_eq!(a.distribution(), b.distribution());
        assert!(a.live().len() <= 2);
    }
}

#[test]
fn wrong_class_and_alphabet_errors() {
    let m = mod3_dfa();
    assert!(matches!(analyze_restarting(&m, "a"), Err(AnalysisError::WrongClass { .. })));
    assert!(run_exact_realtime(&m, "ab").is_err());
    assert!(run_monte_carlo(&m, "a", &McConfig::new(0, 1, 1)).is_err());
}

#[test]
fn step_cap_is_reported() {
    let m = pythagorean_restarting();
    let r = run_monte_carlo(&m, "ab", &McConfig::new(100, 1, 3)).unwrap();
    assert_eq!(r.capped, 100);
    assert_eq!(r.empirical.p_continue, Rational::one());
}
