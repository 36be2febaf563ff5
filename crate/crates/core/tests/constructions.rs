use num_bigint::BigInt;
use qfa_core::analysis::*;
use qfa_core::constructions::*;
use qfa_core::exactnum::Rational;
use qfa_core::machines::compile;
use qfa_core::StateVector;

fn q(n: i64, d: i64) -> Rational {
    Rational::frac(n, d)
}

fn pow25(e: i64) -> Rational {
    Rational::from_integer(25).pow(-e).unwrap()
}

#[test]
fn aw_pal_examples() {
    let m = compile(&build_aw_pal()).unwrap();
    let e1 = StateVector::basis(3, 0);
    assert_eq!(aw_pal_final_state("aa"), e1);
    assert_eq!(aw_pal_final_state(""), e1);
    assert!(run_exact_realtime(&m, &aw_pal_input("aa")).unwrap().p_accept.is_one());
    let d = run_exact_realtime(&m, &aw_pal_input("ab")).unwrap();
    assert!(d.p_reject >= q(1, 625));
    assert!(d.p_reject < Rational::one());
    assert_eq!(&d.p_accept + &d.p_reject, Rational::one());
}

#[test]
fn twinpal_one_round_values() {
    let m = compile(&build_exact_twinpal()).unwrap();
    // yes: u = aa, v = ab
    let yes = run_exact_realtime(&m, "aacaacabcab").unwrap();
    assert!(yes.p_reject.is_zero());
    let pv = run_exact_realtime(&compile(&build_aw_pal()).unwrap(), &aw_pal_input("ab")).unwrap().p_reject;
    assert_eq!(yes.p_accept, &q(16, 25) * &pv);
    assert!(yes.p_accept >= &q(16, 1) * &pow25(3));
    // no: u = ab, v = aa
    let no = run_exact_realtime(&m, "abcabcaacaa").unwrap();
    assert!(no.p_accept.is_zero());
    assert!(no.p_reject >= q(9, 15625));
    assert!(analyze_restarting(&m, "aacaacabcab").unwrap().overall_accept.is_one());
    assert!(analyze_restarting(&m, "abcabcaacaa").unwrap().overall_reject.is_one());
}

#[test]
fn lv_exptwinpal_small_blocks() {
    let m = compile(&build_lv_exptwinpal()).unwrap();
    let empty = run_exact_realtime(&m, "").unwrap();
    assert!(empty.p_dont_know.is_one());
    let block = "aacaacabcabc";
    let one = run_exact_realtime(&m, block).unwrap();
    let three = run_exact_realtime(&m, &block.repeat(3)).unwrap();
    assert!(one.p_reject.is_zero() && three.p_reject.is_zero());
    assert!(three.p_accept > one.p_accept);
    // One block behaves like one round of the restarting machine.
    let tw = run_exact_realtime(&compile(&build_exact_twinpal()).unwrap(), "aacaacabcab").unwrap();
    assert_eq!(one.p_accept, tw.p_accept);
    let no = run_exact_realtime(&m, &"abcabcaacaac".repeat(3)).unwrap();
    assert!(no.p_accept.is_zero() && no.p_reject.is_positive());
    assert_eq!(three.total(), Rational::one());
}

#[test]
fn exact_exptwinpal_restarts_to_certainty() {
    let m = compile(&build_exact_exptwinpal()).unwrap();
    let a = analyze_restarting(&m, &"aacaacabcabc".repeat(2)).unwrap();
    assert!(a.overall_accept.is_one());
    let r = analyze_restarting(&m, &"abcabcaacaac".repeat(2)).unwrap();
    assert!(r.overall_reject.is_one());
}

#[test]
fn sweeping_pal_is_one_sided() {
    let m = compile(&build_exact_pal_sweeping()).unwrap();
    let mut last = Rational::zero();
    for sweeps in 0..=12 {
        let run = run_exact_sweeping(&m, "aacab", sweeps).unwrap();
        assert!(run.distribution.p_reject.is_zero());
        assert!(run.distribution.p_accept >= last);
        last = run.distribution.p_accept.clone();
        if sweeps == 0 {
            assert!(run.distribution.p_continue.is_one());
        }
    }
    let a = analyze_sweeping(&m, "aacab", 100).unwrap();
    assert!(a.overall_accept.is_one());
    assert_eq!(a.period_sweeps, 4);
    assert!(a.per_iteration.p_accept >= &q(16, 25) * &pow25(2));
    for sweeps in [1, 4, 9] {
        assert!(run_exact_sweeping(&m, "abcaa", sweeps).unwrap().distribution.p_accept.is_zero());
    }
    assert!(analyze_sweeping(&m, "abcaa", 100).unwrap().overall_reject.is_one());
    // u = v = empty is outside the promise: no branch ever decides.
    assert!(analyze_sweeping(&m, "c", 100).is_err());
}

#[test]
fn eq_phase_probabilities() {
    let m = compile(&build_aw_eq_phase()).unwrap();
    let same = run_certified_realtime(&m, "aaabaaa", 64).unwrap();
    assert_eq!(same.p_reject.as_point(), Some(&Rational::zero()));
    let one = run_certified_realtime(&m, "aaba", 64).unwrap();
    assert!(one.p_reject.lo >= q(1, 2));
    let three = run_certified_realtime(&m, "aaaab", 64).unwrap();
    assert!(three.p_reject.lo >= q(1, 32));
    let d3 = run_certified_realtime(&m, "aaaaba", 64).unwrap();
    assert!(d3.p_reject.lo >= q(1, 18));
}

#[test]
fn eq_restarting_is_exact() {
    let m = compile(&build_exact_eq_restarting()).unwrap();
    let yes = analyze_restarting_certified(&m, "ababaa", 64).unwrap();
    assert!(yes.overall_accept.as_point().is_some_and(Rational::is_one));
    assert!(yes.per_round.p_reject.as_point().is_some_and(Rational::is_zero));
    // a b aa b a: m = 1, n = 2
    let no = analyze_restarting_certified(&m, "abaaba", 64).unwrap();
    assert!(no.overall_reject.as_point().is_some_and(Rational::is_one));
    assert!(matches!(analyze_restarting(&m, "ababaa"), Err(AnalysisError::NeedsCertified)));
}

#[test]
fn evenodd_examples() {
    let odd = compile(&build_evenodd_mcqfa(0)).unwrap();
    assert!(run_exact_realtime(&odd, "a").unwrap().p_reject.is_one());
    let k3 = compile(&build_evenodd_mcqfa(3)).unwrap();
    assert!(run_exact_realtime(&k3, &"a".repeat(32)).unwrap().p_accept.is_one());
    let k16 = compile(&build_evenodd_mcqfa(16)).unwrap();
    assert!(run_exact_unary(&k16, &BigInt::from(7u64 << 16)).unwrap().p_reject.is_one());
    let dfa = compile(&build_evenodd_dfa(1).unwrap()).unwrap();
    assert!(run_exact_realtime(&dfa, "aaaa").unwrap().p_accept.is_one());
    assert!(run_exact_realtime(&dfa, "aaaaaa").unwrap().p_reject.is_one());
    assert!(build_evenodd_dfa(EVENODD_DFA_MAX_K + 1).is_err());
}
