use serde::Serialize;

use crate::exactnum::{Rational, RationalInterval};
use crate::machines::{CompiledMachine, ModelClass};

use super::exact::{run_certified_realtime, run_exact_realtime};
use super::{require_class, AnalysisError, OutcomeDistribution};

/// Closed form of the restart loop: every round is an independent copy
/// of the one-pass distribution, so the loop halts after a geometric
/// number of rounds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RestartAnalysis {
    pub per_round: OutcomeDistribution,
    pub overall_accept: Rational,
    pub overall_reject: Rational,
    pub expected_rounds: Rational,
    /// `expected_rounds * (|w| + 2)`.
    pub expected_steps: Rational,
}

/// [`RestartAnalysis`] with certified enclosures, for machines whose
/// per-round probabilities are irrational.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CertifiedRestartAnalysis {
    pub per_round: OutcomeDistribution<RationalInterval>,
    pub overall_accept: RationalInterval,
    pub overall_reject: RationalInterval,
    pub expected_rounds: RationalInterval,
    pub expected_steps: RationalInterval,
}

fn check(machine: &CompiledMachine) -> Result<(), AnalysisError> {
    let class = machine.class();
    require_class("restart analysis", "RestartingRtQCFA", class, class == ModelClass::RestartingRtQcfa)
}

fn round_length(input: &str) -> Rational {
    Rational::from_integer(input.chars().count() as i64 + 2)
}

pub fn analyze_restarting(machine: &CompiledMachine, input: &str) -> Result<RestartAnalysis, AnalysisError> {
    check(machine)?;
    let per_round = run_exact_realtime(machine, input)?;
    let halting = &per_round.p_accept + &per_round.p_reject;
    if halting.is_zero() {
        return Err(AnalysisError::Nonterminating);
    }
    let overall_accept = per_round.p_accept.checked_div(&halting).expect("nonzero");
    let overall_reject = per_round.p_reject.checked_div(&halting).expect("nonzero");
    let expected_rounds = halting.recip().expect("nonzero");
    let expected_steps = &expected_rounds * &round_length(input);
    Ok(RestartAnalysis { per_round, overall_accept, overall_reject, expected_rounds, expected_steps })
}

/// `a / (a + b)` over enclosures, exact when either side is exactly zero.
fn share(a: &RationalInterval, b: &RationalInterval) -> RationalInterval {
    if b.as_point().is_some_and(Rational::is_zero) {
        return RationalInterval::one();
    }
    if a.as_point().is_some_and(Rational::is_zero) {
        return RationalInterval::zero();
    }
    let lo = a.lo.checked_div(&(&a.lo + &b.hi)).unwrap_or_else(|_| Rational::zero());
    let hi = a.hi.checked_div(&(&a.hi + &b.lo)).unwrap_or_else(|_| Rational::one());
    RationalInterval::new(lo, hi)
}

pub fn analyze_restarting_certified(
    machine: &CompiledMachine,
    input: &str,
    precision_bits: u32,
) -> Result<CertifiedRestartAnalysis, AnalysisError> {
    check(machine)?;
    let per_round = run_certified_realtime(machine, input, precision_bits)?;
    let halting = &per_round.p_accept + &per_round.p_reject;
    let expected_rounds = halting.recip().map_err(|_| AnalysisError::Nonterminating)?;
    let overall_accept = share(&per_round.p_accept, &per_round.p_reject);
    let overall_reject = share(&per_round.p_reject, &per_round.p_accept);
    let expected_steps = &expected_rounds * &RationalInterval::point(round_length(input));
    Ok(CertifiedRestartAnalysis { per_round, overall_accept, overall_reject, expected_rounds, expected_steps })
}
