//! Running machines: exact branch-tree evaluation, restart and sweep loop
//! analysis, a unary fast path, and seeded Monte Carlo sampling.

mod exact;
mod montecarlo;
mod restart;
mod step;
mod sweep;
mod unary;

use std::fmt::Debug;

use serde::Serialize;
use thiserror::Error;

use crate::exactnum::{AngleProbability, Rational, RationalInterval};
use crate::machines::{MachineError, ModelClass, Symbol};
use crate::qstate::QStateError;

pub use exact::{run_certified_realtime, run_exact_realtime, BranchTree, Config};
pub use montecarlo::{run_monte_carlo, McConfig, McReport};
pub use restart::{analyze_restarting, analyze_restarting_certified, CertifiedRestartAnalysis, RestartAnalysis};
pub use step::{canonical_phase, initial_register, quantum_phase, step_config, StepProb, Target, Transition};
pub use sweep::{analyze_sweeping, run_exact_sweeping, SweepAnalysis, SweepRun};
pub use unary::run_exact_unary;

/// Default working precision for certified runs.
pub const DEFAULT_PRECISION_BITS: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Machine(#[from] MachineError),
    #[error(transparent)]
    QState(#[from] QStateError),
    #[error("{operation} needs a {expected} machine, got {got}")]
    WrongClass { operation: &'static str, expected: &'static str, got: ModelClass },
    #[error("irrational probability met in an exact run; use the certified (interval) mode")]
    NeedsCertified,
    #[error("nonterminating on this input: a round neither accepts nor rejects")]
    Nonterminating,
    #[error("no classical transition for ({state}, {symbol}, outcome {outcome})")]
    MissingTransition { state: String, symbol: Symbol, outcome: u32 },
    #[error("head moved off the tape")]
    OffTape,
    #[error("step limit of {0} reached before the run finished")]
    StepLimit(u64),
    #[error("{0}")]
    Unsupported(String),
}

/// Probability mass carried by branches: exact rationals, or certified
/// rational enclosures when some probabilities are irrational.
pub trait Mass: Clone + PartialEq + Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn is_zero(&self) -> bool;
    fn from_prob(p: &StepProb, precision_bits: u32) -> Result<Self, AnalysisError>;
}

impl Mass for Rational {
    fn zero() -> Self {
        Rational::zero()
    }
    fn one() -> Self {
        Rational::one()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn is_zero(&self) -> bool {
        Rational::is_zero(self)
    }
    fn from_prob(p: &StepProb, _: u32) -> Result<Self, AnalysisError> {
        p.as_exact().cloned().ok_or(AnalysisError::NeedsCertified)
    }
}

impl Mass for RationalInterval {
    fn zero() -> Self {
        RationalInterval::zero()
    }
    fn one() -> Self {
        RationalInterval::one()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn is_zero(&self) -> bool {
        self.lo.is_zero() && self.hi.is_zero()
    }
    fn from_prob(p: &StepProb, precision_bits: u32) -> Result<Self, AnalysisError> {
        Ok(match p.evaluate(precision_bits) {
            AngleProbability::Exact(r) => RationalInterval::point(r),
            AngleProbability::Approx(i) => i,
        })
    }
}

/// Final masses of one pass. `p_continue` is what neither halted nor was
/// decided: the restart mass for restarting machines.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OutcomeDistribution<M = Rational> {
    pub p_accept: M,
    pub p_reject: M,
    pub p_dont_know: M,
    pub p_continue: M,
}

impl<M: Mass> OutcomeDistribution<M> {
    pub fn total(&self) -> M {
        self.p_accept.add(&self.p_reject).add(&self.p_dont_know).add(&self.p_continue)
    }
}

impl OutcomeDistribution<Rational> {
    pub fn into_interval(self) -> OutcomeDistribution<RationalInterval> {
        OutcomeDistribution {
            p_accept: RationalInterval::point(self.p_accept),
            p_reject: RationalInterval::point(self.p_reject),
            p_dont_know: RationalInterval::point(self.p_dont_know),
            p_continue: RationalInterval::point(self.p_continue),
        }
    }
}

pub(crate) fn require_class(
    operation: &'static str,
    expected: &'static str,
    got: ModelClass,
    ok: bool,
) -> Result<(), AnalysisError> {
    if ok {
        Ok(())
    } else {
        Err(AnalysisError::WrongClass { operation, expected, got })
    }
}
