use serde::Serialize;

use crate::exactnum::Rational;
use crate::machines::{CompiledMachine, ModelClass};

use super::exact::{BranchTree, Config};
use super::step::initial_register;
use super::{require_class, AnalysisError, OutcomeDistribution};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepRun {
    /// `p_continue` is the mass still undecided after `sweeps` sweeps.
    pub distribution: OutcomeDistribution,
    pub sweeps: u64,
    pub steps: u64,
}

/// Exact long-run behaviour of a sweeping machine whose live configurations
/// periodically collapse back to the initial configuration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepAnalysis {
    /// Masses decided within one period, and the mass returning to start.
    pub per_iteration: OutcomeDistribution,
    pub period_steps: u64,
    pub period_sweeps: u64,
    pub overall_accept: Rational,
    pub overall_reject: Rational,
    pub overall_dont_know: Rational,
    pub expected_iterations: Rational,
    pub expected_steps: Rational,
    pub expected_sweeps: Rational,
}

fn check(machine: &CompiledMachine) -> Result<(), AnalysisError> {
    let class = machine.class();
    require_class("sweep analysis", "Sweeping2QCFA", class, class == ModelClass::Sweeping2Qcfa)
}

/// Head steps after `sweeps` sweeps on an input of length `n`: the first
/// square, then `n + 1` moves per sweep.
fn steps_for(sweeps: u64, n: u64) -> u64 {
    if sweeps == 0 {
        0
    } else {
        sweeps * (n + 1) + 1
    }
}

pub fn run_exact_sweeping(machine: &CompiledMachine, input: &str, max_sweeps: u64) -> Result<SweepRun, AnalysisError> {
    check(machine)?;
    let n = input.chars().count() as u64;
    let mut tree = BranchTree::<Rational>::new(machine, input)?;
    let budget = steps_for(max_sweeps, n);
    while tree.steps() < budget && !tree.is_finished() {
        tree.step()?;
    }
    Ok(SweepRun { distribution: tree.distribution(), sweeps: max_sweeps, steps: tree.steps() })
}

/// Runs until the undecided mass sits entirely in the initial
/// configuration again, then sums the resulting geometric series.
pub fn analyze_sweeping(machine: &CompiledMachine, input: &str, max_sweeps: u64) -> Result<SweepAnalysis, AnalysisError> {
    check(machine)?;
    let n = input.chars().count() as u64;
    let start = Config { state: machine.initial, pos: 0, register: initial_register(machine) };
    let mut tree = BranchTree::<Rational>::new(machine, input)?;
    let budget = steps_for(max_sweeps, n);
    loop {
        if tree.steps() >= budget {
            return Err(AnalysisError::StepLimit(budget));
        }
        tree.step()?;
        let live = tree.live();
        if live.is_empty() || (live.len() == 1 && live[0].0 == start) {
            break;
        }
    }
    let period = tree.steps();
    let per_iteration = tree.distribution();
    let halting = &(&per_iteration.p_accept + &per_iteration.p_reject) + &per_iteration.p_dont_know;
    if halting.is_zero() {
        return Err(AnalysisError::Nonterminating);
    }
    let inv = halting.recip().expect("nonzero");
    let mut weighted_time = Rational::zero();
    for (t, _, m) in tree.events() {
        weighted_time += m * &Rational::from_integer(*t as i64 + 1);
    }
    // E[T] = sum(p_e t_e)/h + period (1 - h)/h
    let expected_steps = &weighted_time * &inv + Rational::from_integer(period as i64) * (Rational::one() - &halting) * &inv;
    let per_sweep = Rational::from_integer(n as i64 + 1);
    Ok(SweepAnalysis {
        overall_accept: &per_iteration.p_accept * &inv,
        overall_reject: &per_iteration.p_reject * &inv,
        overall_dont_know: &per_iteration.p_dont_know * &inv,
        expected_iterations: inv,
        expected_sweeps: expected_steps.checked_div(&per_sweep).expect("positive"),
        expected_steps,
        period_steps: period,
        period_sweeps: period / (n + 1),
        per_iteration,
    })
}
