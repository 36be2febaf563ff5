use indexmap::IndexMap;

use crate::exactnum::{Rational, RationalInterval};
use crate::machines::{CompiledMachine, Halting};
use crate::qstate::Register;

use super::step::{initial_register, step_config, Target};
use super::{require_class, AnalysisError, Mass, OutcomeDistribution, DEFAULT_PRECISION_BITS};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Config {
    pub state: usize,
    pub pos: usize,
    pub register: Register,
}

/// Every live configuration of a run with its probability mass, plus the
/// mass already absorbed by each terminal outcome. Steps advance all live
/// configurations at once.
#[derive(Clone, Debug)]
pub struct BranchTree<'m, M: Mass = Rational> {
    machine: &'m CompiledMachine,
    tape: Vec<usize>,
    live: Vec<(Config, M)>,
    accept: M,
    reject: M,
    dont_know: M,
    ended: M,
    /// Absorbed `(step index, outcome, mass)` events, in order.
    events: Vec<(u64, Halting, M)>,
    steps: u64,
    merge: bool,
    precision_bits: u32,
}

impl<'m, M: Mass> BranchTree<'m, M> {
    pub fn new(machine: &'m CompiledMachine, input: &str) -> Result<Self, AnalysisError> {
        let tape = machine.tape(input)?;
        let start = Config { state: machine.initial, pos: 0, register: initial_register(machine) };
        Ok(BranchTree {
            machine,
            tape,
            live: vec![(start, M::one())],
            accept: M::zero(),
            reject: M::zero(),
            dont_know: M::zero(),
            ended: M::zero(),
            events: Vec::new(),
            steps: 0,
            merge: true,
            precision_bits: DEFAULT_PRECISION_BITS,
        })
    }

    /// Turns merging of identical configurations on or off.
    pub fn with_merging(mut self, merge: bool) -> Self {
        self.merge = merge;
        self
    }

    pub fn with_precision(mut self, bits: u32) -> Self {
        self.precision_bits = bits;
        self
    }

    pub fn tape(&self) -> &[usize] {
        &self.tape
    }

    pub fn live(&self) -> &[(Config, M)] {
        &self.live
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn events(&self) -> &[(u64, Halting, M)] {
        &self.events
    }

    pub fn is_finished(&self) -> bool {
        self.live.is_empty()
    }

    /// Live plus terminal mass; exactly one for rational runs.
    pub fn total_mass(&self) -> M {
        let mut t = self.accept.add(&self.reject).add(&self.dont_know).add(&self.ended);
        for (_, m) in &self.live {
            t = t.add(m);
        }
        t
    }

    pub fn distribution(&self) -> OutcomeDistribution<M> {
        let mut cont = self.ended.clone();
        for (_, m) in &self.live {
            cont = cont.add(m);
        }
        OutcomeDistribution {
            p_accept: self.accept.clone(),
            p_reject: self.reject.clone(),
            p_dont_know: self.dont_know.clone(),
            p_continue: cont,
        }
    }

    /// Advances every live configuration by one step.
    pub fn step(&mut self) -> Result<(), AnalysisError> {
        let live = std::mem::take(&mut self.live);
        let mut next: IndexMap<Config, M> = IndexMap::new();
        let mut unmerged: Vec<(Config, M)> = Vec::new();
        for (cfg, mass) in live {
            for tr in step_config(self.machine, &self.tape, cfg.state, cfg.pos, &cfg.register)? {
                let m = mass.mul(&M::from_prob(&tr.prob, self.precision_bits)?);
                if m.is_zero() {
                    continue;
                }
                match tr.target {
                    Target::Halt(h) => {
                        let slot = match h {
                            Halting::Accept => &mut self.accept,
                            Halting::Reject => &mut self.reject,
                            Halting::DontKnow => &mut self.dont_know,
                        };
                        *slot = slot.add(&m);
                        self.events.push((self.steps, h, m));
                    }
                    Target::EndOfPass { .. } => self.ended = self.ended.add(&m),
                    Target::Continue { state, pos } => {
                        let c = Config { state, pos, register: tr.register };
                        if self.merge {
                            match next.get_mut(&c) {
                                Some(acc) => *acc = acc.add(&m),
                                None => {
                                    next.insert(c, m);
                                }
                            }
                        } else {
                            unmerged.push((c, m));
                        }
                    }
                }
            }
        }
        self.live = if self.merge { next.into_iter().collect() } else { unmerged };
        self.steps += 1;
        Ok(())
    }

    /// Steps until no configuration is live, failing after `limit` steps.
    pub fn run_to_end(&mut self, limit: u64) -> Result<OutcomeDistribution<M>, AnalysisError> {
        while !self.is_finished() {
            if self.steps >= limit {
                return Err(AnalysisError::StepLimit(limit));
            }
            self.step()?;
        }
        Ok(self.distribution())
    }
}

fn check_realtime(machine: &CompiledMachine) -> Result<(), AnalysisError> {
    require_class("realtime run", "realtime", machine.class(), machine.class().is_realtime())
}

/// One left-to-right pass over `¢ w $` with exact rational masses.
pub fn run_exact_realtime(machine: &CompiledMachine, input: &str) -> Result<OutcomeDistribution, AnalysisError> {
    check_realtime(machine)?;
    let mut tree = BranchTree::<Rational>::new(machine, input)?;
    let limit = tree.tape().len() as u64;
    tree.run_to_end(limit)
}

/// As [`run_exact_realtime`], with certified enclosures so irrational
/// rotations are allowed.
pub fn run_certified_realtime(
    machine: &CompiledMachine,
    input: &str,
    precision_bits: u32,
) -> Result<OutcomeDistribution<RationalInterval>, AnalysisError> {
    check_realtime(machine)?;
    let mut tree = BranchTree::<RationalInterval>::new(machine, input)?.with_precision(precision_bits);
    let limit = tree.tape().len() as u64;
    tree.run_to_end(limit)
}
