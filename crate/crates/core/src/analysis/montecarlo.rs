//! Seeded trajectory sampling.
//!
//! Trial `t` draws from its own ChaCha8 stream (`seed`, stream `t`), so the
//! report depends only on the seed and never on how trials are split
//! across workers. A branch is chosen by locating a uniform `u` in [0, 1)
//! against the cumulative branch probabilities; `u` is revealed 64 bits at
//! a time until the comparison is decided, which keeps sampling unbiased
//! for rational and irrational probabilities alike.

use std::collections::HashMap;
use std::rc::Rc;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::exactnum::{Rational, RationalInterval};
use crate::machines::{CompiledMachine, Halting, ModelClass};
use crate::qstate::Register;

use super::step::{initial_register, step_config, StepProb, Target, Transition};
use super::{AnalysisError, OutcomeDistribution, DEFAULT_PRECISION_BITS};

/// Memo entries kept per worker before the cache is dropped and rebuilt.
const MEMO_LIMIT: usize = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct McConfig {
    pub trials: u64,
    pub seed: u64,
    /// Head steps after which an unfinished trial is counted as capped.
    pub step_cap: u64,
    pub workers: usize,
    /// Starting precision for irrational thresholds; refined on demand.
    pub precision_bits: u32,
}

impl McConfig {
    pub fn new(trials: u64, seed: u64, step_cap: u64) -> Self {
        McConfig { trials, seed, step_cap, workers: 1, precision_bits: DEFAULT_PRECISION_BITS }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers.max(1);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct McReport {
    pub trials: u64,
    pub seed: u64,
    pub accept: u64,
    pub reject: u64,
    pub dont_know: u64,
    /// Non-restarting runs that walked off `$` without halting.
    pub continued: u64,
    pub capped: u64,
    /// Mean head steps over halted trials; `None` if none halted.
    pub mean_halting_steps: Option<Rational>,
    /// Frequencies; `p_continue` counts both continued and capped trials.
    pub empirical: OutcomeDistribution,
}

#[derive(Default, Clone, Copy)]
struct Tally {
    accept: u64,
    reject: u64,
    dont_know: u64,
    continued: u64,
    capped: u64,
    halting_steps: u128,
}

impl Tally {
    fn merge(&mut self, o: &Tally) {
        self.accept += o.accept;
        self.reject += o.reject;
        self.dont_know += o.dont_know;
        self.continued += o.continued;
        self.capped += o.capped;
        self.halting_steps += o.halting_steps;
    }
}

/// Cached branches of one configuration, with 64-bit bracket thresholds
/// `lo <= c_i * 2^64 <= hi` on every cumulative probability but the last.
struct Branches {
    transitions: Vec<Transition>,
    brackets: Vec<(u128, u128)>,
}

fn to_u128(x: BigInt) -> u128 {
    x.to_u128().unwrap_or(0).min(1u128 << 64)
}

impl Branches {
    fn new(transitions: Vec<Transition>, bits: u32) -> Self {
        let mut brackets = Vec::with_capacity(transitions.len().saturating_sub(1));
        let mut cum = RationalInterval::zero();
        for tr in transitions.iter().take(transitions.len().saturating_sub(1)) {
            cum = &cum + &tr.prob.enclosure(bits.max(64));
            brackets.push((to_u128(cum.lo.scaled_floor(64)), to_u128(cum.hi.scaled_ceil(64))));
        }
        Branches { transitions, brackets }
    }

    /// Fast path on one 64-bit draw; `None` when the draw sits on a
    /// threshold and more bits are needed.
    fn pick_fast(&self, x: u64) -> Option<usize> {
        let x = x as u128;
        for (i, &(lo, hi)) in self.brackets.iter().enumerate() {
            if x < lo {
                return Some(i);
            }
            if x < hi {
                return None;
            }
        }
        Some(self.brackets.len())
    }
}

fn cumulative(probs: &[StepProb], i: usize, bits: u32) -> RationalInterval {
    probs[..=i].iter().fold(RationalInterval::zero(), |acc, p| &acc + &p.enclosure(bits))
}

/// Exact-enough choice: extends the draw with further 64-bit chunks and
/// raises the precision of irrational thresholds until decided.
fn pick_slow(branches: &Branches, first: u64, rng: &mut ChaCha8Rng, bits: u32) -> usize {
    let probs: Vec<StepProb> = branches.transitions.iter().map(|t| t.prob.clone()).collect();
    let mut u = BigInt::from(first);
    let mut chunks: u64 = 1;
    let mut precision = bits.max(64);
    'outer: loop {
        let lo = Rational::dyadic(u.clone(), 64 * chunks);
        let hi = Rational::dyadic(&u + 1, 64 * chunks);
        for i in 0..branches.brackets.len() {
            let c = cumulative(&probs, i, precision);
            if hi <= c.lo {
                return i;
            }
            if lo < c.hi {
                u = (u << 64) + BigInt::from(rng.next_u64());
                chunks += 1;
                precision = precision.saturating_mul(2).min(1 << 16);
                continue 'outer;
            }
        }
        return branches.brackets.len();
    }
}

/// Per-worker sampler: the machine, its tape, and a memo of branch lists
/// keyed by `(state, position, interned register)`.
struct Sampler<'m> {
    machine: &'m CompiledMachine,
    tape: Vec<usize>,
    registers: HashMap<Register, u32>,
    memo: HashMap<(usize, usize, u32), Rc<Branches>>,
    bits: u32,
}

impl<'m> Sampler<'m> {
    fn intern(&mut self, r: &Register) -> u32 {
        if let Some(&id) = self.registers.get(r) {
            return id;
        }
        let id = self.registers.len() as u32;
        self.registers.insert(r.clone(), id);
        id
    }

    fn branches(&mut self, state: usize, pos: usize, reg: &Register) -> Result<Rc<Branches>, AnalysisError> {
        if self.memo.len() >= MEMO_LIMIT {
            self.memo.clear();
            self.registers.clear();
        }
        let key = (state, pos, self.intern(reg));
        if let Some(b) = self.memo.get(&key) {
            return Ok(Rc::clone(b));
        }
        let b = Rc::new(Branches::new(step_config(self.machine, &self.tape, state, pos, reg)?, self.bits));
        self.memo.insert(key, Rc::clone(&b));
        Ok(b)
    }

    fn trial(&mut self, rng: &mut ChaCha8Rng, cap: u64, tally: &mut Tally) -> Result<(), AnalysisError> {
        let restarting = self.machine.class() == ModelClass::RestartingRtQcfa;
        let start = initial_register(self.machine);
        let (mut state, mut pos, mut reg) = (self.machine.initial, 0usize, start.clone());
        let mut steps: u64 = 0;
        while steps < cap {
            let b = self.branches(state, pos, &reg)?;
            let x = rng.next_u64();
            let i = match b.pick_fast(x) {
                Some(i) => i,
                None => pick_slow(&b, x, rng, self.bits),
            };
            let tr = &b.transitions[i];
            steps += 1;
            match tr.target {
                Target::Halt(h) => {
                    match h {
                        Halting::Accept => tally.accept += 1,
                        Halting::Reject => tally.reject += 1,
                        Halting::DontKnow => tally.dont_know += 1,
                    }
                    tally.halting_steps += steps as u128;
                    return Ok(());
                }
                Target::EndOfPass { .. } if restarting => {
                    (state, pos, reg) = (self.machine.initial, 0, start.clone());
                }
                Target::EndOfPass { .. } => {
                    tally.continued += 1;
                    return Ok(());
                }
                Target::Continue { state: s, pos: p } => {
                    state = s;
                    pos = p;
                    reg = tr.register.clone();
                }
            }
        }
        tally.capped += 1;
        Ok(())
    }
}

fn run_range(machine: &CompiledMachine, input: &str, cfg: &McConfig, range: std::ops::Range<u64>) -> Result<Tally, AnalysisError> {
    let mut sampler = Sampler {
        machine,
        tape: machine.tape(input)?,
        registers: HashMap::new(),
        memo: HashMap::new(),
        bits: cfg.precision_bits,
    };
    let mut tally = Tally::default();
    for t in range {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(t);
        sampler.trial(&mut rng, cfg.step_cap, &mut tally)?;
    }
    Ok(tally)
}

/// Samples `cfg.trials` independent runs of `machine` on `input`.
/// Restarting machines loop until they halt or hit the step cap.
pub fn run_monte_carlo(machine: &CompiledMachine, input: &str, cfg: &McConfig) -> Result<McReport, AnalysisError> {
    if cfg.trials == 0 {
        return Err(AnalysisError::Unsupported("at least one trial is required".into()));
    }
    machine.tape(input)?;
    let workers = (cfg.workers.max(1) as u64).min(cfg.trials);
    let per = cfg.trials.div_ceil(workers);
    let ranges: Vec<_> = (0..workers).map(|w| (w * per).min(cfg.trials)..((w + 1) * per).min(cfg.trials)).collect();
    let tallies: Vec<Result<Tally, AnalysisError>> = if workers == 1 {
        vec![run_range(machine, input, cfg, 0..cfg.trials)]
    } else {
        std::thread::scope(|s| {
            let handles: Vec<_> = ranges.into_iter().map(|r| s.spawn(move || run_range(machine, input, cfg, r))).collect();
            handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
        })
    };
    let mut total = Tally::default();
    for t in tallies {
        total.merge(&t?);
    }
    let n = cfg.trials as i64;
    let frac = |k: u64| Rational::frac(k as i64, n);
    let halted = total.accept + total.reject + total.dont_know;
    let mean_halting_steps = (halted > 0).then(|| {
        Rational::new(BigInt::from(total.halting_steps), BigInt::from(halted)).expect("nonzero count")
    });
    Ok(McReport {
        trials: cfg.trials,
        seed: cfg.seed,
        accept: total.accept,
        reject: total.reject,
        dont_know: total.dont_know,
        continued: total.continued,
        capped: total.capped,
        mean_halting_steps,
        empirical: OutcomeDistribution {
            p_accept: frac(total.accept),
            p_reject: frac(total.reject),
            p_dont_know: frac(total.dont_know),
            p_continue: frac(total.continued + total.capped),
        },
    })
}
