//! One computation step of one configuration: the quantum phase on the
//! scanned square, then the classical transition. Shared by the exact
//! engines and the Monte Carlo sampler.

use crate::exactnum::{angle_probability, AngleProbability, Rational, RationalInterval, SymbolicAngle};
use crate::machines::{CompiledMachine, CompiledStep, Halting, ModelClass};
use crate::qstate::{measure, Register, StateVector};

use super::AnalysisError;

/// Probability of one transition branch.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum StepProb {
    Exact(Rational),
    /// `sin^2(angle)`, or `cos^2(angle)` when `complement` is set.
    Sin2 { angle: SymbolicAngle, complement: bool },
}

impl StepProb {
    pub fn evaluate(&self, precision_bits: u32) -> AngleProbability {
        match self {
            StepProb::Exact(r) => AngleProbability::Exact(r.clone()),
            StepProb::Sin2 { angle, complement } => {
                let p = angle_probability(angle, precision_bits);
                if *complement {
                    p.complement()
                } else {
                    p
                }
            }
        }
    }

    pub fn enclosure(&self, precision_bits: u32) -> RationalInterval {
        self.evaluate(precision_bits).enclosure()
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        match self {
            StepProb::Exact(r) => Some(r),
            StepProb::Sin2 { .. } => None,
        }
    }
}

/// Where a branch goes after the classical transition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Target {
    Halt(Halting),
    Continue { state: usize, pos: usize },
    /// The head moved right off `$` in a non-halting state: the pass is
    /// over (continue mass, or a restart for restarting machines).
    EndOfPass { state: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub prob: StepProb,
    pub register: Register,
    pub target: Target,
}

/// Removes a unit global phase from a vector whose first nonzero amplitude
/// has rational modulus.
pub fn canonical_phase(v: StateVector) -> StateVector {
    let Some(first) = v.amplitudes().iter().find(|a| !a.is_zero()) else {
        return v;
    };
    if first.is_real() && first.re.is_positive() {
        return v;
    }
    let Some(modulus) = first.norm_sqr().sqrt_exact() else {
        return v;
    };
    let phase = first.scale(&modulus.recip().expect("nonzero modulus"));
    let inv = phase.conj();
    StateVector::new(v.amplitudes().iter().map(|a| a * &inv).collect())
}

fn canonical(reg: Register) -> Register {
    match reg.normalize() {
        Register::Vector(v) => Register::Vector(canonical_phase(v)),
        r => r,
    }
}

/// The quantum phase: `(outcome, probability, post-register)` for every
/// outcome of nonzero probability.
pub fn quantum_phase(step: Option<&CompiledStep>, reg: &Register) -> Result<Vec<(u32, StepProb, Register)>, AnalysisError> {
    let Some(step) = step else {
        return Ok(vec![(1, StepProb::Exact(Rational::one()), reg.clone())]);
    };
    let mut r = reg.clone();
    if let Some(u) = &step.unitary {
        r = r.apply(u)?;
    }
    if let Some(a) = &step.rotation {
        r = r.rotate(a)?;
    }
    let Some(m) = &step.measurement else {
        return Ok(vec![(1, StepProb::Exact(Rational::one()), r.normalize())]);
    };
    match r.normalize() {
        Register::Vector(v) => Ok(measure(m, &v)?
            .into_iter()
            .map(|o| (o.outcome, StepProb::Exact(o.probability), canonical(Register::Vector(o.state))))
            .collect()),
        Register::Rotation(rot) => {
            let mut out = Vec::new();
            for (b, block) in m.blocks().iter().enumerate() {
                let outcome = b as u32 + 1;
                let has0 = block.contains(&0);
                let has1 = block.contains(&1);
                let (prob, post) = match (has0, has1) {
                    (true, true) => (StepProb::Exact(Rational::one()), Register::Rotation(rot.clone())),
                    (true, false) => (
                        StepProb::Sin2 { angle: rot.current.clone(), complement: true },
                        Register::Vector(StateVector::basis(2, 0)),
                    ),
                    (false, true) => (
                        StepProb::Sin2 { angle: rot.current.clone(), complement: false },
                        Register::Vector(StateVector::basis(2, 1)),
                    ),
                    (false, false) => continue,
                };
                out.push((outcome, prob, post));
            }
            Ok(out)
        }
    }
}

/// All branches of one step from `(state, pos, reg)` on `tape`.
pub fn step_config(
    m: &CompiledMachine,
    tape: &[usize],
    state: usize,
    pos: usize,
    reg: &Register,
) -> Result<Vec<Transition>, AnalysisError> {
    let sym = tape[pos];
    let last = tape.len() - 1;
    let target = |next: usize, delta: isize| -> Result<Target, AnalysisError> {
        if let Some(h) = m.halting(next) {
            return Ok(Target::Halt(h));
        }
        let p = pos as isize + delta;
        if p > last as isize {
            Ok(Target::EndOfPass { state: next })
        } else if p < 0 {
            Err(AnalysisError::OffTape)
        } else {
            Ok(Target::Continue { state: next, pos: p as usize })
        }
    };

    if m.class() == ModelClass::RtPfa {
        let row = m.stochastic_row(state, sym).ok_or(AnalysisError::OffTape)?;
        let mut out = Vec::new();
        for (next, p) in row.iter().enumerate() {
            if !p.is_zero() {
                out.push(Transition { prob: StepProb::Exact(p.clone()), register: reg.clone(), target: target(next, 1)? });
            }
        }
        return Ok(out);
    }

    let mut out = Vec::new();
    for (outcome, prob, register) in quantum_phase(m.quantum_step(state, sym), reg)? {
        let (next, mv) = m.classical(state, sym, outcome).ok_or_else(|| AnalysisError::MissingTransition {
            state: m.state_name(state).to_string(),
            symbol: m.spec.symbols()[sym],
            outcome,
        })?;
        out.push(Transition { prob, register, target: target(next, mv.delta())? });
    }
    Ok(out)
}

/// The register every run starts from: `|q1>`.
pub fn initial_register(m: &CompiledMachine) -> Register {
    Register::initial(m.quantum_dim())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::GaussianRational;

    #[test]
    fn canonical_phase_strips_signs() {
        let v = StateVector::from_rationals(vec![Rational::zero(), Rational::from_integer(-1), Rational::zero()]);
        assert_eq!(canonical_phase(v), StateVector::basis(3, 1));
        let i = StateVector::new(vec![GaussianRational::i(), GaussianRational::zero()]);
        assert_eq!(canonical_phase(i), StateVector::basis(2, 0));
    }
}
