//! Exact runs on `a^n` for astronomically large `n`, without walking the
//! tape: angle scaling or matrix powers for MCQFAs, cycle arithmetic for
//! rtDFAs.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::exactnum::Rational;
use crate::machines::{CompiledMachine, Halting, ModelClass};
use crate::qstate::{Matrix, Register, UnitaryMatrix};

use super::step::{initial_register, quantum_phase};
use super::{require_class, AnalysisError, Mass, OutcomeDistribution};

fn halted(h: Halting) -> OutcomeDistribution {
    let mut d = OutcomeDistribution {
        p_accept: Rational::zero(),
        p_reject: Rational::zero(),
        p_dont_know: Rational::zero(),
        p_continue: Rational::zero(),
    };
    *match h {
        Halting::Accept => &mut d.p_accept,
        Halting::Reject => &mut d.p_reject,
        Halting::DontKnow => &mut d.p_dont_know,
    } = Rational::one();
    d
}

fn matrix_power(m: &Matrix, exp: &BigInt) -> Matrix {
    let mut result = Matrix::identity(m.dim());
    let mut base = m.clone();
    let mut e = exp.clone();
    let two = BigInt::from(2);
    while !e.is_zero() {
        if e.is_odd() {
            result = result.mul(&base).expect("same dimension");
        }
        base = base.mul(&base).expect("same dimension");
        e /= &two;
    }
    result
}

/// Distribution of one pass over `¢ a^length $`.
pub fn run_exact_unary(machine: &CompiledMachine, length: &BigInt) -> Result<OutcomeDistribution, AnalysisError> {
    let class = machine.class();
    require_class(
        "unary run",
        "unary MCQFA or rtDFA",
        class,
        matches!(class, ModelClass::Mcqfa | ModelClass::RtDfa) && machine.spec.alphabet.len() == 1,
    )?;
    if length.sign() == num_bigint::Sign::Minus {
        return Err(AnalysisError::Unsupported("negative length".into()));
    }
    let left = 0;
    let letter = 1;
    let right = 2;
    match class {
        ModelClass::Mcqfa => {
            let s = machine.initial;
            let mut reg = single_outcome(quantum_phase(machine.quantum_step(s, left), &initial_register(machine))?)?;
            if let Some(step) = machine.quantum_step(s, letter) {
                if step.measurement.is_some() {
                    return Err(AnalysisError::Unsupported("MCQFA measures only on $".into()));
                }
                if let Some(u) = &step.unitary {
                    let p = UnitaryMatrix::new(matrix_power(u.matrix(), length))?;
                    reg = reg.apply(&p)?;
                }
                if let Some(a) = &step.rotation {
                    reg = reg.rotate(&a.scale(&Rational::from_integer(length.clone())))?;
                }
                reg = reg.normalize();
            }
            finish(machine, s, right, &reg)
        }
        _ => {
            let mut s = machine.classical(machine.initial, left, 1).expect("validated machines are complete").0;
            if let Some(h) = machine.halting(s) {
                return Ok(halted(h));
            }
            // Walk letters until a halting state or a repeated state.
            let mut seen: HashMap<usize, u64> = HashMap::new();
            let mut trail = Vec::new();
            let mut i: u64 = 0;
            loop {
                if BigInt::from(i) == *length {
                    return finish(machine, s, right, &Register::initial(1));
                }
                if let Some(&first) = seen.get(&s) {
                    let cycle = i - first;
                    let offset = (length - BigInt::from(first)) % BigInt::from(cycle);
                    let idx = first + offset.to_u64().expect("below cycle length");
                    return finish(machine, trail[idx as usize], right, &Register::initial(1));
                }
                seen.insert(s, i);
                trail.push(s);
                s = machine.classical(s, letter, 1).expect("validated machines are complete").0;
                if let Some(h) = machine.halting(s) {
                    return Ok(halted(h));
                }
                i += 1;
            }
        }
    }
}

fn single_outcome(v: Vec<(u32, super::StepProb, Register)>) -> Result<Register, AnalysisError> {
    match <[_; 1]>::try_from(v) {
        Ok([(_, _, r)]) => Ok(r),
        Err(_) => Err(AnalysisError::Unsupported("MCQFA measures only on $".into())),
    }
}

fn finish(machine: &CompiledMachine, s: usize, right: usize, reg: &Register) -> Result<OutcomeDistribution, AnalysisError> {
    let mut d = OutcomeDistribution {
        p_accept: Rational::zero(),
        p_reject: Rational::zero(),
        p_dont_know: Rational::zero(),
        p_continue: Rational::zero(),
    };
    for (outcome, prob, _) in quantum_phase(machine.quantum_step(s, right), reg)? {
        let p = <Rational as Mass>::from_prob(&prob, 0)?;
        let (next, _) = machine.classical(s, right, outcome).expect("validated machines are complete");
        let slot = match machine.halting(next) {
            Some(Halting::Accept) => &mut d.p_accept,
            Some(Halting::Reject) => &mut d.p_reject,
            Some(Halting::DontKnow) => &mut d.p_dont_know,
            None => &mut d.p_continue,
        };
        *slot += &p;
    }
    Ok(d)
}
