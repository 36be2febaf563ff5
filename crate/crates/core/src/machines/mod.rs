//! Machine descriptions: the data every simulator in `analysis` executes.
//!
//! A [`MachineSpec`] is one record for all seven model classes. The class
//! tag decides which head discipline and transition shapes [`validate`]
//! accepts; [`compile`] turns a valid spec into index-based tables.

mod document;
mod validate;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactnum::{Rational, SymbolicAngle};
use crate::qstate::{BasisMeasurement, Matrix, QStateError, UnitaryMatrix};

pub use document::{emit_spec, parse_spec, SpecParseError};
pub use validate::{validate, Violation, ViolationKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModelClass {
    #[serde(rename = "MCQFA")]
    Mcqfa,
    #[serde(rename = "rtQCFA")]
    RtQcfa,
    #[serde(rename = "RestartingRtQCFA")]
    RestartingRtQcfa,
    #[serde(rename = "Sweeping2QCFA")]
    Sweeping2Qcfa,
    #[serde(rename = "General2QCFA")]
    General2Qcfa,
    #[serde(rename = "rtPFA")]
    RtPfa,
    #[serde(rename = "rtDFA")]
    RtDfa,
}

impl ModelClass {
    /// Head only ever moves right.
    pub fn is_realtime(self) -> bool {
        matches!(
            self,
            ModelClass::Mcqfa | ModelClass::RtQcfa | ModelClass::RestartingRtQcfa | ModelClass::RtPfa | ModelClass::RtDfa
        )
    }

    pub fn is_classical(self) -> bool {
        matches!(self, ModelClass::RtPfa | ModelClass::RtDfa)
    }
}

impl fmt::Display for ModelClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ModelClass::Mcqfa => "MCQFA",
            ModelClass::RtQcfa => "rtQCFA",
            ModelClass::RestartingRtQcfa => "RestartingRtQCFA",
            ModelClass::Sweeping2Qcfa => "Sweeping2QCFA",
            ModelClass::General2Qcfa => "General2QCFA",
            ModelClass::RtPfa => "rtPFA",
            ModelClass::RtDfa => "rtDFA",
        };
        f.write_str(s)
    }
}

/// A tape square: an end-marker or an input letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    LeftEnd,
    Letter(char),
    RightEnd,
}

impl Symbol {
    pub fn is_end_marker(self) -> bool {
        !matches!(self, Symbol::Letter(_))
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::LeftEnd => f.write_str("¢"),
            Symbol::RightEnd => f.write_str("$"),
            Symbol::Letter(c) => write!(f, "{c}"),
        }
    }
}

impl FromStr for Symbol {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut chars = s.chars();
        match (chars.next(), chars.next()) {
            (Some('¢'), None) => Ok(Symbol::LeftEnd),
            (Some('$'), None) => Ok(Symbol::RightEnd),
            (Some(c), None) => Ok(Symbol::Letter(c)),
            _ => Err(format!("symbol must be a single character, got {s:?}")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Move {
    #[serde(rename = "L")]
    Left,
    #[serde(rename = "S")]
    Stay,
    #[serde(rename = "R")]
    Right,
}

impl Move {
    pub fn delta(self) -> isize {
        match self {
            Move::Left => -1,
            Move::Stay => 0,
            Move::Right => 1,
        }
    }
}

/// The quantum action on one square: an optional unitary, then an optional
/// rotation of a one-qubit register, then an optional basis measurement.
/// Without a measurement the outcome id is 1.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct QuantumStep {
    pub unitary: Option<Matrix>,
    pub rotation: Option<SymbolicAngle>,
    /// 0-based basis-index blocks; outcome `i` is block `i - 1`.
    pub measurement: Option<Vec<Vec<usize>>>,
}

impl QuantumStep {
    pub fn unitary(m: Matrix) -> Self {
        QuantumStep { unitary: Some(m), ..Default::default() }
    }

    pub fn rotation(a: SymbolicAngle) -> Self {
        QuantumStep { rotation: Some(a), ..Default::default() }
    }

    pub fn measure(blocks: Vec<Vec<usize>>) -> Self {
        QuantumStep { measurement: Some(blocks), ..Default::default() }
    }

    pub fn then_measure(mut self, blocks: Vec<Vec<usize>>) -> Self {
        self.measurement = Some(blocks);
        self
    }

    pub fn outcome_count(&self) -> u32 {
        self.measurement.as_ref().map_or(1, |m| m.len() as u32)
    }
}

/// Row-stochastic matrix over the classical states, `rows[from][to]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StochasticMatrix {
    pub rows: Vec<Vec<Rational>>,
}

impl StochasticMatrix {
    pub fn is_stochastic(&self, dim: usize) -> bool {
        self.rows.len() == dim
            && self.rows.iter().all(|r| {
                r.len() == dim && r.iter().all(|x| !x.is_negative()) && r.iter().sum::<Rational>().is_one()
            })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MachineSpec {
    pub name: String,
    pub model_class: ModelClass,
    pub states: Vec<String>,
    pub initial: String,
    pub accept: String,
    pub reject: String,
    pub dont_know: Option<String>,
    pub alphabet: Vec<char>,
    pub quantum_dim: usize,
    pub quantum_delta: BTreeMap<(String, Symbol), QuantumStep>,
    pub classical_delta: BTreeMap<(String, Symbol, u32), (String, Move)>,
    pub stochastic: BTreeMap<Symbol, StochasticMatrix>,
}

impl MachineSpec {
    /// Empty spec with the three mandatory states `s1`, `sa`, `sr`.
    pub fn new(name: &str, model_class: ModelClass, alphabet: &[char], quantum_dim: usize) -> Self {
        MachineSpec {
            name: name.to_string(),
            model_class,
            states: vec!["s1".into(), "sa".into(), "sr".into()],
            initial: "s1".into(),
            accept: "sa".into(),
            reject: "sr".into(),
            dont_know: None,
            alphabet: alphabet.to_vec(),
            quantum_dim,
            quantum_delta: BTreeMap::new(),
            classical_delta: BTreeMap::new(),
            stochastic: BTreeMap::new(),
        }
    }

    /// Registers a state name (idempotent) and returns it.
    pub fn state(&mut self, name: &str) -> String {
        if !self.states.iter().any(|s| s == name) {
            self.states.push(name.to_string());
        }
        name.to_string()
    }

    pub fn with_dont_know(&mut self, name: &str) -> String {
        let s = self.state(name);
        self.dont_know = Some(s.clone());
        s
    }

    pub fn symbols(&self) -> Vec<Symbol> {
        let mut out = vec![Symbol::LeftEnd];
        out.extend(self.alphabet.iter().map(|&c| Symbol::Letter(c)));
        out.push(Symbol::RightEnd);
        out
    }

    pub fn is_halting(&self, state: &str) -> bool {
        state == self.accept || state == self.reject || self.dont_know.as_deref() == Some(state)
    }

    pub fn set_quantum(&mut self, state: &str, symbol: Symbol, step: QuantumStep) {
        self.quantum_delta.insert((state.to_string(), symbol), step);
    }

    pub fn set_classical(&mut self, state: &str, symbol: Symbol, outcome: u32, next: &str, mv: Move) {
        self.classical_delta.insert((state.to_string(), symbol, outcome), (next.to_string(), mv));
    }

    /// Transition for every outcome of the quantum step already set on
    /// `(state, symbol)`.
    pub fn set_all_outcomes(&mut self, state: &str, symbol: Symbol, next: &str, mv: Move) {
        let n = self.quantum_delta.get(&(state.to_string(), symbol)).map_or(1, QuantumStep::outcome_count);
        for o in 1..=n {
            self.set_classical(state, symbol, o, next, mv);
        }
    }

    /// Count of non-halting states.
    pub fn working_state_count(&self) -> usize {
        self.states.iter().filter(|s| !self.is_halting(s)).count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MachineError {
    #[error("machine is invalid: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("symbol {0:?} is not in the input alphabet")]
    UnknownSymbol(char),
}

/// What happens to an outcome: halt with a verdict, or move on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Halting {
    Accept,
    Reject,
    DontKnow,
}

#[derive(Clone, Debug)]
pub struct CompiledStep {
    pub unitary: Option<UnitaryMatrix>,
    pub rotation: Option<SymbolicAngle>,
    pub measurement: Option<BasisMeasurement>,
}

/// A validated spec with states and symbols replaced by indices.
/// Per state and symbol: the classical move for each outcome.
type ClassicalTable = Vec<Vec<Vec<Option<(usize, Move)>>>>;

/// Symbol index 0 is `¢`, `1..=|Σ|` are letters, `|Σ|+1` is `$`.
#[derive(Clone, Debug)]
pub struct CompiledMachine {
    pub spec: MachineSpec,
    pub initial: usize,
    halting: Vec<Option<Halting>>,
    quantum: Vec<Vec<Option<CompiledStep>>>,
    classical: ClassicalTable,
    stochastic: Vec<Option<Vec<Vec<Rational>>>>,
}

impl CompiledMachine {
    pub fn class(&self) -> ModelClass {
        self.spec.model_class
    }

    pub fn quantum_dim(&self) -> usize {
        self.spec.quantum_dim
    }

    pub fn state_name(&self, s: usize) -> &str {
        &self.spec.states[s]
    }

    pub fn halting(&self, s: usize) -> Option<Halting> {
        self.halting[s]
    }

    pub fn quantum_step(&self, s: usize, sym: usize) -> Option<&CompiledStep> {
        self.quantum[s][sym].as_ref()
    }

    pub fn classical(&self, s: usize, sym: usize, outcome: u32) -> Option<(usize, Move)> {
        self.classical[s][sym].get(outcome as usize - 1).copied().flatten()
    }

    pub fn stochastic_row(&self, s: usize, sym: usize) -> Option<&[Rational]> {
        self.stochastic[sym].as_ref().map(|m| m[s].as_slice())
    }

    /// `¢ w $` as symbol indices.
    pub fn tape(&self, input: &str) -> Result<Vec<usize>, MachineError> {
        let mut tape = vec![0];
        for c in input.chars() {
            let idx = self.spec.alphabet.iter().position(|&a| a == c).ok_or(MachineError::UnknownSymbol(c))?;
            tape.push(idx + 1);
        }
        tape.push(self.spec.alphabet.len() + 1);
        Ok(tape)
    }

    pub fn symbol_index(&self, sym: Symbol) -> Option<usize> {
        match sym {
            Symbol::LeftEnd => Some(0),
            Symbol::RightEnd => Some(self.spec.alphabet.len() + 1),
            Symbol::Letter(c) => self.spec.alphabet.iter().position(|&a| a == c).map(|i| i + 1),
        }
    }
}

/// Validates and indexes a spec.
pub fn compile(spec: &MachineSpec) -> Result<CompiledMachine, MachineError> {
    let violations = validate(spec);
    if !violations.is_empty() {
        return Err(MachineError::Invalid(violations));
    }
    let index = |name: &str| spec.states.iter().position(|s| s == name).expect("validated state");
    let symbols = spec.symbols();
    let sym_index = |sym: &Symbol| symbols.iter().position(|s| s == sym).expect("validated symbol");
    let n_states = spec.states.len();
    let n_syms = symbols.len();

    let halting = spec
        .states
        .iter()
        .map(|s| {
            if *s == spec.accept {
                Some(Halting::Accept)
            } else if *s == spec.reject {
                Some(Halting::Reject)
            } else if spec.dont_know.as_deref() == Some(s) {
                Some(Halting::DontKnow)
            } else {
                None
            }
        })
        .collect();

    let mut quantum: Vec<Vec<Option<CompiledStep>>> = vec![vec![None; n_syms]; n_states];
    for ((state, sym), step) in &spec.quantum_delta {
        let unitary = step
            .unitary
            .clone()
            .map(UnitaryMatrix::new)
            .transpose()
            .map_err(|e: QStateError| MachineError::Invalid(vec![Violation::new(ViolationKind::Unitarity, Some((state, *sym)), e.to_string())]))?;
        let measurement = step
            .measurement
            .clone()
            .map(|b| BasisMeasurement::new(spec.quantum_dim, b))
            .transpose()
            .map_err(|e| MachineError::Invalid(vec![Violation::new(ViolationKind::Dimension, Some((state, *sym)), e.to_string())]))?;
        quantum[index(state)][sym_index(sym)] = Some(CompiledStep { unitary, rotation: step.rotation.clone(), measurement });
    }

    let mut classical: ClassicalTable = vec![vec![Vec::new(); n_syms]; n_states];
    for ((state, sym, outcome), (next, mv)) in &spec.classical_delta {
        let slot = &mut classical[index(state)][sym_index(sym)];
        let o = *outcome as usize;
        if slot.len() < o {
            slot.resize(o, None);
        }
        slot[o - 1] = Some((index(next), *mv));
    }

    let mut stochastic = vec![None; n_syms];
    for (sym, m) in &spec.stochastic {
        stochastic[sym_index(sym)] = Some(m.rows.clone());
    }

    Ok(CompiledMachine { spec: spec.clone(), initial: index(&spec.initial), halting, quantum, classical, stochastic })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symbol_round_trip() {
        for s in [Symbol::LeftEnd, Symbol::RightEnd, Symbol::Letter('a')] {
            assert_eq!(s.to_string().parse::<Symbol>().unwrap(), s);
        }
        assert!("ab".parse::<Symbol>().is_err());
    }

    #[test]
    fn tape_layout() {
        let mut spec = MachineSpec::new("t", ModelClass::RtDfa, &['a', 'b'], 1);
        for sym in spec.symbols() {
            spec.set_classical("s1", sym, 1, "s1", Move::Right);
        }
        spec.set_classical("s1", Symbol::RightEnd, 1, "sa", Move::Right);
        let m = compile(&spec).unwrap();
        assert_eq!(m.tape("ab").unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(m.tape("ac"), Err(MachineError::UnknownSymbol('c')));
    }
}
