use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{MachineSpec, ModelClass, Move, Symbol};
use crate::qstate::{BasisMeasurement, UnitaryMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ViolationKind {
    States,
    Alphabet,
    Dimension,
    Unitarity,
    Stochastic,
    HeadMove,
    Incomplete,
    ClassShape,
}

/// One broken model constraint, located at a `(state, symbol)` entry when
/// it concerns one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub state: Option<String>,
    pub symbol: Option<Symbol>,
    pub message: String,
}

impl Violation {
    pub fn new(kind: ViolationKind, at: Option<(&String, Symbol)>, message: impl Into<String>) -> Self {
        Violation {
            kind,
            state: at.map(|(s, _)| s.clone()),
            symbol: at.map(|(_, y)| y),
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.state, self.symbol) {
            (Some(s), Some(y)) => write!(f, "({s}, {y}): {}", self.message),
            _ => f.write_str(&self.message),
        }
    }
}

/// Checks every model-class invariant; an empty list means the spec is valid.
pub fn validate(spec: &MachineSpec) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |kind, at: Option<(&String, Symbol)>, msg: String| out.push(Violation::new(kind, at, msg));

    // States.
    let names: BTreeSet<&str> = spec.states.iter().map(String::as_str).collect();
    if names.len() != spec.states.len() {
        push(ViolationKind::States, None, "duplicate state names".into());
    }
    for (role, s) in [("initial", &spec.initial), ("accepting", &spec.accept), ("rejecting", &spec.reject)] {
        if !names.contains(s.as_str()) {
            push(ViolationKind::States, None, format!("{role} state {s:?} is not declared"));
        }
    }
    if let Some(d) = &spec.dont_know {
        if !names.contains(d.as_str()) {
            push(ViolationKind::States, None, format!("don't-know state {d:?} is not declared"));
        }
        if d == &spec.accept || d == &spec.reject {
            push(ViolationKind::States, None, "don't-know state must differ from s_a and s_r".into());
        }
    }
    if spec.accept == spec.reject {
        push(ViolationKind::States, None, "accepting and rejecting states coincide".into());
    }
    if spec.is_halting(&spec.initial) {
        push(ViolationKind::States, None, "initial state is halting".into());
    }

    // Alphabet.
    let letters: BTreeSet<char> = spec.alphabet.iter().copied().collect();
    if letters.len() != spec.alphabet.len() {
        push(ViolationKind::Alphabet, None, "duplicate alphabet letters".into());
    }
    if letters.contains(&'¢') || letters.contains(&'$') {
        push(ViolationKind::Alphabet, None, "end-markers may not be input letters".into());
    }
    let symbols: BTreeSet<Symbol> = spec.symbols().into_iter().collect();
    if spec.quantum_dim == 0 {
        push(ViolationKind::Dimension, None, "quantum register must have dimension at least 1".into());
    }

    // Quantum entries.
    for ((state, sym), step) in &spec.quantum_delta {
        let at = Some((state, *sym));
        if !names.contains(state.as_str()) || !symbols.contains(sym) {
            push(ViolationKind::States, at, "quantum entry for an undeclared state or symbol".into());
            continue;
        }
        if spec.is_halting(state) {
            push(ViolationKind::States, at, "quantum entry on a halting state".into());
        }
        if let Some(m) = &step.unitary {
            if m.dim() != spec.quantum_dim {
                push(ViolationKind::Dimension, at, format!("unitary has dimension {} but the register has {}", m.dim(), spec.quantum_dim));
            } else if UnitaryMatrix::new(m.clone()).is_err() {
                push(ViolationKind::Unitarity, at, "matrix is not unitary (U†U ≠ I)".into());
            }
        }
        if step.rotation.is_some() && spec.quantum_dim != 2 {
            push(ViolationKind::Dimension, at, "rotations need a one-qubit register".into());
        }
        if let Some(blocks) = &step.measurement {
            if let Err(e) = BasisMeasurement::new(spec.quantum_dim, blocks.clone()) {
                push(ViolationKind::Dimension, at, e.to_string());
            }
        }
    }

    // Classical entries and completeness.
    let outcome_count = |state: &String, sym: Symbol| {
        spec.quantum_delta.get(&(state.clone(), sym)).map_or(1, |q| q.outcome_count())
    };
    for ((state, sym, outcome), (next, _)) in &spec.classical_delta {
        let at = Some((state, *sym));
        if !names.contains(state.as_str()) || !symbols.contains(sym) || !names.contains(next.as_str()) {
            push(ViolationKind::States, at, "classical entry mentions an undeclared state or symbol".into());
            continue;
        }
        if spec.is_halting(state) {
            push(ViolationKind::States, at, "classical entry on a halting state".into());
        }
        if *outcome == 0 || *outcome > outcome_count(state, *sym) {
            push(ViolationKind::Incomplete, at, format!("outcome {outcome} cannot occur here"));
        }
    }
    if spec.model_class != ModelClass::RtPfa {
        for state in spec.states.iter().filter(|s| !spec.is_halting(s)) {
            for &sym in &symbols {
                for o in 1..=outcome_count(state, sym) {
                    if !spec.classical_delta.contains_key(&(state.clone(), sym, o)) {
                        push(ViolationKind::Incomplete, Some((state, sym)), format!("no classical transition for outcome {o}"));
                    }
                }
            }
        }
    }

    // Class-specific shape.
    let class = spec.model_class;
    if class.is_classical() {
        if spec.quantum_dim != 1 {
            push(ViolationKind::ClassShape, None, format!("{class} must have a trivial quantum register"));
        }
        if !spec.quantum_delta.is_empty() {
            push(ViolationKind::ClassShape, None, format!("{class} may not have quantum transitions"));
        }
    }
    if class == ModelClass::RtPfa {
        if !spec.classical_delta.is_empty() {
            push(ViolationKind::ClassShape, None, "rtPFA transitions are given by stochastic matrices".into());
        }
        for &sym in &symbols {
            match spec.stochastic.get(&sym) {
                None => push(ViolationKind::Stochastic, None, format!("no stochastic matrix for symbol {sym}")),
                Some(m) if !m.is_stochastic(spec.states.len()) => {
                    push(ViolationKind::Stochastic, None, format!("matrix for symbol {sym} is not row-stochastic over the states"))
                }
                _ => {}
            }
        }
    } else if !spec.stochastic.is_empty() {
        push(ViolationKind::ClassShape, None, "only rtPFA machines carry stochastic matrices".into());
    }

    if class == ModelClass::Mcqfa {
        let working: Vec<&String> = spec.states.iter().filter(|s| !spec.is_halting(s)).collect();
        if working.len() != 1 {
            push(ViolationKind::ClassShape, None, format!("MCQFA must have exactly one non-halting state, found {}", working.len()));
        }
        for ((state, sym), step) in &spec.quantum_delta {
            if step.measurement.is_some() && *sym != Symbol::RightEnd {
                push(ViolationKind::ClassShape, Some((state, *sym)), "MCQFA measures only on the right end-marker".into());
            }
        }
        for ((state, sym, _), (next, _)) in &spec.classical_delta {
            if *sym != Symbol::RightEnd && next != state {
                push(ViolationKind::ClassShape, Some((state, *sym)), "MCQFA has no classical state changes before $".into());
            }
        }
    }

    // Head discipline.
    for ((state, sym, _), (next, mv)) in &spec.classical_delta {
        let at = Some((state, *sym));
        let halts = spec.is_halting(next);
        if class.is_realtime() {
            if *mv != Move::Right {
                push(ViolationKind::HeadMove, at, format!("{class} head must always move right"));
            }
            if *sym == Symbol::RightEnd && !halts {
                let restart = class == ModelClass::RestartingRtQcfa && *next == spec.initial;
                if class == ModelClass::RestartingRtQcfa && !restart {
                    push(ViolationKind::HeadMove, at, "restarting machines leave $ only by halting or restarting in s1".into());
                } else if class != ModelClass::RestartingRtQcfa {
                    push(ViolationKind::HeadMove, at, format!("{class} must halt on $"));
                }
            }
        } else if !halts {
            if *sym == Symbol::LeftEnd && *mv == Move::Left {
                push(ViolationKind::HeadMove, at, "head would leave the tape past ¢".into());
            }
            if *sym == Symbol::RightEnd && *mv == Move::Right {
                push(ViolationKind::HeadMove, at, "head would leave the tape past $".into());
            }
        }
    }
    if class == ModelClass::Sweeping2Qcfa {
        sweeping_discipline(spec, &mut out);
    }
    out
}

/// Direction changes only on end-markers: each state keeps one direction
/// across interior squares, ¢ turns right, $ turns left.
fn sweeping_discipline(spec: &MachineSpec, out: &mut Vec<Violation>) {
    let mut direction: BTreeMap<&str, Move> = BTreeMap::new();
    for ((state, sym, _), (_, mv)) in &spec.classical_delta {
        if sym.is_end_marker() {
            continue;
        }
        let at = Some((state, *sym));
        if *mv == Move::Stay {
            out.push(Violation::new(ViolationKind::HeadMove, at, "sweeping head may not pause inside the input"));
            continue;
        }
        match direction.get(state.as_str()) {
            Some(d) if d != mv => out.push(Violation::new(
                ViolationKind::HeadMove,
                at,
                "direction changes inside the input",
            )),
            _ => {
                direction.insert(state.as_str(), *mv);
            }
        }
    }
    for ((state, sym, _), (next, mv)) in &spec.classical_delta {
        if spec.is_halting(next) {
            continue;
        }
        let at = Some((state, *sym));
        let required = match sym {
            Symbol::LeftEnd => Move::Right,
            Symbol::RightEnd => Move::Left,
            Symbol::Letter(_) => *mv,
        };
        if sym.is_end_marker() && *mv != required {
            out.push(Violation::new(ViolationKind::HeadMove, at, format!("must turn {} at {sym}", if required == Move::Right { "right" } else { "left" })));
        }
        if let Some(d) = direction.get(next.as_str()) {
            if *d != required {
                out.push(Violation::new(ViolationKind::HeadMove, at, format!("enters {next}, which travels the other way")));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::Rational;
    use crate::machines::QuantumStep;
    use crate::qstate::Matrix;

    fn tiny(class: ModelClass) -> MachineSpec {
        let mut spec = MachineSpec::new("tiny", class, &['a'], 2);
        for sym in spec.symbols() {
            spec.set_classical("s1", sym, 1, "s1", Move::Right);
        }
        spec.set_classical("s1", Symbol::RightEnd, 1, "sa", Move::Right);
        spec
    }

    #[test]
    fn valid_tiny_machine() {
        assert_eq!(validate(&tiny(ModelClass::RtQcfa)), vec![]);
    }

    #[test]
    fn non_unitary_entry_is_reported_once() {
        let mut spec = tiny(ModelClass::RtQcfa);
        let m = Matrix::scaled_integers(&Rational::frac(1, 5), &[&[4, 3], &[3, 4]]).unwrap();
        spec.set_quantum("s1", Symbol::Letter('a'), QuantumStep::unitary(m));
        let v = validate(&spec);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].kind, ViolationKind::Unitarity);
        assert_eq!(v[0].symbol, Some(Symbol::Letter('a')));
    }

    #[test]
    fn realtime_left_move_is_reported() {
        let mut spec = tiny(ModelClass::RtQcfa);
        spec.set_classical("s1", Symbol::Letter('a'), 1, "s1", Move::Left);
        let v = validate(&spec);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].kind, ViolationKind::HeadMove);
    }

    #[test]
    fn same_accept_and_reject() {
        let mut spec = tiny(ModelClass::RtQcfa);
        spec.reject = "sa".into();
        assert!(validate(&spec).iter().any(|v| v.kind == ViolationKind::States));
    }

    #[test]
    fn missing_outcome_transition() {
        let mut spec = tiny(ModelClass::RtQcfa);
        spec.set_quantum("s1", Symbol::RightEnd, QuantumStep::measure(vec![vec![0], vec![1]]));
        let v = validate(&spec);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].kind, ViolationKind::Incomplete);
    }

    #[test]
    fn sweeping_turns_only_at_ends() {
        let mut spec = MachineSpec::new("sw", ModelClass::Sweeping2Qcfa, &['a'], 1);
        let r = spec.state("r");
        let l = spec.state("l");
        spec.set_classical("s1", Symbol::LeftEnd, 1, &r, Move::Right);
        spec.set_classical("s1", Symbol::Letter('a'), 1, "s1", Move::Left);
        spec.set_classical("s1", Symbol::RightEnd, 1, "sa", Move::Left);
        spec.set_classical(&r, Symbol::LeftEnd, 1, &r, Move::Right);
        spec.set_classical(&r, Symbol::Letter('a'), 1, &r, Move::Right);
        spec.set_classical(&r, Symbol::RightEnd, 1, &l, Move::Left);
        spec.set_classical(&l, Symbol::LeftEnd, 1, "sa", Move::Right);
        spec.set_classical(&l, Symbol::Letter('a'), 1, &l, Move::Left);
        spec.set_classical(&l, Symbol::RightEnd, 1, &l, Move::Left);
        assert_eq!(validate(&spec), vec![]);
        spec.set_classical(&r, Symbol::Letter('a'), 1, &l, Move::Right);
        assert!(validate(&spec).iter().any(|v| v.kind == ViolationKind::HeadMove));
    }
}
