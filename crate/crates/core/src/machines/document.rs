//! The JSON machine-spec document. Field order in the serde structs is
//! alphabetical, which makes emitted documents canonical.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{MachineSpec, ModelClass, Move, QuantumStep, StochasticMatrix, Symbol};
use crate::exactnum::{Rational, SymbolicAngle};
use crate::qstate::Matrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecParseError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{0}")]
    Semantic(String),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    alphabet: Vec<String>,
    #[serde(default)]
    classical_delta: Vec<ClassicalEntry>,
    model_class: ModelClass,
    #[serde(default)]
    name: String,
    #[serde(default)]
    quantum_delta: Vec<QuantumEntry>,
    quantum_dim: usize,
    states: StateBlock,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    stochastic: BTreeMap<String, Vec<Vec<Rational>>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateBlock {
    accept: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dont_know: Option<String>,
    initial: Option<String>,
    names: Vec<String>,
    reject: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassicalEntry {
    #[serde(rename = "move")]
    mv: Move,
    next: String,
    outcome: u32,
    state: String,
    symbol: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct QuantumEntry {
    /// 1-based basis indices.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    measurement: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rotation: Option<SymbolicAngle>,
    state: String,
    symbol: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    unitary: Option<Matrix>,
}

fn semantic(msg: impl Into<String>) -> SpecParseError {
    SpecParseError::Semantic(msg.into())
}

fn parse_symbol(s: &str) -> Result<Symbol, SpecParseError> {
    s.parse().map_err(semantic)
}

/// Parses a machine-spec document. Structural problems (bad JSON, bad
/// scalars, missing fields) are syntax errors; model constraints are left
/// to [`super::validate`] except for the three mandatory roles.
pub fn parse_spec(text: &str) -> Result<MachineSpec, SpecParseError> {
    let doc: Document = serde_json::from_str(text).map_err(|e| SpecParseError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let initial = doc.states.initial.ok_or_else(|| semantic("missing initial state"))?;
    let accept = doc.states.accept.ok_or_else(|| semantic("missing accepting state"))?;
    let reject = doc.states.reject.ok_or_else(|| semantic("missing rejecting state"))?;
    let alphabet = doc
        .alphabet
        .iter()
        .map(|s| match parse_symbol(s)? {
            Symbol::Letter(c) => Ok(c),
            _ => Err(semantic("end-markers may not be input letters")),
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut quantum_delta = BTreeMap::new();
    for q in doc.quantum_delta {
        let measurement = q
            .measurement
            .map(|blocks| {
                blocks
                    .into_iter()
                    .map(|b| {
                        b.into_iter()
                            .map(|i| i.checked_sub(1).ok_or_else(|| semantic("basis indices are 1-based")))
                            .collect::<Result<Vec<_>, _>>()
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .transpose()?;
        let key = (q.state, parse_symbol(&q.symbol)?);
        let step = QuantumStep { unitary: q.unitary, rotation: q.rotation.map(|a| SymbolicAngle::new(a.kind, a.coeff)), measurement };
        if quantum_delta.insert(key.clone(), step).is_some() {
            return Err(semantic(format!("duplicate quantum entry for ({}, {})", key.0, key.1)));
        }
    }

    let mut classical_delta = BTreeMap::new();
    for c in doc.classical_delta {
        let key = (c.state, parse_symbol(&c.symbol)?, c.outcome);
        if classical_delta.insert(key.clone(), (c.next, c.mv)).is_some() {
            return Err(semantic(format!("duplicate classical entry for ({}, {}, {})", key.0, key.1, key.2)));
        }
    }

    let mut stochastic = BTreeMap::new();
    for (sym, rows) in doc.stochastic {
        stochastic.insert(parse_symbol(&sym)?, StochasticMatrix { rows });
    }

    Ok(MachineSpec {
        name: doc.name,
        model_class: doc.model_class,
        states: doc.states.names,
        initial,
        accept,
        reject,
        dont_know: doc.states.dont_know,
        alphabet,
        quantum_dim: doc.quantum_dim,
        quantum_delta,
        classical_delta,
        stochastic,
    })
}

/// Emits the canonical pretty-printed document.
pub fn emit_spec(spec: &MachineSpec) -> String {
    let doc = Document {
        alphabet: spec.alphabet.iter().map(|c| c.to_string()).collect(),
        classical_delta: spec
            .classical_delta
            .iter()
            .map(|((state, sym, outcome), (next, mv))| ClassicalEntry {
                mv: *mv,
                next: next.clone(),
                outcome: *outcome,
                state: state.clone(),
                symbol: sym.to_string(),
            })
            .collect(),
        model_class: spec.model_class,
        name: spec.name.clone(),
        quantum_delta: spec
            .quantum_delta
            .iter()
            .map(|((state, sym), step)| QuantumEntry {
                measurement: step.measurement.as_ref().map(|b| b.iter().map(|blk| blk.iter().map(|i| i + 1).collect()).collect()),
                rotation: step.rotation.clone(),
                state: state.clone(),
                symbol: sym.to_string(),
                unitary: step.unitary.clone(),
            })
            .collect(),
        quantum_dim: spec.quantum_dim,
        states: StateBlock {
            accept: Some(spec.accept.clone()),
            dont_know: spec.dont_know.clone(),
            initial: Some(spec.initial.clone()),
            names: spec.states.clone(),
            reject: Some(spec.reject.clone()),
        },
        stochastic: spec.stochastic.iter().map(|(sym, m)| (sym.to_string(), m.rows.clone())).collect(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("documents always serialize");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::GaussianRational;

    fn sample() -> MachineSpec {
        let mut spec = MachineSpec::new("sample", ModelClass::RtQcfa, &['a'], 2);
        let m = Matrix::from_rows(vec![
            vec![GaussianRational::zero(), GaussianRational::i()],
            vec![GaussianRational::i(), GaussianRational::zero()],
        ])
        .unwrap();
        spec.set_quantum("s1", Symbol::Letter('a'), QuantumStep::unitary(m));
        spec.set_quantum("s1", Symbol::RightEnd, QuantumStep::measure(vec![vec![0], vec![1]]));
        for sym in spec.symbols() {
            spec.set_classical("s1", sym, 1, "s1", Move::Right);
        }
        spec.set_classical("s1", Symbol::RightEnd, 1, "sa", Move::Right);
        spec.set_classical("s1", Symbol::RightEnd, 2, "sr", Move::Right);
        spec
    }

    #[test]
    fn round_trip() {
        let spec = sample();
        let text = emit_spec(&spec);
        let back = parse_spec(&text).unwrap();
        assert_eq!(back, spec);
        assert_eq!(emit_spec(&back), text);
    }

    #[test]
    fn keys_are_alphabetical() {
        let text = emit_spec(&sample());
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        let pos = |k: &str| text.find(&format!("\"{k}\"")).unwrap();
        assert!(pos("alphabet") < pos("classical_delta"));
        assert!(pos("quantum_dim") < pos("states"));
    }

    #[test]
    fn zero_denominator_is_a_syntax_error() {
        let text = emit_spec(&sample()).replacen("\"0/1+0/1 i\"", "\"1/0+0/1 i\"", 1);
        match parse_spec(&text) {
            Err(SpecParseError::Syntax { line, .. }) => assert!(line > 1),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn missing_reject_state() {
        let mut v: serde_json::Value = serde_json::from_str(&emit_spec(&sample())).unwrap();
        v["states"].as_object_mut().unwrap().remove("reject");
        let err = parse_spec(&v.to_string()).unwrap_err();
        assert_eq!(err, SpecParseError::Semantic("missing rejecting state".into()));
    }
}
