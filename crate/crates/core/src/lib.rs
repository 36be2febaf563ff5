//! Exact simulation and verification of quantum and classical finite
//! automata for promise problems, plus the magic-square and memory games.

pub mod analysis;
pub mod constructions;
pub mod contextuality;
pub mod exactnum;
pub mod machines;
pub mod problems;
pub mod qstate;
pub mod verify;

pub use exactnum::{AngleKind, AngleProbability, GaussianRational, Rational, RationalInterval, SymbolicAngle};
pub use qstate::{BasisMeasurement, Matrix, Register, RotationRegister, StateVector, UnitaryMatrix};
