//! Exact scalars: rationals, Gaussian rationals, symbolic rotation angles
//! and certified interval evaluation of `sin^2`.

mod angle;
mod gaussian;
mod interval;
mod rational;

pub use angle::{angle_probability, pi_enclosure, AngleKind, AngleProbability, SymbolicAngle, MIN_PRECISION_BITS};
pub use gaussian::GaussianRational;
pub use interval::{one_minus_inv_e_bracket, one_minus_inv_e_lower, one_minus_inv_e_upper, RationalInterval};
pub use rational::{compare, Rational};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse exact scalar from {0:?}")]
    Parse(String),
    #[error("cannot add angles of different kinds")]
    AngleKindMismatch,
}
