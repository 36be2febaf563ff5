//! Exact statevectors, unitaries and computational-basis measurements.
//!
//! Multi-register states pack indices most-significant-first: in `a ⊗ b`
//! the basis index is `i_a * dim(b) + i_b`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactnum::{AngleProbability, ExactError, GaussianRational, Rational, SymbolicAngle};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QStateError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is not unitary")]
    NotUnitary,
    #[error("matrix rows have inconsistent lengths")]
    Ragged,
    #[error("invalid measurement partition: {0}")]
    BadPartition(String),
    #[error("register state not representable: {0}")]
    NonRepresentable(String),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StateVector {
    amplitudes: Vec<GaussianRational>,
}

impl StateVector {
    pub fn new(amplitudes: Vec<GaussianRational>) -> Self {
        assert!(!amplitudes.is_empty(), "state vector must have positive dimension");
        StateVector { amplitudes }
    }

    pub fn from_rationals(values: Vec<Rational>) -> Self {
        Self::new(values.into_iter().map(GaussianRational::real).collect())
    }

    /// `|index>` in a register of dimension `dim` (0-based index).
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amplitudes = vec![GaussianRational::zero(); dim];
        amplitudes[index] = GaussianRational::one();
        StateVector { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[GaussianRational] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> Rational {
        self.amplitudes.iter().map(GaussianRational::norm_sqr).sum()
    }

    pub fn is_normalized(&self) -> bool {
        self.norm_sqr().is_one()
    }

    pub fn scale(&self, k: &Rational) -> StateVector {
        StateVector { amplitudes: self.amplitudes.iter().map(|a| a.scale(k)).collect() }
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<GaussianRational, QStateError> {
        check_dim(self.dim(), other.dim())?;
        let mut acc = GaussianRational::zero();
        for (a, b) in self.amplitudes.iter().zip(&other.amplitudes) {
            acc += &(&a.conj() * b);
        }
        Ok(acc)
    }

    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let mut amplitudes = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        StateVector { amplitudes }
    }

    /// The basis index if the vector is `±|i>` or `±i|i>`.
    pub fn as_basis_state(&self) -> Option<usize> {
        let mut found = None;
        for (i, a) in self.amplitudes.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            if found.is_some() || !a.norm_sqr().is_one() {
                return None;
            }
            found = Some(i);
        }
        found
    }
}

impl fmt::Debug for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.amplitudes).finish()
    }
}

fn check_dim(expected: usize, got: usize) -> Result<(), QStateError> {
    if expected == got {
        Ok(())
    } else {
        Err(QStateError::DimensionMismatch { expected, got })
    }
}

/// Square matrix over the Gaussian rationals, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    dim: usize,
    entries: Vec<GaussianRational>,
}

impl Matrix {
    pub fn from_rows(rows: Vec<Vec<GaussianRational>>) -> Result<Self, QStateError> {
        let dim = rows.len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(QStateError::Ragged);
        }
        Ok(Matrix { dim, entries: rows.into_iter().flatten().collect() })
    }

    /// Integer entries times a common rational factor, e.g. `1/5 * [[4,3],[-3,4]]`.
    pub fn scaled_integers(factor: &Rational, rows: &[&[i64]]) -> Result<Self, QStateError> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| GaussianRational::real(Rational::from_integer(x) * factor)).collect())
                .collect(),
        )
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![GaussianRational::zero(); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = GaussianRational::one();
        }
        Matrix { dim, entries }
    }

    /// Permutation matrix sending `|i>` to `|perm[i]>`.
    pub fn permutation(perm: &[usize]) -> Self {
        let dim = perm.len();
        let mut entries = vec![GaussianRational::zero(); dim * dim];
        for (col, &row) in perm.iter().enumerate() {
            entries[row * dim + col] = GaussianRational::one();
        }
        Matrix { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> &GaussianRational {
        &self.entries[row * self.dim + col]
    }

    pub fn rows(&self) -> Vec<Vec<GaussianRational>> {
        self.entries.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn adjoint(&self) -> Matrix {
        let n = self.dim;
        let mut entries = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                entries.push(self.get(c, r).conj());
            }
        }
        Matrix { dim: n, entries }
    }

    pub fn mul(&self, rhs: &Matrix) -> Result<Matrix, QStateError> {
        check_dim(self.dim, rhs.dim)?;
        let n = self.dim;
        let mut entries = vec![GaussianRational::zero(); n * n];
        for r in 0..n {
            for k in 0..n {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..n {
                    let b = rhs.get(k, c);
                    if !b.is_zero() {
                        entries[r * n + c] += &(a * b);
                    }
                }
            }
        }
        Ok(Matrix { dim: n, entries })
    }

    pub fn apply(&self, v: &StateVector) -> Result<StateVector, QStateError> {
        check_dim(self.dim, v.dim())?;
        let n = self.dim;
        let mut out = Vec::with_capacity(n);
        for r in 0..n {
            let mut acc = GaussianRational::zero();
            for (c, amp) in v.amplitudes().iter().enumerate() {
                let m = self.get(r, c);
                if !m.is_zero() && !amp.is_zero() {
                    acc += &(m * amp);
                }
            }
            out.push(acc);
        }
        Ok(StateVector { amplitudes: out })
    }

    pub fn scale(&self, k: &GaussianRational) -> Matrix {
        Matrix { dim: self.dim, entries: self.entries.iter().map(|e| e * k).collect() }
    }

    pub fn add(&self, rhs: &Matrix) -> Result<Matrix, QStateError> {
        check_dim(self.dim, rhs.dim)?;
        let entries = self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect();
        Ok(Matrix { dim: self.dim, entries })
    }

    pub fn tensor(&self, rhs: &Matrix) -> Matrix {
        let (n, m) = (self.dim, rhs.dim);
        let dim = n * m;
        let mut entries = vec![GaussianRational::zero(); dim * dim];
        for r1 in 0..n {
            for c1 in 0..n {
                let a = self.get(r1, c1);
                if a.is_zero() {
                    continue;
                }
                for r2 in 0..m {
                    for c2 in 0..m {
                        entries[(r1 * m + r2) * dim + c1 * m + c2] = a * rhs.get(r2, c2);
                    }
                }
            }
        }
        Matrix { dim, entries }
    }

    pub fn is_identity(&self) -> bool {
        *self == Matrix::identity(self.dim)
    }

    pub fn is_hermitian(&self) -> bool {
        *self == self.adjoint()
    }

    pub fn is_unitary(&self) -> bool {
        self.adjoint().mul(self).map(|p| p.is_identity()).unwrap_or(false)
    }

    /// `tr(self)`.
    pub fn trace(&self) -> GaussianRational {
        let mut acc = GaussianRational::zero();
        for i in 0..self.dim {
            acc += self.get(i, i);
        }
        acc
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.entries.chunks(self.dim)).finish()
    }
}

impl Serialize for Matrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.rows().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<GaussianRational>>::deserialize(deserializer)?;
        Matrix::from_rows(rows).map_err(serde::de::Error::custom)
    }
}

/// A matrix checked to satisfy `U†U = I` exactly.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct UnitaryMatrix(Matrix);

impl UnitaryMatrix {
    pub fn new(m: Matrix) -> Result<Self, QStateError> {
        if m.is_unitary() {
            Ok(UnitaryMatrix(m))
        } else {
            Err(QStateError::NotUnitary)
        }
    }

    pub fn identity(dim: usize) -> Self {
        UnitaryMatrix(Matrix::identity(dim))
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    pub fn inverse(&self) -> UnitaryMatrix {
        UnitaryMatrix(self.0.adjoint())
    }

    pub fn then(&self, next: &UnitaryMatrix) -> Result<UnitaryMatrix, QStateError> {
        Ok(UnitaryMatrix(next.0.mul(&self.0)?))
    }

    pub fn tensor(&self, rhs: &UnitaryMatrix) -> UnitaryMatrix {
        UnitaryMatrix(self.0.tensor(&rhs.0))
    }
}

/// `u · s`.
pub fn apply_unitary(u: &UnitaryMatrix, s: &StateVector) -> Result<StateVector, QStateError> {
    u.0.apply(s)
}

/// Partition of the computational basis into labelled outcomes. Outcome
/// ids are 1-based positions in `blocks`; basis indices are 0-based.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BasisMeasurement {
    dim: usize,
    blocks: Vec<Vec<usize>>,
}

impl BasisMeasurement {
    pub fn new(dim: usize, blocks: Vec<Vec<usize>>) -> Result<Self, QStateError> {
        let mut seen = vec![false; dim];
        for block in &blocks {
            if block.is_empty() {
                return Err(QStateError::BadPartition("empty outcome block".into()));
            }
            for &i in block {
                if i >= dim {
                    return Err(QStateError::BadPartition(format!("basis index {} out of range", i + 1)));
                }
                if seen[i] {
                    return Err(QStateError::BadPartition(format!("basis index {} listed twice", i + 1)));
                }
                seen[i] = true;
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(QStateError::BadPartition(format!("basis index {} not covered", missing + 1)));
        }
        Ok(BasisMeasurement { dim, blocks })
    }

    /// One outcome per basis state.
    pub fn complete(dim: usize) -> Self {
        BasisMeasurement { dim, blocks: (0..dim).map(|i| vec![i]).collect() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn outcome_ids(&self) -> impl Iterator<Item = u32> + '_ {
        1..=self.blocks.len() as u32
    }

    pub fn outcome_of(&self, basis_index: usize) -> u32 {
        self.blocks
            .iter()
            .position(|b| b.contains(&basis_index))
            .map(|p| p as u32 + 1)
            .expect("partition covers the basis")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasurementOutcome {
    pub outcome: u32,
    pub probability: Rational,
    /// Normalised when `probability` has a rational square root, otherwise
    /// the raw projection; in both cases `weight * |amplitude|^2` gives the
    /// conditional basis probabilities.
    pub state: StateVector,
    pub weight: Rational,
}

/// Projects `v` onto the basis states of one outcome block.
pub fn project(m: &BasisMeasurement, block: usize, v: &StateVector) -> StateVector {
    let mut amplitudes = vec![GaussianRational::zero(); v.dim()];
    for &i in &m.blocks[block] {
        amplitudes[i] = v.amplitudes()[i].clone();
    }
    StateVector { amplitudes }
}

pub fn measure(m: &BasisMeasurement, s: &StateVector) -> Result<Vec<MeasurementOutcome>, QStateError> {
    check_dim(m.dim, s.dim())?;
    let total = s.norm_sqr();
    let mut out = Vec::new();
    for (b, _) in m.blocks.iter().enumerate() {
        let proj = project(m, b, s);
        let mass = proj.norm_sqr();
        if mass.is_zero() {
            continue;
        }
        let probability = mass.checked_div(&total)?;
        let (state, weight) = match mass.sqrt_exact() {
            Some(root) => (proj.scale(&root.recip()?), Rational::one()),
            None => (proj, mass.recip()?),
        };
        out.push(MeasurementOutcome { outcome: b as u32 + 1, probability, state, weight });
    }
    Ok(out)
}

/// Kronecker product of two statevectors or two unitaries.
pub trait Tensor {
    fn tensor_with(&self, rhs: &Self) -> Self;
}

impl Tensor for StateVector {
    fn tensor_with(&self, rhs: &Self) -> Self {
        self.tensor(rhs)
    }
}

impl Tensor for UnitaryMatrix {
    fn tensor_with(&self, rhs: &Self) -> Self {
        self.tensor(rhs)
    }
}

pub fn tensor<T: Tensor>(a: &T, b: &T) -> T {
    a.tensor_with(b)
}

/// Single qubit in state `cos(angle)|0> + sin(angle)|1>`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RotationRegister {
    pub current: SymbolicAngle,
}

impl RotationRegister {
    pub fn new(current: SymbolicAngle) -> Self {
        RotationRegister { current }
    }

    pub fn rotate(&self, by: &SymbolicAngle) -> Result<RotationRegister, QStateError> {
        Ok(RotationRegister { current: self.current.add(by)? })
    }

    /// Rotating by `by` applied `times` times.
    pub fn rotate_n(&self, by: &SymbolicAngle, times: &BigInt) -> Result<RotationRegister, QStateError> {
        let total = by.scale(&Rational::from_integer(times.clone()));
        self.rotate(&total)
    }

    /// Probability of `|1>`.
    pub fn probability_one(&self, precision_bits: u32) -> AngleProbability {
        crate::exactnum::angle_probability(&self.current, precision_bits)
    }

    /// The exact vector, available when the angle is a multiple of `pi/2`.
    pub fn to_vector(&self) -> Option<StateVector> {
        let q = self.current.quarter_turns()?;
        let r = q.mod_floor(&BigInt::from(4));
        let (idx, sign) = match r.try_into().unwrap_or(0u8) {
            0 => (0, 1),
            1 => (1, 1),
            2 => (0, -1),
            _ => (1, -1),
        };
        let mut amps = vec![GaussianRational::zero(); 2];
        amps[idx] = GaussianRational::real(Rational::from_integer(sign));
        Some(StateVector::new(amps))
    }

    /// The register corresponding to a real basis vector of dimension 2.
    pub fn from_vector(v: &StateVector) -> Option<RotationRegister> {
        if v.dim() != 2 {
            return None;
        }
        let idx = v.as_basis_state()?;
        let amp = &v.amplitudes()[idx];
        if !amp.is_real() {
            return None;
        }
        let negative = amp.re.is_negative();
        let quarter = match (idx, negative) {
            (0, false) => 0,
            (1, false) => 1,
            (0, true) => 2,
            _ => 3,
        };
        Some(RotationRegister::new(SymbolicAngle::dyadic_pi(Rational::frac(quarter, 2))))
    }
}

/// The quantum register of a running machine.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Register {
    Vector(StateVector),
    Rotation(RotationRegister),
}

impl Register {
    pub fn initial(dim: usize) -> Register {
        Register::Vector(StateVector::basis(dim, 0))
    }

    pub fn dim(&self) -> usize {
        match self {
            Register::Vector(v) => v.dim(),
            Register::Rotation(_) => 2,
        }
    }

    pub fn to_vector(&self) -> Result<StateVector, QStateError> {
        match self {
            Register::Vector(v) => Ok(v.clone()),
            Register::Rotation(r) => r.to_vector().ok_or_else(|| {
                QStateError::NonRepresentable(format!("rotation by {} has irrational amplitudes", r.current))
            }),
        }
    }

    pub fn apply(&self, u: &UnitaryMatrix) -> Result<Register, QStateError> {
        Ok(Register::Vector(apply_unitary(u, &self.to_vector()?)?))
    }

    pub fn rotate(&self, by: &SymbolicAngle) -> Result<Register, QStateError> {
        let reg = match self {
            Register::Rotation(r) => r.clone(),
            Register::Vector(v) => RotationRegister::from_vector(v).ok_or_else(|| {
                QStateError::NonRepresentable("rotation applied to a non-basis vector".into())
            })?,
        };
        Ok(Register::Rotation(reg.rotate(by)?))
    }

    /// Collapses a rotation register to a vector when that is exact.
    pub fn normalize(self) -> Register {
        match self {
            Register::Rotation(r) => match r.to_vector() {
                Some(v) => Register::Vector(v),
                None => Register::Rotation(r),
            },
            v => v,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::frac(n, d)
    }

    fn u_a() -> UnitaryMatrix {
        let m = Matrix::scaled_integers(&r(1, 5), &[&[4, 3, 0], &[-3, 4, 0], &[0, 0, 5]]).unwrap();
        UnitaryMatrix::new(m).unwrap()
    }

    fn u_b() -> UnitaryMatrix {
        let m = Matrix::scaled_integers(&r(1, 5), &[&[4, 0, 3], &[0, 5, 0], &[-3, 0, 4]]).unwrap();
        UnitaryMatrix::new(m).unwrap()
    }

    #[test]
    fn u_a_first_column() {
        let out = apply_unitary(&u_a(), &StateVector::basis(3, 0)).unwrap();
        assert_eq!(out, StateVector::from_rationals(vec![r(4, 5), r(-3, 5), r(0, 1)]));
    }

    #[test]
    fn identity_and_inverse() {
        let s = StateVector::from_rationals(vec![r(3, 5), r(0, 1), r(4, 5)]);
        assert_eq!(apply_unitary(&UnitaryMatrix::identity(3), &s).unwrap(), s);
        let q1 = StateVector::basis(3, 0);
        let there = apply_unitary(&u_b(), &q1).unwrap();
        assert_eq!(apply_unitary(&u_b().inverse(), &there).unwrap(), q1);
    }

    #[test]
    fn non_unitary_rejected() {
        let m = Matrix::scaled_integers(&r(1, 5), &[&[4, 3], &[3, 4]]).unwrap();
        assert_eq!(UnitaryMatrix::new(m), Err(QStateError::NotUnitary));
    }

    #[test]
    fn coin_split_probabilities() {
        let s = apply_unitary(&u_a(), &StateVector::basis(3, 0)).unwrap();
        let outcomes = measure(&BasisMeasurement::complete(3), &s).unwrap();
        let probs: Vec<_> = outcomes.iter().map(|o| (o.outcome, o.probability.clone())).collect();
        assert_eq!(probs, vec![(1, r(16, 25)), (2, r(9, 25))]);
        // 4/5 and -3/5 renormalise to exact basis states
        assert_eq!(outcomes[1].state, StateVector::from_rationals(vec![r(0, 1), r(-1, 1), r(0, 1)]));
        assert!(outcomes.iter().all(|o| o.weight.is_one()));
    }

    #[test]
    fn basis_state_measures_with_certainty() {
        let outcomes = measure(&BasisMeasurement::complete(3), &StateVector::basis(3, 2)).unwrap();
        assert_eq!(outcomes.len(), 1);
        assert_eq!(outcomes[0].outcome, 3);
        assert!(outcomes[0].probability.is_one());
    }

    #[test]
    fn irrational_renormalisation_is_deferred() {
        let half = r(1, 2);
        let s = StateVector::from_rationals(vec![half.clone(), half.clone(), half.clone(), half]);
        let m = BasisMeasurement::new(4, vec![vec![0], vec![1, 2, 3]]).unwrap();
        let outcomes = measure(&m, &s).unwrap();
        assert_eq!(outcomes[0].probability, r(1, 4));
        assert!(outcomes[0].weight.is_one());
        assert_eq!(outcomes[1].probability, r(3, 4));
        assert_eq!(outcomes[1].weight, r(4, 3));
        let conditional: Rational = outcomes[1].state.amplitudes().iter().map(|a| a.norm_sqr() * &outcomes[1].weight).sum();
        assert!(conditional.is_one());
    }

    #[test]
    fn bad_partitions() {
        assert!(BasisMeasurement::new(3, vec![vec![0], vec![1]]).is_err());
        assert!(BasisMeasurement::new(2, vec![vec![0, 1], vec![1]]).is_err());
        assert!(BasisMeasurement::new(2, vec![vec![0], vec![2]]).is_err());
    }

    #[test]
    fn tensor_products() {
        let zero = StateVector::basis(2, 0);
        assert_eq!(tensor(&zero, &zero), StateVector::basis(4, 0));
        let i2 = UnitaryMatrix::identity(2);
        assert_eq!(tensor(&i2, &i2), UnitaryMatrix::identity(4));
        assert!(tensor(&u_a(), &u_b()).matrix().is_unitary());
    }

    #[test]
    fn bell_pair_squared_layout() {
        let half = r(1, 2);
        let h2 = Rational::frac(1, 2);
        // (|00> + |11>) / sqrt 2 is irrational, but the product of two pairs
        // has amplitude exactly 1/2 at 0000, 0011, 1100, 1111 when the
        // unnormalised pairs are combined and scaled by 1/2.
        let pair = StateVector::from_rationals(vec![Rational::one(), Rational::zero(), Rational::zero(), Rational::one()]);
        let psi = tensor(&pair, &pair).scale(&h2);
        let nonzero: Vec<usize> = psi.amplitudes().iter().enumerate().filter(|(_, a)| !a.is_zero()).map(|(i, _)| i).collect();
        assert_eq!(nonzero, vec![0b0000, 0b0011, 0b1100, 0b1111]);
        assert!(psi.amplitudes().iter().filter(|a| !a.is_zero()).all(|a| a.re == half));
        assert!(psi.is_normalized());
    }

    #[test]
    fn rotation_register_round_trips_quarter_turns() {
        for q in 0..8 {
            let reg = RotationRegister::new(SymbolicAngle::dyadic_pi(Rational::frac(q, 2)));
            let v = reg.to_vector().unwrap();
            let back = RotationRegister::from_vector(&v).unwrap();
            assert_eq!(back.to_vector().unwrap(), v);
        }
        let irr = RotationRegister::new(SymbolicAngle::sqrt2_pi(Rational::one()));
        assert!(irr.to_vector().is_none());
    }
}
