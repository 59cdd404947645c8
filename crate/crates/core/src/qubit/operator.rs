use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::Matrix2;

use super::TOLERANCE;
use crate::{Error, Result};

pub type Complex = nalgebra::Complex<f64>;

const ZERO: Complex = Complex::new(0.0, 0.0);
const ONE: Complex = Complex::new(1.0, 0.0);
const I: Complex = Complex::new(0.0, 1.0);

/// A 2×2 complex matrix with finite entries.
#[derive(Clone, Copy, PartialEq)]
pub struct QubitOperator(Matrix2<Complex>);

impl QubitOperator {
    /// Builds an operator from row-major entries, rejecting NaN and infinities.
    pub fn new(entries: [[Complex; 2]; 2]) -> Result<Self> {
        let op = Self::from_entries(entries);
        if op.0.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            Ok(op)
        } else {
            Err(Error::NonFinite("qubit operator"))
        }
    }

    pub(crate) fn from_entries(e: [[Complex; 2]; 2]) -> Self {
        QubitOperator(Matrix2::new(e[0][0], e[0][1], e[1][0], e[1][1]))
    }

    pub fn identity() -> Self {
        QubitOperator(Matrix2::identity())
    }

    pub fn zero() -> Self {
        QubitOperator(Matrix2::zeros())
    }

    pub fn sigma_x() -> Self {
        Self::from_entries([[ZERO, ONE], [ONE, ZERO]])
    }

    pub fn sigma_y() -> Self {
        Self::from_entries([[ZERO, -I], [I, ZERO]])
    }

    pub fn sigma_z() -> Self {
        Self::from_entries([[ONE, ZERO], [ZERO, -ONE]])
    }

    /// `(c0·I + cx·σx + cy·σy + cz·σz)` for complex coefficients.
    pub fn from_pauli_coords(c: [Complex; 4]) -> Self {
        Self::from_entries([
            [c[0] + c[3], c[1] - I * c[2]],
            [c[1] + I * c[2], c[0] - c[3]],
        ])
    }

    /// Real coefficients; the caller guarantees the operator is Hermitian.
    pub fn from_real_coords(c: [f64; 4]) -> Self {
        Self::from_pauli_coords(c.map(Complex::from))
    }

    /// Coefficients `c_k = Tr(σ_k A) / 2` with `σ_0 = I`.
    pub fn pauli_coords(&self) -> [Complex; 4] {
        let m = &self.0;
        [
            (m[(0, 0)] + m[(1, 1)]) * 0.5,
            (m[(0, 1)] + m[(1, 0)]) * 0.5,
            (m[(0, 1)] - m[(1, 0)]) * I * 0.5,
            (m[(0, 0)] - m[(1, 1)]) * 0.5,
        ]
    }

    /// Real parts of [`pauli_coords`](Self::pauli_coords).
    pub fn real_coords(&self) -> [f64; 4] {
        self.pauli_coords().map(|z| z.re)
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex {
        self.0[(row, col)]
    }

    pub fn matrix(&self) -> &Matrix2<Complex> {
        &self.0
    }

    pub fn dagger(&self) -> Self {
        QubitOperator(self.0.adjoint())
    }

    pub fn trace(&self) -> Complex {
        self.0[(0, 0)] + self.0[(1, 1)]
    }

    pub fn scale(&self, s: impl Into<Complex>) -> Self {
        QubitOperator(self.0 * s.into())
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.0 - other.0)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.dagger())
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_defect() <= TOLERANCE
    }
}

impl fmt::Debug for QubitOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.0;
        write!(
            f,
            "[[{}, {}], [{}, {}]]",
            m[(0, 0)],
            m[(0, 1)],
            m[(1, 0)],
            m[(1, 1)]
        )
    }
}

impl Add for QubitOperator {
    type Output = QubitOperator;
    fn add(self, rhs: Self) -> Self {
        QubitOperator(self.0 + rhs.0)
    }
}

impl Sub for QubitOperator {
    type Output = QubitOperator;
    fn sub(self, rhs: Self) -> Self {
        QubitOperator(self.0 - rhs.0)
    }
}

impl Mul for QubitOperator {
    type Output = QubitOperator;
    fn mul(self, rhs: Self) -> Self {
        QubitOperator(self.0 * rhs.0)
    }
}

impl Mul<f64> for QubitOperator {
    type Output = QubitOperator;
    fn mul(self, rhs: f64) -> Self {
        self.scale(rhs)
    }
}

impl Mul<Complex> for QubitOperator {
    type Output = QubitOperator;
    fn mul(self, rhs: Complex) -> Self {
        self.scale(rhs)
    }
}

impl Neg for QubitOperator {
    type Output = QubitOperator;
    fn neg(self) -> Self {
        QubitOperator(-self.0)
    }
}

/// `a·b + b·a`.
pub fn anticommutator(a: &QubitOperator, b: &QubitOperator) -> QubitOperator {
    *a * *b + *b * *a
}

/// A validated qubit state: Hermitian, unit trace, positive semidefinite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityOperator(QubitOperator);

impl DensityOperator {
    pub fn new(op: QubitOperator) -> Result<Self> {
        let herm = op.hermiticity_defect();
        if herm > TOLERANCE {
            return Err(Error::NotHermitian(herm));
        }
        let tr = op.trace().re;
        if (tr - 1.0).abs() > TOLERANCE {
            return Err(Error::NotUnitTrace(tr));
        }
        // Eigenvalues of a unit-trace Hermitian 2×2 are (1 ± |r|)/2.
        let [_, x, y, z] = op.real_coords();
        let min_eig = 0.5 - (x * x + y * y + z * z).sqrt();
        if min_eig < -TOLERANCE {
            return Err(Error::NotPositive(min_eig));
        }
        Ok(DensityOperator(op))
    }

    /// `I/2`, the initial state used throughout the protocol.
    pub fn maximally_mixed() -> Self {
        DensityOperator(QubitOperator::identity().scale(0.5))
    }

    /// `(I + r·σ)/2` for a Bloch vector with `|r| ≤ 1`.
    pub fn from_bloch(r: [f64; 3]) -> Result<Self> {
        if r.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("Bloch vector"));
        }
        Self::new(QubitOperator::from_real_coords([
            0.5,
            0.5 * r[0],
            0.5 * r[1],
            0.5 * r[2],
        ]))
    }

    /// `|0⟩⟨0|`, the +1 eigenstate of σz.
    pub fn ground() -> Self {
        DensityOperator(QubitOperator::from_entries([[ONE, ZERO], [ZERO, ZERO]]))
    }

    pub fn op(&self) -> &QubitOperator {
        &self.0
    }

    pub fn bloch(&self) -> [f64; 3] {
        let [_, x, y, z] = self.0.real_coords();
        [2.0 * x, 2.0 * y, 2.0 * z]
    }

    pub fn purity(&self) -> f64 {
        (self.0 * self.0).trace().re
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

/// A dichotomic (±1-valued) observable: a Hermitian involution.
#[derive(Clone, Debug, PartialEq)]
pub struct Observable {
    op: QubitOperator,
    label: String,
}

impl Observable {
    pub fn new(op: QubitOperator, label: impl Into<String>) -> Result<Self> {
        let herm = op.hermiticity_defect();
        if herm > TOLERANCE {
            return Err(Error::NotHermitian(herm));
        }
        let inv = (op * op).max_abs_diff(&QubitOperator::identity());
        if inv > TOLERANCE {
            return Err(Error::NotInvolution(inv));
        }
        Ok(Observable {
            op,
            label: label.into(),
        })
    }

    /// `n·σ` for a unit vector `n`. Fails if `n` is not normalized.
    pub fn along(n: [f64; 3], label: impl Into<String>) -> Result<Self> {
        if n.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("observable axis"));
        }
        Self::new(
            QubitOperator::from_real_coords([0.0, n[0], n[1], n[2]]),
            label,
        )
    }

    pub fn op(&self) -> &QubitOperator {
        &self.op
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Unit Bloch axis `n` with `op = n·σ`.
    pub fn axis(&self) -> [f64; 3] {
        let [_, x, y, z] = self.op.real_coords();
        [x, y, z]
    }

    /// Spectral projector `(I + s·Q)/2` for outcome `s = ±1`.
    pub fn projector(&self, outcome: i8) -> QubitOperator {
        let s = f64::from(outcome.signum());
        (QubitOperator::identity() + self.op * s) * 0.5
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

pub fn pauli(axis: PauliAxis) -> Observable {
    let (op, label) = match axis {
        PauliAxis::X => (QubitOperator::sigma_x(), "sigma_x"),
        PauliAxis::Y => (QubitOperator::sigma_y(), "sigma_y"),
        PauliAxis::Z => (QubitOperator::sigma_z(), "sigma_z"),
    };
    Observable {
        op,
        label: label.to_string(),
    }
}

/// `σθ = cos(θ)·σz + sin(θ)·σx`.
///
/// Panics if `theta` is not finite.
pub fn sigma_theta(theta: f64) -> Observable {
    assert!(theta.is_finite(), "sigma_theta: non-finite angle {theta}");
    let op = QubitOperator::from_real_coords([0.0, theta.sin(), 0.0, theta.cos()]);
    Observable {
        op,
        label: format!("sigma_theta({theta})"),
    }
}

/// Born-rule expectation `Tr(Q·ρ)`.
///
/// The value is not clamped. An imaginary part above tolerance means a
/// Hermiticity invariant was broken upstream and is reported as an error.
pub fn expectation(q: &Observable, rho: &DensityOperator) -> Result<f64> {
    let tr = (*q.op() * *rho.op()).trace();
    if tr.im.abs() > TOLERANCE {
        return Err(Error::ComplexTrace(tr.im));
    }
    Ok(tr.re)
}
