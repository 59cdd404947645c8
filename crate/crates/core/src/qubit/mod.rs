//! Exact 2×2 operator algebra for a single qubit.
//!
//! Operators are stored as dense complex matrices. Channels are stored as
//! their Pauli transfer matrix: the real 4×4 action on the coefficients
//! `(c0, cx, cy, cz)` of `c0·I + cx·σx + cy·σy + cz·σz`, so composing
//! superoperators is a matrix product.

mod channel;
mod operator;

pub use channel::{compose, dephase_theta, dephase_z, measure_channel, Channel};
pub use operator::{
    anticommutator, expectation, pauli, sigma_theta, Complex, DensityOperator, Observable,
    PauliAxis, QubitOperator,
};

/// Absolute entrywise tolerance for operator equality and validation.
pub const TOLERANCE: f64 = 1e-12;

/// Tolerance on Choi-matrix eigenvalues for the complete-positivity check.
pub const CHOI_TOLERANCE: f64 = 1e-10;
