//! Single-qubit simulator for Leggett-Garg tests built from adroit
//! (demonstrably non-disturbing) projective measurements.
//!
//! The crate is layered bottom-up:
//!
//! - [`qubit`]: 2×2 operator algebra, states, dichotomic observables and
//!   CPTP channels stored as 4×4 real matrices on Pauli coordinates.
//! - [`dynamics`]: unitary and Lindblad-dephasing propagators as channels.
//! - [`protocol`]: measurement schedules, correlators, the Leggett-Garg
//!   quantity, ε-adroitness and violation verdicts.
//! - [`sampling`]: exhaustive outcome-tree enumeration and a seeded
//!   Monte Carlo shot sampler, both independent of the channel route.
//! - [`cli`]: sweep configuration, table formats and the `lgsim` commands.

pub mod cli;
pub mod dynamics;
mod error;
pub mod protocol;
pub mod qubit;
pub mod sampling;

pub use error::{Error, Result};
