//! Closed- and open-system time evolution of the qubit, exposed as channels.
//!
//! The open-system generator is the dephasing master equation
//! `ρ̇ = −i[H, ρ] + 2γ(σz ρ σz − ρ)` with `H = ωσx` (or `ωσx/2`). On Pauli
//! coordinates `(c0, cx, cy, cz)` it reads
//!
//! ```text
//! ċ0 = 0
//! ċx = −4γ·cx
//! ċy = −4γ·cy − 2ω'·cz
//! ċz =  2ω'·cy
//! ```
//!
//! where `ω'` is the coefficient of σx in `H`. The propagator is the exact
//! exponential of this 4×4 generator.

use nalgebra::Matrix4;

use crate::qubit::{Channel, Complex, Observable, QubitOperator};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HamiltonianSpec {
    omega: f64,
    half: bool,
}

impl HamiltonianSpec {
    /// `H = ωσx`, or `H = ωσx/2` when `half` is set.
    pub fn new(omega: f64, half: bool) -> Result<Self> {
        if !omega.is_finite() || omega <= 0.0 {
            return Err(Error::param(
                "omega",
                format!("must be finite and > 0, got {omega}"),
            ));
        }
        Ok(HamiltonianSpec { omega, half })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn half(&self) -> bool {
        self.half
    }

    /// Coefficient of σx in the Hamiltonian.
    pub fn sigma_x_coefficient(&self) -> f64 {
        if self.half {
            0.5 * self.omega
        } else {
            self.omega
        }
    }

    /// `U_t = exp(−i·H·t) = cos(ω't)·I − i·sin(ω't)·σx`.
    pub fn evolution_operator(&self, t: f64) -> QubitOperator {
        let phase = self.sigma_x_coefficient() * t;
        QubitOperator::identity() * phase.cos()
            + QubitOperator::sigma_x() * Complex::new(0.0, -phase.sin())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LindbladSpec {
    hamiltonian: HamiltonianSpec,
    gamma: f64,
}

impl LindbladSpec {
    pub fn new(hamiltonian: HamiltonianSpec, gamma: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma < 0.0 {
            return Err(Error::param(
                "gamma",
                format!("must be finite and >= 0, got {gamma}"),
            ));
        }
        Ok(LindbladSpec { hamiltonian, gamma })
    }

    /// Noiseless dynamics under `hamiltonian`.
    pub fn ideal(hamiltonian: HamiltonianSpec) -> Self {
        LindbladSpec {
            hamiltonian,
            gamma: 0.0,
        }
    }

    pub fn hamiltonian(&self) -> &HamiltonianSpec {
        &self.hamiltonian
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Generator of the master equation on Pauli coordinates.
    pub fn liouvillian(&self) -> Matrix4<f64> {
        let w = self.hamiltonian.sigma_x_coefficient();
        let g = self.gamma;
        #[rustfmt::skip]
        let l = Matrix4::new(
            0.0, 0.0,       0.0,       0.0,
            0.0, -4.0 * g,  0.0,       0.0,
            0.0, 0.0,       -4.0 * g,  -2.0 * w,
            0.0, 0.0,       2.0 * w,   0.0,
        );
        l
    }
}

fn check_time(t: f64) -> Result<()> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::param(
            "t",
            format!("must be finite and >= 0, got {t}"),
        ));
    }
    Ok(())
}

/// `ρ ↦ U_t ρ U_t†`.
pub fn unitary_propagator(h: &HamiltonianSpec, t: f64) -> Result<Channel> {
    check_time(t)?;
    Channel::from_kraus(&[h.evolution_operator(t)])
}

/// Heisenberg-picture observable `U_t† q U_t`.
///
/// For `H = ωσx` this maps σz to `σy·sin(2ωt) + σz·cos(2ωt)`. It is the dual
/// of [`unitary_propagator`]: `Tr(q·𝒰_t(ρ)) = Tr(heisenberg(q)·ρ)`.
pub fn heisenberg_observable(h: &HamiltonianSpec, q: &Observable, t: f64) -> Result<Observable> {
    check_time(t)?;
    let u = h.evolution_operator(t);
    let evolved = u.dagger() * *q.op() * u;
    Observable::new(evolved, format!("{}(t={t})", q.label()))
}

/// The CPTP map `𝒩_t` generated by the dephasing master equation.
///
/// Fails if the exponential does not pass the CPTP check, which would
/// indicate a numerical defect rather than a property of the model.
pub fn lindblad_propagator(spec: &LindbladSpec, t: f64) -> Result<Channel> {
    check_time(t)?;
    if t == 0.0 {
        return Ok(Channel::identity());
    }
    let mut ptm = (spec.liouvillian() * t).exp();
    // The trace row is exactly (1, 0, 0, 0) for this generator; pin it so
    // rounding in the exponential never leaks into the trace.
    ptm.set_row(0, &nalgebra::RowVector4::new(1.0, 0.0, 0.0, 0.0));
    Channel::from_ptm(ptm)
}
