use nalgebra::{Matrix4, Vector4};

use super::operator::{Complex, DensityOperator, Observable, QubitOperator};
use super::{CHOI_TOLERANCE, TOLERANCE};
use crate::{Error, Result};

/// A completely positive, trace-preserving map on qubit operators.
///
/// Stored as the Pauli transfer matrix `T[j][k] = Tr(σ_j Φ(σ_k)) / 2`, which
/// is real for any Hermiticity-preserving map. Row 0 equals `(1, 0, 0, 0)`
/// exactly when the map preserves trace.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Channel {
    ptm: Matrix4<f64>,
}

impl Channel {
    pub fn identity() -> Self {
        Channel {
            ptm: Matrix4::identity(),
        }
    }

    /// Validates trace preservation and Choi positivity.
    pub fn from_ptm(ptm: Matrix4<f64>) -> Result<Self> {
        if ptm.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("channel"));
        }
        let ch = Channel { ptm };
        let tp = ch.trace_defect();
        if tp > TOLERANCE {
            return Err(Error::NotTracePreserving(tp));
        }
        let min_eig = ch.choi_min_eigenvalue();
        if min_eig < -CHOI_TOLERANCE {
            return Err(Error::NotCompletelyPositive(min_eig));
        }
        Ok(ch)
    }

    /// `ρ ↦ Σ K ρ K†`.
    pub fn from_kraus(kraus: &[QubitOperator]) -> Result<Self> {
        Self::from_linear_map(|op| {
            kraus
                .iter()
                .fold(QubitOperator::zero(), |acc, k| acc + *k * op * k.dagger())
        })
    }

    /// Tabulates a linear, Hermiticity-preserving map on the Pauli basis.
    pub fn from_linear_map(map: impl Fn(QubitOperator) -> QubitOperator) -> Result<Self> {
        let basis = pauli_basis();
        let mut ptm = Matrix4::zeros();
        for (k, sk) in basis.iter().enumerate() {
            let image = map(*sk).pauli_coords();
            for (j, c) in image.iter().enumerate() {
                if c.im.abs() > TOLERANCE {
                    return Err(Error::NotHermiticityPreserving(c.im.abs()));
                }
                ptm[(j, k)] = c.re;
            }
        }
        Self::from_ptm(ptm)
    }

    pub fn ptm(&self) -> &Matrix4<f64> {
        &self.ptm
    }

    /// Applies the map to any operator by linear extension.
    pub fn apply(&self, op: &QubitOperator) -> QubitOperator {
        let c = op.pauli_coords();
        let mut out = [Complex::new(0.0, 0.0); 4];
        for (j, o) in out.iter_mut().enumerate() {
            for (k, ck) in c.iter().enumerate() {
                *o += *ck * self.ptm[(j, k)];
            }
        }
        QubitOperator::from_pauli_coords(out)
    }

    pub fn apply_state(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        DensityOperator::new(self.apply(rho.op()))
    }

    /// Action on real Pauli coordinates of a Hermitian operator.
    pub fn apply_coords(&self, c: &Vector4<f64>) -> Vector4<f64> {
        self.ptm * c
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &Channel) -> Channel {
        Channel {
            ptm: next.ptm * self.ptm,
        }
    }

    /// `self` applied `n` times in a row; `n = 0` gives the identity.
    pub fn pow(&self, n: usize) -> Channel {
        (0..n).fold(Channel::identity(), |acc, _| acc.then(self))
    }

    /// Heisenberg-picture dual `Φ†`, defined by `Tr(A Φ(B)) = Tr(Φ†(A) B)`.
    ///
    /// The Pauli basis is orthogonal under the Hilbert-Schmidt product, so the
    /// dual's transfer matrix is the transpose. The dual is unital rather than
    /// trace-preserving, so it is returned as a bare matrix wrapper.
    pub fn dual(&self) -> Channel {
        Channel {
            ptm: self.ptm.transpose(),
        }
    }

    pub fn trace_defect(&self) -> f64 {
        let row = self.ptm.row(0);
        (row[0] - 1.0)
            .abs()
            .max(row[1].abs())
            .max(row[2].abs())
            .max(row[3].abs())
    }

    pub fn is_unital(&self, tol: f64) -> bool {
        (1..4).all(|j| self.ptm[(j, 0)].abs() <= tol)
    }

    /// Choi matrix `J = Σ_ij |i⟩⟨j| ⊗ Φ(|i⟩⟨j|)`, indexed `J[2i+k][2j+l]`.
    pub fn choi(&self) -> Matrix4<Complex> {
        let mut j = Matrix4::zeros();
        for row in 0..2 {
            for col in 0..2 {
                let mut unit = [[Complex::new(0.0, 0.0); 2]; 2];
                unit[row][col] = Complex::new(1.0, 0.0);
                let image = self.apply(&QubitOperator::from_entries(unit));
                for k in 0..2 {
                    for l in 0..2 {
                        j[(2 * row + k, 2 * col + l)] = image.entry(k, l);
                    }
                }
            }
        }
        j
    }

    pub fn choi_min_eigenvalue(&self) -> f64 {
        self.choi()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Kraus operators from the Choi eigendecomposition, dropping
    /// eigenvalues below the positivity tolerance.
    pub fn kraus(&self) -> Vec<QubitOperator> {
        let eig = self.choi().symmetric_eigen();
        let mut out = Vec::new();
        for (idx, &lambda) in eig.eigenvalues.iter().enumerate() {
            if lambda <= CHOI_TOLERANCE {
                continue;
            }
            let v = eig.eigenvectors.column(idx);
            let s = lambda.sqrt();
            out.push(QubitOperator::from_entries([
                [v[0] * s, v[2] * s],
                [v[1] * s, v[3] * s],
            ]));
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Channel) -> f64 {
        (self.ptm - other.ptm).amax()
    }

    pub fn approx_eq(&self, other: &Channel, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }
}

fn pauli_basis() -> [QubitOperator; 4] {
    [
        QubitOperator::identity(),
        QubitOperator::sigma_x(),
        QubitOperator::sigma_y(),
        QubitOperator::sigma_z(),
    ]
}

/// `first` followed by `then`.
pub fn compose(first: &Channel, then: &Channel) -> Channel {
    first.then(then)
}

fn dephase_in(q: &QubitOperator) -> Channel {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Channel::from_kraus(&[QubitOperator::identity() * s, *q * s])
        .expect("dephasing by a Hermitian involution is CPTP")
}

/// `ρ ↦ (ρ + σz ρ σz)/2`.
pub fn dephase_z() -> Channel {
    dephase_in(&QubitOperator::sigma_z())
}

/// `ρ ↦ (ρ + σθ ρ σθ)/2`.
pub fn dephase_theta(theta: f64) -> Channel {
    dephase_in(super::sigma_theta(theta).op())
}

/// Unconditioned Lüders update of a projective measurement of `q`:
/// `ρ ↦ P₊ρP₊ + P₋ρP₋`.
///
/// For `q = n·σ` this keeps the trace coordinate and projects the Bloch
/// vector onto `n`. The trivial involutions `±I` leave every state alone.
pub fn measure_channel(q: &Observable) -> Channel {
    if q.op().pauli_coords()[0].norm() > 0.5 {
        return Channel::identity();
    }
    let n = q.axis();
    let mut ptm = Matrix4::zeros();
    ptm[(0, 0)] = 1.0;
    for j in 0..3 {
        for k in 0..3 {
            ptm[(j + 1, k + 1)] = n[j] * n[k];
        }
    }
    Channel { ptm }
}
