//! Reference implementations shared by the integration tests. Nothing
//! here goes through the crate's channel or propagator code.
#![allow(dead_code)]

use nalgebra::{Complex, Matrix2};

pub type C = Complex<f64>;
pub type M = Matrix2<C>;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn paulis() -> [M; 4] {
    let (o, l, i) = (c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0));
    [
        M::new(l, o, o, l),
        M::new(o, l, l, o),
        M::new(o, -i, i, o),
        M::new(l, o, o, -l),
    ]
}

/// `dρ/dt = −i[h·σx, ρ] + 2γ(σz ρ σz − ρ)`.
fn lindblad_rhs(h: f64, gamma: f64, rho: &M) -> M {
    let [_, sx, _, sz] = paulis();
    let hx = sx * c(h, 0.0);
    let comm = hx * rho - rho * hx;
    comm * c(0.0, -1.0) + (sz * rho * sz - rho) * c(2.0 * gamma, 0.0)
}

/// Classical fourth-order Runge-Kutta with `ceil(t/max_dt)` equal steps.
pub fn rk4_evolve(h: f64, gamma: f64, rho: M, t: f64, max_dt: f64) -> M {
    let steps = (t / max_dt).ceil().max(1.0) as usize;
    let dt = t / steps as f64;
    let half = c(0.5 * dt, 0.0);
    let full = c(dt, 0.0);
    let sixth = c(dt / 6.0, 0.0);
    let mut r = rho;
    for _ in 0..steps {
        let k1 = lindblad_rhs(h, gamma, &r);
        let k2 = lindblad_rhs(h, gamma, &(r + k1 * half));
        let k3 = lindblad_rhs(h, gamma, &(r + k2 * half));
        let k4 = lindblad_rhs(h, gamma, &(r + k3 * full));
        r += (k1 + k2 * c(2.0, 0.0) + k3 * c(2.0, 0.0) + k4) * sixth;
    }
    r
}

/// `T[j][k] = ½·Tr(σj Φ(σk))` of the integrated map.
pub fn rk4_ptm(h: f64, gamma: f64, t: f64, max_dt: f64) -> [[f64; 4]; 4] {
    let p = paulis();
    let mut out = [[0.0; 4]; 4];
    for k in 0..4 {
        let evolved = rk4_evolve(h, gamma, p[k], t, max_dt);
        for j in 0..4 {
            out[j][k] = 0.5 * (p[j] * evolved).trace().re;
        }
    }
    out
}

/// `1 + cos^{2(n+1)}θ + 2cosθ`.
pub fn closed_form_lg(theta: f64, n: usize) -> f64 {
    let x = theta.cos();
    1.0 + x.powi(2 * (n as i32 + 1)) + 2.0 * x
}
