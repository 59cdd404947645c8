//! Locating violation windows in θ and noise cutoffs in γ.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::adroitness::epsilon_total;
use super::evaluate::{lg_quantity, CorrelatorSet};
use super::schedule::{build_protocol_schedule, qnd_interval};
use super::Criterion;
use crate::dynamics::{HamiltonianSpec, LindbladSpec};
use crate::Result;

/// Grid resolution for the θ scan.
pub const THETA_GRID_STEP: f64 = 1e-4 * PI;

/// Bracket width at which θ bisection stops.
pub const THETA_TOLERANCE: f64 = 1e-6 * PI;

/// A located sign change: bisection midpoint and final bracket width.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    pub value: f64,
    pub width: f64,
}

/// Outermost interval on which a function is negative.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ViolationWindow {
    pub lower: Bracket,
    pub upper: Bracket,
}

impl ViolationWindow {
    pub fn width(&self) -> f64 {
        self.upper.value - self.lower.value
    }
}

/// Bisects `[a, b]` where `f(a) ≥ 0 > f(b)` or the reverse.
fn bisect<F>(f: &mut F, mut a: f64, mut b: f64, tol: f64) -> Result<Bracket>
where
    F: FnMut(f64) -> Result<f64>,
{
    let a_negative = f(a)? < 0.0;
    while (b - a).abs() > tol {
        let mid = 0.5 * (a + b);
        if (f(mid)? < 0.0) == a_negative {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(Bracket {
        value: 0.5 * (a + b),
        width: (b - a).abs(),
    })
}

/// Scans `[lo, hi]` with spacing `step` for points where `f < 0`, then
/// refines both ends of the outermost negative stretch by bisection.
///
/// An end that sits on the scan boundary is reported with width 0.
pub fn violation_window<F>(
    mut f: F,
    lo: f64,
    hi: f64,
    step: f64,
    tol: f64,
) -> Result<Option<ViolationWindow>>
where
    F: FnMut(f64) -> Result<f64>,
{
    let steps = ((hi - lo) / step).ceil().max(1.0) as usize;
    let grid: Vec<f64> = (0..=steps)
        .map(|k| if k == steps { hi } else { lo + k as f64 * step })
        .collect();
    let negative = grid
        .iter()
        .map(|&x| Ok(f(x)? < 0.0))
        .collect::<Result<Vec<bool>>>()?;
    let (first, last) = match (
        negative.iter().position(|&b| b),
        negative.iter().rposition(|&b| b),
    ) {
        (Some(a), Some(b)) => (a, b),
        _ => return Ok(None),
    };
    let lower = if first == 0 {
        Bracket {
            value: lo,
            width: 0.0,
        }
    } else {
        bisect(&mut f, grid[first - 1], grid[first], tol)?
    };
    let upper = if last == steps {
        Bracket {
            value: hi,
            width: 0.0,
        }
    } else {
        bisect(&mut f, grid[last], grid[last + 1], tol)?
    };
    Ok(Some(ViolationWindow { lower, upper }))
}

/// Parameters of one protocol configuration, minus θ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProtocolParams {
    pub n: usize,
    pub omega: f64,
    pub m: u32,
    pub gamma: f64,
}

impl ProtocolParams {
    pub fn tau(&self) -> f64 {
        qnd_interval(self.omega, self.m)
    }

    pub fn dynamics(&self) -> Result<LindbladSpec> {
        LindbladSpec::new(HamiltonianSpec::new(self.omega, false)?, self.gamma)
    }
}

/// Correlators and `ε_total` at one `(θ, params)` point.
pub fn evaluate_point(theta: f64, params: &ProtocolParams) -> Result<(CorrelatorSet, f64)> {
    let dynamics = params.dynamics()?;
    let tau = params.tau();
    let cs = lg_quantity(&build_protocol_schedule(theta, params.n, tau, dynamics)?)?;
    let eps = epsilon_total(theta, tau, dynamics)?;
    Ok((cs, eps))
}

/// `𝓛` (lenient) or `𝓛 + ε_total` (strict): negative means a violation.
pub fn violation_margin(theta: f64, params: &ProtocolParams, criterion: Criterion) -> Result<f64> {
    let dynamics = params.dynamics()?;
    let tau = params.tau();
    let cs = lg_quantity(&build_protocol_schedule(theta, params.n, tau, dynamics)?)?;
    Ok(match criterion {
        Criterion::Lenient => cs.lg_quantity,
        Criterion::Strict => cs.lg_quantity + epsilon_total(theta, tau, dynamics)?,
    })
}

/// Violation window in θ over `[π/2, π]` at the standard resolution.
pub fn theta_window(
    params: &ProtocolParams,
    criterion: Criterion,
) -> Result<Option<ViolationWindow>> {
    violation_window(
        |theta| violation_margin(theta, params, criterion),
        0.5 * PI,
        PI,
        THETA_GRID_STEP,
        THETA_TOLERANCE,
    )
}

/// Violation onset: the lower end of the θ window.
pub fn onset_angle(params: &ProtocolParams, criterion: Criterion) -> Result<Option<Bracket>> {
    Ok(theta_window(params, criterion)?.map(|w| w.lower))
}

/// Smallest violation margin over θ ∈ [π/2, π]: a scan at spacing 10⁻³π
/// followed by golden-section refinement around the best grid point.
pub fn worst_margin(params: &ProtocolParams, criterion: Criterion) -> Result<(f64, f64)> {
    let f = |theta: f64| violation_margin(theta, params, criterion);
    let steps = 1000;
    let (lo, hi) = (0.5 * PI, PI);
    let h = (hi - lo) / steps as f64;
    let mut best = (f64::INFINITY, lo);
    for k in 0..=steps {
        let theta = lo + k as f64 * h;
        let v = f(theta)?;
        if v < best.0 {
            best = (v, theta);
        }
    }
    let (mut a, mut b) = ((best.1 - h).max(lo), (best.1 + h).min(hi));
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > 1e-10 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    let theta = 0.5 * (a + b);
    let v = f(theta)?;
    Ok(if v < best.0 { (v, theta) } else { best })
}

/// Largest γ in `[0, gamma_max]` at which some θ still violates under
/// `criterion`, located by a scan with `gamma_steps` intervals and then
/// bisection to width `1e-7`. `None` if nothing violates at γ = 0; a
/// zero-width bracket at `gamma_max` if the violation outlasts the range.
pub fn gamma_cutoff(
    base: &ProtocolParams,
    criterion: Criterion,
    gamma_max: f64,
    gamma_steps: usize,
) -> Result<Option<Bracket>> {
    let mut violates = |gamma: f64| -> Result<f64> {
        let params = ProtocolParams { gamma, ..*base };
        Ok(worst_margin(&params, criterion)?.0)
    };
    let window = violation_window(
        &mut violates,
        0.0,
        gamma_max,
        gamma_max / gamma_steps.max(1) as f64,
        1e-7,
    )?;
    Ok(match window {
        Some(w) if w.lower.value == 0.0 => Some(w.upper),
        _ => None,
    })
}
