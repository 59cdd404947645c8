//! Exact evaluation of schedules by composing channels.

use serde::{Deserialize, Serialize};

use super::schedule::{classic_schedule, EventTag, ExperimentSchedule, InclusionMask};
use crate::dynamics::{lindblad_propagator, LindbladSpec};
use crate::qubit::{anticommutator, measure_channel, Channel, QubitOperator, TOLERANCE};
use crate::{Error, Result};

/// The three two-time correlators and `𝓛 = 1 + C12 + C23 + C13′`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelatorSet {
    pub c12: f64,
    pub c23: f64,
    pub c13_prime: f64,
    pub lg_quantity: f64,
}

impl CorrelatorSet {
    pub fn new(c12: f64, c23: f64, c13_prime: f64) -> Self {
        CorrelatorSet {
            c12,
            c23,
            c13_prime,
            lg_quantity: 1.0 + c12 + c23 + c13_prime,
        }
    }
}

/// Memoizes `𝒩_dt` for the handful of distinct gaps in a schedule.
pub(crate) struct Propagators {
    spec: LindbladSpec,
    cache: Vec<(f64, Channel)>,
}

impl Propagators {
    pub(crate) fn new(spec: LindbladSpec) -> Self {
        Propagators {
            spec,
            cache: Vec::with_capacity(4),
        }
    }

    pub(crate) fn get(&mut self, dt: f64) -> Result<Channel> {
        // Gaps like (k+1)τ − kτ differ from τ only by rounding.
        let tol = 1e-13 * dt.abs().max(1.0);
        if let Some((_, ch)) = self.cache.iter().find(|(t, _)| (t - dt).abs() <= tol) {
            return Ok(*ch);
        }
        let ch = lindblad_propagator(&self.spec, dt)?;
        self.cache.push((dt, ch));
        Ok(ch)
    }
}

fn locate(schedule: &ExperimentSchedule, mask: &InclusionMask, tag: EventTag) -> Result<usize> {
    let idx = schedule
        .position(tag)
        .ok_or_else(|| Error::InvalidSchedule(format!("no {tag} event")))?;
    if !mask.includes(idx) {
        return Err(Error::InvalidSchedule(format!("{tag} event is masked out")));
    }
    Ok(idx)
}

fn real_trace(op: &QubitOperator) -> Result<f64> {
    let tr = op.trace();
    if tr.im.abs() > TOLERANCE {
        return Err(Error::ComplexTrace(tr.im));
    }
    Ok(tr.re)
}

/// Walks the included events in order. `visit` is called at every included
/// event with the operator just before the event's update.
fn walk<F>(
    schedule: &ExperimentSchedule,
    mask: &InclusionMask,
    start: QubitOperator,
    from: usize,
    until: usize,
    props: &mut Propagators,
    mut visit: F,
) -> Result<QubitOperator>
where
    F: FnMut(usize, QubitOperator) -> Result<QubitOperator>,
{
    let events = schedule.events();
    let mut op = start;
    let mut t = if from == 0 {
        0.0
    } else {
        events[from - 1].time
    };
    for (i, e) in events.iter().enumerate().take(until + 1).skip(from) {
        if !mask.includes(i) {
            continue;
        }
        op = props.get(e.time - t)?.apply(&op);
        t = e.time;
        op = visit(i, op)?;
    }
    Ok(op)
}

/// `C_ab = ½·Tr[Q_b · Φ_{a→b}({Q_a, ρ_a})]` restricted to `mask`.
///
/// `ρ_a` is the unconditioned state just before the `first` event, and
/// `Φ_{a→b}` composes the propagators and measurement channels of the
/// included events in between.
pub fn correlator_masked(
    schedule: &ExperimentSchedule,
    mask: &InclusionMask,
    first: EventTag,
    second: EventTag,
) -> Result<f64> {
    mask.check(schedule)?;
    let a = locate(schedule, mask, first)?;
    let b = locate(schedule, mask, second)?;
    if a >= b {
        return Err(Error::InvalidSchedule(format!(
            "{first} must precede {second}"
        )));
    }
    let events = schedule.events();
    let mut props = Propagators::new(*schedule.dynamics());
    let rho = *schedule.initial_state().op();
    let op = walk(schedule, mask, rho, 0, b, &mut props, |i, op| {
        Ok(if i == a {
            anticommutator(events[i].observable.op(), &op) * 0.5
        } else if i == b {
            op
        } else {
            measure_channel(&events[i].observable).apply(&op)
        })
    })?;
    let c = real_trace(&(*events[b].observable.op() * op))?;
    if c.abs() > 1.0 + 1e-9 {
        return Err(Error::InvalidSchedule(format!(
            "correlator {c} outside [-1, 1]"
        )));
    }
    Ok(c)
}

/// Correlator between two tagged events. With `include_intermediate`
/// false only the two tagged events are performed.
pub fn correlator_exact(
    schedule: &ExperimentSchedule,
    first: EventTag,
    second: EventTag,
    include_intermediate: bool,
) -> Result<f64> {
    let mask = if include_intermediate {
        InclusionMask::all(schedule)
    } else {
        InclusionMask::only(schedule, &[first, second])
    };
    correlator_masked(schedule, &mask, first, second)
}

/// Joint outcome distribution `P(a, c)` of two tagged events, indexed
/// `[a][c]` with index 0 for outcome +1 and 1 for −1.
pub fn joint_distribution(
    schedule: &ExperimentSchedule,
    mask: &InclusionMask,
    first: EventTag,
    second: EventTag,
) -> Result<[[f64; 2]; 2]> {
    mask.check(schedule)?;
    let a = locate(schedule, mask, first)?;
    let b = locate(schedule, mask, second)?;
    if a >= b {
        return Err(Error::InvalidSchedule(format!(
            "{first} must precede {second}"
        )));
    }
    let events = schedule.events();
    let mut props = Propagators::new(*schedule.dynamics());
    let rho = *schedule.initial_state().op();
    let before_a = walk(schedule, mask, rho, 0, a, &mut props, |i, op| {
        Ok(if i == a {
            op
        } else {
            measure_channel(&events[i].observable).apply(&op)
        })
    })?;
    let mut dist = [[0.0; 2]; 2];
    for (ai, sa) in [1i8, -1].into_iter().enumerate() {
        let pa = events[a].observable.projector(sa);
        let branch = pa * before_a * pa;
        let at_b = walk(schedule, mask, branch, a + 1, b, &mut props, |i, op| {
            Ok(if i == b {
                op
            } else {
                measure_channel(&events[i].observable).apply(&op)
            })
        })?;
        for (ci, sc) in [1i8, -1].into_iter().enumerate() {
            let pc = events[b].observable.projector(sc);
            dist[ai][ci] = real_trace(&(pc * at_b))?;
        }
    }
    let total: f64 = dist.iter().flatten().sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::DistributionNotNormalized(total));
    }
    Ok(dist)
}

/// C12 and C23 with every measurement performed; C13′ with only Q1 and Q3.
pub fn lg_quantity(schedule: &ExperimentSchedule) -> Result<CorrelatorSet> {
    let c12 = correlator_exact(schedule, EventTag::Q1, EventTag::Q2, true)?;
    let c23 = correlator_exact(schedule, EventTag::Q2, EventTag::Q3, true)?;
    let c13 = correlator_exact(schedule, EventTag::Q1, EventTag::Q3, false)?;
    Ok(CorrelatorSet::new(c12, c23, c13))
}

/// The textbook three-time test with `H = ωσx/2` and `Q = σz`.
pub fn classic_lg(omega: f64) -> Result<CorrelatorSet> {
    lg_quantity(&classic_schedule(omega)?)
}
