use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dynamics::{HamiltonianSpec, LindbladSpec};
use crate::qubit::{pauli, sigma_theta, DensityOperator, Observable, PauliAxis};
use crate::{Error, Result};

/// Role of a measurement within an experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventTag {
    Q1,
    Q2,
    Q3,
    Boxed,
    Probe,
}

impl fmt::Display for EventTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EventTag::Q1 => "Q1",
            EventTag::Q2 => "Q2",
            EventTag::Q3 => "Q3",
            EventTag::Boxed => "boxed",
            EventTag::Probe => "probe",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementEvent {
    pub observable: Observable,
    pub time: f64,
    pub tag: EventTag,
}

impl MeasurementEvent {
    pub fn new(observable: Observable, time: f64, tag: EventTag) -> Self {
        MeasurementEvent {
            observable,
            time,
            tag,
        }
    }
}

/// A timed sequence of projective measurements on one qubit.
///
/// The state starts as `initial_state` at time 0 and evolves under
/// `dynamics` between events. Exactly one event is tagged `Q1` and one `Q3`;
/// at most one is tagged `Q2`, and they occur in that order.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSchedule {
    events: Vec<MeasurementEvent>,
    initial_state: DensityOperator,
    dynamics: LindbladSpec,
}

impl ExperimentSchedule {
    pub fn new(
        events: Vec<MeasurementEvent>,
        initial_state: DensityOperator,
        dynamics: LindbladSpec,
    ) -> Result<Self> {
        let mut prev = None;
        for (i, e) in events.iter().enumerate() {
            if !e.time.is_finite() || e.time < 0.0 {
                return Err(Error::InvalidSchedule(format!(
                    "event {i} has invalid time {}",
                    e.time
                )));
            }
            if let Some(p) = prev {
                if e.time <= p {
                    return Err(Error::InvalidSchedule(format!(
                        "event {i} at t={} does not follow t={p}",
                        e.time
                    )));
                }
            }
            prev = Some(e.time);
        }
        let count = |tag| events.iter().filter(|e| e.tag == tag).count();
        if count(EventTag::Q1) != 1 || count(EventTag::Q3) != 1 {
            return Err(Error::InvalidSchedule(
                "need exactly one Q1 and one Q3 event".into(),
            ));
        }
        if count(EventTag::Q2) > 1 {
            return Err(Error::InvalidSchedule("more than one Q2 event".into()));
        }
        let pos = |tag| events.iter().position(|e| e.tag == tag);
        let (q1, q3) = (pos(EventTag::Q1).unwrap(), pos(EventTag::Q3).unwrap());
        let ordered = match pos(EventTag::Q2) {
            Some(q2) => q1 < q2 && q2 < q3,
            None => q1 < q3,
        };
        if !ordered {
            return Err(Error::InvalidSchedule("Q1, Q2, Q3 out of order".into()));
        }
        Ok(ExperimentSchedule {
            events,
            initial_state,
            dynamics,
        })
    }

    pub fn events(&self) -> &[MeasurementEvent] {
        &self.events
    }

    pub fn initial_state(&self) -> &DensityOperator {
        &self.initial_state
    }

    pub fn dynamics(&self) -> &LindbladSpec {
        &self.dynamics
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Index of the first event carrying `tag`.
    pub fn position(&self, tag: EventTag) -> Option<usize> {
        self.events.iter().position(|e| e.tag == tag)
    }

    pub fn count(&self, tag: EventTag) -> usize {
        self.events.iter().filter(|e| e.tag == tag).count()
    }
}

/// Which events of a schedule are actually performed in one evaluation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InclusionMask(Vec<bool>);

impl InclusionMask {
    pub fn all(schedule: &ExperimentSchedule) -> Self {
        InclusionMask(vec![true; schedule.len()])
    }

    /// Keeps only events whose tag is listed.
    pub fn only(schedule: &ExperimentSchedule, tags: &[EventTag]) -> Self {
        InclusionMask(
            schedule
                .events
                .iter()
                .map(|e| tags.contains(&e.tag))
                .collect(),
        )
    }

    /// Drops every event carrying `tag`.
    pub fn without(schedule: &ExperimentSchedule, tag: EventTag) -> Self {
        InclusionMask(schedule.events.iter().map(|e| e.tag != tag).collect())
    }

    pub fn from_flags(flags: Vec<bool>) -> Self {
        InclusionMask(flags)
    }

    pub fn includes(&self, index: usize) -> bool {
        self.0.get(index).copied().unwrap_or(false)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn included_count(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn included_indices(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&i| self.0[i]).collect()
    }

    pub(crate) fn check(&self, schedule: &ExperimentSchedule) -> Result<()> {
        if self.0.len() != schedule.len() {
            return Err(Error::InvalidSchedule(format!(
                "mask has {} entries for {} events",
                self.0.len(),
                schedule.len()
            )));
        }
        Ok(())
    }
}

/// Observable sequence of the protocol experiment: σθ as Q1, then `2n+1`
/// boxed measurements alternating σz, σθ, ..., σz, then σθ as Q2 and σz as
/// Q3.
pub fn protocol_observables(theta: f64, n: usize) -> Vec<(Observable, EventTag)> {
    let st = sigma_theta(theta);
    let sz = pauli(PauliAxis::Z);
    let mut seq = vec![(st.clone(), EventTag::Q1)];
    for _ in 0..n {
        seq.push((sz.clone(), EventTag::Boxed));
        seq.push((st.clone(), EventTag::Boxed));
    }
    seq.push((sz.clone(), EventTag::Boxed));
    seq.push((st, EventTag::Q2));
    seq.push((sz, EventTag::Q3));
    seq
}

/// Builds the protocol experiment with `n` interleaved pairs in the box,
/// events spaced uniformly by `tau` starting at `t = tau`, from `I/2`.
///
/// `n = 0` builds the reduced one-measurement box (σθ, σz, σθ, σz). It is
/// accepted for negative testing; that sequence never violates the
/// inequality. Use [`is_reduced_box`] to detect it.
pub fn build_protocol_schedule(
    theta: f64,
    n: usize,
    tau: f64,
    dynamics: LindbladSpec,
) -> Result<ExperimentSchedule> {
    if !theta.is_finite() {
        return Err(Error::param(
            "theta",
            format!("must be finite, got {theta}"),
        ));
    }
    if !tau.is_finite() || tau <= 0.0 {
        return Err(Error::param(
            "tau",
            format!("must be finite and > 0, got {tau}"),
        ));
    }
    let events = protocol_observables(theta, n)
        .into_iter()
        .enumerate()
        .map(|(k, (obs, tag))| MeasurementEvent::new(obs, (k + 1) as f64 * tau, tag))
        .collect();
    ExperimentSchedule::new(events, DensityOperator::maximally_mixed(), dynamics)
}

/// True for the `n = 0` protocol schedule, which cannot show a violation.
pub fn is_reduced_box(schedule: &ExperimentSchedule) -> bool {
    schedule.count(EventTag::Boxed) == 1
}

/// The QND interval `τ = π·m/ω`.
pub fn qnd_interval(omega: f64, m: u32) -> f64 {
    PI * f64::from(m) / omega
}

/// Three σz measurements at `t = 0, 3π/(4ω), 3π/(2ω)` under `H = ωσx/2`.
pub fn classic_schedule(omega: f64) -> Result<ExperimentSchedule> {
    let h = HamiltonianSpec::new(omega, true)?;
    let sz = pauli(PauliAxis::Z);
    let events = vec![
        MeasurementEvent::new(sz.clone(), 0.0, EventTag::Q1),
        MeasurementEvent::new(sz.clone(), 0.75 * PI / omega, EventTag::Q2),
        MeasurementEvent::new(sz, 1.5 * PI / omega, EventTag::Q3),
    ];
    ExperimentSchedule::new(
        events,
        DensityOperator::maximally_mixed(),
        LindbladSpec::ideal(h),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubit::{QubitOperator, TOLERANCE};

    fn ideal() -> LindbladSpec {
        LindbladSpec::ideal(HamiltonianSpec::new(1.0, false).unwrap())
    }

    #[test]
    fn n1_sequence() {
        let theta = 0.8 * PI;
        let s = build_protocol_schedule(theta, 1, PI, ideal()).unwrap();
        let st = *sigma_theta(theta).op();
        let sz = QubitOperator::sigma_z();
        let expected = [st, sz, st, sz, st, sz];
        assert_eq!(s.len(), 6);
        for (e, op) in s.events().iter().zip(expected.iter()) {
            assert!(e.observable.op().approx_eq(op, TOLERANCE));
        }
        let tags: Vec<_> = s.events().iter().map(|e| e.tag).collect();
        use EventTag::*;
        assert_eq!(tags, vec![Q1, Boxed, Boxed, Boxed, Q2, Q3]);
        assert!(!is_reduced_box(&s));
    }

    #[test]
    fn event_counts_and_spacing() {
        let tau = 2.0 * PI;
        for n in 0..6 {
            let s = build_protocol_schedule(1.0, n, tau, ideal()).unwrap();
            assert_eq!(s.len(), 2 * n + 4);
            assert_eq!(s.count(EventTag::Boxed), 2 * n + 1);
            for (k, e) in s.events().iter().enumerate() {
                assert!((e.time - (k + 1) as f64 * tau).abs() < 1e-12);
            }
        }
        let s0 = build_protocol_schedule(1.0, 0, tau, ideal()).unwrap();
        assert!(is_reduced_box(&s0));
    }

    #[test]
    fn rejects_bad_schedules() {
        assert!(build_protocol_schedule(1.0, 1, 0.0, ideal()).is_err());
        assert!(build_protocol_schedule(f64::NAN, 1, 1.0, ideal()).is_err());
        let sz = pauli(PauliAxis::Z);
        let mk = |tags: &[(EventTag, f64)]| {
            ExperimentSchedule::new(
                tags.iter()
                    .map(|&(t, time)| MeasurementEvent::new(sz.clone(), time, t))
                    .collect(),
                DensityOperator::maximally_mixed(),
                ideal(),
            )
        };
        use EventTag::*;
        assert!(mk(&[(Q1, 1.0), (Q3, 1.0)]).is_err());
        assert!(mk(&[(Q1, 2.0), (Q3, 1.0)]).is_err());
        assert!(mk(&[(Q3, 1.0), (Q1, 2.0)]).is_err());
        assert!(mk(&[(Q1, 1.0), (Q2, 2.0)]).is_err());
        assert!(mk(&[(Q1, 1.0), (Q3, 2.0), (Q2, 3.0)]).is_err());
        assert!(mk(&[(Q1, 1.0), (Q2, 2.0), (Q2, 2.5), (Q3, 3.0)]).is_err());
        assert!(mk(&[(Q1, 1.0), (Probe, 2.0), (Q3, 3.0)]).is_ok());
    }

    #[test]
    fn masks() {
        let s = build_protocol_schedule(1.0, 1, 1.0, ideal()).unwrap();
        let ends = InclusionMask::only(&s, &[EventTag::Q1, EventTag::Q3]);
        assert_eq!(ends.included_indices(), vec![0, 5]);
        assert_eq!(
            InclusionMask::without(&s, EventTag::Boxed).included_count(),
            3
        );
        assert!(InclusionMask::from_flags(vec![true]).check(&s).is_err());
    }
}
