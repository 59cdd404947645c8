use crate::dynamics::lindblad_propagator;
use crate::protocol::{EventTag, ExperimentSchedule, InclusionMask};
use crate::qubit::{Channel, QubitOperator, TOLERANCE};
use crate::{Error, Result};

/// Largest number of measured events the tree walk accepts (2^20 leaves).
pub const MAX_ENUMERATED_EVENTS: usize = 20;

/// Branches with probability below this are not normalized further; every
/// leaf beneath them gets probability 0.
pub const PRUNE_THRESHOLD: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq)]
pub struct OutcomeTrajectory {
    /// ±1 per measured event, in schedule order.
    pub outcomes: Vec<i8>,
    pub probability: f64,
}

/// Every outcome sequence of the measured events and its probability.
#[derive(Clone, Debug)]
pub struct OutcomeTree {
    events: Vec<usize>,
    tags: Vec<EventTag>,
    trajectories: Vec<OutcomeTrajectory>,
}

impl OutcomeTree {
    pub fn trajectories(&self) -> &[OutcomeTrajectory] {
        &self.trajectories
    }

    /// Schedule indices of the measured events.
    pub fn events(&self) -> &[usize] {
        &self.events
    }

    pub fn total_probability(&self) -> f64 {
        self.trajectories.iter().map(|t| t.probability).sum()
    }

    fn slot(&self, tag: EventTag) -> Result<usize> {
        self.tags
            .iter()
            .position(|&t| t == tag)
            .ok_or_else(|| Error::InvalidSchedule(format!("{tag} not measured")))
    }

    /// `Σ_traj p · a · b`.
    pub fn correlator(&self, first: EventTag, second: EventTag) -> Result<f64> {
        let (a, b) = (self.slot(first)?, self.slot(second)?);
        Ok(self
            .trajectories
            .iter()
            .map(|t| t.probability * f64::from(t.outcomes[a] * t.outcomes[b]))
            .sum())
    }

    /// Marginal `P(a, c)` indexed `[a][c]`, index 0 for +1.
    pub fn joint(&self, first: EventTag, second: EventTag) -> Result<[[f64; 2]; 2]> {
        let (a, b) = (self.slot(first)?, self.slot(second)?);
        let idx = |s: i8| usize::from(s < 0);
        let mut dist = [[0.0; 2]; 2];
        for t in &self.trajectories {
            dist[idx(t.outcomes[a])][idx(t.outcomes[b])] += t.probability;
        }
        Ok(dist)
    }
}

struct Walk<'a> {
    projectors: Vec<[QubitOperator; 2]>,
    propagators: Vec<Channel>,
    out: &'a mut Vec<OutcomeTrajectory>,
}

impl Walk<'_> {
    fn descend(&mut self, depth: usize, rho: QubitOperator, prob: f64, prefix: &mut Vec<i8>) {
        if depth == self.projectors.len() {
            self.out.push(OutcomeTrajectory {
                outcomes: prefix.clone(),
                probability: prob,
            });
            return;
        }
        let evolved = self.propagators[depth].apply(&rho);
        for (k, s) in [1i8, -1].into_iter().enumerate() {
            let p_op = self.projectors[depth][k];
            let unnorm = p_op * evolved * p_op;
            let p = unnorm.trace().re;
            prefix.push(s);
            if p < PRUNE_THRESHOLD {
                self.zeros(depth + 1, prefix);
            } else {
                self.descend(depth + 1, unnorm * (1.0 / p), prob * p, prefix);
            }
            prefix.pop();
        }
    }

    fn zeros(&mut self, depth: usize, prefix: &mut Vec<i8>) {
        if depth == self.projectors.len() {
            self.out.push(OutcomeTrajectory {
                outcomes: prefix.clone(),
                probability: 0.0,
            });
            return;
        }
        for s in [1i8, -1] {
            prefix.push(s);
            self.zeros(depth + 1, prefix);
            prefix.pop();
        }
    }
}

/// Enumerates all `2^k` outcome sequences of the `k` measured events.
///
/// Between measured events the state evolves under the exact propagator of
/// the schedule's dynamics. Masked-out events take up time but do nothing.
pub fn enumerate_outcomes(
    schedule: &ExperimentSchedule,
    mask: &InclusionMask,
) -> Result<OutcomeTree> {
    if mask.len() != schedule.len() {
        return Err(Error::InvalidSchedule("mask length mismatch".into()));
    }
    let events = mask.included_indices();
    if events.len() > MAX_ENUMERATED_EVENTS {
        return Err(Error::TooManyEvents(events.len()));
    }
    let mut t = 0.0;
    let mut propagators = Vec::with_capacity(events.len());
    let mut projectors = Vec::with_capacity(events.len());
    for &i in &events {
        let e = &schedule.events()[i];
        propagators.push(lindblad_propagator(schedule.dynamics(), e.time - t)?);
        projectors.push([e.observable.projector(1), e.observable.projector(-1)]);
        t = e.time;
    }
    let mut trajectories = Vec::with_capacity(1 << events.len());
    Walk {
        projectors,
        propagators,
        out: &mut trajectories,
    }
    .descend(0, *schedule.initial_state().op(), 1.0, &mut Vec::new());
    let tree = OutcomeTree {
        tags: events.iter().map(|&i| schedule.events()[i].tag).collect(),
        events,
        trajectories,
    };
    let total = tree.total_probability();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::DistributionNotNormalized(total));
    }
    debug_assert!(tree
        .trajectories
        .iter()
        .all(|t| t.probability >= -TOLERANCE));
    Ok(tree)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{HamiltonianSpec, LindbladSpec};
    use crate::protocol::{build_protocol_schedule, MeasurementEvent};
    use crate::qubit::{pauli, DensityOperator, PauliAxis};
    use std::f64::consts::PI;

    fn ideal() -> LindbladSpec {
        LindbladSpec::ideal(HamiltonianSpec::new(1.0, false).unwrap())
    }

    fn z_schedule(times: &[f64], tags: &[EventTag]) -> ExperimentSchedule {
        let events = times
            .iter()
            .zip(tags)
            .map(|(&t, &tag)| MeasurementEvent::new(pauli(PauliAxis::Z), t, tag))
            .collect();
        ExperimentSchedule::new(events, DensityOperator::maximally_mixed(), ideal()).unwrap()
    }

    #[test]
    fn single_measurement_is_a_fair_coin() {
        let s = z_schedule(&[0.0, 1e-3], &[EventTag::Q1, EventTag::Q3]);
        let mask = InclusionMask::only(&s, &[EventTag::Q1]);
        let tree = enumerate_outcomes(&s, &mask).unwrap();
        assert_eq!(tree.trajectories().len(), 2);
        for t in tree.trajectories() {
            assert!((t.probability - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn immediate_repeat_agrees() {
        // Two σz measurements with no rotation in between.
        let s = z_schedule(&[0.0, PI], &[EventTag::Q1, EventTag::Q3]);
        let tree = enumerate_outcomes(&s, &InclusionMask::all(&s)).unwrap();
        assert_eq!(tree.trajectories().len(), 4);
        for t in tree.trajectories() {
            let expected = if t.outcomes[0] == t.outcomes[1] {
                0.5
            } else {
                0.0
            };
            assert!((t.probability - expected).abs() < 1e-12, "{t:?}");
        }
    }

    #[test]
    fn n1_c12_matches_closed_form() {
        let theta = 0.77 * PI;
        let s = build_protocol_schedule(theta, 1, PI, ideal()).unwrap();
        let tree = enumerate_outcomes(&s, &InclusionMask::all(&s)).unwrap();
        assert_eq!(tree.trajectories().len(), 64);
        let c12 = tree.correlator(EventTag::Q1, EventTag::Q2).unwrap();
        assert!((c12 - theta.cos().powi(4)).abs() < 1e-12);
    }

    #[test]
    fn guards() {
        let s = build_protocol_schedule(1.0, 9, PI, ideal()).unwrap();
        assert!(matches!(
            enumerate_outcomes(&s, &InclusionMask::all(&s)),
            Err(Error::TooManyEvents(22))
        ));
        assert!(enumerate_outcomes(&s, &InclusionMask::from_flags(vec![true])).is_err());
    }
}
