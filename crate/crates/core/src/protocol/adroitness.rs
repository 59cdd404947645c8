//! ε-adroitness of a probed measurement and the four-experiment battery.
//!
//! A probe is ε-adroit when performing it changes the joint distribution of
//! the surrounding first and third outcomes by at most ε in summed absolute
//! difference.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::evaluate::joint_distribution;
use super::schedule::{EventTag, ExperimentSchedule, InclusionMask, MeasurementEvent};
use crate::dynamics::LindbladSpec;
use crate::qubit::{pauli, sigma_theta, DensityOperator, Observable, PauliAxis};
use crate::{Error, Result};

/// One of the four calibration experiments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentId {
    A,
    B,
    C,
    D,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 4] = [
        ExperimentId::A,
        ExperimentId::B,
        ExperimentId::C,
        ExperimentId::D,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentId::A => "a",
            ExperimentId::B => "b",
            ExperimentId::C => "c",
            ExperimentId::D => "d",
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdroitnessExperiment {
    pub id: ExperimentId,
    pub schedule: ExperimentSchedule,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdroitnessReport {
    pub per_experiment: Vec<(ExperimentId, f64)>,
    pub epsilon_total: f64,
}

/// Observables (first, probe, third) of each battery experiment. The probe
/// repeats one neighbour, covering both observables in both positions:
///
/// - (a) σθ, σθ, σz
/// - (b) σθ, σz, σz
/// - (c) σz, σz, σθ
/// - (d) σz, σθ, σθ
fn battery_observables(id: ExperimentId, theta: f64) -> [Observable; 3] {
    let st = sigma_theta(theta);
    let sz = pauli(PauliAxis::Z);
    match id {
        ExperimentId::A => [st.clone(), st, sz],
        ExperimentId::B => [st, sz.clone(), sz],
        ExperimentId::C => [sz.clone(), sz, st],
        ExperimentId::D => [sz, st.clone(), st],
    }
}

/// The four three-measurement experiments at times `τ, 2τ, 3τ` from `I/2`,
/// with the middle measurement tagged as the probe.
pub fn adroitness_experiments(
    theta: f64,
    tau: f64,
    dynamics: LindbladSpec,
) -> Result<Vec<AdroitnessExperiment>> {
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
    ExperimentId::ALL
        .into_iter()
        .map(|id| {
            let [first, probe, third] = battery_observables(id, theta);
            let events = vec![
                MeasurementEvent::new(first, tau, EventTag::Q1),
                MeasurementEvent::new(probe, 2.0 * tau, EventTag::Probe),
                MeasurementEvent::new(third, 3.0 * tau, EventTag::Q3),
            ];
            let schedule =
                ExperimentSchedule::new(events, DensityOperator::maximally_mixed(), dynamics)?;
            Ok(AdroitnessExperiment { id, schedule })
        })
        .collect()
}

/// `Σ_{a,c} |P(a,c | probe performed) − P(a,c | probe omitted)|`.
pub fn epsilon_adroitness(schedule: &ExperimentSchedule) -> Result<f64> {
    let tags: Vec<_> = schedule.events().iter().map(|e| e.tag).collect();
    if tags != [EventTag::Q1, EventTag::Probe, EventTag::Q3] {
        return Err(Error::InvalidSchedule(
            "adroitness needs exactly (Q1, probe, Q3)".into(),
        ));
    }
    let with = joint_distribution(
        schedule,
        &InclusionMask::all(schedule),
        EventTag::Q1,
        EventTag::Q3,
    )?;
    let without = joint_distribution(
        schedule,
        &InclusionMask::without(schedule, EventTag::Probe),
        EventTag::Q1,
        EventTag::Q3,
    )?;
    Ok(with
        .iter()
        .flatten()
        .zip(without.iter().flatten())
        .map(|(p, q)| (p - q).abs())
        .sum())
}

/// Per-experiment ε over the battery and their sum.
pub fn adroitness_report(theta: f64, tau: f64, dynamics: LindbladSpec) -> Result<AdroitnessReport> {
    let per_experiment = adroitness_experiments(theta, tau, dynamics)?
        .iter()
        .map(|exp| Ok((exp.id, epsilon_adroitness(&exp.schedule)?)))
        .collect::<Result<Vec<_>>>()?;
    let epsilon_total = per_experiment.iter().map(|(_, e)| e).sum();
    Ok(AdroitnessReport {
        per_experiment,
        epsilon_total,
    })
}

/// Total ε over the four battery experiments. Independent of `n`.
pub fn epsilon_total(theta: f64, tau: f64, dynamics: LindbladSpec) -> Result<f64> {
    Ok(adroitness_report(theta, tau, dynamics)?.epsilon_total)
}
