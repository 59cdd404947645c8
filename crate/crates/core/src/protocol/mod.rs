//! The measurement protocol: schedules, correlators, `𝓛`, ε-adroitness and
//! the violation criteria.

mod adroitness;
mod evaluate;
mod schedule;
mod window;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use adroitness::{
    adroitness_experiments, adroitness_report, epsilon_adroitness, epsilon_total,
    AdroitnessExperiment, AdroitnessReport, ExperimentId,
};
pub use evaluate::{
    classic_lg, correlator_exact, correlator_masked, joint_distribution, lg_quantity, CorrelatorSet,
};
pub use schedule::{
    build_protocol_schedule, classic_schedule, is_reduced_box, protocol_observables, qnd_interval,
    EventTag, ExperimentSchedule, InclusionMask, MeasurementEvent,
};
pub use window::{
    evaluate_point, gamma_cutoff, onset_angle, theta_window, violation_margin, violation_window,
    worst_margin, Bracket, ProtocolParams, ViolationWindow, THETA_GRID_STEP, THETA_TOLERANCE,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// `𝓛 < −ε_total`: violated even after charging for measurement disturbance.
    ViolatesStrict,
    /// `−ε_total ≤ 𝓛 < 0`.
    ViolatesLenient,
    NoViolation,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::ViolatesStrict => "violates_strict",
            Verdict::ViolatesLenient => "violates_lenient",
            Verdict::NoViolation => "no_violation",
        }
    }

    pub fn is_strict(&self) -> bool {
        matches!(self, Verdict::ViolatesStrict)
    }

    /// Strict violations are also lenient ones.
    pub fn is_lenient(&self) -> bool {
        !matches!(self, Verdict::NoViolation)
    }

    pub fn violates(&self, criterion: Criterion) -> bool {
        match criterion {
            Criterion::Strict => self.is_strict(),
            Criterion::Lenient => self.is_lenient(),
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Verdict {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "violates_strict" => Ok(Verdict::ViolatesStrict),
            "violates_lenient" => Ok(Verdict::ViolatesLenient),
            "no_violation" => Ok(Verdict::NoViolation),
            other => Err(format!("unknown verdict '{other}'")),
        }
    }
}

/// Which bound a violation must beat: `𝓛 ≥ −ε_total` or `𝓛 ≥ 0`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    #[default]
    Strict,
    Lenient,
}

impl Criterion {
    pub fn as_str(&self) -> &'static str {
        match self {
            Criterion::Strict => "strict",
            Criterion::Lenient => "lenient",
        }
    }
}

impl FromStr for Criterion {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "strict" => Ok(Criterion::Strict),
            "lenient" => Ok(Criterion::Lenient),
            other => Err(format!("expected strict or lenient, got '{other}'")),
        }
    }
}

pub fn violation_verdict(cs: &CorrelatorSet, eps_total: f64) -> Verdict {
    if cs.lg_quantity < -eps_total {
        Verdict::ViolatesStrict
    } else if cs.lg_quantity < 0.0 {
        Verdict::ViolatesLenient
    } else {
        Verdict::NoViolation
    }
}
