//! Two oracles for every protocol quantity that do not go through
//! unconditioned measurement channels:
//!
//! - [`enumerate_outcomes`] walks the full projective outcome tree, applying
//!   the conditional Lüders update `P±ρP±/p` at each event.
//! - [`sample_trajectories`] draws finite-shot records the way an
//!   experimenter would collect them.
//!
//! Monte Carlo ε estimates are biased upward at finite shot counts because
//! they sum absolute differences of noisy frequencies. Only exact values
//! should be compared against `𝓛 ≥ −ε_total`.

mod enumerate;
mod monte_carlo;

use serde::{Deserialize, Serialize};

pub use enumerate::{
    enumerate_outcomes, OutcomeTrajectory, OutcomeTree, MAX_ENUMERATED_EVENTS, PRUNE_THRESHOLD,
};
pub use monte_carlo::{
    estimate_adroitness, estimate_correlator, sample_trajectories, AdroitnessEstimate,
    SampleRecords, CHUNK_SHOTS,
};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateWithError {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(samples)`.
    pub standard_error: f64,
    pub samples: usize,
}

impl EstimateWithError {
    pub fn from_samples(values: impl Iterator<Item = f64> + Clone) -> Self {
        let (count, sum) = values
            .clone()
            .fold((0usize, 0.0), |(n, s), v| (n + 1, s + v));
        if count == 0 {
            return EstimateWithError {
                mean: f64::NAN,
                standard_error: f64::NAN,
                samples: 0,
            };
        }
        let mean = sum / count as f64;
        let standard_error = if count > 1 {
            let ss: f64 = values.map(|v| (v - mean) * (v - mean)).sum();
            (ss / (count - 1) as f64).sqrt() / (count as f64).sqrt()
        } else {
            0.0
        };
        EstimateWithError {
            mean,
            standard_error,
            samples: count,
        }
    }

    /// `|mean − exact|` in units of the standard error. An exact match with
    /// zero spread counts as 0.
    pub fn z_score(&self, exact: f64) -> f64 {
        let d = (self.mean - exact).abs();
        if d == 0.0 {
            0.0
        } else {
            d / self.standard_error
        }
    }
}
