use nalgebra::Vector4;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::EstimateWithError;
use crate::dynamics::lindblad_propagator;
use crate::protocol::{EventTag, ExperimentSchedule, InclusionMask};
use crate::qubit::Channel;
use crate::{Error, Result};

/// Shots drawn from one ChaCha20 stream. Chunk `c` uses stream `c` of the
/// generator seeded with `seed`, so the output does not depend on how many
/// threads run the chunks.
pub const CHUNK_SHOTS: usize = 1 << 16;

/// Seed offset for the probe-omitted arm of an adroitness estimate.
const OMITTED_ARM_SEED_XOR: u64 = 0x9E37_79B9_7F4A_7C15;

/// Finite-shot outcome records of the measured events of a schedule.
///
/// Each shot is packed into a `u32`: bit `d` set means outcome −1 at the
/// `d`-th measured event.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleRecords {
    pub seed: u64,
    pub events: Vec<usize>,
    pub tags: Vec<EventTag>,
    pub shots: Vec<u32>,
}

impl SampleRecords {
    pub fn len(&self) -> usize {
        self.shots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shots.is_empty()
    }

    pub fn outcome(&self, shot: usize, slot: usize) -> i8 {
        if self.shots[shot] >> slot & 1 == 1 {
            -1
        } else {
            1
        }
    }

    pub fn slot(&self, tag: EventTag) -> Result<usize> {
        self.tags
            .iter()
            .position(|&t| t == tag)
            .ok_or_else(|| Error::InvalidSchedule(format!("{tag} not recorded")))
    }
}

/// Per measured event: propagator from the previous measured event, and the
/// Bloch axis of the observable (`None` for the trivial involutions ±I,
/// carrying their fixed outcome).
struct Step {
    propagator: Channel,
    axis: std::result::Result<[f64; 3], i8>,
}

fn draw_shot(steps: &[Step], start: &Vector4<f64>, rng: &mut ChaCha20Rng) -> u32 {
    let mut x = *start;
    let mut bits = 0u32;
    for (d, step) in steps.iter().enumerate() {
        x = step.propagator.apply_coords(&x);
        let outcome = match step.axis {
            Err(fixed) => fixed,
            Ok(n) => {
                // Tr(P₊ρ) = c0 + n·(cx, cy, cz) in Pauli coordinates.
                let p_plus = x[0] + n[0] * x[1] + n[1] * x[2] + n[2] * x[3];
                let s: i8 = if rng.random::<f64>() < p_plus { 1 } else { -1 };
                // A rank-one Lüders update leaves the eigenprojector (I + sQ)/2.
                let h = 0.5 * f64::from(s);
                x = Vector4::new(0.5, h * n[0], h * n[1], h * n[2]);
                s
            }
        };
        if outcome < 0 {
            bits |= 1 << d;
        }
    }
    bits
}

/// Draws `shots` independent outcome records of the measured events.
///
/// Identical `(schedule, mask, shots, seed)` give bit-identical records.
pub fn sample_trajectories(
    schedule: &ExperimentSchedule,
    mask: &InclusionMask,
    shots: usize,
    seed: u64,
) -> Result<SampleRecords> {
    if shots == 0 {
        return Err(Error::param("shots", "must be >= 1"));
    }
    if mask.len() != schedule.len() {
        return Err(Error::InvalidSchedule("mask length mismatch".into()));
    }
    let events = mask.included_indices();
    if events.len() > 32 {
        return Err(Error::TooManyEvents(events.len()));
    }
    let mut t = 0.0;
    let mut steps = Vec::with_capacity(events.len());
    for &i in &events {
        let e = &schedule.events()[i];
        let c = e.observable.op().real_coords();
        let axis = if c[0].abs() > 0.5 {
            Err(c[0].signum() as i8)
        } else {
            Ok(e.observable.axis())
        };
        steps.push(Step {
            propagator: lindblad_propagator(schedule.dynamics(), e.time - t)?,
            axis,
        });
        t = e.time;
    }
    let start = Vector4::from(schedule.initial_state().op().real_coords());
    let chunks = shots.div_ceil(CHUNK_SHOTS);
    let records: Vec<Vec<u32>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let n = CHUNK_SHOTS.min(shots - c * CHUNK_SHOTS);
            (0..n)
                .map(|_| draw_shot(&steps, &start, &mut rng))
                .collect()
        })
        .collect();
    Ok(SampleRecords {
        seed,
        tags: events.iter().map(|&i| schedule.events()[i].tag).collect(),
        events,
        shots: records.concat(),
    })
}

/// Mean of `a·b` over shots, with its standard error.
pub fn estimate_correlator(
    records: &SampleRecords,
    first: EventTag,
    second: EventTag,
) -> Result<EstimateWithError> {
    if records.is_empty() {
        return Err(Error::param("records", "no shots"));
    }
    let (a, b) = (records.slot(first)?, records.slot(second)?);
    let products =
        (0..records.len()).map(|s| f64::from(records.outcome(s, a) * records.outcome(s, b)));
    Ok(EstimateWithError::from_samples(products))
}

fn empirical_joint(records: &SampleRecords) -> Result<[[f64; 2]; 2]> {
    let (a, c) = (records.slot(EventTag::Q1)?, records.slot(EventTag::Q3)?);
    let mut counts = [[0usize; 2]; 2];
    for s in 0..records.len() {
        let ia = usize::from(records.outcome(s, a) < 0);
        let ic = usize::from(records.outcome(s, c) < 0);
        counts[ia][ic] += 1;
    }
    let n = records.len() as f64;
    Ok(counts.map(|row| row.map(|k| k as f64 / n)))
}

/// Finite-shot ε estimate for a (Q1, probe, Q3) schedule.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdroitnessEstimate {
    /// `Σ |P̂_with − P̂_without|`; biased upward by sampling noise.
    pub epsilon: f64,
    /// Plug-in standard error of each cell difference, `[a][c]`.
    pub cell_standard_errors: [[f64; 2]; 2],
    pub seed: u64,
    pub shots: usize,
}

impl AdroitnessEstimate {
    /// Root-sum-square of the cell standard errors.
    pub fn combined_standard_error(&self) -> f64 {
        self.cell_standard_errors
            .iter()
            .flatten()
            .map(|s| s * s)
            .sum::<f64>()
            .sqrt()
    }
}

/// Runs `shots` with the probe and `shots` without it. The probe-omitted
/// arm uses `seed ^ 0x9E3779B97F4A7C15` so the two arms are independent.
pub fn estimate_adroitness(
    schedule: &ExperimentSchedule,
    shots: usize,
    seed: u64,
) -> Result<AdroitnessEstimate> {
    if schedule.position(EventTag::Probe).is_none() {
        return Err(Error::InvalidSchedule("no probe event".into()));
    }
    let with = sample_trajectories(schedule, &InclusionMask::all(schedule), shots, seed)?;
    let without = sample_trajectories(
        schedule,
        &InclusionMask::without(schedule, EventTag::Probe),
        shots,
        seed ^ OMITTED_ARM_SEED_XOR,
    )?;
    let (p, q) = (empirical_joint(&with)?, empirical_joint(&without)?);
    let n = shots as f64;
    let mut epsilon = 0.0;
    let mut cell_standard_errors = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            epsilon += (p[i][j] - q[i][j]).abs();
            cell_standard_errors[i][j] =
                (p[i][j] * (1.0 - p[i][j]) / n + q[i][j] * (1.0 - q[i][j]) / n).sqrt();
        }
    }
    Ok(AdroitnessEstimate {
        epsilon,
        cell_standard_errors,
        seed,
        shots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{HamiltonianSpec, LindbladSpec};
    use crate::protocol::{adroitness_experiments, build_protocol_schedule, classic_schedule};
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn ideal() -> LindbladSpec {
        LindbladSpec::ideal(HamiltonianSpec::new(1.0, false).unwrap())
    }

    #[test]
    fn deterministic_in_seed() {
        let s = build_protocol_schedule(0.75 * PI, 1, PI, ideal()).unwrap();
        let mask = InclusionMask::all(&s);
        let a = sample_trajectories(&s, &mask, 1000, 7).unwrap();
        let b = sample_trajectories(&s, &mask, 1000, 7).unwrap();
        let c = sample_trajectories(&s, &mask, 1000, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.shots, c.shots);
        assert_eq!(a.seed, 7);
    }

    #[test]
    fn chunking_is_a_prefix() {
        let s = build_protocol_schedule(0.75 * PI, 1, PI, ideal()).unwrap();
        let mask = InclusionMask::all(&s);
        let small = sample_trajectories(&s, &mask, 100, 3).unwrap();
        let large = sample_trajectories(&s, &mask, CHUNK_SHOTS + 100, 3).unwrap();
        assert_eq!(small.shots[..], large.shots[..100]);
    }

    #[test]
    fn correlator_estimates() {
        let s = build_protocol_schedule(0.75 * PI, 1, PI, ideal()).unwrap();
        let r = sample_trajectories(&s, &InclusionMask::all(&s), 200_000, 11).unwrap();
        let c12 = estimate_correlator(&r, EventTag::Q1, EventTag::Q2).unwrap();
        assert!(c12.z_score(0.25) < 5.0, "{c12:?}");
        assert_eq!(c12.samples, 200_000);

        let classic = classic_schedule(1.0).unwrap();
        let r = sample_trajectories(&classic, &InclusionMask::all(&classic), 200_000, 5).unwrap();
        let c = estimate_correlator(&r, EventTag::Q1, EventTag::Q2).unwrap();
        assert!(c.z_score(-FRAC_1_SQRT_2) < 5.0, "{c:?}");
    }

    #[test]
    fn repeated_measurement_records_agree() {
        let exps = adroitness_experiments(0.6 * PI, PI, ideal()).unwrap();
        let s = &exps[0].schedule;
        let r = sample_trajectories(s, &InclusionMask::all(s), 5000, 1).unwrap();
        let e = estimate_correlator(&r, EventTag::Q1, EventTag::Probe).unwrap();
        assert_eq!((e.mean, e.standard_error), (1.0, 0.0));
    }

    #[test]
    fn ideal_probe_estimate_is_noise_sized() {
        let exps = adroitness_experiments(0.75 * PI, PI, ideal()).unwrap();
        for exp in &exps {
            let est = estimate_adroitness(&exp.schedule, 100_000, 42).unwrap();
            // Exact ε is 0; the estimate is |noise| summed over four cells.
            assert!(
                est.epsilon < 10.0 * est.combined_standard_error(),
                "{est:?}"
            );
        }
    }

    #[test]
    fn rejects_zero_shots() {
        let s = build_protocol_schedule(1.0, 1, PI, ideal()).unwrap();
        assert!(sample_trajectories(&s, &InclusionMask::all(&s), 0, 1).is_err());
    }
}
