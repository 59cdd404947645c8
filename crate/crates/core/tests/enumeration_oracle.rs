use adroit_lg::dynamics::{HamiltonianSpec, LindbladSpec};
use adroit_lg::protocol::{
    adroitness_experiments, build_protocol_schedule, correlator_masked, epsilon_adroitness,
    joint_distribution, EventTag, ExperimentSchedule, InclusionMask, MeasurementEvent,
};
use adroit_lg::qubit::{DensityOperator, Observable};
use adroit_lg::sampling::enumerate_outcomes;
use proptest::prelude::*;
use std::f64::consts::PI;

fn unit(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

fn axis() -> impl Strategy<Value = [f64; 3]> {
    proptest::array::uniform3(-1.0f64..1.0)
        .prop_filter("nonzero", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-2)
        .prop_map(unit)
}

/// Q1, some boxed events, optionally Q2, then Q3, at increasing times.
fn schedule() -> impl Strategy<Value = ExperimentSchedule> {
    (
        proptest::collection::vec((axis(), 0.01f64..1.5), 2..=10),
        any::<bool>(),
        0.0f64..0.3,
        0.2f64..2.0,
        proptest::array::uniform3(-0.5f64..0.5),
    )
        .prop_map(|(events, with_q2, gamma, omega, bloch)| {
            let k = events.len();
            let mut t = 0.0;
            let events = events
                .into_iter()
                .enumerate()
                .map(|(i, (n, dt))| {
                    t += dt;
                    let tag = if i == 0 {
                        EventTag::Q1
                    } else if i == k - 1 {
                        EventTag::Q3
                    } else if with_q2 && i == k - 2 {
                        EventTag::Q2
                    } else {
                        EventTag::Boxed
                    };
                    MeasurementEvent::new(Observable::along(n, format!("n{i}")).unwrap(), t, tag)
                })
                .collect();
            let dynamics =
                LindbladSpec::new(HamiltonianSpec::new(omega, false).unwrap(), gamma).unwrap();
            ExperimentSchedule::new(
                events,
                DensityOperator::from_bloch(bloch).unwrap(),
                dynamics,
            )
            .unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn enumeration_matches_channels(s in schedule(), drop in proptest::collection::vec(any::<bool>(), 10)) {
        let flags: Vec<bool> = s
            .events()
            .iter()
            .enumerate()
            .map(|(i, e)| matches!(e.tag, EventTag::Q1 | EventTag::Q3) || !drop[i])
            .collect();
        let mask = InclusionMask::from_flags(flags);
        let tree = enumerate_outcomes(&s, &mask).unwrap();
        prop_assert!((tree.total_probability() - 1.0).abs() < 1e-10);
        let by_channel = correlator_masked(&s, &mask, EventTag::Q1, EventTag::Q3).unwrap();
        let by_tree = tree.correlator(EventTag::Q1, EventTag::Q3).unwrap();
        prop_assert!((by_channel - by_tree).abs() < 1e-10, "{by_channel} vs {by_tree}");
        let p = joint_distribution(&s, &mask, EventTag::Q1, EventTag::Q3).unwrap();
        let q = tree.joint(EventTag::Q1, EventTag::Q3).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                prop_assert!((p[i][j] - q[i][j]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn adroitness_matches_enumeration(
        theta in 0.0f64..PI,
        gamma in 0.0f64..0.05,
        tau in prop_oneof![Just(PI), Just(2.0 * PI), 0.1f64..4.0],
    ) {
        let dynamics = LindbladSpec::new(HamiltonianSpec::new(1.0, false).unwrap(), gamma).unwrap();
        for e in adroitness_experiments(theta, tau, dynamics).unwrap() {
            let with = enumerate_outcomes(&e.schedule, &InclusionMask::all(&e.schedule)).unwrap();
            let without = enumerate_outcomes(
                &e.schedule,
                &InclusionMask::without(&e.schedule, EventTag::Probe),
            )
            .unwrap();
            let (p, q) = (
                with.joint(EventTag::Q1, EventTag::Q3).unwrap(),
                without.joint(EventTag::Q1, EventTag::Q3).unwrap(),
            );
            let eps_tree: f64 = (0..4).map(|k| (p[k / 2][k % 2] - q[k / 2][k % 2]).abs()).sum();
            let eps = epsilon_adroitness(&e.schedule).unwrap();
            prop_assert!((eps - eps_tree).abs() < 1e-10);
        }
    }
}

#[test]
fn protocol_correlators_match_enumeration() {
    let dynamics = LindbladSpec::new(HamiltonianSpec::new(1.0, false).unwrap(), 0.01).unwrap();
    for n in 0..=4 {
        let s = build_protocol_schedule(0.8 * PI, n, PI, dynamics).unwrap();
        let all = InclusionMask::all(&s);
        let tree = enumerate_outcomes(&s, &all).unwrap();
        for (a, b) in [(EventTag::Q1, EventTag::Q2), (EventTag::Q2, EventTag::Q3)] {
            let x = correlator_masked(&s, &all, a, b).unwrap();
            let y = tree.correlator(a, b).unwrap();
            assert!((x - y).abs() < 1e-10, "n={n} {a}-{b}: {x} vs {y}");
        }
    }
}
