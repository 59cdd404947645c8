//! The subcommands. Each returns a [`Table`]; nothing here touches stdout.

use rayon::prelude::*;

use super::config::{Command, ConfigError, SweepConfig};
use super::table::{AdroitnessRow, ClassicRow, Rows, SweepRecord, Table};
use crate::protocol::{
    adroitness_experiments, classic_lg, epsilon_adroitness, evaluate_point, gamma_cutoff,
    onset_angle, violation_verdict, Bracket, Criterion, ProtocolParams, Verdict,
};
use crate::sampling::estimate_adroitness;

/// Seed used for Monte Carlo columns when `shots` is set without `seed`.
pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("error: field=compute {0}")]
    Compute(#[from] crate::Error),
    #[error("error: field=workers {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

/// Validates `config`, applies per-command adjustments and runs `command`
/// on a pool of `config.workers` threads. Rows come out in grid order.
pub fn run(command: Command, config: &SweepConfig) -> Result<Table, CliError> {
    config.validate()?;
    let mut config = config.clone();
    let mut notes = Vec::new();
    match command {
        Command::Fig2 => {
            if config.gamma.values() != [0.0] {
                notes.push("note: gamma forced to 0 for fig2".to_string());
            }
            config.gamma = super::config::Range::single(0.0);
        }
        Command::Fig3 if config.n_values.len() > 1 => {
            notes.push(format!(
                "note: fig3 uses a single n; keeping n = {}",
                config.n_values[0]
            ));
            config.n_values.truncate(1);
        }
        _ => {}
    }
    if config.shots.is_some() && config.seed.is_none() {
        config.seed = Some(DEFAULT_SEED);
    }
    if config.n_values.contains(&0) {
        notes
            .push("note: n = 0 is the reduced single-measurement box, which cannot violate".into());
    }

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = config.workers {
        builder = builder.num_threads(w);
    }
    let pool = builder.build()?;
    let (rows, summary) = pool.install(|| match command {
        Command::Fig2 => fig2(&config),
        Command::Fig3 => fig3(&config),
        Command::Adroitness => adroitness(&config),
        Command::Classic => classic(&config),
        Command::Sweep => sweep(&config),
    })?;

    let mut header = config.echo_lines(command);
    header.extend(notes);
    Ok(Table {
        header,
        rows,
        summary,
    })
}

fn params(config: &SweepConfig, n: usize, gamma: f64) -> ProtocolParams {
    ProtocolParams {
        n,
        omega: config.omega,
        m: config.m,
        gamma,
    }
}

/// `(θ, γ, n)` records, ordered by n, then γ, then θ.
fn grid(config: &SweepConfig) -> crate::Result<Vec<SweepRecord>> {
    let thetas = config.theta.values();
    let gammas = config.gamma.values();
    let mut points = Vec::with_capacity(config.n_values.len() * gammas.len() * thetas.len());
    for &n in &config.n_values {
        for &gamma in &gammas {
            points.extend(thetas.iter().map(|&theta| (n, gamma, theta)));
        }
    }
    points
        .into_par_iter()
        .map(|(n, gamma, theta)| {
            let (cs, eps) = evaluate_point(theta, &params(config, n, gamma))?;
            Ok(SweepRecord {
                theta,
                gamma,
                n,
                c12: cs.c12,
                c23: cs.c23,
                c13_prime: cs.c13_prime,
                lg_quantity: cs.lg_quantity,
                eps_total: eps,
                verdict: violation_verdict(&cs, eps),
            })
        })
        .collect()
}

fn bracket_line(label: &str, b: Option<Bracket>, pi_units: bool) -> String {
    match b {
        Some(b) if pi_units => format!(
            "{label} value={} value_over_pi={} bracket_width={}",
            b.value,
            b.value / std::f64::consts::PI,
            b.width
        ),
        Some(b) => format!("{label} value={} bracket_width={}", b.value, b.width),
        None => format!("{label} none"),
    }
}

type Output = crate::Result<(Rows, Vec<String>)>;

fn fig2(config: &SweepConfig) -> Output {
    let records = grid(config)?;
    let onsets: Vec<Option<Bracket>> = config
        .n_values
        .par_iter()
        .map(|&n| onset_angle(&params(config, n, 0.0), config.criterion))
        .collect::<crate::Result<_>>()?;
    let summary = config
        .n_values
        .iter()
        .zip(onsets)
        .map(|(n, b)| bracket_line(&format!("onset n={n}"), b, true))
        .collect();
    Ok((Rows::Sweep(records), summary))
}

fn fig3(config: &SweepConfig) -> Output {
    let records = grid(config)?;
    let mut summary = Vec::new();
    for criterion in [Criterion::Strict, Criterion::Lenient] {
        let grid_max = records
            .iter()
            .filter(|r| r.verdict.violates(criterion))
            .map(|r| r.gamma)
            .fold(None, |acc: Option<f64>, g| {
                Some(acc.map_or(g, |a| a.max(g)))
            });
        summary.push(match grid_max {
            Some(g) => format!("grid_max_gamma criterion={} value={g}", criterion.as_str()),
            None => format!("grid_max_gamma criterion={} none", criterion.as_str()),
        });
    }
    let base = params(config, config.n_values[0], 0.0);
    let gamma_max = config.gamma.stop;
    if gamma_max > 0.0 {
        let steps = config.gamma.steps.saturating_sub(1).max(1);
        let cutoffs: Vec<Option<Bracket>> = [Criterion::Strict, Criterion::Lenient]
            .par_iter()
            .map(|&c| gamma_cutoff(&base, c, gamma_max, steps))
            .collect::<crate::Result<_>>()?;
        for (c, b) in [Criterion::Strict, Criterion::Lenient].iter().zip(cutoffs) {
            summary.push(bracket_line(
                &format!("gamma_cutoff criterion={}", c.as_str()),
                b,
                false,
            ));
        }
    }
    Ok((Rows::Sweep(records), summary))
}

fn sweep(config: &SweepConfig) -> Output {
    let records = grid(config)?;
    let hits = records
        .iter()
        .filter(|r| r.verdict.violates(config.criterion))
        .count();
    let summary = vec![format!(
        "violations criterion={} count={hits} of={}",
        config.criterion.as_str(),
        records.len()
    )];
    Ok((Rows::Sweep(records), summary))
}

fn adroitness(config: &SweepConfig) -> Output {
    let thetas = config.theta.values();
    let gammas = config.gamma.values();
    let mut points = Vec::with_capacity(gammas.len() * thetas.len());
    for &gamma in &gammas {
        points.extend(thetas.iter().map(|&theta| (theta, gamma)));
    }
    let blocks: Vec<Vec<AdroitnessRow>> = points
        .into_par_iter()
        .enumerate()
        .map(|(k, (theta, gamma))| {
            let p = params(config, 1, gamma);
            let experiments = adroitness_experiments(theta, p.tau(), p.dynamics()?)?;
            let mut rows = Vec::with_capacity(5);
            let (mut total, mut total_mc, mut total_var) = (0.0, 0.0, 0.0);
            for (j, e) in experiments.iter().enumerate() {
                let exact = epsilon_adroitness(&e.schedule)?;
                total += exact;
                let mut row = AdroitnessRow {
                    theta,
                    gamma,
                    experiment: e.id.as_str().to_string(),
                    eps_exact: exact,
                    eps_mc: None,
                    eps_mc_stderr: None,
                    shots: None,
                    seed: None,
                };
                if let (Some(shots), Some(seed)) = (config.shots, config.seed) {
                    let sub_seed = seed.wrapping_add((4 * k + j) as u64);
                    let est = estimate_adroitness(&e.schedule, shots, sub_seed)?;
                    let se = est.combined_standard_error();
                    total_mc += est.epsilon;
                    total_var += se * se;
                    row.eps_mc = Some(est.epsilon);
                    row.eps_mc_stderr = Some(se);
                    row.shots = Some(shots);
                    row.seed = Some(sub_seed);
                }
                rows.push(row);
            }
            let mc = config.shots.is_some();
            rows.push(AdroitnessRow {
                theta,
                gamma,
                experiment: "total".to_string(),
                eps_exact: total,
                eps_mc: mc.then_some(total_mc),
                eps_mc_stderr: mc.then(|| total_var.sqrt()),
                shots: config.shots,
                seed: config.seed,
            });
            Ok(rows)
        })
        .collect::<crate::Result<_>>()?;
    let summary = vec![format!(
        "battery at n-independent tau = pi*m/omega = {}",
        params(config, 1, 0.0).tau()
    )];
    Ok((
        Rows::Adroitness(blocks.into_iter().flatten().collect()),
        summary,
    ))
}

fn classic(config: &SweepConfig) -> Output {
    let cs = classic_lg(config.omega)?;
    // No adroitness battery accompanies this test, so a negative 𝓛 can
    // only be claimed under the lenient reading.
    let verdict = if cs.lg_quantity < 0.0 {
        Verdict::ViolatesLenient
    } else {
        Verdict::NoViolation
    };
    let row = ClassicRow {
        omega: config.omega,
        c12: cs.c12,
        c23: cs.c23,
        c13_prime: cs.c13_prime,
        lg_quantity: cs.lg_quantity,
        eps_total: 0.0,
        verdict,
    };
    let summary = vec![
        "note: eps_total does not apply to this test and is reported as 0".to_string(),
        format!(
            "times 0, {}, {}",
            0.75 * std::f64::consts::PI / config.omega,
            1.5 * std::f64::consts::PI / config.omega
        ),
    ];
    Ok((Rows::Classic(vec![row]), summary))
}
