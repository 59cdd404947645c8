use std::path::PathBuf;
use std::process::ExitCode;

use adroit_lg::cli::{run, Command, ConfigError, SweepConfig};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "lgsim",
    version,
    about = "Leggett-Garg tests with adroit measurements on one qubit"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// 𝓛(θ) at γ = 0 for each n, with violation onsets
    Fig2(Flags),
    /// 𝓛 and ε_total over a (θ, γ) grid, with γ cutoffs
    Fig3(Flags),
    /// ε of each battery experiment and ε_total
    Adroitness(Flags),
    /// The three-time test at t = 0, 3π/4ω, 3π/2ω
    Classic(Flags),
    /// Free-form (θ, γ, n) grid
    Sweep(Flags),
}

#[derive(Args)]
struct Flags {
    /// `key = value` file; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// start:stop:steps in radians, `pi` suffix allowed
    #[arg(long)]
    theta: Option<String>,
    /// start:stop:steps
    #[arg(long)]
    gamma: Option<String>,
    /// comma-separated interleaved pair counts
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    omega: Option<String>,
    /// QND interval multiplier, τ = πm/ω
    #[arg(long)]
    m: Option<String>,
    /// strict | lenient
    #[arg(long)]
    criterion: Option<String>,
    /// Monte Carlo shots (adroitness only)
    #[arg(long)]
    shots: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// csv | jsonl
    #[arg(long)]
    format: Option<String>,
    /// write here instead of stdout
    #[arg(long)]
    out: Option<String>,
    /// worker threads (default: all cores)
    #[arg(long)]
    workers: Option<String>,
}

impl Flags {
    fn resolve(&self, command: Command) -> Result<SweepConfig, ConfigError> {
        let mut cfg = SweepConfig::defaults(command);
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ConfigError::new("config", format!("{}: {e}", path.display())))?;
            cfg.apply_file(&text)?;
        }
        let flags = [
            ("theta", &self.theta),
            ("gamma", &self.gamma),
            ("n", &self.n),
            ("omega", &self.omega),
            ("m", &self.m),
            ("criterion", &self.criterion),
            ("shots", &self.shots),
            ("seed", &self.seed),
            ("format", &self.format),
            ("out", &self.out),
            ("workers", &self.workers),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg
                .lines()
                .next()
                .unwrap_or("")
                .trim_start_matches("error: ");
            eprintln!("error: field=args {first}");
            return ExitCode::from(2);
        }
    };
    let (command, flags) = match &cli.command {
        Cmd::Fig2(f) => (Command::Fig2, f),
        Cmd::Fig3(f) => (Command::Fig3, f),
        Cmd::Adroitness(f) => (Command::Adroitness, f),
        Cmd::Classic(f) => (Command::Classic, f),
        Cmd::Sweep(f) => (Command::Sweep, f),
    };
    let result = flags
        .resolve(command)
        .map_err(|e| e.to_string())
        .and_then(|cfg| {
            let table = run(command, &cfg).map_err(|e| e.to_string())?;
            let text = table.render(cfg.format);
            match &cfg.out {
                Some(path) => std::fs::write(path, text)
                    .map_err(|e| format!("error: field=out {}: {e}", path.display())),
                None => {
                    print!("{text}");
                    Ok(())
                }
            }
        });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(line) => {
            eprintln!("{line}");
            ExitCode::FAILURE
        }
    }
}
