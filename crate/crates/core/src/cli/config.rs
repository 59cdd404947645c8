//! Sweep configuration: built-in defaults, then an optional `key = value`
//! file, then command-line flags.

use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;

use crate::protocol::Criterion;

/// A validation failure, rendered on one line as
/// `error: field=<name> [line=<n>] <reason>`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigError {
    pub field: String,
    pub line: Option<usize>,
    pub reason: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, reason: impl Into<String>) -> Self {
        ConfigError {
            field: field.into(),
            line: None,
            reason: reason.into(),
        }
    }

    fn at_line(mut self, line: usize) -> Self {
        self.line = Some(line);
        self
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "error: field={}", self.field)?;
        if let Some(line) = self.line {
            write!(f, " line={line}")?;
        }
        write!(f, " {}", self.reason.replace('\n', " "))
    }
}

impl std::error::Error for ConfigError {}

/// `steps` evenly spaced values from `start` to `stop` inclusive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl Range {
    pub fn single(value: f64) -> Self {
        Range {
            start: value,
            stop: value,
            steps: 1,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.start];
        }
        let h = (self.stop - self.start) / (self.steps - 1) as f64;
        (0..self.steps)
            .map(|k| {
                if k + 1 == self.steps {
                    self.stop
                } else {
                    self.start + k as f64 * h
                }
            })
            .collect()
    }

    /// Parses `start:stop:steps`. Bounds accept a `pi` suffix (`0.75pi`).
    pub fn parse(field: &str, s: &str) -> Result<Self, ConfigError> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let err = |reason: String| ConfigError::new(field, reason);
        let (start, stop, steps) = match parts.as_slice() {
            [v] => {
                let v = parse_real(v).map_err(err)?;
                (v, v, 1)
            }
            [a, b, n] => (
                parse_real(a).map_err(err)?,
                parse_real(b).map_err(err)?,
                n.trim()
                    .parse::<usize>()
                    .map_err(|_| err(format!("steps '{n}' is not a count")))?,
            ),
            _ => return Err(err(format!("expected start:stop:steps, got '{s}'"))),
        };
        let r = Range { start, stop, steps };
        r.validate(field)?;
        Ok(r)
    }

    fn validate(&self, field: &str) -> Result<(), ConfigError> {
        if self.steps < 1 {
            return Err(ConfigError::new(field, "steps must be >= 1"));
        }
        if self.start > self.stop {
            return Err(ConfigError::new(field, "start must be <= stop"));
        }
        Ok(())
    }
}

impl fmt::Display for Range {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.steps)
    }
}

fn parse_real(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let (num, scale) = match s.strip_suffix("pi") {
        Some("") => ("1", PI),
        Some(rest) => (rest.trim_end_matches('*'), PI),
        None => (s, 1.0),
    };
    let v: f64 = num
        .trim()
        .parse()
        .map_err(|_| format!("'{s}' is not a number"))?;
    let v = v * scale;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("'{s}' is not finite"))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OutputFormat {
    #[default]
    Csv,
    Jsonl,
}

impl OutputFormat {
    pub fn as_str(&self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Jsonl => "jsonl",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Fig2,
    Fig3,
    Adroitness,
    Classic,
    Sweep,
}

impl Command {
    pub fn as_str(&self) -> &'static str {
        match self {
            Command::Fig2 => "fig2",
            Command::Fig3 => "fig3",
            Command::Adroitness => "adroitness",
            Command::Classic => "classic",
            Command::Sweep => "sweep",
        }
    }
}

/// Fully resolved parameters of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub theta: Range,
    pub gamma: Range,
    pub n_values: Vec<usize>,
    pub omega: f64,
    pub m: u32,
    pub criterion: Criterion,
    pub shots: Option<usize>,
    pub seed: Option<u64>,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
}

impl SweepConfig {
    /// Built-in defaults for each command.
    pub fn defaults(command: Command) -> Self {
        let (theta, gamma, n_values) = match command {
            Command::Fig2 => (
                Range {
                    start: 0.5 * PI,
                    stop: PI,
                    steps: 501,
                },
                Range::single(0.0),
                vec![1, 2, 3, 5, 10],
            ),
            Command::Fig3 => (
                Range {
                    start: 0.5 * PI,
                    stop: PI,
                    steps: 101,
                },
                Range {
                    start: 0.0,
                    stop: 0.02,
                    steps: 41,
                },
                vec![1],
            ),
            Command::Adroitness => (Range::single(0.75 * PI), Range::single(0.0), vec![1]),
            Command::Classic => (Range::single(0.0), Range::single(0.0), vec![1]),
            Command::Sweep => (
                Range {
                    start: 0.5 * PI,
                    stop: PI,
                    steps: 101,
                },
                Range {
                    start: 0.0,
                    stop: 0.02,
                    steps: 5,
                },
                vec![1],
            ),
        };
        SweepConfig {
            theta,
            gamma,
            n_values,
            omega: 1.0,
            m: 1,
            criterion: Criterion::Strict,
            shots: None,
            seed: None,
            format: OutputFormat::Csv,
            out: None,
            workers: None,
        }
    }

    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let err = |reason: String| ConfigError::new(key, reason);
        let value = value.trim();
        match key {
            "theta" => self.theta = Range::parse(key, value)?,
            "gamma" => self.gamma = Range::parse(key, value)?,
            "n" => {
                self.n_values = value
                    .split(',')
                    .map(|v| {
                        v.trim()
                            .parse::<usize>()
                            .map_err(|_| err(format!("'{v}' is not a count")))
                    })
                    .collect::<Result<_, _>>()?
            }
            "omega" => self.omega = parse_real(value).map_err(err)?,
            "m" => {
                self.m = value
                    .parse()
                    .map_err(|_| err(format!("'{value}' is not a positive integer")))?
            }
            "criterion" => self.criterion = value.parse().map_err(err)?,
            "shots" => {
                self.shots = Some(
                    value
                        .parse()
                        .map_err(|_| err(format!("'{value}' is not a count")))?,
                )
            }
            "seed" => {
                self.seed = Some(
                    value
                        .parse()
                        .map_err(|_| err(format!("'{value}' is not a 64-bit integer")))?,
                )
            }
            "format" => {
                self.format = match value {
                    "csv" => OutputFormat::Csv,
                    "jsonl" => OutputFormat::Jsonl,
                    other => return Err(err(format!("expected csv or jsonl, got '{other}'"))),
                }
            }
            "out" => self.out = Some(PathBuf::from(value)),
            "workers" => {
                self.workers = Some(
                    value
                        .parse()
                        .map_err(|_| err(format!("'{value}' is not a count")))?,
                )
            }
            other => return Err(ConfigError::new(other, "unknown key")),
        }
        Ok(())
    }

    /// Applies a `key = value` file. Blank lines and `#` comments are
    /// skipped; errors carry the 1-based line number.
    pub fn apply_file(&mut self, text: &str) -> Result<(), ConfigError> {
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                ConfigError::new("config", format!("expected key = value, got '{line}'"))
                    .at_line(idx + 1)
            })?;
            self.set(key.trim(), value)
                .map_err(|e| e.at_line(idx + 1))?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.theta.validate("theta")?;
        self.gamma.validate("gamma")?;
        if self.gamma.start < 0.0 {
            return Err(ConfigError::new("gamma", "dephasing rate must be >= 0"));
        }
        if self.n_values.is_empty() {
            return Err(ConfigError::new("n", "need at least one value"));
        }
        if !(self.omega.is_finite() && self.omega > 0.0) {
            return Err(ConfigError::new("omega", "must be > 0"));
        }
        if self.m < 1 {
            return Err(ConfigError::new("m", "must be >= 1"));
        }
        if self.shots == Some(0) {
            return Err(ConfigError::new("shots", "must be >= 1"));
        }
        if self.workers == Some(0) {
            return Err(ConfigError::new("workers", "must be >= 1"));
        }
        Ok(())
    }

    /// The resolved configuration as `key = value` lines, in the same
    /// syntax [`apply_file`](Self::apply_file) reads.
    pub fn echo_lines(&self, command: Command) -> Vec<String> {
        let mut lines = vec![
            format!("command = {}", command.as_str()),
            format!("theta = {}", self.theta),
            format!("gamma = {}", self.gamma),
            format!(
                "n = {}",
                self.n_values
                    .iter()
                    .map(usize::to_string)
                    .collect::<Vec<_>>()
                    .join(",")
            ),
            format!("omega = {}", self.omega),
            format!("m = {}", self.m),
            format!("criterion = {}", self.criterion.as_str()),
            format!("format = {}", self.format.as_str()),
        ];
        if let Some(s) = self.shots {
            lines.push(format!("shots = {s}"));
        }
        if let Some(s) = self.seed {
            lines.push(format!("seed = {s}"));
        }
        if let Some(w) = self.workers {
            lines.push(format!("workers = {w}"));
        }
        lines
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_parsing() {
        let r = Range::parse("theta", "0.5pi:pi:3").unwrap();
        assert_eq!(r.values(), vec![0.5 * PI, 0.75 * PI, PI]);
        assert_eq!(Range::parse("gamma", "0.01").unwrap().values(), vec![0.01]);
        assert_eq!(Range::parse("g", "0:1:1").unwrap().values(), vec![0.0]);
        assert!(Range::parse("theta", "1:0:5").is_err());
        assert!(Range::parse("theta", "0:1:0").is_err());
        assert!(Range::parse("theta", "0:1").is_err());
        assert!(Range::parse("theta", "a:1:2").is_err());
    }

    #[test]
    fn range_endpoints_are_exact() {
        let r = Range {
            start: 0.0,
            stop: 0.02,
            steps: 41,
        };
        let v = r.values();
        assert_eq!(v.len(), 41);
        assert_eq!(v[0], 0.0);
        assert_eq!(v[40], 0.02);
    }

    #[test]
    fn file_then_flags() {
        let mut cfg = SweepConfig::defaults(Command::Sweep);
        cfg.apply_file("# comment\ntheta = 0:pi:5\n\nn = 1, 2 # trailing\nomega=2\n")
            .unwrap();
        cfg.set("omega", "3").unwrap();
        assert_eq!(cfg.theta.steps, 5);
        assert_eq!(cfg.n_values, vec![1, 2]);
        assert_eq!(cfg.omega, 3.0);
    }

    #[test]
    fn file_errors_carry_lines() {
        let mut cfg = SweepConfig::defaults(Command::Sweep);
        let e = cfg.apply_file("omega = 1\ntheta = 0:1:0\n").unwrap_err();
        assert_eq!(e.line, Some(2));
        assert_eq!(e.field, "theta");
        assert_eq!(
            e.to_string(),
            "error: field=theta line=2 steps must be >= 1"
        );
        let e = cfg.apply_file("bogus = 3").unwrap_err();
        assert_eq!((e.field.as_str(), e.line), ("bogus", Some(1)));
        let e = cfg.apply_file("just words").unwrap_err();
        assert_eq!(e.field, "config");
    }

    #[test]
    fn validation() {
        let mut cfg = SweepConfig::defaults(Command::Fig3);
        cfg.validate().unwrap();
        cfg.omega = 0.0;
        assert_eq!(cfg.validate().unwrap_err().field, "omega");
        let mut cfg = SweepConfig::defaults(Command::Fig3);
        cfg.set("gamma", "-0.1:0.1:3").unwrap();
        assert_eq!(cfg.validate().unwrap_err().field, "gamma");
        let mut cfg = SweepConfig::defaults(Command::Fig3);
        cfg.m = 0;
        assert_eq!(cfg.validate().unwrap_err().field, "m");
    }

    #[test]
    fn echo_is_reloadable() {
        let mut cfg = SweepConfig::defaults(Command::Fig3);
        cfg.shots = Some(1000);
        cfg.seed = Some(9);
        let text: String = cfg
            .echo_lines(Command::Fig3)
            .into_iter()
            .filter(|l| !l.starts_with("command"))
            .map(|l| l + "\n")
            .collect();
        let mut back = SweepConfig::defaults(Command::Sweep);
        back.apply_file(&text).unwrap();
        assert_eq!(back, cfg);
    }
}
