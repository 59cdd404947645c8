//! Output records and their CSV / JSON-lines encodings.
//!
//! CSV floats use 17 significant digits, so every `f64` survives a
//! write/read cycle unchanged. Lines starting with `#` are comments.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::config::OutputFormat;
use crate::protocol::Verdict;

/// Column header of the sweep table.
pub const SWEEP_COLUMNS: [&str; 9] = [
    "theta",
    "gamma",
    "n",
    "c12",
    "c23",
    "c13_prime",
    "lg_quantity",
    "eps_total",
    "verdict",
];

fn real(x: f64) -> String {
    format!("{x:.16e}")
}

/// A row type that can be written as CSV or JSON lines.
pub trait Record: Serialize + DeserializeOwned {
    fn columns(&self) -> Vec<&'static str>;
    fn csv_fields(&self) -> Vec<String>;
}

/// One `(θ, γ, n)` point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub theta: f64,
    pub gamma: f64,
    pub n: usize,
    pub c12: f64,
    pub c23: f64,
    pub c13_prime: f64,
    pub lg_quantity: f64,
    pub eps_total: f64,
    pub verdict: Verdict,
}

impl Record for SweepRecord {
    fn columns(&self) -> Vec<&'static str> {
        SWEEP_COLUMNS.to_vec()
    }

    fn csv_fields(&self) -> Vec<String> {
        vec![
            real(self.theta),
            real(self.gamma),
            self.n.to_string(),
            real(self.c12),
            real(self.c23),
            real(self.c13_prime),
            real(self.lg_quantity),
            real(self.eps_total),
            self.verdict.as_str().to_string(),
        ]
    }
}

/// ε of one battery experiment (or `total`) at one `(θ, γ)` point. The
/// Monte Carlo fields are present only when shots were requested.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdroitnessRow {
    pub theta: f64,
    pub gamma: f64,
    pub experiment: String,
    pub eps_exact: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_mc: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_mc_stderr: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shots: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Record for AdroitnessRow {
    fn columns(&self) -> Vec<&'static str> {
        let mut c = vec!["theta", "gamma", "experiment", "eps_exact"];
        if self.eps_mc.is_some() {
            c.extend(["eps_mc", "eps_mc_stderr", "shots", "seed"]);
        }
        c
    }

    fn csv_fields(&self) -> Vec<String> {
        let mut f = vec![
            real(self.theta),
            real(self.gamma),
            self.experiment.clone(),
            real(self.eps_exact),
        ];
        if let Some(mc) = self.eps_mc {
            f.push(real(mc));
            f.push(real(self.eps_mc_stderr.unwrap_or(f64::NAN)));
            f.push(self.shots.map_or(String::new(), |s| s.to_string()));
            f.push(self.seed.map_or(String::new(), |s| s.to_string()));
        }
        f
    }
}

/// The three-time test under `H = ωσₓ/2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassicRow {
    pub omega: f64,
    pub c12: f64,
    pub c23: f64,
    pub c13_prime: f64,
    pub lg_quantity: f64,
    pub eps_total: f64,
    pub verdict: Verdict,
}

impl Record for ClassicRow {
    fn columns(&self) -> Vec<&'static str> {
        vec![
            "omega",
            "c12",
            "c23",
            "c13_prime",
            "lg_quantity",
            "eps_total",
            "verdict",
        ]
    }

    fn csv_fields(&self) -> Vec<String> {
        vec![
            real(self.omega),
            real(self.c12),
            real(self.c23),
            real(self.c13_prime),
            real(self.lg_quantity),
            real(self.eps_total),
            self.verdict.as_str().to_string(),
        ]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Rows {
    Sweep(Vec<SweepRecord>),
    Adroitness(Vec<AdroitnessRow>),
    Classic(Vec<ClassicRow>),
}

/// Command output: `#` header lines, rows, then `#` summary lines.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Rows,
    pub summary: Vec<String>,
}

impl Table {
    pub fn render(&self, format: OutputFormat) -> String {
        let mut out = String::new();
        for line in &self.header {
            out.push_str(&format!("# {line}\n"));
        }
        match &self.rows {
            Rows::Sweep(r) => write_rows(&mut out, r, format),
            Rows::Adroitness(r) => write_rows(&mut out, r, format),
            Rows::Classic(r) => write_rows(&mut out, r, format),
        }
        for line in &self.summary {
            out.push_str(&format!("# {line}\n"));
        }
        out
    }
}

fn write_rows<R: Record>(out: &mut String, rows: &[R], format: OutputFormat) {
    match format {
        OutputFormat::Csv => {
            let Some(first) = rows.first() else { return };
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(first.columns()).expect("in-memory write");
            for r in rows {
                w.write_record(r.csv_fields()).expect("in-memory write");
            }
            let bytes = w.into_inner().expect("in-memory flush");
            out.push_str(std::str::from_utf8(&bytes).expect("csv output is UTF-8"));
        }
        OutputFormat::Jsonl => {
            for r in rows {
                out.push_str(&serde_json::to_string(r).expect("records serialize"));
                out.push('\n');
            }
        }
    }
}

/// Reads records back from rendered output, skipping `#` lines.
pub fn read_records<R: Record>(text: &str, format: OutputFormat) -> Result<Vec<R>, String> {
    match format {
        OutputFormat::Csv => csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(text.as_bytes())
            .deserialize()
            .map(|r| r.map_err(|e| e.to_string()))
            .collect(),
        OutputFormat::Jsonl => text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
            .map(|(i, l)| serde_json::from_str(l).map_err(|e| format!("line {}: {e}", i + 1)))
            .collect(),
    }
}
