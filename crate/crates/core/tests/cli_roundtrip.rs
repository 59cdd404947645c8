use std::process::Command as Process;

use adroit_lg::cli::{
    read_records, run, AdroitnessRow, Command, OutputFormat, Rows, SweepConfig, SweepRecord,
};

fn lgsim(args: &[&str]) -> (i32, String, String) {
    let out = Process::new(env!("CARGO_BIN_EXE_lgsim"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

const GRID: [&str; 6] = [
    "--theta",
    "0.55pi:pi:13",
    "--gamma",
    "0:0.01:3",
    "--n",
    "1,2",
];

#[test]
fn emitted_records_read_back_bit_for_bit() {
    let mut cfg = SweepConfig::defaults(Command::Sweep);
    for pair in GRID.chunks(2) {
        cfg.set(pair[0].trim_start_matches("--"), pair[1]).unwrap();
    }
    let Rows::Sweep(expected) = run(Command::Sweep, &cfg).unwrap().rows else {
        panic!("sweep rows")
    };
    for (format, name) in [(OutputFormat::Csv, "csv"), (OutputFormat::Jsonl, "jsonl")] {
        let mut args = GRID.to_vec();
        args.extend(["--format", name]);
        let (code, stdout, stderr) = lgsim(&[&["sweep"], &args[..]].concat());
        assert_eq!(code, 0, "{stderr}");
        let back: Vec<SweepRecord> = read_records(&stdout, format).unwrap();
        assert_eq!(back.len(), 13 * 3 * 2);
        for (a, b) in back.iter().zip(&expected) {
            assert_eq!(a.lg_quantity.to_bits(), b.lg_quantity.to_bits());
            assert_eq!(a.eps_total.to_bits(), b.eps_total.to_bits());
            assert_eq!(a, b);
        }
    }
}

#[test]
fn output_is_deterministic_across_worker_counts() {
    let mut one = GRID.to_vec();
    one.extend(["--workers", "1"]);
    let mut four = GRID.to_vec();
    four.extend(["--workers", "4"]);
    let a = lgsim(&[&["sweep"], &one[..]].concat()).1;
    let b = lgsim(&[&["sweep"], &four[..]].concat()).1;
    let strip = |s: &str| {
        s.lines()
            .filter(|l| !l.starts_with("# workers"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(&a), strip(&b));
    assert_eq!(a, lgsim(&[&["sweep"], &one[..]].concat()).1);
}

#[test]
fn header_echoes_config_and_columns_are_exact() {
    let (code, stdout, _) = lgsim(&["fig2", "--n", "1", "--theta", "0.7pi:pi:4"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines[0], "# command = fig2");
    assert!(lines.contains(&"# n = 1"));
    assert!(lines.contains(&"theta,gamma,n,c12,c23,c13_prime,lg_quantity,eps_total,verdict"));
    assert!(lines.last().unwrap().starts_with("# onset n=1 value="));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.cfg");
    std::fs::write(&path, "# grid\ntheta = 0.75pi\nomega = 2\nn = 3\n").unwrap();
    let (code, stdout, stderr) = lgsim(&["sweep", "--config", path.to_str().unwrap(), "--n", "2"]);
    assert_eq!(code, 0, "{stderr}");
    assert!(stdout.contains("# omega = 2\n"));
    assert!(stdout.contains("# n = 2\n"));
    let rows: Vec<SweepRecord> = read_records(&stdout, OutputFormat::Csv).unwrap();
    assert!(rows.iter().all(|r| r.n == 2));
}

#[test]
fn validation_failures_are_single_lines() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.cfg");
    std::fs::write(&path, "omega = 1\n\ngamma = 0.1:0.0:3\n").unwrap();
    let cases: [(&[&str], &str); 5] = [
        (
            &["sweep", "--config", path.to_str().unwrap()],
            "error: field=gamma line=3 ",
        ),
        (&["sweep", "--omega", "0"], "error: field=omega "),
        (&["fig3", "--theta", "0:1:0"], "error: field=theta "),
        (
            &["sweep", "--criterion", "loose"],
            "error: field=criterion ",
        ),
        (&["sweep", "--nope"], "error: field=args "),
    ];
    for (args, prefix) in cases {
        let (code, stdout, stderr) = lgsim(args);
        assert_ne!(code, 0, "{args:?}");
        assert!(stdout.is_empty());
        assert_eq!(stderr.lines().count(), 1, "{stderr}");
        assert!(stderr.starts_with(prefix), "{args:?}: {stderr}");
    }
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("classic.csv");
    let (code, stdout, _) = lgsim(&["classic", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains(",violates_lenient\n"));
}

#[test]
fn adroitness_monte_carlo_columns_follow_shots() {
    let (_, plain, _) = lgsim(&["adroitness", "--gamma", "0.004"]);
    assert!(!plain.contains("eps_mc"));
    let rows: Vec<AdroitnessRow> = read_records(&plain, OutputFormat::Csv).unwrap();
    assert_eq!(rows.len(), 5);
    assert!(rows[..4].iter().all(|r| r.eps_exact > 0.0));
    let (code, mc, _) = lgsim(&[
        "adroitness",
        "--gamma",
        "0.004",
        "--shots",
        "5000",
        "--seed",
        "11",
    ]);
    assert_eq!(code, 0);
    let rows: Vec<AdroitnessRow> = read_records(&mc, OutputFormat::Csv).unwrap();
    assert!(rows
        .iter()
        .all(|r| r.eps_mc.is_some() && r.shots == Some(5000)));
    assert_eq!(
        mc,
        lgsim(&[
            "adroitness",
            "--gamma",
            "0.004",
            "--shots",
            "5000",
            "--seed",
            "11"
        ])
        .1
    );
}
