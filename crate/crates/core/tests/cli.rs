use std::fs;
use std::process::{Command, Output};

use gauss_factor::output::parse_csv;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gauss-factor"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

// 0.7071 is the documented cutoff for this example, not an approximation of 1/√2.
#[allow(clippy::approx_constant)]
#[test]
fn scan_upper_trace_all_above_threshold() {
    let out = run(&[
        "scan",
        "--n",
        "1689259081189",
        "--window",
        "1299699:1299731",
        "--order",
        "2",
        "--truncation",
        "19",
    ]);
    let rows = parse_csv(&stdout(&out)).unwrap();
    assert_eq!(rows.len(), 33);
    assert!(rows.iter().all(|r| r.magnitude > 0.7071));
    let factor = rows.iter().find(|r| r.l == "1299709").unwrap();
    assert_eq!(factor.class, "Factor");
    assert_eq!(factor.term_count, 20);
}

#[test]
fn scan_small_window() {
    let text = stdout(&run(&[
        "scan",
        "--n",
        "15",
        "--window",
        "2:3",
        "--order",
        "2",
        "--truncation",
        "4",
    ]));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("l,epsilon,magnitude,class,seed,term_count"));
    assert!(lines.next().unwrap().starts_with("2,"));
    assert_eq!(lines.next(), Some("3,0,1,Factor,,5"));
    assert_eq!(lines.next(), None);
}

#[test]
fn classify_json() {
    let text = stdout(&run(&[
        "classify",
        "--n",
        "15",
        "--l",
        "4",
        "--complete",
        "--format",
        "json",
    ]));
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let row = &v.as_array().unwrap()[0];
    assert_eq!(row["l"], "4");
    assert_eq!(row["class"], "ThresholdNonFactor");
    assert!((row["magnitude"].as_f64().unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    assert!(row["seed"].is_null());
}

#[test]
fn randomized_scan_reports_seed() {
    let text = stdout(&run(&[
        "scan", "--n", "15", "--window", "2:5", "--count", "3", "--m-max", "10", "--seed", "9",
    ]));
    let rows = parse_csv(&text).unwrap();
    assert!(rows.iter().all(|r| r.seed == Some(9) && r.term_count == 3));
}

#[test]
fn reproduce_figure_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["reproduce-figure", "2", "--out-dir", dir.path().to_str().unwrap()]);
    stdout(&out);
    let sums = fs::read_to_string(dir.path().join("figure2_sums.csv")).unwrap();
    let mags: Vec<(String, f64)> = sums
        .lines()
        .skip(1)
        .map(|l| {
            let cells: Vec<&str> = l.split(',').collect();
            (cells[0].to_string(), cells[4].parse().unwrap())
        })
        .collect();
    assert_eq!(mags[0].0, "M=20");
    assert!((mags[0].1 - 1.0).abs() < 0.01);
    assert!((mags[1].1 - 0.3155).abs() < 1e-3);
    assert!((mags[2].1 - 0.0770).abs() < 1e-3);
    assert!(dir.path().join("figure2_terms.csv").exists());
}

#[test]
fn suppression_and_scaling_tables() {
    let text = stdout(&run(&["suppression", "--epsilon", "1e-2,-1e-3", "--order", "2"]));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "epsilon,order,threshold,required_m,inverse_sqrt_epsilon");
    assert!(lines[1].starts_with("0.01,2,"));
    assert!(lines[2].starts_with("-0.001,2,"));

    let text = stdout(&run(&["scaling", "--case", "10403:20:101", "--order", "3"]));
    assert!(text.lines().nth(1).unwrap().starts_with("10403,3,"));
}

#[test]
fn simulate_factor_reads_one() {
    let text = stdout(&run(&[
        "simulate",
        "--n",
        "15",
        "--window",
        "3:3",
        "--truncation",
        "19",
        "--theta",
        "0.001",
    ]));
    let rows = parse_csv(&text).unwrap();
    assert_eq!(rows[0].class, "Factor");
    assert!((rows[0].magnitude - 1.0).abs() < 1e-12);
}

#[test]
fn validation_errors_exit_one() {
    for args in [
        vec!["scan", "--n", "15", "--window", "5:2", "--truncation", "4"],
        vec!["scan", "--n", "abc", "--window", "2:5", "--truncation", "4"],
        vec!["scan", "--n", "15", "--window", "2:5"],
        vec![
            "scan", "--n", "15", "--window", "2:5", "--count", "20", "--m-max", "5", "--seed", "1",
        ],
        vec![
            "scan",
            "--n",
            "15",
            "--window",
            "2:5",
            "--truncation",
            "4",
            "--order",
            "1",
        ],
        vec!["reproduce-figure", "7"],
        vec!["no-such-command"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    let out = run(&["scan", "--n", "15", "--window", "5:2", "--truncation", "4"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("window"));
}

#[test]
fn io_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("missing").join("out.csv");
    let out = run(&[
        "scan",
        "--n",
        "15",
        "--window",
        "2:3",
        "--truncation",
        "4",
        "--output",
        target.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&[
        "reproduce-figure",
        "1",
        "--config",
        dir.path().join("nope.toml").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numeric_errors_exit_three() {
    let out = run(&[
        "simulate",
        "--n",
        "15",
        "--window",
        "2:4",
        "--truncation",
        "19",
        "--theta",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("N=15"), "{stderr}");
}

#[test]
fn output_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("scan.csv");
    let args = [
        "scan",
        "--n",
        "32193216510801043",
        "--window",
        "179424663:179424701",
        "--order",
        "5",
        "--truncation",
        "10",
    ];
    let printed = stdout(&run(&args));
    let mut with_file = args.to_vec();
    with_file.extend(["--output", target.to_str().unwrap()]);
    stdout(&run(&with_file));
    assert_eq!(fs::read_to_string(&target).unwrap(), printed);
    assert_eq!(printed.lines().count(), 40);
}
