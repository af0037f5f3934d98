use std::path::Path;
use std::process::{Command, Output};

use driftgeom::report::Csv;

fn run(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_driftgeom"))
        .args(args)
        .env("DRIFTGEOM_OUT", out)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn report_path(o: &Output) -> String {
    stdout(o).lines().last().unwrap().split_whitespace().nth(1).unwrap().to_string()
}

#[test]
fn raw_bracket_plug_in() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["estimate", "--n", "3", "--alpha", "1", "--K", "0", "--beta", "2", "--lambda", "3", "--R", "1", "--raw-bracket"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "13");
}

#[test]
fn usage_and_parse_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["estimate", "--bogus", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));

    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "n = 3\n# fine\nno equals sign\n").unwrap();
    let o = run(dir.path(), &["--config", cfg.to_str().unwrap(), "estimate"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));

    std::fs::write(&cfg, "unknown = 1\n").unwrap();
    let o = run(dir.path(), &["--config", cfg.to_str().unwrap(), "estimate"]);
    assert_eq!(o.status.code(), Some(1));

    let o = run(dir.path(), &["estimate", "--n", "1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn appendix_reports_discrepancies_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["verify", "appendix", "--grid", "11"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(report_path(&o)).unwrap()).unwrap();
    assert!(!report["measured"]["inconsistencies"].as_array().unwrap().is_empty());
    assert!(stdout(&o).contains("INFO"));
}

#[test]
fn verdict_failure_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["experiment", "gradient-sweep", "--manifold", "euclidean", "--drift", "unit-x", "--origin", "0.5,0.5", "--radii", "0.25", "--boundary", "exp-x", "--intervals", "16"];
    let o = run(dir.path(), &args);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let mut tight = args.to_vec();
    tight.extend(["--cn", "1e-6"]);
    let o = run(dir.path(), &tight);
    assert_eq!(o.status.code(), Some(2), "{}", stdout(&o));
}

#[test]
fn reruns_are_identical_and_grids_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["--threads", "1", "solve", "--h", "0.125"];
    let a = run(dir.path(), &args);
    let first = std::fs::read(report_path(&a)).unwrap();
    let b = run(dir.path(), &args);
    assert_eq!(report_path(&a), report_path(&b));
    assert_eq!(first, std::fs::read(report_path(&b)).unwrap());

    let other = run(dir.path(), &["--threads", "1", "solve", "--h", "0.25"]);
    assert_ne!(report_path(&a), report_path(&other));

    let grid = Path::new(&report_path(&a)).with_file_name("grid.csv");
    let text = std::fs::read_to_string(grid).unwrap();
    let csv = Csv::parse("grid.csv", &text).unwrap();
    assert_eq!(csv.rows.len(), 81);
    assert_eq!(csv.to_bytes().unwrap(), text.as_bytes());
}

#[test]
fn acceptance_twice_single_threaded_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = run(dir.path(), &["--threads", "1", "acceptance"]);
    let first = std::fs::read(report_path(&a)).unwrap();
    let b = run(dir.path(), &["--threads", "1", "acceptance"]);
    let second = std::fs::read(report_path(&b)).unwrap();
    assert_eq!(first, second);
    let out = stdout(&a);
    for id in 1..=11 {
        assert!(out.contains(&format!("criterion {id:>2} ")), "{out}");
    }
    // the one known red verdict keeps the run at exit status 2
    assert_eq!(a.status.code(), Some(2));
    let fails: Vec<&str> = out.lines().filter(|l| l.starts_with("criterion") && l.contains("FAIL")).collect();
    assert_eq!(fails.len(), 1, "{out}");
    assert!(fails[0].starts_with("criterion  7"));
}
