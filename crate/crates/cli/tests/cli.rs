use std::path::Path;
use std::process::{Command, Output};

const HEADER: &str = "protocol,state,p,d_inject,r_inject,d,r_hold,shots,discards,errors,discard_rate,error_rate,err_lo,err_hi,expected_cost_qubit_rounds,seed";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hookinj")).args(args).env_remove("RUST_BACKTRACE").output().unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_prints_a_parseable_circuit() {
    let text = stdout(&["gen", "--dinject", "3", "--d", "5", "--rhold", "1"]);
    assert!(text.contains("DETECTOR("));
    assert!(text.contains("CX "));
    let noisy = stdout(&["gen", "--dinject", "3", "--d", "5", "--rhold", "1", "--p", "0.001"]);
    assert!(noisy.contains("DEPOLARIZE2(0.001)"));
    assert!(!noisy.contains("CX "));
}

#[test]
fn sample_writes_the_csv_schema() {
    let text = stdout(&["sample", "--dinject", "3", "--d", "5", "--rhold", "2", "--max-shots", "2000", "--seed", "7"]);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(HEADER));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row.len(), 16);
    assert_eq!(&row[..7], &["hook", "i", "0.001", "3", "2", "5", "2"]);
    assert_eq!(row[7], "2000");
    assert_eq!(row[15], "7");
}

#[test]
fn sample_json_mirrors_the_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("one.json");
    stdout(&["sample", "--protocol", "li", "--state", "plus", "--dinject", "3", "--d", "5", "--rhold", "2", "--max-shots", "1000", "--out", path_str(&path)]);
    let value: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let row = &value[0];
    for column in HEADER.split(',') {
        assert!(row.get(column).is_some(), "missing {column}");
    }
    assert_eq!(row["protocol"], "li");
    assert_eq!(row["state"], "plus");
}

#[test]
fn sweep_then_frontier() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    stdout(&[
        "sweep", "--dinject", "2..3", "--rinject", "1..2", "--d", "3", "--rhold", "1", "--p", "0.003", "--max-shots", "4000", "--out",
        path_str(&csv),
    ]);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next(), Some(HEADER));
    assert_eq!(text.lines().count(), 5);

    let front = stdout(&["frontier", "--in", path_str(&csv)]);
    let rows = front.lines().count() - 1;
    assert!((1..=4).contains(&rows), "{front}");
    let none = stdout(&["frontier", "--in", path_str(&csv), "--min-errors", "1000000"]);
    assert_eq!(none.lines().count(), 1);
}

#[test]
fn enumerate_reports_the_census() {
    let text = stdout(&["enumerate", "--dinject", "3", "--d", "5"]);
    assert!(text.contains("distance-1: 4"), "{text}");
    assert!(text.contains("DEPOLARIZE1"));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("census.json");
    stdout(&["enumerate", "--dinject", "3", "--d", "5", "--out", path_str(&path)]);
    let value: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(value["distance1"].as_array().unwrap().len(), 4);
}

#[test]
fn detfrac_rises_with_noise() {
    let text = stdout(&["detfrac", "--d", "3", "--p", "0.001,0.004", "--shots", "20000"]);
    let fractions: Vec<f64> = text.lines().skip(1).map(|l| l.split(',').nth(4).unwrap().parse().unwrap()).collect();
    assert_eq!(fractions.len(), 2);
    assert!(fractions[0] < fractions[1]);
}

#[test]
fn deadline_at_one_half_life_is_even_odds() {
    let text = stdout(&["deadline", "--dinject", "5", "--rinject", "2", "--discard", "0.5", "--budget", "137.2"]);
    let values: Vec<f64> = text.lines().nth(1).unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(values[0], 196.0);
    assert!((values[4] - 0.5).abs() < 1e-12);
}

#[test]
fn bad_input_fails_cleanly() {
    for args in [
        vec!["sample", "--protocol", "magic"],
        vec!["sample", "--state", "zero"],
        vec!["sample", "--dinject", "9", "--d", "7"],
        vec!["deadline", "--discard", "1.5", "--budget", "10"],
        vec!["frontier", "--in", "/nonexistent/file.csv"],
    ] {
        let out = run(&args);
        assert!(!out.status.success(), "{args:?} should fail");
        assert!(!out.stderr.is_empty());
    }
}
