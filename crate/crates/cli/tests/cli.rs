use std::fs;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_monogamy"))
        .args(args)
        .output()
        .expect("spawn monogamy")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn csv_row(text: &str, line: usize) -> Vec<f64> {
    text.lines()
        .nth(line)
        .unwrap()
        .split(',')
        .map(|c| c.parse().unwrap())
        .collect()
}

#[test]
fn compute_listings() {
    let fs_out = stdout(&["compute", "--state", "fs"]);
    assert!(
        fs_out.lines().any(|l| l == "C(A|CD) = 0.9428090416 [exact]"),
        "{fs_out}"
    );
    let w4 = stdout(&["compute", "--state", "w4"]);
    assert!(w4.lines().any(|l| l == "C(AB1) = 0.5 [exact]"), "{w4}");
    let ghz = stdout(&["compute", "--state", "ghz3"]);
    assert!(ghz.lines().any(|l| l == "C(AB) = 0 [exact]"), "{ghz}");
}

#[test]
fn verify_w4_grid_is_clean() {
    let out = run(&["verify", "--state", "w4", "--alpha", "2:4:0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<serde_json::Value> = serde_json::from_str(&text).unwrap();
    assert_eq!(rows.len(), 5);
    for row in &rows {
        assert_eq!(row["state"], "w4");
        for bound in row["bounds"].as_array().unwrap() {
            assert_eq!(bound["satisfied"], true, "{bound}");
        }
    }
}

#[test]
fn verify_random_ensemble_exits_zero() {
    let out = run(&[
        "verify",
        "--random",
        "pure:4qubits",
        "--count",
        "200",
        "--seed",
        "7",
        "--trials",
        "100",
        "--alpha",
        "2:3:0.5",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn verify_fs_theorem6_saturates() {
    let text = stdout(&["verify", "--state", "fs", "--alpha", "2", "--format", "csv"]);
    let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    assert_eq!(
        header,
        [
            "state",
            "measure",
            "alpha",
            "id",
            "lhs",
            "rhs",
            "gap",
            "satisfied",
            "premise_ok",
            "status",
            "saturated"
        ]
    );
    let row: Vec<&str> = text
        .lines()
        .map(|l| l.split(',').collect::<Vec<_>>())
        .find(|r| r[3] == "theorem6")
        .expect("theorem6 row");
    assert_eq!(row[7], "true");
    assert_eq!(row[9], "exact");
    assert_eq!(row[10], "true");
    assert!((row[4].parse::<f64>().unwrap() - 8.0 / 9.0).abs() < 1e-9);
}

#[test]
fn figures_match_closed_forms_and_repeat() {
    let f1 = stdout(&["figure", "1", "--alpha", "2"]);
    assert_eq!(f1.lines().next(), Some("alpha,y1,y2,y3"));
    for y in &csv_row(&f1, 1)[1..] {
        assert!((y - 0.75).abs() < 1e-9);
    }
    let f2 = csv_row(&stdout(&["figure", "2", "--alpha", "2"]), 1);
    for (got, want) in f2[1..].iter().zip([8.0 / 9.0, 4.0 / 9.0, 16.0 / 27.0]) {
        assert!((got - want).abs() < 1e-11);
    }
    let f3 = csv_row(&stdout(&["figure", "3", "--alpha", "4"]), 1);
    for (got, want) in f3[1..].iter().zip([0.5625, 0.375, 0.3125]) {
        assert!((got - want).abs() < 1e-11);
    }
    let full = stdout(&["figure", "1"]);
    assert_eq!(full.lines().count(), 62);
    assert_eq!(full, stdout(&["figure", "1"]));
}

#[test]
fn figure_writes_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig2.csv");
    let printed = stdout(&["figure", "2", "--alpha", "2:3:0.5"]);
    stdout(&[
        "figure",
        "2",
        "--alpha",
        "2:3:0.5",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(fs::read_to_string(&path).unwrap(), printed);
}

#[test]
fn oracle_agrees_with_reference() {
    let value = |text: &str, prefix: &str| -> f64 {
        let line = text.lines().find(|l| l.starts_with(prefix)).unwrap();
        line[prefix.len()..]
            .split_whitespace()
            .next()
            .unwrap()
            .parse()
            .unwrap()
    };
    let pair = stdout(&["oracle", "--state", "w4", "--keep", "0,1"]);
    assert!((value(&pair, "oracle min = ") - 0.5).abs() < 5e-3, "{pair}");
    let triple = stdout(&["oracle", "--state", "w4", "--keep", "0,1,2"]);
    assert!(
        (value(&triple, "oracle min = ") - 0.5f64.sqrt()).abs() < 5e-3,
        "{triple}"
    );
    let bell = stdout(&["oracle", "--state", "bell"]);
    assert!((value(&bell, "oracle min = ") - 1.0).abs() < 1e-9);
    assert!((value(&bell, "oracle max = ") - 1.0).abs() < 1e-9);
}

#[test]
fn bad_inputs_exit_two() {
    for args in [
        &["compute", "--state", "nope"][..],
        &["figure", "9"],
        &["verify", "--state", "w4", "--alpha", "1.5"],
        &["verify", "--state", "w4", "--alpha", "3:2:0.1"],
        &["oracle", "--state", "w4", "--keep", "0"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(
            String::from_utf8_lossy(&out.stderr).starts_with("error: "),
            "{args:?}"
        );
    }
}

#[test]
fn state_file_input() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w3.txt");
    let h = 1.0 / 3f64.sqrt();
    fs::write(
        &path,
        format!("# W state\ndims: 2 2 2\n0 0\n{h} 0\n{h} 0\n0 0\n{h} 0\n0 0\n0 0\n0 0\n"),
    )
    .unwrap();
    let text = stdout(&["compute", "--state", path.to_str().unwrap()]);
    assert!(
        text.lines().any(|l| l == "C(AB) = 0.6666666667 [exact]"),
        "{text}"
    );
    let out = run(&["verify", "--state", path.to_str().unwrap(), "--alpha", "2:3:0.5"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn whole_catalog_verifies() {
    for label in [
        "w3", "w4", "w5", "w6", "fs", "ghz2", "ghz3", "ghz4", "prod2", "prod3", "prod4", "prod6",
    ] {
        let out = run(&["verify", "--state", label, "--alpha", "2:4:1", "--trials", "200"]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{label}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}
