use std::path::Path;
use std::process::{Command, Output};

use sha2::{Digest, Sha256};

const INTERIOR: [&str; 8] = ["0.3", "1.0", "0.7", "0.8", "0.6", "0.9", "0.5", "0.3"];

fn bures(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bures"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn digest(path: &Path) -> Vec<u8> {
    Sha256::digest(std::fs::read(path).unwrap()).to_vec()
}

#[test]
fn point_reports_finite_geometry() {
    let mut args = vec!["point"];
    args.extend(INTERIOR);
    let out = bures(&args);
    assert!(out.status.success(), "{}", stderr(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let scalar = doc["scalar_curvature"].as_f64().unwrap();
    let closed = doc["scalar_curvature_closed_form"].as_f64().unwrap();
    assert!(((scalar - closed) / closed).abs() < 1e-5);
    assert!(doc["sqrt_det"].as_f64().unwrap() > 0.0);
    assert!(doc["codazzi_residual"].as_f64().unwrap().is_finite());
    for field in ["bures", "self_dual", "anti_self_dual"] {
        for v in doc["invariants"][field].as_object().unwrap().values() {
            assert!(v.as_f64().unwrap().is_finite());
        }
    }
    assert_eq!(doc["g"].as_array().unwrap().len(), 8);
    assert_eq!(doc["singular_values"].as_array().unwrap().len(), 28);
}

#[test]
fn degenerate_corner_is_a_domain_error() {
    let out = bures(&[
        "point",
        "0.3",
        "1.0",
        "0.7",
        "0.8",
        "0.6",
        "0.9",
        "0.9553166181245092",
        "0.7853981633974483",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("degenerate spectrum"));
}

#[test]
fn out_of_domain_names_the_coordinate() {
    let out = bures(&[
        "point", "0.3", "1.0", "0.7", "0.8", "0.6", "2.0", "0.5", "0.3",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("theta"), "{}", stderr(&out));
}

#[test]
fn usage_errors_exit_two_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("t.csv");
    let out = bures(&[
        "table",
        "--method",
        "lattice",
        "--nodes",
        "2",
        "--out",
        file.to_str().unwrap(),
        "--bogus",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!file.exists());
    assert_eq!(bures(&["point", "1", "2"]).status.code(), Some(2));
    assert_eq!(bures(&["table", "--method", "mc"]).status.code(), Some(2));
    assert_eq!(
        bures(&["ab-scan", "--grid", "1", "--out", file.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn help_documents_every_flag() {
    let out = bures(&["table", "--help"]);
    let text = stdout(&out);
    for flag in [
        "--method",
        "--samples",
        "--nodes",
        "--seed",
        "--out",
        "--format",
    ] {
        assert!(text.contains(flag), "{flag}");
    }
}

#[test]
fn lattice_table_has_four_rows_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let out = bures(&[
            "table",
            "--method",
            "lattice",
            "--nodes",
            "2",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    assert_eq!(digest(&a), digest(&b));
    let text = std::fs::read_to_string(&a).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[0].starts_with("field,ff2,f2f2,trf2,f3f3_23,f4f4_12,stderr_ff2"));
    let names: Vec<&str> = lines[1..]
        .iter()
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(names, ["bures", "asd", "sd", "diff"]);
}

#[test]
fn monte_carlo_table_depends_only_on_flags() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, seed: &str| {
        let path = dir.path().join(name);
        let out = bures(&[
            "table",
            "--method",
            "mc",
            "--samples",
            "64",
            "--seed",
            seed,
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
        digest(&path)
    };
    assert_eq!(run("a.csv", "5"), run("b.csv", "5"));
    assert_ne!(run("a.csv", "5"), run("c.csv", "6"));
}

#[test]
fn json_table_parses() {
    let out = bures(&[
        "table", "--method", "lattice", "--nodes", "2", "--format", "json",
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["estimates"].as_array().unwrap().len(), 4);
}

#[test]
fn io_errors_name_the_path() {
    let out = bures(&["ab-scan", "--grid", "3", "--out", "/nonexistent-dir/ab.csv"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("/nonexistent-dir/ab.csv"));
}

#[test]
fn ab_scan_covers_the_grid() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ab.csv");
    let out = bures(&["ab-scan", "--grid", "5", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 25);
    let corner = rows.last().unwrap();
    assert!((corner[0] - 0.955_316_618_124_509_2).abs() < 1e-15);
    assert!((corner[1] - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
    // the fully mixed spectrum makes both subexpressions vanish
    assert!(corner[2].abs() < 1e-14 && corner[3].abs() < 1e-14);
}

#[test]
fn action_reports_three_positive_values() {
    let out = bures(&["action", "--samples", "50", "--seed", "2"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    for name in ["total", "self_dual", "anti_self_dual"] {
        let line = text.lines().find(|l| l.starts_with(name)).unwrap();
        let value: f64 = line.split_whitespace().nth(1).unwrap().parse().unwrap();
        assert!(value > 0.0);
    }
}

#[test]
fn codazzi_is_violated() {
    let out = bures(&["codazzi", "--samples", "2", "--seed", "4"]);
    assert!(out.status.success());
    let last = stdout(&out).lines().last().unwrap().to_string();
    let min: f64 = last.rsplit(' ').next().unwrap().parse().unwrap();
    assert!(min > 1e-3, "{last}");
}

#[test]
fn validate_catches_a_doubled_calibration() {
    let volume_line = |calibration: &str| {
        let out = bures(&[
            "validate",
            "--calibration",
            calibration,
            "--mc-samples",
            "64",
            "--lattice-nodes",
            "2",
        ]);
        let text = stdout(&out);
        assert!(text.is_ascii());
        let line = text
            .lines()
            .find(|l| l.contains("volume element"))
            .unwrap()
            .to_string();
        (out.status.code(), line)
    };
    let (_, standard) = volume_line("0.5");
    assert!(standard.starts_with("PASS"), "{standard}");
    let (code, doubled) = volume_line("1.0");
    assert!(doubled.starts_with("FAIL"), "{doubled}");
    assert_eq!(code, Some(1));
}
