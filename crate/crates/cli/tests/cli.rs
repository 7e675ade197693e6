use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn direx(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_direx"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn direx")
}

fn error_code(out: &Output) -> String {
    let v: Value = serde_json::from_slice(&out.stderr).expect("stderr is JSON");
    v["error"]["code"].as_str().unwrap().to_string()
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

const DIAGONAL: &str = "x,y\n0,0\n1,1\n2,2\n3,3\n";

#[test]
fn detect_writes_labels_and_summary() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "in.csv", DIAGONAL);
    let out = direx(
        d.path(),
        &[
            "detect", "--input", "in.csv", "--alpha", "0.5", "--output", "out.csv",
        ],
    );
    assert!(out.status.success());
    let summary: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["rows"], 4);
    assert_eq!(
        summary["counts"]["upper"].as_u64().unwrap()
            + summary["counts"]["quantile"].as_u64().unwrap()
            + summary["counts"]["lower"].as_u64().unwrap(),
        4
    );

    let text = std::fs::read_to_string(d.path().join("out.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,y,P,label");
    // on a chain the top point sees only itself in its upper orthant
    assert_eq!(lines[4], "3,3,0.25,upper");
    assert_eq!(lines[1], "0,0,1,lower");
}

#[test]
fn detect_reads_config_file() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "in.csv", DIAGONAL);
    write(
        d.path(),
        "run.json",
        r#"{"schema_version":1,"alpha":0.5,"direction":"+-","input":"in.csv"}"#,
    );
    let out = direx(d.path(), &["detect", "--config", "run.json"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let summary: Value = serde_json::from_slice(&out.stdout).unwrap();
    let u: Vec<f64> = serde_json::from_value(summary["direction"].clone()).unwrap();
    assert!(u[0] > 0.0 && u[1] < 0.0);
}

#[test]
fn errors_are_json_with_codes() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "in.csv", DIAGONAL);
    write(d.path(), "nan.csv", "x,y\n1,2\n3,nan\n");
    write(d.path(), "v2.json", r#"{"schema_version":2,"alpha":0.1}"#);

    let cases: [(&[&str], &str); 6] = [
        (
            &["detect", "--input", "missing.csv", "--alpha", "0.1"],
            "io",
        ),
        (
            &["detect", "--input", "nan.csv", "--alpha", "0.1"],
            "non_finite_value",
        ),
        (
            &[
                "detect",
                "--input",
                "in.csv",
                "--alpha",
                "0.1",
                "--direction",
                "1,0,0",
            ],
            "direction_invalid",
        ),
        (
            &[
                "detect",
                "--input",
                "in.csv",
                "--alpha",
                "0.1",
                "--direction",
                "north",
            ],
            "direction_invalid",
        ),
        (
            &["detect", "--config", "v2.json", "--input", "in.csv"],
            "schema_version",
        ),
        (
            &[
                "levelsets",
                "--family",
                "frank",
                "--param",
                "2",
                "--alpha",
                "0.1",
                "--grid",
                "10",
            ],
            "model_invalid",
        ),
    ];
    for (args, code) in cases {
        let out = direx(d.path(), args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert_eq!(error_code(&out), code, "{args:?}");
    }

    let out = direx(d.path(), &["detect", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_code(&out), "usage");
}

#[test]
fn simulate_then_pca() {
    let d = tempfile::tempdir().unwrap();
    let out = direx(
        d.path(),
        &[
            "simulate", "--rows", "300", "--seed", "3", "--output", "s.csv",
        ],
    );
    assert!(out.status.success());
    let text = std::fs::read_to_string(d.path().join("s.csv")).unwrap();
    assert!(text.starts_with("Q,V,L\n"));
    assert_eq!(text.lines().count(), 301);

    let out = direx(
        d.path(),
        &["pca", "--input", "s.csv", "--scaling", "correlation"],
    );
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let u: Vec<f64> = serde_json::from_value(v["direction"].clone()).unwrap();
    assert_eq!(u.len(), 3);
    assert!((u.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12);
}

#[test]
fn flood_report_and_events() {
    let d = tempfile::tempdir().unwrap();
    let out = direx(
        d.path(),
        &[
            "flood",
            "--replicas",
            "2",
            "--years",
            "200",
            "--seed",
            "1",
            "--output",
            "ev.csv",
            "--report",
            "r.json",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let ev = std::fs::read_to_string(d.path().join("ev.csv")).unwrap();
    assert_eq!(
        ev.lines().next().unwrap(),
        "replica,Q,V,L,P_e,P_pca,label_e,label_pca,max_level,class"
    );
    assert_eq!(ev.lines().count(), 1 + 2 * 200);
    let r: Value =
        serde_json::from_str(&std::fs::read_to_string(d.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(r["replicas"], 2);
    assert_eq!(r["per_replica"].as_array().unwrap().len(), 2);
    assert!(r["dam"]["spillway_width"].is_number());
}
