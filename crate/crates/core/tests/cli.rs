use std::process::{Command, Output};

use serde_json::Value;
use zonopolar::certify::{CertificateReport, SweepReport};
use zonopolar::cli::{GenerateDocument, ProfileTable, VerifyDocument};

fn zonopolar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zonopolar"))
        .args(args)
        .env_remove("ZONOPOLAR_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

/// Parse into the typed document and print again: identical text.
fn roundtrips<T: serde::de::DeserializeOwned + serde::Serialize>(o: &Output) {
    let text = stdout(o);
    let doc: T = serde_json::from_str(&text).unwrap();
    assert_eq!(serde_json::to_string_pretty(&doc).unwrap() + "\n", text);
}

#[test]
fn profile_table() {
    let o = zonopolar(&[
        "profile", "--n", "3", "--r", "1", "--points", "5", "--format", "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 5);
    assert!(rows[0].starts_with("0,1,"));
    // phi = pi/2: norm 1/2, support 2, radial 1/2
    let last: Vec<f64> = rows[4].split(',').map(|v| v.parse().unwrap()).collect();
    assert!(
        (last[1] - 0.5).abs() < 1e-15
            && (last[2] - 2.0).abs() < 1e-15
            && (last[3] - 0.5).abs() < 1e-15
    );
}

#[test]
fn profile_svg_has_two_labeled_curves() {
    let o = zonopolar(&["profile", "--format", "svg"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert_eq!(s.matches("<polyline").count(), 2);
    assert!(s.contains("barrel") && s.contains("polar body"));
}

#[test]
fn profile_json_roundtrip() {
    let o = zonopolar(&["profile", "--r", "0.7", "--points", "7", "--format", "json"]);
    roundtrips::<ProfileTable>(&o);
}

#[test]
fn invalid_radius_exits_2() {
    assert_eq!(zonopolar(&["profile", "--r", "-1"]).status.code(), Some(2));
    assert_eq!(zonopolar(&["certify", "--r", "0"]).status.code(), Some(2));
}

#[test]
fn generate_r1_single_atom() {
    let o = zonopolar(&["generate", "--r", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let atoms = v["closed"]["atoms"].as_array().unwrap();
    assert_eq!(atoms.len(), 1);
    assert!((atoms[0]["x"].as_f64().unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    assert!((atoms[0]["weight"].as_f64().unwrap() - 0.07957747).abs() < 1e-8);
    for p in v["closed"]["density"].as_array().unwrap() {
        assert_eq!(p["kind"], "zero");
    }
    assert_eq!(v["isMeasure"], true);
    assert!(v["maxDensityGap"].as_f64().unwrap() < 1e-12);
    roundtrips::<GenerateDocument>(&o);
}

#[test]
fn generate_signs() {
    let good = json(&zonopolar(&["generate", "--r", "0.5"]));
    assert_eq!(good["isMeasure"], true);
    assert_eq!(good["closed"]["atoms"].as_array().unwrap().len(), 1);
    let bad = zonopolar(&["generate", "--r", "2", "--format", "csv"]);
    let dens: Vec<f64> = stdout(&bad)
        .lines()
        .filter(|l| l.starts_with("density,"))
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert!(dens.iter().any(|&d| d < 0.0));
    assert_eq!(
        json(&zonopolar(&["generate", "--r", "2"]))["isMeasure"],
        false
    );
}

#[test]
fn generate_svg_marks_atoms() {
    let s = stdout(&zonopolar(&["generate", "--r", "0.8", "--format", "svg"]));
    assert!(s.contains("marker-end") && s.contains("atom"));
}

#[test]
fn generate_polar_b3() {
    let o = zonopolar(&["generate", "--n", "3", "--r", "1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["isMeasure"], true);
    assert!(v.get("pipeline").is_none());
    assert_eq!(
        zonopolar(&["generate", "--n", "3", "--r", "0.5"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn generate_from_profile_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ball.json");
    std::fs::write(&path, r#"{"kind":"trig","a":1.0,"b":0.0,"c":0.0}"#).unwrap();
    let o = zonopolar(&[
        "generate",
        "--profile",
        path.to_str().unwrap(),
        "--format",
        "csv",
        "--points",
        "3",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let text = stdout(&o);
    let first: f64 = text
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .nth(2)
        .unwrap()
        .parse()
        .unwrap();
    assert!((first - 3.0 / (8.0 * std::f64::consts::PI)).abs() < 1e-12);
    std::fs::write(&path, "not json").unwrap();
    assert_eq!(
        zonopolar(&["generate", "--profile", path.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn certify_verdicts() {
    let good = zonopolar(&["certify", "--r", "0.8"]);
    assert_eq!(good.status.code(), Some(0));
    assert_eq!(json(&good)["verdict"], "positive");
    assert_eq!(json(&good)["schema"], "zonopolar.certify/1");
    roundtrips::<CertificateReport>(&good);
    assert_eq!(
        json(&zonopolar(&["certify", "--r", "1.3"]))["verdict"],
        "negative"
    );
    let ball = json(&zonopolar(&["certify", "--norm", "euclidean"]));
    assert_eq!(ball["verdict"], "positive");
    let mid: Vec<f64> = ball["density"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|d| (0.2..0.8).contains(&d[0].as_f64().unwrap()))
        .map(|d| d[1].as_f64().unwrap())
        .collect();
    let mean = mid.iter().sum::<f64>() / mid.len() as f64;
    assert!((mean * 8.0 * std::f64::consts::PI / 3.0 - 1.0).abs() < 0.01);
}

#[test]
fn verify_suites() {
    let o = zonopolar(&["verify", "--suite", "remark1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert!(v["checks"][0]["measured"].as_f64().unwrap() <= 1e-10);
    roundtrips::<VerifyDocument>(&o);
    let o = zonopolar(&["verify", "--suite", "radon-roundtrip"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("A2 PASS"));
    let o = zonopolar(&["verify"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("9 passed, 0 failed"));
}

#[test]
fn sweeps() {
    let o = zonopolar(&["sweep", "--mode", "closed-form", "--tol", "1e-6"]);
    let v = json(&o);
    assert_eq!(v["schema"], "zonopolar.sweep/1");
    assert!((v["r_star"].as_f64().unwrap() - 1.0).abs() <= 1e-6);
    roundtrips::<SweepReport>(&o);
    let v = json(&zonopolar(&["sweep", "--mode", "nnls", "--tol", "0.02"]));
    let r = v["r_star"].as_f64().unwrap();
    assert!((0.98..=1.02).contains(&r), "{r}");
    assert!(v["history"]
        .as_array()
        .unwrap()
        .iter()
        .all(|h| h["residual"].is_number()));
    assert_eq!(
        zonopolar(&["sweep", "--lo", "1.1", "--hi", "1.5"])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_zonopolar"))
        .args(["profile", "--points", "3"])
        .env("ZONOPOLAR_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(dir.path().join("profile.csv")).unwrap();
    assert_eq!(text.lines().count(), 4);
    let explicit = dir.path().join("nested/out.json");
    let o = zonopolar(&[
        "generate",
        "--r",
        "0.5",
        "--output",
        explicit.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(explicit.exists());
}

#[test]
fn deterministic_given_seed() {
    let a = zonopolar(&[
        "--seed",
        "11",
        "verify",
        "--suite",
        "structure",
        "--format",
        "json",
    ]);
    let b = zonopolar(&[
        "--seed",
        "11",
        "verify",
        "--suite",
        "structure",
        "--format",
        "json",
    ]);
    assert_eq!(a.stdout, b.stdout);
    let c = zonopolar(&["certify", "--r", "0.9"]);
    let d = zonopolar(&["certify", "--r", "0.9"]);
    assert_eq!(c.stdout, d.stdout);
}
