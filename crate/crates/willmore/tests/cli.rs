//! End-to-end tests of the command-line binary: exit codes, output shapes,
//! and determinism, driven through the real executable.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use willmore::fields::{ScalarField, TorusGrid};
use willmore::immersions::ImmersedTorus;
use willmore::moduli::ModuliPoint;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_willmore"))
}

/// Scratch path unique to this test process and label.
fn temp_path(label: &str) -> PathBuf {
    std::env::temp_dir().join(format!("willmore-cli-{}-{label}", std::process::id()))
}

fn write_field(label: &str, field: &ScalarField) -> PathBuf {
    let path = temp_path(label);
    std::fs::write(&path, serde_json::to_string(field).unwrap()).unwrap();
    path
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON document")
}

fn flat_field(x: f64, y: f64, n: usize) -> ScalarField {
    let m = ModuliPoint::new(x, y, 1.0).unwrap();
    ScalarField::zeros(TorusGrid::new(m, n, n).unwrap())
}

#[test]
fn certify_flat_li_yau_class_exits_zero() {
    let path = write_field("flat-liyau", &flat_field(0.5, 0.9, 24));
    let out = bin().arg("certify").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let v = stdout_json(&out);
    assert_eq!(v["certificate"]["status"], "certified");
    assert_eq!(v["certificate"]["rule"], "li_yau_region");
    assert_eq!(v["report"]["y"].as_f64().unwrap(), 0.9);
}

#[test]
fn certify_small_curvature_class_y2_exits_zero() {
    let metric = willmore::generators::random_trig_metric(
        ModuliPoint::new(0.0, 2.0, 1.0).unwrap(),
        48,
        48,
        2,
        0.005,
        11,
    );
    let path = write_field("y2-small", metric.u());
    let out = bin().arg("certify").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let v = stdout_json(&out);
    assert_eq!(v["certificate"]["status"], "certified");
    // The metric satisfies the theorem-I hypothesis K_p < tau(2, 2), and the
    // certificate bound is at least 2 pi^2.
    assert!(v["report"]["Kp"].as_f64().unwrap() < 0.1987553);
    let lb = v["certificate"]["lower_bound"].as_f64().unwrap();
    assert!(lb >= 2.0 * std::f64::consts::PI.powi(2) * (1.0 - 1e-12));
}

#[test]
fn certify_steep_revolution_metric_exits_two_with_best_bound() {
    // c = 2 revolution torus: V(g) and the oscillation are too large for
    // every rule, so this is the canonical honest "uncertified".
    let torus = ImmersedTorus::revolution(1.0, 0.5).unwrap();
    let metric = torus.induced_metric().unwrap();
    let path = write_field("rev-c2", metric.u());
    let out = bin().arg("certify").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2), "{out:?}");
    let v = stdout_json(&out);
    assert_eq!(v["certificate"]["status"], "uncertified");
    assert_eq!(v["certificate"]["rule"], "none");
    let lb = v["certificate"]["lower_bound"].as_f64().unwrap();
    assert!(lb > 0.0 && lb < 2.0 * std::f64::consts::PI.powi(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("lower bound"), "stderr: {err}");
}

#[test]
fn certify_bad_inputs_exit_one() {
    let out = bin().arg("certify").arg("/nonexistent/field.json").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));

    // Out-of-domain lattice: the file parses as JSON but not as a field.
    let path = temp_path("bad-lattice");
    std::fs::write(
        &path,
        r#"{"lattice": {"x": 0.0, "y": 0.9, "scale": 1.0}, "grid": [2, 2], "u": [0, 0, 0, 0]}"#,
    )
    .unwrap();
    let out = bin().arg("certify").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not a valid field file"));
}

#[test]
fn bound_lists_rules_best_first() {
    let path = write_field("bound-flat", &flat_field(0.0, 1.5, 24));
    let out = bin().arg("bound").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let v = stdout_json(&out);
    let bounds = v["bounds"].as_array().unwrap();
    assert!(bounds.len() >= 3);
    let values: Vec<f64> = bounds.iter().map(|b| b["value"].as_f64().unwrap()).collect();
    assert!(values.windows(2).all(|w| w[0] >= w[1]), "unsorted: {values:?}");
    assert_eq!(v["best"]["value"], bounds[0]["value"]);
    // Flat metric on y = 1.5: the direct oscillation bound is exact,
    // pi^2 (y + 1/y).
    let direct = bounds
        .iter()
        .find(|b| b["rule"] == "direct_oscillation")
        .unwrap()["value"]
        .as_f64()
        .unwrap();
    let exact = std::f64::consts::PI.powi(2) * (1.5 + 1.0 / 1.5);
    assert!((direct - exact).abs() < 1e-9 * exact);
}

#[test]
fn tau_matches_paper_value_and_handles_low_y() {
    let out = bin().args(["tau", "--y", "2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let t: f64 = String::from_utf8_lossy(&out.stdout).trim().parse().unwrap();
    assert!((t - 0.1987553).abs() <= 1e-4);

    let out = bin().args(["tau", "--y", "0.9"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        String::from_utf8_lossy(&out.stdout).trim(),
        "unconstrained (region rule applies)"
    );

    let out = bin().args(["tau", "--y", "2", "--p", "1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("p must exceed 1"));
}

#[test]
fn sigma_stays_below_the_paper_threshold_and_handles_low_v() {
    let out = bin().args(["sigma", "--V", "4"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let s: f64 = String::from_utf8_lossy(&out.stdout).trim().parse().unwrap();
    assert!(s <= 0.1987553 + 1e-4, "sigma(4, 2) = {s}");
    assert!(s > 0.0);

    let out = bin().args(["sigma", "--V", "0.8"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        String::from_utf8_lossy(&out.stdout).trim(),
        "unconstrained (systole rule applies)"
    );
}

#[test]
fn moduli_map_emits_sorted_regions_with_monotone_tau() {
    let out = bin()
        .args(["moduli-map", "--xs", "0:0.5:6", "--ys", "0.9:1.3:5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,y,region,tau"));
    let rows: Vec<Vec<String>> = lines
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    assert!(rows.iter().all(|r| r.len() == 4));
    // Rows outside the fundamental domain are dropped: (0, 0.9) is inside
    // the unit circle, (0.5, 0.9) is not.
    assert!(!rows.iter().any(|r| r[0] == "0" && r[1] == "0.9"));
    let liyau = rows.iter().find(|r| r[0] == "0.5" && r[1] == "0.9").unwrap();
    assert_eq!(liyau[2], "li_yau");
    assert_eq!(liyau[3], "");
    // (0.3, 1.1) lies in the Montiel-Ros disk.
    let mr = rows.iter().find(|r| r[0] == "0.3" && r[1] == "1.1").unwrap();
    assert_eq!(mr[2], "montiel_ros");
    assert!(mr[3].parse::<f64>().unwrap() > 0.0);
    // Sorted by (x, y).
    let keys: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r[0].parse().unwrap(), r[1].parse().unwrap()))
        .collect();
    assert!(keys.windows(2).all(|w| w[0] <= w[1]), "unsorted: {keys:?}");

    // The tau column is strictly increasing along x = 0, y in [1.1, 3].
    let out = bin()
        .args(["moduli-map", "--xs", "0", "--ys", "1.1:3:20"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let taus: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(taus.len(), 20);
    assert!(taus.windows(2).all(|w| w[0] < w[1]), "not increasing: {taus:?}");
}

#[test]
fn moduli_map_writes_identical_csv_to_file() {
    let out = bin()
        .args(["moduli-map", "--xs", "0:0.5:4", "--ys", "1:2:4"])
        .output()
        .unwrap();
    let path = temp_path("map-out.csv");
    let file_run = bin()
        .args(["moduli-map", "--xs", "0:0.5:4", "--ys", "1:2:4", "--out"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(file_run.status.code(), Some(0));
    assert_eq!(std::fs::read(&path).unwrap(), out.stdout);
}

#[test]
fn generate_cone_reports_the_predicted_invariants() {
    let path = temp_path("gen-cone.json");
    let out = bin()
        .args(["generate", "--family", "cone", "--beta", "0.5236", "--R", "0.05"])
        .args(["--ratio", "2.718", "--n", "512", "--out"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let report = stdout_json(&out);
    // K_1 = 4 pi (1 - sin beta) = 2 pi at beta = pi/6; the peak sits on a
    // sample so the oscillation floor (1/sin b - 1) ln(ratio) = 1 is exact.
    let k1 = report["K1"].as_f64().unwrap();
    let two_pi = 2.0 * std::f64::consts::PI;
    assert!((k1 - two_pi).abs() < 0.05 * two_pi, "K1 = {k1}");
    assert!(report["osc_u"].as_f64().unwrap() >= 1.0);
    // The written file parses back into the same grid.
    let field: ScalarField =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(field.grid().n1(), 512);

    // A cone too wide for the carrier torus is a hard error.
    let out = bin()
        .args(["generate", "--family", "cone", "--R", "0.3", "--out"])
        .arg(temp_path("gen-cone-bad.json"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("does not fit"));
}

#[test]
fn generate_cylinder_meets_the_oscillation_floor() {
    let path = temp_path("gen-cyl.json");
    let out = bin()
        .args(["generate", "--family", "cylinder", "--ratio", "3", "--n", "128", "--out"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let report = stdout_json(&out);
    assert!(report["osc_u"].as_f64().unwrap() >= 3.0);
}

#[test]
fn generate_is_deterministic_per_seed() {
    let (p1, p2, p3) = (
        temp_path("gen-r1.json"),
        temp_path("gen-r2.json"),
        temp_path("gen-r3.json"),
    );
    for (path, seed) in [(&p1, "7"), (&p2, "7"), (&p3, "8")] {
        let out = bin()
            .args(["generate", "--family", "random", "--seed", seed, "--n", "48", "--out"])
            .arg(path)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
    }
    let (b1, b2, b3) = (
        std::fs::read(&p1).unwrap(),
        std::fs::read(&p2).unwrap(),
        std::fs::read(&p3).unwrap(),
    );
    assert_eq!(b1, b2, "same seed must be byte-identical");
    assert_ne!(b1, b3, "different seeds must differ");
}

#[test]
fn willmore_revolution_energy_and_audit() {
    let path = temp_path("rev.json");
    std::fs::write(&path, r#"{"kind": "revolution", "R": 2.0, "r": 0.5}"#).unwrap();
    let out = bin().arg("willmore").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let v = stdout_json(&out);
    // c = R/r = 4: W = pi^2 c^2 / sqrt(c^2 - 1).
    let exact = std::f64::consts::PI.powi(2) * 16.0 / 15.0f64.sqrt();
    let energy = v["energy"].as_f64().unwrap();
    assert!((energy - exact).abs() < 1e-8 * exact);
    assert_eq!(v["all_bounds_hold"], true);
    assert!(v["conformality_defect"].is_null());
    assert!(v["min_slack"].as_f64().unwrap() > 0.0);
}

#[test]
fn willmore_clifford_grid_is_tight_and_conformal() {
    let path = temp_path("clifford.json");
    let torus = willmore::immersions::clifford(48);
    std::fs::write(&path, serde_json::to_string(&torus).unwrap()).unwrap();
    let out = bin().arg("willmore").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let v = stdout_json(&out);
    let two_pi2 = 2.0 * std::f64::consts::PI.powi(2);
    let energy = v["energy"].as_f64().unwrap();
    assert!((energy - two_pi2).abs() < 0.005 * two_pi2);
    assert!(v["conformality_defect"].as_f64().unwrap() < 1e-6);
    assert_eq!(v["certificate"]["status"], "certified");
}

#[test]
fn willmore_rejects_nonconformal_grids() {
    let path = temp_path("chart.json");
    let torus = willmore::immersions::revolution_standard_chart(2.0, 0.5, 48, 48).unwrap();
    std::fs::write(&path, serde_json::to_string(&torus).unwrap()).unwrap();
    let out = bin().arg("willmore").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(1), "{out:?}");
    assert!(String::from_utf8_lossy(&out.stderr).contains("conformal"));
}

#[test]
fn validate_single_criterion_roundtrips() {
    let out = bin().args(["validate", "--criterion", "1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let v = stdout_json(&out);
    assert_eq!(v["id"], 1);
    assert_eq!(v["passed"], true);

    let out = bin().args(["validate", "--criterion", "10"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn flag_grammar_is_a_hard_contract() {
    // Unknown flags are errors, not warnings.
    let out = bin().args(["tau", "--y", "2", "--bogus"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));

    // Conflicting scales are rejected before any computation.
    let out = bin().args(["validate", "--quick", "--full"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));

    // --help succeeds and names every subcommand.
    let out = bin().arg("--help").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let help = String::from_utf8(out.stdout).unwrap();
    for sub in ["certify", "bound", "tau", "sigma", "moduli-map", "generate", "willmore", "validate"]
    {
        assert!(help.contains(sub), "--help is missing {sub}");
    }

    // Per-subcommand help documents the flags the tests above rely on.
    let out = bin().args(["generate", "--help"]).output().unwrap();
    let help = String::from_utf8(out.stdout).unwrap();
    for flag in ["--family", "--out", "--beta", "--R", "--ratio", "--seed", "--amplitude"] {
        assert!(help.contains(flag), "generate --help is missing {flag}");
    }
}
