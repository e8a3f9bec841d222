use std::process::{Command, Output};

use serde_json::Value;
use writhe_core::conformal::{invert_point, Inversion};
use writhe_core::curve::make_preset;
use writhe_core::Vec3;

fn writhe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_writhe"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn rows(out: &Output) -> Vec<Vec<f64>> {
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

#[test]
fn circle_invariants_vanish() {
    let out = writhe(&["invariants", "--preset", "circle"]);
    assert!(out.status.success());
    let r = json(&out);
    assert_eq!(r["schema"], "1");
    assert!(r["writhe"]["value"].as_f64().unwrap().abs() < 1e-10);
    assert!(r["twist"]["value"].as_f64().unwrap().abs() < 1e-10);
    assert_eq!(r["self_linking"]["lk"], 0);
}

#[test]
fn trefoil_closure() {
    let out = writhe(&["invariants", "--preset", "torus_knot", "--params", "p=2,q=3,R=2,r=0.5"]);
    assert!(out.status.success());
    let r = json(&out);
    assert!(r["calugareanu"]["residual"].as_f64().unwrap() < 1e-3);
    let csv = writhe(&["invariants", "--preset", "trefoil", "--output", "csv"]);
    assert!(String::from_utf8_lossy(&csv.stdout).starts_with("quantity,value,estimated_error\n"));
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{not json").unwrap();
    let out = writhe(&["invariants", "--curve", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("parse error"));

    for args in [
        &["invariants", "--preset", "nonesuch"][..],
        &["invariants", "--preset", "circle", "--params", "R=abc"],
        &["invariants", "--preset", "circle", "--n", "100"],
        &["invariants"],
        &["verify", "nonesuch", "--preset", "circle"],
        &["export", "inverted-curve", "--preset", "circle", "--center", "1,2"],
        &["export", "indicatrix", "--preset", "circle", "--sign", "x"],
    ] {
        assert_eq!(writhe(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn numerical_failures_exit_3() {
    let out = writhe(&["invariants", "--preset", "twisted_unknot", "--params", "amplitude=1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(json(&out)["error"].as_str().unwrap().contains("curvature vanishes"));

    let out = writhe(&["verify", "integrality", "--preset", "trefoil", "--residual-tol=-1"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["pass"], false);
}

#[test]
fn verify_suites() {
    let out = writhe(&["verify", "integrality", "--preset", "circle"]);
    assert!(out.status.success());
    let r = json(&out);
    assert_eq!(r["pass"], true);
    assert_eq!(r["theorem"], "integrality");

    let out = writhe(&["verify", "prop4", "--preset", "torus_knot", "--auto-center"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let r = json(&out);
    assert!(r["residuals"][0]["value"].as_f64().unwrap() < 1e-3);
    assert_eq!(r["inputs"]["centers"].as_array().unwrap().len(), 2);

    let out = writhe(&["verify", "writhe_inversion", "--preset", "torus_knot", "--center", "0.3,-0.2,6", "--radius", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(json(&out)["inputs"]["radius"], 2.0);
}

#[test]
fn timing_is_opt_in() {
    let plain = writhe(&["verify", "integrality", "--preset", "ellipse"]);
    assert!(!String::from_utf8_lossy(&plain.stdout).contains("runtime"));
    let timed = writhe(&["verify", "integrality", "--preset", "ellipse", "--timing"]);
    assert!(json(&timed)["runtime_seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn export_curve_and_indicatrix() {
    let out = writhe(&["export", "curve", "--preset", "trefoil", "--n", "512"]);
    assert!(out.status.success());
    assert_eq!(rows(&out).len(), 512);

    let out = writhe(&["export", "indicatrix", "--preset", "trefoil", "--sign", "+"]);
    assert!(out.status.success());
    for r in rows(&out) {
        assert!((Vec3::new(r[1], r[2], r[3]).norm() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn export_inverted_curve_matches_point_inversion() {
    let out = writhe(&["export", "inverted-curve", "--preset", "trefoil", "--center", "10,0,0", "--radius", "5"]);
    assert!(out.status.success());
    let c = make_preset("trefoil", &Default::default()).unwrap();
    let inv = Inversion::new(Vec3::new(10.0, 0.0, 0.0), 5.0).unwrap();
    for r in rows(&out) {
        let expect = invert_point(&inv, &c.position(r[0])).unwrap();
        assert!((Vec3::new(r[1], r[2], r[3]) - expect).norm() < 1e-12);
    }
}

#[test]
fn export_to_directory() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    for (what, file) in [("tube-samples", "tube_samples.csv"), ("profile", "profile.csv")] {
        let out = writhe(&["export", what, "--preset", "trefoil", "--n", "64", "--out-dir", d]);
        assert!(out.status.success());
        let text = std::fs::read_to_string(dir.path().join(file)).unwrap();
        assert!(text.lines().count() > 64);
    }
}

#[test]
fn identical_runs_are_byte_identical() {
    for args in [
        &["invariants", "--preset", "trefoil"][..],
        &["verify", "twist_mod_z", "--preset", "trefoil", "--seed", "7"],
        &["export", "indicatrix", "--preset", "torus_knot", "--params", "q=5"],
    ] {
        let (a, b) = (writhe(args), writhe(args));
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}
