use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_equiball"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("JSON on stdout")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn constants_for_the_plane() {
    let o = run(&["constants", "--n", "2", "--no-timestamp"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("\"beta3\": 0.57735026918962573"), "{text}");
    let v = json(&o);
    assert!((v["beta3"].as_f64().unwrap() - 0.5773502691896258).abs() < 1e-15);
    assert!((v["alpha3"].as_f64().unwrap() - 0.8660254037844386).abs() < 1e-15);
    assert!((v["lambda"].as_f64().unwrap() - 0.858).abs() < 1e-3);
    assert!(v["beta_fixed_point_residual"].as_f64().unwrap() < 1e-12);
}

#[test]
fn dimension_one_is_rejected() {
    for args in [&["constants", "--n", "1"][..], &["emit-circuit", "--n", "1"], &["falsify", "1", "--n", "1"]] {
        let o = run(args);
        assert_eq!(code(&o), 2, "{args:?}");
        assert!(stderr(&o).contains("unit ball"));
    }
}

#[test]
fn enlarge_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let single = write(dir.path(), "single.json", "[[0.0, 0.0, 0.5]]");
    let o = run(&["enlarge", &single, "--no-timestamp"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = json(&o);
    assert_eq!(v["set"].as_array().unwrap().len(), 4);
    assert_eq!(v["trace"]["steps"].as_array().unwrap().len(), 3);
    assert_eq!(v["verification"]["standard_equilateral"], Value::Bool(true));
    assert!(v["verification"]["max_distance_error"].as_f64().unwrap() < 1e-9);

    let h = 3f64.sqrt() / 2.0;
    let tri = format!("[[0.5, {}], [-0.5, {}], [0.0, {}]]", -h / 3.0, -h / 3.0, 2.0 * h / 3.0);
    let maximal = write(dir.path(), "maximal.json", &tri);
    let o = run(&["enlarge", &maximal, "--no-timestamp"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["input_size"], 3);
    assert!(v["trace"]["steps"].as_array().unwrap().is_empty());

    let outside = write(dir.path(), "outside.json", "[[1.5, 0.0]]");
    let o = run(&["enlarge", &outside]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("norm 1.5"), "{}", stderr(&o));

    let unequal = write(dir.path(), "unequal.json", "[[0.0, 0.0], [0.3, 0.0]]");
    let o = run(&["enlarge", &unequal]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("|p0 - p1|"), "{}", stderr(&o));

    let garbage = write(dir.path(), "garbage.json", "not json");
    assert_eq!(code(&run(&["enlarge", &garbage])), 2);
}

#[test]
fn falsify_verdicts_and_exit_codes() {
    let o = run(&["falsify", "1", "--n", "3", "--samples", "200", "--no-timestamp"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["verdict"], "consistent");
    assert_eq!(v["empirical_weight"].as_f64().unwrap(), 4.0);

    let o = run(&["falsify", "dot(x,x)", "--n", "3", "--samples", "1000", "--no-timestamp"]);
    assert_eq!(code(&o), 3);
    let v = json(&o);
    assert_eq!(v["verdict"], "disproved");
    assert!(v["spread"].as_f64().unwrap() > 0.01);

    let o = run(&["falsify", "x1 * (2 +", "--n", "3"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("parse error"));
    assert_eq!(code(&run(&["falsify", "x4", "--n", "3"])), 2);
}

#[test]
fn sphere_mode_accepts_a_frame_function() {
    // <T x, x> with T = diag(1, 2, 3) sums to tr(T)/2 over every frame.
    let o = run(&["falsify", "x1*x1 + 2*x2*x2 + 3*x3*x3", "--n", "3", "--sphere", "--weight", "3", "--samples", "300"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn certify_check_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("cert.json");
    let cert_s = cert.to_str().unwrap();
    let o = run(&["certify", "--x", "0,0,0", "--y", "0.95,0,0", "--out", cert_s, "--quiet"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = run(&["check", cert_s, "--no-timestamp"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["accepted"], Value::Bool(true));
    assert!(v["residual"].as_f64().unwrap() < 1e-8);

    // Move one point of the first set by 1e-3.
    let mut c: Value = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    let id = c["sets"][0][1].as_u64().unwrap() as usize;
    let x0 = c["points"][id][0].as_f64().unwrap();
    c["points"][id][0] = Value::from(x0 + 1e-3);
    let bad = write(dir.path(), "bad.json", &c.to_string());
    let o = run(&["check", &bad, "--no-timestamp"]);
    assert_eq!(code(&o), 4);
    assert_eq!(json(&o)["reason"], "set_invalid");

    // Keeping only one set leaves the claim unimplied.
    c = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    let first = c["sets"][0].clone();
    c["sets"] = Value::Array(vec![first]);
    let short = write(dir.path(), "short.json", &c.to_string());
    let o = run(&["check", &short, "--no-timestamp"]);
    assert_eq!(code(&o), 4);
    assert!(json(&o)["residual"].as_f64().unwrap() >= 1e-8);

    let broken = write(dir.path(), "broken.json", "{\"version\": 1}");
    assert_eq!(code(&run(&["check", &broken])), 2);
}

#[test]
fn reflexive_certificate_is_empty() {
    let o = run(&["certify", "--x", "0.3,-0.2", "--y", "0.3,-0.2", "--no-timestamp"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert!(v["sets"].as_array().unwrap().is_empty());
}

#[test]
fn certify_rejects_bad_coordinates() {
    assert_eq!(code(&run(&["certify", "--x", "0.1,zz", "--y", "0,0"])), 2);
    assert_eq!(code(&run(&["certify", "--x", "0.1,0", "--y", "0,0,0"])), 2);
    assert_eq!(code(&run(&["certify", "--x", "2,0", "--y", "0,0"])), 2);
    assert_eq!(code(&run(&["certify", "--x", "0.1,0", "--y", "0,0", "--n", "3"])), 2);
}

#[test]
fn circuit_csv() {
    let o = run(&["emit-circuit", "--n", "2", "--quiet"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(text.lines().next().unwrap(), "label,cx,cy,radius,theta_start,theta_end");
    let num = |s: &str| s.parse::<f64>().unwrap();
    let arcs: Vec<_> = rows.iter().filter(|r| r[0].starts_with("C_")).collect();
    assert_eq!(arcs.len(), 8);
    let reach = 3f64.sqrt();
    for r in &arcs {
        assert!((num(r[3]) - reach).abs() < 1e-15);
    }
    let corners: Vec<_> = rows.iter().filter(|r| ["a", "b", "c", "d"].contains(&r[0])).collect();
    assert_eq!(corners.len(), 4);
    assert!((num(corners[0][1]) - 0.6180).abs() < 1e-4);
    assert!((num(corners[0][2]) - 0.6180).abs() < 1e-4);
    for r in &corners {
        assert!((num(r[1]).abs() - num(corners[0][1]).abs()).abs() < 1e-12);
        assert!((num(r[2]).abs() - num(corners[0][1]).abs()).abs() < 1e-12);
    }
}

#[test]
fn output_is_deterministic() {
    let cases: [&[&str]; 3] = [
        &["certify", "--x", "0.2,0.1", "--y", "-0.5,0.6", "--no-timestamp", "--quiet"],
        &["falsify", "x1*x2", "--n", "3", "--seed", "5", "--samples", "100", "--no-timestamp", "--quiet"],
        &["verify-all", "--quick", "--n", "3", "--seed", "2", "--no-timestamp", "--quiet"],
    ];
    for args in cases {
        let a = run(args);
        let b = run(args);
        assert!(!a.stdout.is_empty());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
    let o = run(&["constants"]);
    assert!(json(&o)["timestamp"].is_u64());
}

#[test]
fn verify_all_suites_and_injection() {
    let o = run(&["verify-all", "--quick", "--n", "4", "--no-timestamp", "--quiet"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    let names: Vec<&str> = v["suites"].as_array().unwrap().iter().map(|s| s["name"].as_str().unwrap()).collect();
    assert_eq!(
        names,
        [
            "constants",
            "enlargement",
            "center_bounds",
            "k_region",
            "gamma_oracle",
            "shell_geometry",
            "eta_mu_nu",
            "certificates",
            "falsifier",
            "negative_controls"
        ]
    );

    let o = run(&["verify-all", "--quick", "--n", "3", "--inject", "k_region", "--no-timestamp", "--quiet"]);
    assert_eq!(code(&o), 1);
    for s in json(&o)["suites"].as_array().unwrap() {
        assert_eq!(s["passed"].as_bool().unwrap(), s["name"] != "k_region", "{s}");
    }
    assert_eq!(code(&run(&["verify-all", "--quick", "--inject", "nope"])), 2);
}
