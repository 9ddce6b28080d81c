use std::process::{Command, Output};

use serde_json::Value;

fn ng2(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ng2"))
        .args(args)
        .output()
        .expect("ng2 runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn num(v: &Value) -> f64 {
    v.as_f64().expect("number")
}

#[test]
fn identities_pass_on_standard_table() {
    let out = ng2(&["verify-identities"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    let checks = v["results"]["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 6);
    let c1 = checks.iter().find(|c| c["name"] == "contractions1").unwrap();
    assert_eq!(c1["tuples"], 2401);
    assert!(checks.iter().all(|c| c["failures"] == 0 && c["passed"] == true));
}

#[test]
fn corrupted_table_is_detected() {
    let out = ng2(&["verify-identities", "--corrupt-phi", "0,1,2"]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.contains("FAIL"), "{err}");
    assert!(err.contains("first failing index tuple ["), "{err}");
    let v = json(&out);
    let failing = v["results"]["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["passed"] == false)
        .count();
    assert!(failing > 0);
}

#[test]
fn torsion_of_round_sphere() {
    let out = ng2(&["torsion", "--samples", "4", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r = &json(&out)["results"];
    assert!((num(&r["mean_tau0"]) - 4.0).abs() < 1e-5);
    for k in ["max_tau1", "max_tau2", "max_tau3", "max_t_deviation"] {
        assert!(num(&r[k]) < 1e-5, "{k} = {}", r[k]);
    }
    assert_eq!(num(&r["scalar_curvature"]), 42.0);
    assert_eq!(num(&r["ricci_over_g"]), 6.0);
}

#[test]
fn torsion_with_no_samples_is_empty() {
    let out = ng2(&["torsion", "--samples", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["results"]["points"], 0);
}

#[test]
fn torsion_rejects_bad_step() {
    let out = ng2(&["torsion", "--step=-1e-4"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("step"));
}

#[test]
fn hypersurface_geodesic_sphere_is_totally_geodesic() {
    let out = ng2(&["hypersurface", "--example", "s6", "--samples", "5"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r = &json(&out)["results"];
    assert!(num(&r["a2"][1]) < 1e-12);
    assert!(num(&r["nk_defect"][1]) < 1e-8);
    assert!(num(&r["umbilic_defect"][1]) < 1e-8);
    assert!((num(&r["scalar_curvature"][0]) - 30.0).abs() < 1e-8);
}

#[test]
fn hypersurface_clifford_is_not_nearly_kaehler() {
    let out = ng2(&["hypersurface", "--example", "clifford:1", "--samples", "5"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r = &json(&out)["results"];
    assert!((num(&r["a2"][0]) - 6.0).abs() < 1e-8);
    assert!((num(&r["umbilic_defect"][0]) - 6f64.sqrt()).abs() < 1e-8);
    assert!(num(&r["nk_defect"][0]) > 0.1);
    assert!(num(&r["max_abs_trace_a"]) < 1e-8);
    assert!(num(&r["div_xi_fd"]) < 1e-5);
}

#[test]
fn clifford_index_out_of_range() {
    let out = ng2(&["hypersurface", "--example", "clifford:7"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("k out of range"));
}

#[test]
fn unknown_example() {
    let out = ng2(&["hypersurface", "--example", "torus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn eigencheck_clifford_default() {
    let out = ng2(&["eigencheck", "--example", "clifford:3"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r = &json(&out)["results"];
    assert!((num(&r["lambda_expected"]) - 12.0).abs() < 1e-10);
    assert_eq!(r["k"], 3);
    assert!(num(&r["rel_residual"]) <= 1e-2);
    assert!(num(&r["max_abs_h"]) > 1e-3);
    assert_eq!(r["grid"]["box"].as_array().unwrap().len(), 6);
}

#[test]
fn eigencheck_geodesic_sphere() {
    let out = ng2(&["eigencheck", "--example", "s6"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r = &json(&out)["results"];
    assert!((num(&r["lambda_expected"]) - 6.0).abs() < 1e-10);
    assert!(num(&r["rel_residual"]) <= 1e-3);
}

#[test]
fn eigencheck_degenerate_pair() {
    let e1 = "1,0,0,0,0,0,0,0";
    let out = ng2(&["eigencheck", "--field1", e1, "--field2", e1]);
    assert_ne!(out.status.code(), Some(0));
    assert!(stderr(&out).contains("degenerate field pair"));
}

#[test]
fn eigencheck_rejects_short_vector() {
    let out = ng2(&["eigencheck", "--field1", "1,0,0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reports_are_deterministic() {
    let args = ["hypersurface", "--example", "clifford:2", "--samples", "4", "--seed", "11"];
    let a = ng2(&args);
    let b = ng2(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["seed"], 11);
}

#[test]
fn seed_changes_samples() {
    let a = ng2(&["torsion", "--samples", "2", "--seed", "1"]);
    let b = ng2(&["torsion", "--samples", "2", "--seed", "2"]);
    assert_ne!(a.stdout, b.stdout);
}

#[test]
fn out_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = ng2(&["torsion", "--samples", "1", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["command"], "torsion");
    assert_eq!(v["tool"], "ng2");
}

#[test]
fn table_format() {
    let out = ng2(&["torsion", "--samples", "1", "--format", "table"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("results.scalar_curvature") && l.ends_with("42.0")));
    assert!(text.lines().any(|l| l.starts_with("command") && l.ends_with("torsion")));
}
