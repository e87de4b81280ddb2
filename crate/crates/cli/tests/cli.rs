use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nonbloch")).args(args).env("NONBLOCH_THREADS", "2").output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines().skip(1).map(|l| l.split(',').map(|f| f.parse().unwrap_or(f64::NAN)).collect()).collect()
}

#[test]
fn threshold_writes_json_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.json");
    let model = fixture("eq1.json");
    ok(&["threshold", "--model", model.to_str().unwrap(), "--gamma-min", "0.001", "--gamma-max", "0.5", "--out", out.to_str().unwrap()]);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let gc = v["gamma_c"].as_f64().unwrap();
    assert!((gc - 0.0786).abs() < 5e-4);
    assert!(v["candidates"].as_array().unwrap().iter().any(|c| c["accepted"] == true));

    let m: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("t.json.manifest.json")).unwrap()).unwrap();
    assert!(m["wall_time_s"].as_f64().unwrap() >= 0.0);
    assert_eq!(m["command"]["threshold"]["window"]["membership_tol"], 1e-6);
    assert_eq!(m["constants"]["n_phi_default"], 2000);
    assert_eq!(m["model"]["gamma"], 0.02);
    assert!(m["version"].is_string());
}

#[test]
fn hatano_nelson_spectrum() {
    let model = fixture("hn.json");
    let csv = ok(&["spectrum", "--model", model.to_str().unwrap(), "--L", "80"]);
    assert_eq!(csv.lines().next(), Some("re_E,im_E"));
    let r = rows(&csv);
    assert_eq!(r.len(), 80);
    let mut exact: Vec<f64> = (1..=80).map(|n| 1.6 * (n as f64 * std::f64::consts::PI / 81.0).cos()).collect();
    exact.sort_by(f64::total_cmp);
    for (row, e) in r.iter().zip(exact) {
        assert!(row[1].abs() < 1e-8);
        assert!((row[0] - e).abs() < 1e-6);
    }
}

#[test]
fn outputs_are_deterministic() {
    let model = fixture("eq1.json");
    let m = model.to_str().unwrap();
    let a = ok(&["spectrum", "--model", m, "--L", "60", "--precision", "dd"]);
    let b = ok(&["spectrum", "--model", m, "--L", "60", "--precision", "dd"]);
    assert_eq!(a, b);
    let a = ok(&["boundary", "--model", m, "--sweep", "t3=0.16:0.24:3", "--gamma-max", "0.5"]);
    let out = Command::new(env!("CARGO_BIN_EXE_nonbloch"))
        .args(["boundary", "--model", m, "--sweep", "t3=0.16:0.24:3", "--gamma-max", "0.5"])
        .env("NONBLOCH_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(a.as_bytes(), out.stdout.as_slice());
    assert_eq!(a.lines().next(), Some("t3,gamma_c,accepted_count"));
    let r = rows(&a);
    assert!((r[1][1] - 0.0786).abs() < 5e-4 && r[1][2] >= 1.0);
    // 17 significant digits.
    assert!(a.lines().nth(2).unwrap().split(',').nth(1).unwrap().contains("e-2") && a.contains("7.8621250891071"));
}

#[test]
fn hermitian_gbz_is_the_unit_circle() {
    let model = fixture("eq1.json");
    let csv = ok(&["gbz", "--model", model.to_str().unwrap(), "--gamma", "0", "--n-phi", "400"]);
    assert_eq!(csv.lines().next(), Some("theta,re_beta,im_beta,abs_beta,re_E,im_E,branch_id,is_gbz,is_cusp"));
    let mut n = 0;
    for line in csv.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        if f[7] == "true" {
            n += 1;
            assert!((f[3].parse::<f64>().unwrap() - 1.0).abs() < 1e-6);
        }
    }
    assert!(n > 100);
}

#[test]
fn saddles_dos_and_duality() {
    let model = fixture("supp.json");
    let m = model.to_str().unwrap();
    let v: Value = serde_json::from_str(&ok(&["saddles", "--model", m, "--gamma", "0.3090582303009398"])).unwrap();
    assert!(v["saddles"].as_array().unwrap().iter().any(|s| s["order_k"] == 3 && s["on_gbz"] == true));
    assert!(v["coalescences"].as_array().unwrap().iter().any(|c| c["shares_beta"] == true));

    for (name, count) in [("eq1.json", 6), ("supp.json", 4), ("hn.json", 2)] {
        let f = fixture(name);
        let v: Value = serde_json::from_str(&ok(&["saddles", "--model", f.to_str().unwrap()])).unwrap();
        assert_eq!(v["saddles"].as_array().unwrap().len(), count, "{name}");
    }

    let hn = fixture("hn.json");
    let csv = ok(&["dos", "--model", hn.to_str().unwrap(), "--emin", "-1", "--emax", "1", "--n", "5"]);
    let r = rows(&csv);
    assert_eq!(r.len(), 5);
    assert!((r[2][1] - 1.0 / (std::f64::consts::PI * 1.6)).abs() < 1e-12);
    let fit: Value = serde_json::from_str(&ok(&["dos", "--model", hn.to_str().unwrap(), "--fit-at", "-1.6"])).unwrap();
    assert!((fit["alpha"].as_f64().unwrap() - 0.5).abs() < 0.05);
    assert_eq!(fit["k_predicted"], 2);

    let csv = ok(&["duality", "--tl", "1", "--tr", "1", "--emin", "-2", "--emax", "2", "--n", "5"]);
    assert_eq!(csv.lines().next(), Some("E,gap,angle"));
    let r = rows(&csv);
    assert!((r[2][1] - 2.0).abs() < 1e-12 && (r[2][2] - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
}

#[test]
fn phase_diagram_grid() {
    let dir = tempfile::tempdir().unwrap();
    let model = fixture("eq1.json");
    let manifest = dir.path().join("pd.json");
    let csv = ok(&[
        "phase-diagram", "--model", model.to_str().unwrap(), "--sweep", "gamma=0:0.12:3", "--sweep", "t3=0.1:0.2:2",
        "--L", "60", "--precision", "dd", "--manifest", manifest.to_str().unwrap(),
    ]);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("t3\\gamma,0,"));
    let r = rows(&csv);
    assert_eq!(r[1][1], 0.0);
    assert!(r[1][3] > 0.0);
    assert!(manifest.exists());
}

#[test]
fn domain_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, text: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p
    };
    let complex = write("c.json", r#"{"base": {"-1": 1.0, "1": 1.0}, "gamma_coupling": {"-1": [0, 1], "1": 1.0}}"#);
    let out = run(&["threshold", "--model", complex.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("K H K = H"));

    let one_sided = write("p.json", r#"{"base": {"1": 1.0, "2": 0.5}}"#);
    let malformed = write("m.json", r#"{"base": {"-1": "x"}}"#);
    let unknown = write("u.json", r#"{"base": {"-1": 1, "1": 1}, "mu": 3}"#);
    let empty = write("e.json", r#"{"base": {}}"#);
    for p in [&one_sided, &malformed, &unknown, &empty] {
        assert_eq!(run(&["saddles", "--model", p.to_str().unwrap()]).status.code(), Some(2), "{}", p.display());
    }
    assert_eq!(run(&["saddles", "--model", "/nonexistent/model.json"]).status.code(), Some(2));

    let eq1 = fixture("eq1.json");
    let m = eq1.to_str().unwrap();
    assert_eq!(run(&["boundary", "--model", m, "--sweep", "t3=0:1:1"]).status.code(), Some(2));
    assert_eq!(run(&["boundary", "--model", m, "--sweep", "mu=0:1:3"]).status.code(), Some(2));
    assert_eq!(run(&["threshold", "--model", m, "--membership-tol", "0"]).status.code(), Some(2));
    assert_eq!(run(&["threshold", "--model", m, "--gamma-min", "0.5", "--gamma-max", "0.1"]).status.code(), Some(2));
    assert_eq!(run(&["spectrum", "--model", m, "--L", "10", "--scale-r", "-1"]).status.code(), Some(2));
    assert_eq!(run(&["dos", "--model", m, "--emin", "0"]).status.code(), Some(2));
    assert_eq!(run(&["duality", "--tl", "0", "--tr", "1", "--emin", "-1", "--emax", "1"]).status.code(), Some(2));
}
