use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_acms"));
    c.env_remove("ACMS_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn export(entry: &str) -> PathBuf {
    let out = run(&["catalog", "export", entry]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let path = scratch(&format!("{entry}.acms"));
    std::fs::write(&path, &out.stdout).unwrap();
    path
}

fn json_stdout(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn classify_exported_darboux() {
    let f = export("darboux_3");
    let out = run(&["classify", f.to_str().unwrap(), "--points", "40", "--json", "-"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_stdout(&out);
    assert_eq!(v["verdicts"]["ContactMetric"], "holds");
    assert_eq!(v["verdicts"]["Sasakian"], "holds");
    assert_eq!(v["status"], "ok");
    assert_eq!(v["seed"], 0);
    assert_eq!(v["sampling"]["points"], 40);
    assert!(v["tolerances"]["tol"].as_f64().unwrap() == 1e-8);
}

#[test]
fn failing_axioms_are_a_valid_answer() {
    let f = export("darboux_3_eta_scaled");
    let out = run(&["check", f.to_str().unwrap(), "--json", "-", "--quiet"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_stdout(&out)["verdicts"]["Axioms"], "fails");
    let out = run(&["classify", f.to_str().unwrap(), "--points", "20", "--json", "-"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_stdout(&out);
    assert_eq!(v["verdicts"]["Sasakian"], "vacuous");
    assert!(v["classification"]["conditions"][1]["residual"].is_null());
}

#[test]
fn same_seed_gives_identical_json() {
    let f = export("motion_group_contact_3");
    let a = scratch("det_a.json");
    let b = scratch("det_b.json");
    for (path, threads) in [(&a, "1"), (&b, "0")] {
        let out = bin()
            .args(["classify", f.to_str().unwrap(), "--points", "30", "--seed", "5", "--quiet", "--json"])
            .arg(path)
            .env("ACMS_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
        assert!(out.stdout.is_empty());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let other = run(&["classify", f.to_str().unwrap(), "--points", "30", "--seed", "6", "--json", "-", "--quiet"]);
    assert_ne!(other.stdout, std::fs::read(&a).unwrap());
}

#[test]
fn human_summary_moves_to_stderr_with_json_on_stdout() {
    let f = export("cosymplectic_3");
    let out = run(&["classify", f.to_str().unwrap(), "--points", "10", "--json", "-"]);
    json_stdout(&out);
    assert!(String::from_utf8_lossy(&out.stderr).contains("ContactMetric"));
}

#[test]
fn identities_and_cone_pass_on_catalog_entries() {
    for entry in ["darboux_5_phi_rotated", "motion_group_contact_3"] {
        let f = export(entry);
        let out = run(&["identities", f.to_str().unwrap(), "--points", "20", "--quiet"]);
        assert_eq!(out.status.code(), Some(0), "{entry}");
        let out = run(&["cone", f.to_str().unwrap(), "--points", "10", "--quiet", "--json", "-"]);
        assert_eq!(out.status.code(), Some(0), "{entry}");
        assert_eq!(json_stdout(&out)["status"], "ok");
    }
}

#[test]
fn search_on_the_blend_family() {
    let f = export("darboux_cosymplectic_3_blend");
    let out = run(&["search", f.to_str().unwrap(), "--json", "-", "--quiet"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_stdout(&out);
    assert_eq!(v["dim3_remark"]["status"], "pass");
    assert_eq!(v["search"]["witnesses"], Value::Array(vec![]));
    assert!(v["search"]["summary"].as_str().unwrap().starts_with("no witness found"));
}

#[test]
fn search_needs_a_family_section() {
    let f = export("darboux_3");
    assert_eq!(run(&["search", f.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn input_errors_exit_with_two() {
    let bad = scratch("bad.acms");
    std::fs::write(&bad, "name: broken\ncoords: x, y, z\nphi:\n  0, 1\n").unwrap();
    let out = run(&["classify", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains(":3:1:") && err.contains("`phi`"), "{err}");
    assert_eq!(run(&["classify", "/nonexistent/file.acms"]).status.code(), Some(2));
    assert_eq!(run(&["catalog", "export", "no_such_entry"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    let f = export("darboux_3");
    assert_eq!(run(&["check", f.to_str().unwrap(), "--tol", "1", "--dead-band", "0.1"]).status.code(), Some(2));
    let eta_scaled = export("darboux_3_eta_scaled");
    assert_eq!(run(&["cone", eta_scaled.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn numerical_errors_exit_with_three() {
    let f = scratch("log_domain.acms");
    let text = "name: log_domain\ncoords: x, y, z\ndomain: [-1, 1], [-1, 1], [-1, 1]\n\
                phi:\n  0, -1, 0\n  1, 0, 0\n  0, 0, 0\nxi: 0, 0, 1\neta: 0, 0, 1\n\
                g:\n  log(x), 0, 0\n  1, 0\n  1\n";
    std::fs::write(&f, text).unwrap();
    let out = run(&["check", f.to_str().unwrap(), "--points", "20"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn catalog_list_names_every_entry() {
    let out = run(&["catalog", "list", "--json", "-"]);
    let v = json_stdout(&out);
    let names: Vec<&str> = v["entries"].as_array().unwrap().iter().map(|e| e["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"darboux_5"));
    assert!(names.contains(&"darboux_5_metric"));
}
