use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn jobs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("jobs")
}

fn run(job: &Path, out: &Path, extra: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isominimal"))
        .arg("run")
        .arg(job)
        .arg("--out-dir")
        .arg(out)
        .args(extra)
        .output()
        .unwrap()
}

fn report(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn check<'a>(r: &'a Value, name: &str) -> &'a Value {
    r["checks"].as_array().unwrap().iter().find(|c| c["name"] == name).unwrap()
}

#[test]
fn helicoid_job_writes_mesh_and_minimal_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&jobs().join("helicoid.json"), dir.path(), &["--check"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&dir.path().join("helicoid.report.json"));
    assert_eq!(r["passed"], true);
    assert!(check(&r, "max_abs_H")["residual"].as_f64().unwrap() < 1e-8);

    let obj = fs::read_to_string(dir.path().join("helicoid.obj")).unwrap();
    assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 64 * 128);
    assert_eq!(obj.lines().filter(|l| l.starts_with("f ")).count(), 2 * 63 * 127);
}

#[test]
fn unit_section_is_an_r_geodesic_circle() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&jobs().join("classify_section.json"), dir.path(), &[]);
    assert_eq!(out.status.code(), Some(0));
    let printed: Value = serde_json::from_str(String::from_utf8_lossy(&out.stdout).lines().next().unwrap()).unwrap();
    let want: Value = serde_json::json!({ "kind": "circle", "center": [0.0, 0.0], "radius": 1.0, "r_geodesic": true });
    assert_eq!(printed, want);
    assert_eq!(report(&dir.path().join("classify_section.report.json"))["result"], want);
}

#[test]
fn zero_inner_radius_is_a_schema_error() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(jobs().join("helicoid.json")).unwrap().replace("\"rmin\": 0.5", "\"rmin\": 0.0");
    let job = dir.path().join("bad.json");
    fs::write(&job, text).unwrap();
    let out = run(&job, dir.path(), &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("domain.annulus.rmin"));
    assert!(!dir.path().join("helicoid.obj").exists());
}

#[test]
fn failed_check_sets_exit_status_only_with_check() {
    let dir = tempfile::tempdir().unwrap();
    let job = jobs().join("verify_bowl.json");
    assert_eq!(run(&job, dir.path(), &[]).status.code(), Some(0));
    assert_eq!(run(&job, dir.path(), &["--check"]).status.code(), Some(1));
    let r = report(&dir.path().join("verify_bowl.report.json"));
    assert_eq!(r["passed"], false);
    assert_eq!(check(&r, "linear_vs_minus_2_int_VH")["pass"], true);
}

#[test]
fn tolerance_flag_replaces_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let job = jobs().join("verify_harmonic.json");
    assert_eq!(run(&job, dir.path(), &["--check"]).status.code(), Some(0));
    assert_eq!(run(&job, dir.path(), &["--check", "--tol", "1e-12"]).status.code(), Some(1));
    let r = report(&dir.path().join("verify_harmonic.report.json"));
    assert_eq!(check(&r, "max_abs_H")["tol"], 1e-12);
}

#[test]
fn identical_jobs_give_identical_bytes() {
    for name in ["logarithmoid", "bent_scherk", "family4d_pi4"] {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let job = jobs().join(format!("{name}.json"));
        assert_eq!(run(&job, a.path(), &[]).status.code(), Some(0));
        assert_eq!(run(&job, b.path(), &[]).status.code(), Some(0));
        let mut files: Vec<_> = fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
        files.sort();
        assert_eq!(files.len(), 2, "{name}");
        for f in files {
            assert_eq!(fs::read(a.path().join(&f)).unwrap(), fs::read(b.path().join(&f)).unwrap(), "{f:?}");
        }
    }
}

#[test]
fn every_shipped_job_runs() {
    let dir = tempfile::tempdir().unwrap();
    let mut names: Vec<_> = fs::read_dir(jobs()).unwrap().map(|e| e.unwrap().path()).collect();
    names.sort();
    assert!(names.len() >= 15);
    for job in names {
        let out = run(&job, dir.path(), &["--check"]);
        let want = if job.ends_with("verify_bowl.json") { 1 } else { 0 };
        assert_eq!(out.status.code(), Some(want), "{}: {}", job.display(), String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn off_sphere_point_names_its_index() {
    let dir = tempfile::tempdir().unwrap();
    let job = dir.path().join("p.json");
    fs::write(&job, r#"{ "kind": "project", "points": [[1.0, 0.0, 0.0], [1.0, 0.0, 1.0]] }"#).unwrap();
    let out = run(&job, dir.path(), &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("points[1]"));
}
