use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use osculant::immersion::{gallery, load_spec_file};
use serde_json::Value;

fn osculant(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_osculant"))
        .args(args)
        .env_remove("OSCULANT_TOL")
        .output()
        .expect("binary runs")
}

fn osculant_env(args: &[&str], tol: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_osculant"))
        .args(args)
        .env("OSCULANT_TOL", tol)
        .output()
        .expect("binary runs")
}

fn repo_gallery() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../gallery")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn ranks(doc: &Value) -> Vec<u64> {
    doc["levels"]
        .as_array()
        .unwrap()
        .iter()
        .map(|l| l["rank_k"].as_u64().unwrap())
        .collect()
}

fn f(v: &Value) -> f64 {
    v.to_string().parse().unwrap()
}

#[test]
fn extremal_then_analyze_attains_the_bound() {
    let dir = tempfile::tempdir().unwrap();
    for (n, r, want) in [("2", "2", vec![3, 4]), ("1", "3", vec![1, 1, 1])] {
        let spec = dir.path().join(format!("e{n}{r}.spec"));
        let out = osculant(&[
            "extremal",
            "--n",
            n,
            "--r",
            r,
            "--out",
            spec.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        assert!(out.stdout.is_empty());
        let out = osculant(&["analyze", spec.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        let doc = json(&out);
        assert_eq!(ranks(&doc), want);
        for l in doc["levels"].as_array().unwrap() {
            assert_eq!(l["rank_k"], l["bound"]);
        }
        assert_eq!(doc["checks"]["oracle_match"], Value::Bool(true));
    }
    let out = osculant(&["extremal", "--n", "0", "--r", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    assert!(!out.stderr.is_empty());
}

#[test]
fn analyze_helix_and_plane() {
    let helix = repo_gallery().join("helix.spec");
    let out = osculant(&["analyze", helix.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(ranks(&doc), vec![1, 1]);
    assert!((f(&doc["levels"][0]["curvatures"][0]) - 0.25).abs() < 1e-12);
    assert!((f(&doc["levels"][1]["curvatures"][0]) - 0.25).abs() < 1e-12);

    let plane = repo_gallery().join("plane.spec");
    let out = osculant(&["analyze", plane.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(ranks(&doc), vec![0]);
    assert_eq!(doc["stop_reason"], Value::from("rank_zero"));

    let out = osculant(&["analyze", plane.to_str().unwrap(), "--max-order", "0"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn analyze_options() {
    let torus = repo_gallery().join("torus.spec");
    let t = torus.to_str().unwrap();
    let out = osculant(&["analyze", t, "--point", "-0.3,1.1", "--max-order", "1"]);
    assert!(out.status.success());
    let doc = json(&out);
    assert_eq!(f(&doc["meta"]["base_point"][0]), -0.3);
    assert_eq!(doc["meta"]["max_order"], Value::from(1));

    let out = osculant(&[
        "analyze",
        t,
        "--invariance-seed",
        "1",
        "--invariance-seed",
        "2",
    ]);
    assert!(out.status.success());
    assert!(f(&json(&out)["checks"]["frame_invariance_residual"]) < 1e-6);

    let out = osculant(&["analyze", t, "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("name,order,rank_k,bound,index,eigenvalue"));

    let out = osculant(&["analyze", t, "--point", "1,2,3"]);
    assert_eq!(out.status.code(), Some(1));
    let out = osculant(&["analyze", "/definitely/missing.spec"]);
    assert_eq!(out.status.code(), Some(1));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.spec");
    std::fs::write(&bad, "dim_domain = 1\ncomponents = [\"u1\", \"u1^\"]\n").unwrap();
    let out = osculant(&["analyze", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn verification_failure_exits_two() {
    let helix = repo_gallery().join("helix.spec");
    let out = osculant(&["analyze", helix.to_str().unwrap(), "--tol", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
    // The report is still written.
    assert_eq!(json(&out)["checks"]["oracle_match"], Value::Bool(false));
}

#[test]
fn tolerance_from_environment() {
    let helix = repo_gallery().join("helix.spec");
    let h = helix.to_str().unwrap();
    let out = osculant_env(&["analyze", h], "1e-6");
    assert!(out.status.success());
    assert_eq!(f(&json(&out)["meta"]["tolerance"]), 1e-6);
    // The flag wins.
    let out = osculant_env(&["analyze", h, "--tol", "1e-9"], "1e-6");
    assert_eq!(f(&json(&out)["meta"]["tolerance"]), 1e-9);
    let out = osculant_env(&["analyze", h], "banana");
    assert_eq!(out.status.code(), Some(1));
    let out = osculant_env(&["verify"], "0.5");
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_suites() {
    let out = osculant(&["verify", "--suite", "gallery"]);
    assert_eq!(out.status.code(), Some(0));
    let table = String::from_utf8(out.stdout).unwrap();
    assert!(table.trim_end().ends_with("12/12 cases passed"));

    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let run = |p: &Path| {
        osculant(&[
            "verify",
            "--suite",
            "random",
            "--count",
            "12",
            "--seed",
            "3",
            "--out",
            p.to_str().unwrap(),
        ])
    };
    let (ra, rb) = (run(&a), run(&b));
    assert_eq!(ra.status.code(), Some(0));
    assert_eq!(ra.stdout, rb.stdout);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let doc: Value = serde_json::from_slice(&std::fs::read(&a).unwrap()).unwrap();
    assert_eq!(doc["cases"].as_array().unwrap().len(), 12);
}

#[test]
fn saved_gallery_matches_the_built_in_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = osculant(&["save-gallery", "--dir", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    for spec in gallery() {
        let file = format!("{}.spec", spec.immersion.name());
        let fresh = std::fs::read_to_string(dir.path().join(&file)).unwrap();
        let shipped = std::fs::read_to_string(repo_gallery().join(&file)).unwrap();
        assert_eq!(fresh, shipped, "{file} is stale");
        assert_eq!(load_spec_file(dir.path().join(&file)).unwrap(), spec);
    }
}

#[test]
fn random_spec_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("r.spec");
    let out = osculant(&[
        "random",
        "--n",
        "2",
        "--m",
        "6",
        "--degree",
        "3",
        "--seed",
        "4",
        "--out",
        p.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let spec = load_spec_file(&p).unwrap();
    assert_eq!(spec.immersion.name(), "random_n2_m6_d3_s4");
    let out = osculant(&["analyze", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let out = osculant(&["random", "--n", "3", "--m", "2"]);
    assert_eq!(out.status.code(), Some(1));
}
