//! End-to-end tests of the `mumw` binary: argument handling, exit codes,
//! JSON output shapes, and determinism of repeated runs.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mumw"))
}

/// Scratch directory, removed on drop; commands run inside it so default
/// output files never land in the repository.
struct TestDir(PathBuf);

impl TestDir {
    fn new(name: &str) -> Self {
        let dir = std::env::temp_dir().join(format!("mumw-cli-{name}-{}", std::process::id()));
        let _ = std::fs::remove_dir_all(&dir);
        std::fs::create_dir_all(&dir).expect("create scratch dir");
        TestDir(dir)
    }

    fn path(&self) -> &Path {
        &self.0
    }
}

impl Drop for TestDir {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.0);
    }
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin()
        .current_dir(dir)
        .env_remove("MUMW_PROFILE")
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr_str(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn assert_success(out: &Output) {
    assert!(
        out.status.success(),
        "expected success, got {:?}\nstderr: {}",
        out.status.code(),
        stderr_str(out)
    );
}

fn assert_failure(out: &Output) {
    assert!(
        !out.status.success(),
        "expected failure, got success\nstdout: {}",
        stdout_str(out)
    );
}

fn bundled_fixture_dir() -> PathBuf {
    PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../mumw/fixtures"))
}

#[test]
fn mum_build_smoke_writes_default_file() {
    let dir = TestDir::new("build-smoke");
    let out = run_in(dir.path(), &["mum", "build", "-d", "4"]);
    assert_success(&out);
    let text = stdout_str(&out);
    assert!(text.contains("L = 5"), "five POVMs for d = 4: {text}");
    assert!(text.contains("kappa"), "kappa printed: {text}");
    let written = dir.path().join("mum-d4.json");
    assert!(written.is_file(), "default output file written");
    let parsed: Value = serde_json::from_str(&std::fs::read_to_string(written).unwrap()).unwrap();
    assert_eq!(parsed["d"], 4);
    assert_eq!(parsed["L"], 5);
}

#[test]
fn mum_build_hits_target_kappa() {
    let dir = TestDir::new("build-kappa");
    let out = run_in(
        dir.path(),
        &[
            "mum", "build", "-d", "3", "--scheme", "paper-d3", "--t", "0.04066", "--output",
            "m.json",
        ],
    );
    assert_success(&out);
    let text = stdout_str(&out);
    let kappa: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("kappa = "))
        .expect("kappa line")
        .trim()
        .parse()
        .unwrap();
    assert!((kappa - 0.358).abs() < 5e-5, "kappa = {kappa}");
}

#[test]
fn mum_build_rejects_infeasible_t() {
    let dir = TestDir::new("build-infeasible");
    let out = run_in(dir.path(), &["mum", "build", "-d", "3", "--t", "0.2"]);
    assert_failure(&out);
    assert!(
        stderr_str(&out).contains("0.122"),
        "diagnostic names the boundary: {}",
        stderr_str(&out)
    );
}

#[test]
fn witness_build_rejects_wrong_angle_count() {
    let dir = TestDir::new("witness-angles");
    let out = run_in(
        dir.path(),
        &[
            "witness",
            "build",
            "--fixture",
            "mum-d3",
            "--angles",
            "0,0,0",
        ],
    );
    assert_failure(&out);
    assert!(
        stderr_str(&out).contains("expected 4"),
        "angle-count diagnostic: {}",
        stderr_str(&out)
    );
}

#[test]
fn eval_rotated_family_detects_bundled_state() {
    let dir = TestDir::new("eval-detect");
    let out = run_in(
        dir.path(),
        &[
            "eval",
            "--mum",
            "mum-d3-exact",
            "--state",
            "rho-3x3",
            "--angles",
            "pi/3,pi/3,0,0",
        ],
    );
    assert_success(&out);
    let report: Value = serde_json::from_str(stdout_str(&out).trim()).unwrap();
    assert_eq!(report["criterion"], "witness");
    assert_eq!(report["detected"], true);
    let value = report["value"].as_f64().unwrap();
    assert!(
        (value + 0.001_782_685_459_489_150_3).abs() < 1e-12,
        "value = {value}"
    );
}

#[test]
fn eval_round_trips_witness_through_file() {
    let dir = TestDir::new("eval-file");
    let out = run_in(
        dir.path(),
        &[
            "witness",
            "build",
            "--fixture",
            "mum-d3-exact",
            "--angles",
            "pi/3,pi/3,0,0",
            "--output",
            "w.json",
        ],
    );
    assert_success(&out);

    let direct = run_in(
        dir.path(),
        &[
            "eval",
            "--mum",
            "mum-d3-exact",
            "--state",
            "rho-3x3",
            "--angles",
            "pi/3,pi/3,0,0",
        ],
    );
    let via_file = run_in(
        dir.path(),
        &["eval", "--witness", "w.json", "--state", "rho-3x3"],
    );
    assert_success(&via_file);
    let a: Value = serde_json::from_str(stdout_str(&direct).trim()).unwrap();
    let b: Value = serde_json::from_str(stdout_str(&via_file).trim()).unwrap();
    assert_eq!(
        a["value"], b["value"],
        "file round trip preserves the value bitwise"
    );
}

#[test]
fn eval_maximally_mixed_is_never_detected() {
    let dir = TestDir::new("eval-mixed");
    let out = run_in(
        dir.path(),
        &[
            "eval",
            "--mum",
            "mum-d3-exact",
            "--state",
            "mixed-9",
            "--angles",
            "pi/3,pi/3,0,0",
        ],
    );
    assert_success(&out);
    let report: Value = serde_json::from_str(stdout_str(&out).trim()).unwrap();
    assert_eq!(report["detected"], false);
    assert!(report["value"].as_f64().unwrap() > 0.0);
}

#[test]
fn angle_parser_treats_equal_fractions_identically() {
    let dir = TestDir::new("angles");
    let a = run_in(
        dir.path(),
        &[
            "eval",
            "--mum",
            "mum-d3-exact",
            "--state",
            "rho-3x3",
            "--angles",
            "pi/3,pi/3,0,0",
        ],
    );
    let b = run_in(
        dir.path(),
        &[
            "eval",
            "--mum",
            "mum-d3-exact",
            "--state",
            "rho-3x3",
            "--angles",
            "2pi/6, pi/3, 0.0, -0pi",
        ],
    );
    assert_success(&a);
    assert_success(&b);
    let ja: Value = serde_json::from_str(stdout_str(&a).trim()).unwrap();
    let jb: Value = serde_json::from_str(stdout_str(&b).trim()).unwrap();
    assert_eq!(ja["value"], jb["value"]);
}

#[test]
fn compare_runs_all_three_criteria() {
    let dir = TestDir::new("compare");
    let out = run_in(
        dir.path(),
        &[
            "compare",
            "--fixture",
            "mum-d3-exact",
            "--state",
            "rho-3x3",
            "--angles",
            "pi/3,pi/3,0,0",
            "--normalize",
            "--json",
        ],
    );
    assert_success(&out);
    let reports: Value = serde_json::from_str(stdout_str(&out).trim()).unwrap();
    let arr = reports.as_array().unwrap();
    let names: Vec<&str> = arr
        .iter()
        .map(|r| r["criterion"].as_str().unwrap())
        .collect();
    assert_eq!(names, ["witness", "j-index", "coincidence"]);
    assert_eq!(arr[0]["detected"], true, "witness detects");
    assert_eq!(
        arr[1]["detected"], false,
        "index criterion misses this state"
    );
    assert_eq!(
        arr[2]["detected"], false,
        "coincidence criterion misses this state"
    );
}

#[test]
fn scan_isotropic_locates_the_quarter_crossing() {
    let dir = TestDir::new("scan-iso");
    let out = run_in(
        dir.path(),
        &["scan", "isotropic", "-d", "3", "--kappa", "0.358", "--json"],
    );
    assert_success(&out);
    let scan: Value = serde_json::from_str(stdout_str(&out).trim()).unwrap();
    let estimate = scan["crossing_estimate"].as_f64().unwrap();
    assert!((estimate - 0.25).abs() < 1e-6, "estimate = {estimate}");
    assert_eq!(scan["closed_form_crossing"].as_f64().unwrap(), 0.25);
    assert_eq!(scan["rows"].as_array().unwrap().len(), 101);
}

#[test]
fn scan_isotropic_grid_below_threshold_has_no_detections() {
    let dir = TestDir::new("scan-iso-low");
    let out = run_in(
        dir.path(),
        &[
            "scan",
            "isotropic",
            "-d",
            "3",
            "--alpha-max",
            "0.2",
            "--json",
        ],
    );
    assert_success(&out);
    let scan: Value = serde_json::from_str(stdout_str(&out).trim()).unwrap();
    assert!(scan["crossing_estimate"].is_null());
    assert!(scan["rows"]
        .as_array()
        .unwrap()
        .iter()
        .all(|r| r["detected"] == false));
}

#[test]
fn scan_product_reports_block_positivity() {
    let dir = TestDir::new("scan-product");
    let out = run_in(
        dir.path(),
        &[
            "scan",
            "product",
            "--fixture",
            "mum-d3-exact",
            "--angles",
            "pi/3,pi/3,0,0",
            "--samples",
            "300",
            "--seed",
            "31",
            "--json",
        ],
    );
    assert_success(&out);
    let report: Value = serde_json::from_str(stdout_str(&out).trim()).unwrap();
    assert!(report["min_product_value"].as_f64().unwrap() > -1e-6);
    assert!(report["global_min_eigenvalue"].as_f64().unwrap() < 0.0);
}

#[test]
fn repro_passes_and_is_byte_deterministic() {
    let dir = TestDir::new("repro");
    let first = run_in(dir.path(), &["repro", "--json"]);
    let second = run_in(dir.path(), &["repro", "--json"]);
    assert_success(&first);
    assert_success(&second);
    assert_eq!(first.stdout, second.stdout, "repeated runs byte-identical");

    let rows: Value = serde_json::from_str(stdout_str(&first).trim()).unwrap();
    let arr = rows.as_array().unwrap();
    assert!(arr.len() >= 12, "row count = {}", arr.len());
    for row in arr {
        assert_eq!(
            row["pass"], true,
            "row failed: {} (computed {:?})",
            row["label"], row["computed_value"]
        );
    }
}

#[test]
fn repro_fails_on_corrupted_fixture_copy() {
    let dir = TestDir::new("repro-corrupt");
    let fx = dir.path().join("fx");
    std::fs::create_dir_all(&fx).unwrap();
    for entry in std::fs::read_dir(bundled_fixture_dir()).unwrap() {
        let entry = entry.unwrap();
        std::fs::copy(entry.path(), fx.join(entry.file_name())).unwrap();
    }

    let clean = run_in(dir.path(), &["repro", "--fixture-dir", "fx"]);
    assert_success(&clean);

    let target = fx.join("rho_3x3.json");
    let mut state: Value =
        serde_json::from_str(&std::fs::read_to_string(&target).unwrap()).unwrap();
    state["re"][0][0] = Value::from(0.9);
    std::fs::write(&target, serde_json::to_string(&state).unwrap()).unwrap();

    let out = run_in(dir.path(), &["repro", "--fixture-dir", "fx"]);
    assert_failure(&out);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout_str(&out).contains("[FAIL]"), "failing rows flagged");
}

#[test]
fn mum_check_rejects_tampered_family_file() {
    let dir = TestDir::new("check-tamper");
    let build = run_in(
        dir.path(),
        &["mum", "build", "-d", "3", "--output", "m.json"],
    );
    assert_success(&build);

    let ok = run_in(dir.path(), &["mum", "check", "m.json"]);
    assert_success(&ok);

    let target = dir.path().join("m.json");
    let mut mum: Value = serde_json::from_str(&std::fs::read_to_string(&target).unwrap()).unwrap();
    let entry = mum["elements"][0]["matrix"]["re"][0][0].as_f64().unwrap();
    mum["elements"][0]["matrix"]["re"][0][0] = Value::from(entry + 0.05);
    std::fs::write(&target, serde_json::to_string(&mum).unwrap()).unwrap();

    let bad = run_in(dir.path(), &["mum", "check", "m.json"]);
    assert_failure(&bad);
}

#[test]
fn profile_env_admits_print_precision_state() {
    let dir = TestDir::new("profile");
    // Unit-trace up to 5e-3: strict validation rejects, fixture admits.
    let mut re = vec![vec![0.0; 9]; 9];
    for (k, row) in re.iter_mut().enumerate() {
        row[k] = if k == 0 { 0.125 } else { 0.11 };
    }
    let state = serde_json::json!({ "dim": 9, "re": re, "im": vec![vec![0.0; 9]; 9] });
    std::fs::write(
        dir.path().join("s.json"),
        serde_json::to_string(&state).unwrap(),
    )
    .unwrap();

    let strict = run_in(
        dir.path(),
        &[
            "eval",
            "--mum",
            "mum-d3-exact",
            "--state",
            "s.json",
            "--angles",
            "pi/3,pi/3,0,0",
        ],
    );
    assert_failure(&strict);
    assert!(
        stderr_str(&strict).contains("trace"),
        "{}",
        stderr_str(&strict)
    );

    let fixture = bin()
        .current_dir(dir.path())
        .env("MUMW_PROFILE", "fixture")
        .args([
            "eval",
            "--mum",
            "mum-d3-exact",
            "--state",
            "s.json",
            "--angles",
            "pi/3,pi/3,0,0",
        ])
        .output()
        .expect("binary runs");
    assert_success(&fixture);

    let nonsense = bin()
        .current_dir(dir.path())
        .env("MUMW_PROFILE", "lenient")
        .args([
            "eval",
            "--mum",
            "mum-d3-exact",
            "--state",
            "s.json",
            "--angles",
            "pi/3,pi/3,0,0",
        ])
        .output()
        .expect("binary runs");
    assert_failure(&nonsense);
    assert!(stderr_str(&nonsense).contains("MUMW_PROFILE"));
}
