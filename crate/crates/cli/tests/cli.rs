use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn job(name: &str) -> PathBuf {
    root().join("jobs").join(name)
}

fn opkit(args: &[&str], job: &Path, env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_opkit"));
    cmd.args(args)
        .arg("--job")
        .arg(job)
        .env_remove("OPKIT_TERM_CAP");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("opkit runs")
}

fn run_ok(args: &[&str], job: &Path) -> (String, Value) {
    let out = opkit(args, job, &[]);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let value = serde_json::from_str(&stdout).unwrap_or(Value::Null);
    (stdout, value)
}

fn temp_job(name: &str, body: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("jobs");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn sets(v: &Value) -> Vec<Vec<u64>> {
    serde_json::from_value(v.clone()).unwrap()
}

/// Compares against `tests/golden/<name>`; `OPKIT_BLESS=1` rewrites it.
fn check_golden(name: &str, actual: &str) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name);
    if std::env::var_os("OPKIT_BLESS").is_some() {
        std::fs::write(&path, actual).unwrap();
    }
    let expected = std::fs::read_to_string(&path)
        .unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
    assert_eq!(actual, expected, "output differs from {}", path.display());
}

#[test]
fn worked_example_plan_is_golden() {
    let (text, v) = run_ok(&["plan"], &job("worked_example.json"));
    assert_eq!(sets(&v["components"]), vec![vec![0], vec![1, 2, 3]]);
    assert_eq!(
        sets(&v["beta_min"]),
        vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2, 3]]
    );
    assert_eq!(
        sets(&v["alpha"]),
        vec![vec![0], vec![1, 2], vec![1, 3], vec![2, 3]]
    );
    assert_eq!(v["decomposition_available"], true);
    check_golden("worked_plan.json", &text);
}

#[test]
fn worked_example_certify_is_golden() {
    let (text, v) = run_ok(&["certify"], &job("worked_example.json"));
    assert_eq!(v["all_verified"], true);
    assert_eq!(v["dual_certificate"]["verified"], true);
    assert_eq!(v["alpha_certificate"]["verified"], true);
    assert_eq!(v["alpha_certificate"]["residual"], "0");
    assert_eq!(
        sets(&v["alpha_certificate"]["alpha"]),
        vec![vec![0], vec![1, 2], vec![1, 3], vec![2, 3]]
    );
    assert_eq!(v["true_decomposition"]["verified"], true);
    check_golden("worked_certify.json", &text);
}

#[test]
fn worked_example_reduce_is_golden() {
    let (text, v) = run_ok(&["reduce"], &job("worked_example.json"));
    let orders: Vec<u64> = v["reduction"]["subproblems"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["order"].as_u64().unwrap())
        .collect();
    assert_eq!(orders, vec![1, 3, 4, 3]);
    let inst = &v["instance"];
    assert_eq!(inst["dimension"], 28);
    assert_eq!(inst["f_in_range"], true);
    assert_eq!(inst["agrees"], true);
    check_golden("worked_reduce.json", &text);
}

#[test]
fn output_is_byte_stable_across_runs() {
    for mode in ["plan", "certify", "reduce"] {
        let (a, _) = run_ok(&[mode], &job("worked_example.json"));
        let (b, _) = run_ok(&[mode], &job("worked_example.json"));
        assert_eq!(a, b, "{mode} output changed between runs");
    }
}

#[test]
fn printed_identities_verify() {
    let (_, v) = run_ok(&["verify"], &job("worked_certificates.json"));
    assert_eq!(v["source"], "supplied");
    assert_eq!(v["checks"].as_array().unwrap().len(), 4);
    assert_eq!(v["all_hold"], true);
}

#[test]
fn human_rendering_mentions_the_subproblems() {
    let out = opkit(&["reduce", "--human"], &job("worked_example.json"), &[]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("P_{1,3} u_{1,3} = f"));
    assert!(text.contains("solution sets agree: true"));
}

#[test]
fn every_order_gives_the_same_plan() {
    for order in ["lex", "grlex", "grevlex"] {
        let (_, v) = run_ok(&["plan", "--order", order], &job("worked_example.json"));
        assert_eq!(v["order"], order);
        assert_eq!(
            sets(&v["alpha"]),
            vec![vec![0], vec![1, 2], vec![1, 3], vec![2, 3]]
        );
    }
}

#[test]
fn seed_changes_random_data_only() {
    let (_, a) = run_ok(&["reduce", "--seed", "1"], &job("worked_example.json"));
    let (_, b) = run_ok(&["reduce", "--seed", "2"], &job("worked_example.json"));
    assert_ne!(a["instance"]["f"], b["instance"]["f"]);
    assert_eq!(a["reduction"], b["reduction"]);
    assert_eq!(b["instance"]["agrees"], true);
}

#[test]
fn single_factor_has_no_decomposition() {
    let path = temp_job("single.json", r#"{"variables": ["x"], "factors": ["x"]}"#);
    let (_, v) = run_ok(&["plan"], &path);
    assert!(sets(&v["beta_min"]).is_empty());
    assert_eq!(v["decomposition_available"], false);
    assert!(v["note"]
        .as_str()
        .unwrap()
        .starts_with("no decomposition available"));
}

#[test]
fn coprime_pair_gives_true_decomposition() {
    let path = temp_job(
        "pair.json",
        r#"{"variables": ["x"], "factors": ["x", "x+1"]}"#,
    );
    let (_, v) = run_ok(&["certify"], &path);
    assert_eq!(
        sets(&v["alpha_certificate"]["alpha"]),
        vec![vec![0], vec![1]]
    );
    assert_eq!(v["all_verified"], true);
}

#[test]
fn univariate_job_reports_closed_form_coefficients() {
    let (_, v) = run_ok(&["certify"], &job("univariate.json"));
    // λ = (1, 2, -1/2): α_i = Π_{j≠i} 1/(λ_j − λ_i)
    assert_eq!(
        v["univariate_coefficients"],
        serde_json::json!(["-2/3", "2/5", "4/15"])
    );
    let (_, r) = run_ok(&["reduce"], &job("univariate.json"));
    assert_eq!(r["instance"]["agrees"], true);
    let (_, c) = run_ok(&["verify"], &job("univariate.json"));
    assert_eq!(c["all_hold"], true);
}

#[test]
fn zero_data_reports_homogeneous_structure() {
    let path = temp_job(
        "zero.json",
        r#"{"lambdas": ["0", "1"], "instance": {"matrices": [[["0","0"],["0","-1"]]]}, "f": "zero"}"#,
    );
    let (_, v) = run_ok(&["reduce"], &path);
    assert_eq!(v["instance"]["kernel_structure"]["kernel_dimension"], 2);
    assert_eq!(v["instance"]["direct"]["dimension"], 2);
}

#[test]
fn out_of_range_data_is_reported() {
    let path = temp_job(
        "outside.json",
        r#"{"lambdas": ["0"], "instance": {"matrices": [[["0","1"],["0","0"]]]}, "f": ["0", "1"]}"#,
    );
    let (_, v) = run_ok(&["reduce"], &path);
    assert_eq!(v["instance"]["f_in_range"], false);
    assert_eq!(v["instance"]["direct"]["empty"], true);
}

#[test]
fn symmetry_job_decomposes_and_rebuilds() {
    let (_, v) = run_ok(&["symmetry"], &job("symmetry.json"));
    let syms = v["symmetries"].as_array().unwrap();
    assert_eq!(syms[0]["formal"], true);
    assert_eq!(syms[1]["formal"], true);
    assert_eq!(syms[2]["formal"], false);
    assert_eq!(v["generation"]["holds"], true);
    assert_eq!(v["all_verified"], true);
}

#[test]
fn system_job_splits_consistent_data() {
    let (_, v) = run_ok(&["system"], &job("system.json"));
    assert_eq!(v["certificate"]["verified"], true);
    assert_eq!(v["instance"]["integrable"], true);
    assert_eq!(v["instance"]["agrees"], true);
}

#[test]
fn inconsistent_system_data_exits_4() {
    let body = std::fs::read_to_string(job("system.json")).unwrap();
    let mut v: Value = serde_json::from_str(&body).unwrap();
    v["f"] = serde_json::json!(["0", "0", "0", "0"]);
    v["g"] = serde_json::json!([["0", "1", "0", "0"]]);
    let path = temp_job("bad_system.json", &v.to_string());
    let out = opkit(&["system"], &path, &[]);
    assert_eq!(out.status.code(), Some(4));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["instance"]["integrable"], false);
}

#[test]
fn syntax_error_exits_2() {
    let path = temp_job(
        "syntax.json",
        r#"{"variables": ["x"], "factors": ["x+*1"]}"#,
    );
    let out = opkit(&["plan"], &path, &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("syntax error"));
}

#[test]
fn malformed_job_exits_2() {
    let path = temp_job(
        "malformed.json",
        r#"{"variables": ["x"], "factorz": ["x"]}"#,
    );
    assert_eq!(opkit(&["plan"], &path, &[]).status.code(), Some(2));
    assert_eq!(
        opkit(&["plan"], &job("missing.json"), &[]).status.code(),
        Some(2)
    );
}

#[test]
fn term_cap_exits_3() {
    let out = opkit(
        &["certify"],
        &job("worked_example.json"),
        &[("OPKIT_TERM_CAP", "2")],
    );
    assert_eq!(
        out.status.code(),
        Some(3),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let bad = opkit(
        &["plan"],
        &job("worked_example.json"),
        &[("OPKIT_TERM_CAP", "lots")],
    );
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn wrong_certificate_exits_4() {
    let path = temp_job(
        "wrong.json",
        r#"{"variables": ["x"], "factors": ["x", "x+1"],
            "certificates": {"alpha": [{"set": [0], "cofactor": "1"}, {"set": [1], "cofactor": "1"}]}}"#,
    );
    let out = opkit(&["verify"], &path, &[]);
    assert_eq!(out.status.code(), Some(4));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["all_hold"], false);
}
