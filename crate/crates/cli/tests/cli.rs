use serde_json::Value;
use std::process::{Command, Output};

fn dworklab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dworklab"))
        .args(args)
        .output()
        .expect("spawn dworklab")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

const TRIANGLE: &str = r#"{"n":2,"terms":[{"e":[0,0],"c":1},{"e":[1,0],"c":1},{"e":[0,1],"c":1}]}"#;

#[test]
fn quintic_instanton_table() {
    let out = dworklab(&["cy", "instanton", "--family", "quintic", "--degree", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    let table = v["instantons"].as_array().unwrap();
    assert_eq!(table.len(), 10);
    assert_eq!(table[0]["kappa_Nd"], "2875");
    assert_eq!(table[1]["kappa_Nd"], "609250");
    assert_eq!(v["yukawa"][1], "575");
}

#[test]
fn hw_simplicial_is_a_t_polynomial() {
    let out = dworklab(&[
        "hw",
        "--preset",
        "simplicial",
        "--dim",
        "2",
        "--prime",
        "5",
        "--mu",
        "interior",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["hw_condition"], true);
    assert_eq!(v["hw"]["index"].as_array().unwrap().len(), 1);
    // (1 − tg)^4 has constant term 1 − 24t³
    assert_eq!(
        v["hw"]["entries"][0][0],
        serde_json::json!(["1", "0", "0", "1", "0"])
    );
}

#[test]
fn verify_gauss_inline_triangle() {
    let out = dworklab(&[
        "verify", "gauss", "--poly", TRIANGLE, "--primes", "3,5,7", "--bound", "30",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = json_of(&out);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["pass"], true);
    assert!(v.get("elapsed_ms").is_none());
}

#[test]
fn gauss_hypothesis_violation_is_usage_error() {
    // 1+x+y+x²: a non-vertex lattice point on the boundary
    let bad = r#"{"n":2,"terms":[{"e":[0,0],"c":1},{"e":[1,0],"c":1},{"e":[0,1],"c":1},{"e":[2,0],"c":1}]}"#;
    let out = dworklab(&["verify", "gauss", "--poly", bad, "--primes", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(!out.stderr.is_empty());
}

#[test]
fn failed_hw_condition_exits_one() {
    // x+y+1/(xy) has zero constant term: supersingular at p = 5
    let f = r#"{"n":2,"terms":[{"e":[1,0],"c":1},{"e":[0,1],"c":1},{"e":[-1,-1],"c":1}]}"#;
    let out = dworklab(&["hw", "--poly", f, "--prime", "5"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json_of(&out)["hw_condition"], false);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(dworklab(&["verify", "nonsense"]).status.code(), Some(2));
    assert_eq!(dworklab(&["hw", "--prime", "5"]).status.code(), Some(2));
    assert_eq!(dworklab(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        dworklab(&["hw", "--preset", "simplicial", "--prime", "4"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn budget_env_var_is_enforced() {
    let out = Command::new(env!("CARGO_BIN_EXE_dworklab"))
        .args(["hw", "--preset", "simplicial", "--dim", "3", "--prime", "7"])
        .env("DWORKLAB_BUDGET_MB", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));
}

#[test]
fn reports_are_byte_identical() {
    let args = ["verify", "routes", "--samples", "4", "--seed", "9"];
    let a = dworklab(&args);
    let b = dworklab(&[
        "--sequential",
        "verify",
        "routes",
        "--samples",
        "4",
        "--seed",
        "9",
    ]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn job_file_round_trip() {
    let dir = std::env::temp_dir().join(format!("dworklab-job-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("job.json");
    std::fs::write(
        &path,
        r#"{"schema":1,"suite":"super","primes":[3],"max_steps":1}"#,
    )
    .unwrap();
    let out = dworklab(&["verify", "super", "--job", path.to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = json_of(&out);
    assert_eq!(v["grid"]["primes"], serde_json::json!([3]));
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn elliptic_trace_and_gamma() {
    let out = dworklab(&["zeta-count", "--curve", "-1,0", "--prime", "5"]);
    let v = json_of(&out);
    assert_eq!(v["a_p"], -2);
    assert_eq!(v["points"], 8);
    let out = dworklab(&["gamma-p", "--x", "0", "--prime", "7", "--precision", "2"]);
    assert_eq!(json_of(&out)["value"], "1");
}

#[test]
fn crosscheck_and_lambda() {
    let f = r#"{"n":2,"terms":[{"e":[1,0],"c":1},{"e":[0,1],"c":1},{"e":[-1,-1],"c":1},{"e":[0,0],"c":3}]}"#;
    let out = dworklab(&["crosscheck", "--poly", f, "--prime", "5", "--steps", "2"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let out = dworklab(&[
        "lambda",
        "--preset",
        "simplicial",
        "--dim",
        "2",
        "--prime",
        "5",
        "--steps",
        "2",
        "--t-order",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["lambda"]["mod"], "5^2");
}

#[test]
fn pretty_format_parses() {
    let out = dworklab(&["--format", "pretty", "cy", "mirror", "--t-order", "4"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains('\n'));
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["q"][2], "770");
}
