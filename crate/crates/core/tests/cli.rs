use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn hyplab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyplab"))
        .args(args)
        .env_remove("HYPLAB_KG")
        .output()
        .unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hyplab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn convolve_prints_exact_terms() {
    let o = hyplab(&["--hypergroup", "conj:s3", "convolve", "--x", "T", "--y", "T"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["command"], "convolve");
    let text = v["result"].to_string();
    assert!(text.contains("\"1\"") && text.contains("\"3\""), "{text}");
}

#[test]
fn bad_spec_exits_two_with_error_object() {
    let o = hyplab(&["--hypergroup", "nope", "check-axioms"]);
    assert_eq!(o.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert!(err["error"]["kind"].is_string() && err["error"]["message"].is_string());
}

#[test]
fn unavailable_route_exits_one() {
    let o = hyplab(&[
        "--hypergroup",
        "chebyshev",
        "--weight",
        "poly:beta=1",
        "norm-bound",
        "--route",
        "polynomial",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn failed_check_exits_one() {
    let o = hyplab(&[
        "--hypergroup",
        "conj:s3",
        "--weight",
        "table:e=1,T=2,R=5",
        "weight-check",
        "--property",
        "central",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["passed"], false);
}

#[test]
fn config_precedence() {
    let cfg = scratch("config.json");
    std::fs::write(
        &cfg,
        r#"{"hypergroup": "chebyshev", "weight": "poly:beta=1", "K_G": 2.0, "truncation": 300}"#,
    )
    .unwrap();
    let cfg = cfg.to_str().unwrap();
    let from_file = json(&hyplab(&["--config", cfg, "norm-bound"]));
    assert_eq!(from_file["config"]["K_G"], 2.0);
    assert_eq!(from_file["truncation"], 300);

    let flag = json(&hyplab(&["--config", cfg, "--kg", "1.5", "norm-bound"]));
    assert_eq!(flag["config"]["K_G"], 1.5);

    let env = Command::new(env!("CARGO_BIN_EXE_hyplab"))
        .args(["--config", cfg, "norm-bound"])
        .env("HYPLAB_KG", "1.25")
        .output()
        .unwrap();
    assert_eq!(json(&env)["config"]["K_G"], 1.25);

    let a = from_file["result"]["value"].as_f64().unwrap();
    let b = flag["result"]["value"].as_f64().unwrap();
    assert!((a / b - 2.0 / 1.5).abs() < 1e-12);
}

#[test]
fn unknown_config_key_is_rejected() {
    let cfg = scratch("bad.json");
    std::fs::write(&cfg, r#"{"hypergroup": "chebyshev", "grothendieck": 2.0}"#).unwrap();
    assert_eq!(
        hyplab(&["--config", cfg.to_str().unwrap(), "check-axioms"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn omega_table_csv() {
    let csv = scratch("omega.csv");
    let o = hyplab(&[
        "--hypergroup",
        "chebyshev",
        "--weight",
        "poly:beta=1",
        "-N",
        "4",
        "--csv",
        csv.to_str().unwrap(),
        "omega-table",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let mut rdr = csv::Reader::from_path(&csv).unwrap();
    assert_eq!(
        rdr.headers().unwrap().iter().collect::<Vec<_>>(),
        ["x", "y", "omega", "exact_value"]
    );
    assert_eq!(rdr.records().count(), 16);
}

#[test]
fn classify_reports_are_identical_across_runs() {
    let args = [
        "--hypergroup",
        "rdp:conj:s3",
        "--weight",
        "product:table:e=1,T=2,R=5",
        "-N",
        "60",
        "classify",
    ];
    let (a, b) = (hyplab(&args), hyplab(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["verdicts"]["arens_regular"]["tier"], "WITNESSED-NO");
}

#[test]
fn out_file_matches_stdout() {
    let path = scratch("growth.json");
    let args = ["--hypergroup", "su2hat", "-N", "50", "growth"];
    let stdout = hyplab(&args).stdout;
    let mut with_out = args.to_vec();
    with_out.splice(0..0, ["--out", path.to_str().unwrap()]);
    assert_eq!(hyplab(&with_out).status.code(), Some(0));
    let file: Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(file, serde_json::from_slice::<Value>(&stdout).unwrap());
}

#[test]
fn help_exits_zero() {
    let o = hyplab(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("classify"));
}
