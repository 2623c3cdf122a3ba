use std::process::{Command, Output};

fn qplasma(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qplasma"))
        .args(args)
        .env("QPLASMA_THREADS", "2")
        .output()
        .expect("run qplasma")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn eval_prints_csv_with_all_components() {
    let o = qplasma(&["eval", "--x", "0.1", "--y", "0.01", "--q", "0.5"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,y,q,model,re,im"));
    let models: Vec<&str> = lines.map(|l| l.split(',').nth(3).unwrap()).collect();
    assert_eq!(
        models,
        [
            "classic",
            "sigma1",
            "sigma2",
            "full",
            "lindhard",
            "difference"
        ]
    );
    // 17 significant digits.
    let full = text.lines().find(|l| l.contains(",full,")).unwrap();
    assert!(
        full.ends_with("3.1438431583693416e-2,1.0801073144816004e-2"),
        "{full}"
    );
}

#[test]
fn eval_with_alpha_adds_degenerate_model() {
    let o = qplasma(&[
        "eval", "--x", "0.1", "--y", "0.01", "--q", "0.5", "--alpha", "-20", "--model", "full",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains(",degenerate(-20),"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn eval_rejects_invalid_point() {
    let o = qplasma(&["eval", "--x", "0.1", "--y", "0", "--q", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("invalid parameter"));
}

#[test]
fn sweep_json_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let o = qplasma(&[
        "sweep",
        "--axis",
        "x",
        "--min",
        "1",
        "--max",
        "25",
        "--n",
        "5",
        "--y",
        "0.01",
        "--q",
        "2",
        "--models",
        "full,lindhard",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 10);
    assert_eq!(rows[0]["model"], "full");
    assert!(rows
        .iter()
        .all(|r| r["re"].is_number() && r["im"].is_number()));
}

#[test]
fn sweep_rejects_bad_range() {
    let o = qplasma(&[
        "sweep", "--axis", "q", "--min", "1", "--max", "0.1", "--n", "5",
    ]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("start < stop"));
}

#[test]
fn limits_prints_k0_and_coefficients() {
    let o = qplasma(&["limits", "--x", "0.1", "--y", "0.01", "--terms", "4"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let keys: Vec<&str> = text.lines().map(|l| l.split(' ').next().unwrap()).collect();
    assert_eq!(keys, ["k0", "C0", "C2", "C4", "C6"]);
    assert!(text.starts_with("k0 9.9009900990099011e-3 9.9009900990099015e-2"));
}

#[test]
fn verify_flags_doubled_pole_pair_coefficient() {
    let o = qplasma(&["verify", "--sigma2-coefficient", "1"]);
    assert!(!o.status.success());
    let text = stdout(&o);
    let line = |name: &str| text.lines().find(|l| l.contains(name)).unwrap().to_string();
    assert!(line("difference identity").starts_with("PASS"));
    assert!(line("sigma2 vs 3-D quantum term").starts_with("FAIL"));
}

#[test]
fn verify_writes_log() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("verify.log");
    let o = qplasma(&["verify", "--log", path.to_str().unwrap()]);
    let log = std::fs::read_to_string(&path).unwrap();
    assert_eq!(log.trim_end(), stdout(&o).trim_end());
    assert!(log.contains("PASS reduction: closed form vs 3-D brute force"));
    // Exit status mirrors the report.
    assert_eq!(o.status.success(), !log.contains("overall FAIL"));
}
