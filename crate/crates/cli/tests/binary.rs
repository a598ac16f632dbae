use std::process::Command;

fn pfluid() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pfluid"))
}

#[test]
fn config_error_exits_with_2_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"command": "simulate", "model": {"p": 2.5, "delta": 0}}"#).unwrap();
    let out = pfluid().arg("--config").arg(&cfg).arg("--output").arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(v["error"], "config");
    assert!(v["message"].as_str().unwrap().contains("p must lie in (1,2]"));
}

#[test]
fn bochner_check_runs_and_seed_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("b.json");
    std::fs::write(&cfg, r#"{"command": "bochner-check", "discretization": {"T": 2.0}}"#).unwrap();
    let out_dir = dir.path().join("out");
    let out = pfluid()
        .args(["--threads", "2", "--seed", "7", "--config"])
        .arg(&cfg)
        .arg("--output")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("bochner-check"));
    let resolved: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("config.json")).unwrap()).unwrap();
    assert_eq!(resolved["seed"], 7);
}
