use std::process::Command;

fn ksr(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_ksr")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn exit_codes() {
    assert_eq!(ksr(&["bounds"]).0, 0);
    assert_eq!(ksr(&["mu", "--d", "2", "--m", "4", "--k", "2", "--eps", "0.5"]).0, 0);
    assert_eq!(ksr(&["pave", "--k", "1", "--r", "2", "--d", "2", "--m", "8", "--eps", "0.25"]).0, 0);
    // Outside the hypothesis the bound is not applicable.
    assert_eq!(ksr(&["mu", "--d", "3", "--m", "3", "--k", "2", "--eps", "1.0"]).0, 2);
    assert_eq!(ksr(&["pave", "--k", "1", "--r", "2", "--d", "2", "--m", "4", "--eps", "0.5"]).0, 2);
    assert_eq!(ksr(&["psi", "--k", "0", "--m", "3"]).0, 3);
    assert_eq!(ksr(&["mu", "--input", "/definitely/missing.json"]).0, 3);
}

#[test]
fn generated_instance_round_trips() {
    let dir = std::env::temp_dir().join(format!("ksr-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("inst.json");
    let p = path.to_str().unwrap();
    assert_eq!(ksr(&["gen", "--d", "2", "--m", "4", "--k", "2", "--eps", "0.5", "--seed", "3", "--out", p]).0, 0);
    let (code, text) = ksr(&["oracle-check", "--input", p]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["mu_routes_agree"], true);
    assert_eq!(v["psi_oracle_agrees"], true);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn same_seed_same_instance() {
    let args = ["gen", "--d", "3", "--m", "6", "--k", "2", "--eps", "0.5", "--seed", "11"];
    assert_eq!(ksr(&args).1, ksr(&args).1);
}
