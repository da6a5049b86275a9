use caq_core::device::DeviceModel;
use std::path::Path;
use std::process::{Command, Output};

fn caq(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_caq")).args(args).current_dir(dir).output().expect("run caq")
}

fn setup() -> tempfile::TempDir {
    let d = tempfile::tempdir().unwrap();
    std::fs::write(d.path().join("dev.json"), DeviceModel::line(3, 5e4).to_json().unwrap()).unwrap();
    std::fs::write(
        d.path().join("c.json"),
        r#"{"num_qubits": 3, "instructions": [
            {"name": "sx", "qubits": [0]},
            {"name": "ecr", "qubits": [1, 2]},
            {"name": "rz", "qubits": [1], "params": [0.3]},
            {"name": "cx", "qubits": [0, 1]}]}"#,
    )
    .unwrap();
    std::fs::write(d.path().join("empty.json"), r#"{"num_qubits": 3, "instructions": []}"#).unwrap();
    d
}

#[test]
fn compile_is_deterministic() {
    let d = setup();
    let args = ["compile", "--device", "dev.json", "--circuit", "c.json", "--passes", "schedule,twirl,caec", "--seed", "7"];
    let a = caq(d.path(), &args);
    let b = caq(d.path(), &args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["schema_version"], "1");
    assert!(v["twirl_records"].as_array().is_some_and(|r| !r.is_empty()));
    assert!(v["compensation"]["compensations"].is_array());
}

#[test]
fn bad_pass_order_is_a_config_error() {
    let d = setup();
    let o = caq(d.path(), &["compile", "--device", "dev.json", "--circuit", "c.json", "--passes", "caec,schedule"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("schedule"));
}

#[test]
fn empty_circuit_compiles() {
    let d = setup();
    let o = caq(d.path(), &["compile", "--device", "dev.json", "--circuit", "empty.json", "--passes", "schedule,cadd"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["circuit"]["num_qubits"], 3);
}

#[test]
fn missing_file_and_unknown_bench() {
    let d = setup();
    let o = caq(d.path(), &["compile", "--device", "nope.json", "--circuit", "c.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(caq(d.path(), &["bench", "nope"]).status.code(), Some(2));
    assert_eq!(caq(d.path(), &["bench", "ising", "--depths", "3..1"]).status.code(), Some(2));
}

#[test]
fn simulate_flags() {
    let d = setup();
    let bad = caq(d.path(), &["simulate", "--device", "dev.json", "--circuit", "c.json", "--noise", "zz,bogus"]);
    assert_eq!(bad.status.code(), Some(2));
    let none = caq(d.path(), &["simulate", "--device", "dev.json", "--circuit", "c.json", "--noise", "none"]);
    assert!(none.status.success());
    let v: serde_json::Value = serde_json::from_slice(&none.stdout).unwrap();
    // sx on 0 then cx(0, 1): an even mix of 000 and 110
    let dist = v["distribution"].as_object().unwrap();
    assert_eq!(dist.len(), 2);
    for k in ["000", "110"] {
        assert!((dist[k].as_f64().unwrap() - 0.5).abs() < 1e-12);
    }
    let noisy = caq(d.path(), &["simulate", "--device", "dev.json", "--circuit", "c.json", "--noise", "zz"]);
    assert_ne!(noisy.stdout, none.stdout);
}

#[test]
fn simulate_compiled_artifact_and_shots() {
    let d = setup();
    let c = caq(d.path(), &["compile", "--device", "dev.json", "--circuit", "c.json", "--passes", "schedule,caec", "--out", "o.json"]);
    assert!(c.status.success());
    let args = ["simulate", "--device", "dev.json", "--circuit", "o.json", "--noise", "zz,stark", "--shots", "200", "--seed", "4"];
    let a = caq(d.path(), &args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, caq(d.path(), &args).stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    let total: u64 = v["counts"].as_object().unwrap().values().map(|x| x.as_u64().unwrap()).sum();
    assert_eq!(total, 200);
    // compensated: the exact distribution matches the ideal one
    assert!((v["distribution"]["000"].as_f64().unwrap() - 0.5).abs() < 1e-9);
}

#[test]
fn bench_writes_csv_and_json() {
    let d = setup();
    let o = caq(d.path(), &["bench", "bell-dynamic", "--tau-sweep", "0:2000:50", "--out", "res"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(d.path().join("res/bell-dynamic.csv")).unwrap();
    assert!(csv.starts_with("d,label,value\n"));
    assert_eq!(csv.lines().count(), 42);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.path().join("res/bell-dynamic.json")).unwrap()).unwrap();
    assert_eq!(v["summary"]["best_tau_ns"], 1150.0);
}
