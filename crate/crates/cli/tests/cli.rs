use std::path::PathBuf;
use std::process::{Command, Output};

fn bellgraph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bellgraph"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn table() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/data/bc4_hat_measurements.csv")
}

#[test]
fn analyze_bundled_table() {
    let o = bellgraph(&["analyze", "--graph", "bc4-hat", "--measurements", table().to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = stdout(&o);
    assert!(s.contains("(0.86±0.02)"), "{s}");
    assert!(s.contains("3/4"), "{s}");
    assert!(s.contains("VIOLATED"), "{s}");
}

#[test]
fn analyze_json_schema() {
    let o = bellgraph(&[
        "--format",
        "json",
        "analyze",
        "--graph",
        "bc4-hat",
        "--measurements",
        table().to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["graph"], "bc4-hat");
    assert_eq!(v["verdict"], true);
    assert_eq!(v["bound"]["kind"], "exact");
    assert_eq!(v["relative_is_lower_bound"], false);
    assert!((v["bell_value"].as_f64().unwrap() - 0.855).abs() < 1e-12);
}

#[test]
fn ghz12_bound() {
    let o = bellgraph(&["bound", "--graph", "ghz12", "--method", "ghz"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("33/64"));
}

#[test]
fn lc4_brute_bound_with_witness() {
    let o = bellgraph(&["--format", "json", "bound", "--graph", "lc4", "--method", "brute"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["fraction"], "3/4");
    assert!(v["witness"].is_string());
}

#[test]
fn bellop_json_and_mk() {
    let o = bellgraph(&["--format", "json", "bellop", "--graph", "single"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["n"], 1);
    assert_eq!(v["terms"].as_array().unwrap().len(), 2);
    let o = bellgraph(&["--format", "csv", "bellop", "--mk", "--n", "2"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 5);
}

#[test]
fn stabilizers_and_mk_commands() {
    let o = bellgraph(&["stabilizers", "--graph", "bc4"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("+XXXX"));
    let o = bellgraph(&["mk", "--n", "4", "--brute-force"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("max 8 units"), "{}", stdout(&o));
}

#[test]
fn simulate_then_analyze_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sim.csv");
    let args = ["simulate", "--graph", "lc4", "--noise", "0.95", "--shots", "400", "--seed", "11", "--out"];
    let o = bellgraph(&[&args[..], &[out.to_str().unwrap()]].concat());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("seed = 11"));
    let first = std::fs::read_to_string(&out).unwrap();
    bellgraph(&[&args[..], &[out.to_str().unwrap()]].concat());
    assert_eq!(first, std::fs::read_to_string(&out).unwrap());
    let o = bellgraph(&["--format", "json", "analyze", "--graph", "lc4", "--measurements", out.to_str().unwrap()]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["bell_value"].as_f64().unwrap() > 0.75);
}

#[test]
fn scaling_csv() {
    let o = bellgraph(&["--format", "csv", "scaling", "--from", "2", "--to", "14"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert_eq!(s.lines().count(), 14);
    assert!(s.lines().next().unwrap().starts_with("n,fidelity"));
}

#[test]
fn exit_codes() {
    assert_eq!(bellgraph(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(bellgraph(&["bound", "--graph", "nosuch"]).status.code(), Some(2));
    assert_eq!(bellgraph(&["bound", "--graph", "ghz5", "--method", "formula"]).status.code(), Some(2));
    assert_eq!(bellgraph(&["bound", "--graph", "linear9", "--method", "brute"]).status.code(), Some(3));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "pauli,sign,value,stderr,shots\nZZZZ,+1,1.2,0.1,\n").unwrap();
    let o = bellgraph(&["analyze", "--graph", "bc4-hat", "--measurements", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}
