use std::path::Path;
use std::process::{Command, Output};

fn cli(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trichoderma"))
        .args(args)
        .current_dir(cwd)
        .output()
        .unwrap()
}

#[test]
fn run_writes_trajectory_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli(&["run", "validation-1", "--with-z", "--horizon", "200", "--out", "res"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("res/validation-1.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,X,B,s,P,Z"));
    let z: Vec<f64> = lines.map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
    assert!(z.windows(2).all(|w| w[1] < w[0]));
    let json = std::fs::read_to_string(dir.path().join("res/validation-1-summary.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v[0]["name"], "validation-1");
    assert!(String::from_utf8_lossy(&out.stdout).contains("s_star"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for d in ["a", "b"] {
        let out = cli(&["run", "validation-2", "--horizon", "100", "--format", "csv", "--out", d], dir.path());
        assert!(out.status.success());
    }
    for f in ["validation-2.csv", "validation-2-summary.csv"] {
        let a = std::fs::read(dir.path().join("a").join(f)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(f)).unwrap();
        assert_eq!(a, b, "{f}");
    }
}

#[test]
fn sweep_writes_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli(&["sweep", "kd-sweep", "--format", "table", "--horizon", "300"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = std::fs::read_to_string(dir.path().join("out/kd-sweep-summary.txt")).unwrap();
    let header = table.lines().next().unwrap();
    assert!(header.starts_with("name") && header.contains("kd-0.03") && header.contains("kd-0.18"));
}

#[test]
fn exit_codes_distinguish_failures() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(cli(&["run", "nope"], dir.path()).status.code(), Some(2));
    std::fs::write(dir.path().join("bad.toml"), "name = ").unwrap();
    assert_eq!(cli(&["run", "bad.toml"], dir.path()).status.code(), Some(2));
    std::fs::write(dir.path().join("blocker"), "").unwrap();
    let out = cli(&["run", "validation-1", "--horizon", "10", "--out", "blocker/x"], dir.path());
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("blocker"));
    assert_eq!(cli(&["run", "validation-1", "--step=-1"], dir.path()).status.code(), Some(2));
    // biomass with no substrate and no organic matter: maintenance drives s negative
    let mut sc = trichoderma_harness::builtin_scenario("validation-1").unwrap();
    sc.initial = trichoderma_core::State::new(0.0, 50.0, 0.0, 0.0);
    std::fs::write(dir.path().join("starved.toml"), sc.to_toml()).unwrap();
    let out = cli(&["run", "starved.toml"], dir.path());
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("scenario validation-1"));
    assert_eq!(cli(&["--format", "xml", "run", "validation-1"], dir.path()).status.code(), Some(2));
}

#[test]
fn lists_builtins() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli(&["--list-scenarios"], dir.path());
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    for name in ["validation-1", "validation-2", "x0-360", "kd-0.18", "x0-sweep", "kd-sweep"] {
        assert!(text.contains(name), "{name}");
    }
}
