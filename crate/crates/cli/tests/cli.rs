use std::fs;
use std::process::Command;

fn slfvs() -> Command {
    Command::new(env!("CARGO_BIN_EXE_slfvs"))
}

#[test]
fn simulate_writes_outputs_and_provenance() {
    let dir = tempfile::tempdir().unwrap();
    let out = slfvs()
        .args(["simulate", "--n", "50", "--seed", "7", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["simulate.csv", "simulate.json", "genealogy.json", "events.csv"] {
        assert!(dir.path().join(f).exists(), "missing {f}");
    }
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("simulate.json")).unwrap()).unwrap();
    assert_eq!(json["provenance"]["seed"], 7);
    assert_eq!(json["provenance"]["n"], 50);
    assert!(json["provenance"]["build_id"].as_str().unwrap().starts_with("slfvs"));
}

#[test]
fn same_seed_same_csv() {
    let run = || {
        let dir = tempfile::tempdir().unwrap();
        let st = slfvs()
            .args(["drift-diffusion", "--n", "100", "--reps", "200", "--horizon", "0.2", "--out"])
            .arg(dir.path())
            .output()
            .unwrap();
        assert!(st.status.success());
        fs::read_to_string(dir.path().join("drift-diffusion.csv")).unwrap()
    };
    assert_eq!(run(), run());
}

#[test]
fn config_file_then_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# small\nn = 80\nalpha = 0.5\nreps = 3\nseed = 11\n").unwrap();
    let out = slfvs()
        .args(["pu-curve", "--upsilons", "0.5,1", "--seed", "12", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("pu-curve.json")).unwrap()).unwrap();
    let p = &json["provenance"];
    assert_eq!(p["n"], 80);
    assert_eq!(p["alpha"], 0.5);
    assert_eq!(p["replicates"], 3);
    assert_eq!(p["seed"], 12);
    let csv = fs::read_to_string(dir.path().join("pu-curve.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn validation_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let st = slfvs().args(["duality", "--alpha=-1", "--out"]).arg(dir.path()).status().unwrap();
    assert_eq!(st.code(), Some(2));
    let st = slfvs().args(["duality", "--reps", "0"]).arg("--out").arg(dir.path()).status().unwrap();
    assert_eq!(st.code(), Some(2));
    let st = slfvs().args(["no-such-experiment"]).status().unwrap();
    assert_eq!(st.code(), Some(2));

    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "colour = blue\n").unwrap();
    let out = slfvs().args(["simulate", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));
}

#[test]
fn net_diagnostics_needs_full_impact() {
    let dir = tempfile::tempdir().unwrap();
    let st = slfvs()
        .args(["net-diagnostics", "--upsilon", "0.5", "--reps", "2", "--out"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(2));
}
