use std::path::Path;
use std::process::Command;

fn harness(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_ess-harness"))
        .args(args)
        .output()
        .unwrap()
}

const SMALL: &str = r#"{
  "kind": "ar1_ensemble", "master_seed": 3, "n_replicates": 6,
  "chain_length": 3000, "burn_in": 500, "checkpoints": [1000, 2500],
  "ar1": {"a": 0.5},
  "estimators": [
    {"method": "geyer_monotone"},
    {"method": "bartlett", "width": "sqrt_n", "label": "bart"},
    {"method": "ess_bulk", "variant": 3}
  ],
  "output": {"group_size": 3}
}"#;

fn write_cfg(dir: &Path, text: &str) -> String {
    let p = dir.join("cfg.json");
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn ar1_then_report() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(tmp.path(), SMALL);
    let out = tmp.path().join("out");
    let o = harness(&["ar1", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let rows = std::fs::read_to_string(out.join("rows.csv")).unwrap();
    assert!(rows.starts_with("method,replicate_id,checkpoint_n,iact,ess,mcse,ci_lo,ci_hi,flags\n"));
    // 6 replicates x 2 checkpoints x 3 estimators
    assert_eq!(rows.lines().count(), 1 + 36);
    assert!(rows.contains("\nbart,"));
    let groups = std::fs::read_to_string(out.join("groups.csv")).unwrap();
    assert_eq!(groups.lines().count(), 7);
    assert!(out.join("chains.essc").exists());
    assert!(out.join("metadata.json").exists());

    let r = harness(&["report", out.to_str().unwrap()]);
    assert!(r.status.success());
    let text = String::from_utf8(r.stdout).unwrap();
    assert!(text.contains("geyer_monotone"));
    assert!(text.contains("iact_mean"));
}

#[test]
fn seed_override_changes_output() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(tmp.path(), SMALL);
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    assert!(harness(&["ar1", "--config", &cfg, "--out", a.to_str().unwrap()]).status.success());
    assert!(harness(&["ar1", "--config", &cfg, "--seed", "4", "--out", b.to_str().unwrap()]).status.success());
    assert_ne!(
        std::fs::read(a.join("rows.csv")).unwrap(),
        std::fs::read(b.join("rows.csv")).unwrap()
    );
}

#[test]
fn bad_inputs_fail_cleanly() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o").display().to_string();

    let cfg = write_cfg(tmp.path(), &SMALL.replace("\"burn_in\": 500", "\"burn_in\": 3000"));
    let o = harness(&["ar1", "--config", &cfg, "--out", &out]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("burn_in"));

    let cfg = write_cfg(tmp.path(), SMALL);
    let o = harness(&["elliptic", "run", "--config", &cfg, "--out", &out]);
    assert!(!o.status.success());

    let junk = tmp.path().join("junk.essc");
    std::fs::write(&junk, b"not a chain file at all").unwrap();
    let o = harness(&["analyze", "--config", &cfg, "--out", &out, junk.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("magic"));
}

#[test]
fn elliptic_synth_then_run_with_saved_data() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        tmp.path(),
        r#"{
          "kind": "elliptic_run", "master_seed": 8, "n_replicates": 2,
          "chain_length": 200, "burn_in": 50, "checkpoints": [150],
          "model": {"nx": 8, "ny": 8, "n_modes": 5},
          "mcmc": {"beta": 0.3}
        }"#,
    );
    let synth = tmp.path().join("synth");
    let run = tmp.path().join("run");
    assert!(harness(&["elliptic", "synth", "--config", &cfg, "--out", synth.to_str().unwrap()]).status.success());
    for f in ["synthetic.json", "eta_true.csv", "pressure_true.csv"] {
        assert!(synth.join(f).exists(), "{f}");
    }
    let data = synth.join("synthetic.json");
    let o = harness(&[
        "elliptic", "run", "--config", &cfg, "--out", run.to_str().unwrap(), "--data", data.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(
        std::fs::read_to_string(&data).unwrap(),
        std::fs::read_to_string(run.join("synthetic.json")).unwrap()
    );
    let theta = ess_harness::chain_io::read_chains(&run.join("theta.essc")).unwrap();
    assert_eq!(theta.len(), 2 * 5);
    assert_eq!(theta[0].len(), 200);
    let stats: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(run.join("run_stats.json")).unwrap()).unwrap();
    assert_eq!(stats["totals"]["iterations"], 400);
}
