//! End-to-end CLI checks: exit codes, output schemas, and byte-identical
//! reruns. The heavy `verify` subcommand is covered by tests/acceptance.rs.

use std::path::Path;
use std::process::Command;

fn bispec() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bispec"))
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn write_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let p = dir.join("config.toml");
    std::fs::write(&p, body).unwrap();
    p
}

const SMALL: &str = r#"
gridN = 80
lmax = 10
kPerChannel = 10
amplitudes = [0.05, 0.1]
zetas = [10.0]
nXi = 16
kmax = 20
"#;

#[test]
fn eig_writes_datasets_and_reruns_identically() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SMALL);
    let out1 = tmp.path().join("run1");
    let out2 = tmp.path().join("run2");
    for out in [&out1, &out2] {
        let st = bispec()
            .args(["eig", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(out)
            .status()
            .unwrap();
        assert!(st.success(), "eig exited with {st}");
    }
    for name in ["dataset_v1.csv", "dataset_v1.json", "dataset_v2_0.csv", "dataset_v2_1.csv"] {
        assert_eq!(read(&out1, name), read(&out2, name), "{name} differs between reruns");
    }
    // the report embeds the config; only the output directory may differ
    let mut r1: serde_json::Value = serde_json::from_str(&read(&out1, "eig_report.json")).unwrap();
    let mut r2: serde_json::Value = serde_json::from_str(&read(&out2, "eig_report.json")).unwrap();
    r1["config"]["outDir"] = serde_json::Value::Null;
    r2["config"]["outDir"] = serde_json::Value::Null;
    assert_eq!(r1, r2, "eig_report.json differs between reruns beyond outDir");
    let csv = read(&out1, "dataset_v1.csv");
    assert!(csv.starts_with("# schema: bispec-dataset-1"), "csv header: {}", &csv[..40.min(csv.len())]);
    let json: serde_json::Value = serde_json::from_str(&read(&out1, "dataset_v1.json")).unwrap();
    assert_eq!(json["schema"], "bispec-dataset-1");
    let report: serde_json::Value = serde_json::from_str(&read(&out1, "eig_report.json")).unwrap();
    assert_eq!(report["schema"], "report-1");
    assert_eq!(report["command"], "eig");
}

#[test]
fn sweep_and_resolvent_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SMALL);
    let out = tmp.path().join("out");

    let st = bispec().args(["sweep", "--config"]).arg(&cfg).arg("--out").arg(&out).status().unwrap();
    assert!(st.success(), "sweep exited with {st}");
    let csv = read(&out, "sweep.csv");
    assert!(csv.starts_with("# schema: bispec-sweep-1"));
    assert_eq!(csv.lines().count(), 2 + 2, "header + column row + one row per amplitude");
    let report: serde_json::Value = serde_json::from_str(&read(&out, "sweep_report.json")).unwrap();
    assert!(report["extra"]["deltaEmp"].as_f64().unwrap() > 0.0);

    let st = bispec().args(["resolvent-scan", "--config"]).arg(&cfg).arg("--out").arg(&out).status().unwrap();
    assert!(st.success(), "resolvent-scan exited with {st}");
    let csv = read(&out, "resolvent_scan.csv");
    assert!(csv.starts_with("# schema: bispec-resolvent-1"));
    let report: serde_json::Value = serde_json::from_str(&read(&out, "resolvent-scan_report.json")).unwrap();
    assert_eq!(report["allPass"], true);
    assert!(report["extra"]["scanInsideOmegaDelta"].as_bool().unwrap());
}

#[test]
fn invalid_config_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    // below the minimum grid resolution
    let cfg = write_config(tmp.path(), "gridN = 10\n");
    let out = tmp.path().join("out");
    let st = bispec().args(["eig", "--config"]).arg(&cfg).arg("--out").arg(&out).status().unwrap();
    assert_eq!(st.code(), Some(2));
    // malformed TOML
    let bad = tmp.path().join("bad.toml");
    std::fs::write(&bad, "gridN = [not toml").unwrap();
    let st = bispec().args(["eig", "--config"]).arg(&bad).arg("--out").arg(&out).status().unwrap();
    assert_eq!(st.code(), Some(2));
    // unknown key
    let unk = write_config(tmp.path(), "unknownKey = 1\n");
    let st = bispec().args(["eig", "--config"]).arg(&unk).arg("--out").arg(&out).status().unwrap();
    assert_eq!(st.code(), Some(2));
    // usage error (unknown subcommand) is also 2 via clap
    let st = bispec().arg("no-such-command").status().unwrap();
    assert_eq!(st.code(), Some(2));
}

#[test]
fn seed_and_threads_flags_are_recorded() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SMALL);
    let out = tmp.path().join("out");
    let st = bispec()
        .args(["resolvent-scan", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .args(["--seed", "7", "--threads", "1"])
        .status()
        .unwrap();
    assert!(st.success());
    let report: serde_json::Value = serde_json::from_str(&read(&out, "resolvent-scan_report.json")).unwrap();
    assert_eq!(report["metadata"]["seed"], 7);
    assert_eq!(report["metadata"]["threads"], 1);
}
