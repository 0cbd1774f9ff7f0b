use std::fs;
use std::path::Path;
use std::process::Command;

use serde_json::Value;

fn cahm(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_cahm")).args(args).output().unwrap()
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

const PRESETS: [(&str, &str); 7] = [
    ("fig3-top", "compare"),
    ("fig3-bottom", "compare"),
    ("fig4", "compare"),
    ("fig7-top", "compare"),
    ("fig7-bottom", "compare"),
    ("fig8", "compare"),
    ("fig10", "trotter"),
];

#[test]
fn presets_lists_seven() {
    let out = cahm(&["presets"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let names: Vec<&str> = text.lines().map(|l| l.split_whitespace().next().unwrap()).collect();
    assert_eq!(names, PRESETS.map(|p| p.0));
}

#[test]
fn reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    for (name, mode) in PRESETS {
        let a = tmp.path().join(format!("{name}-a"));
        let b = tmp.path().join(format!("{name}-b"));
        for d in [&a, &b] {
            let out = cahm(&[mode, "--preset", name, "--out", d.to_str().unwrap()]);
            assert!(out.status.success(), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        }
        let files = manifest(&a)["files"].as_array().unwrap().clone();
        assert!(!files.is_empty());
        for f in files.iter().map(|f| f.as_str().unwrap()).chain(["manifest.json"]) {
            assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{name}/{f}");
        }
    }
}

#[test]
fn fig4_manifest_records_parameters() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(cahm(&["compare", "--preset", "fig4", "--out", tmp.path().to_str().unwrap()]).status.success());
    let m = manifest(tmp.path());
    assert_eq!(m["tool"], "cahm");
    assert_eq!(m["version"], env!("CARGO_PKG_VERSION"));
    let r = &m["resolved"];
    assert_eq!(r["target"]["u"], 0.064);
    assert_eq!(r["target"]["x"], 0.067);
    assert_eq!(r["simulator"]["omega"], 1.0);
    assert_eq!(r["simulator"]["delta"], 15.0);
    assert_eq!(r["simulator"]["V0"], 30.0);
    assert_eq!(r["K"], 1.0);
}

#[test]
fn fig7_top_manifest_flags_override() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(cahm(&["compare", "--preset", "fig7-top", "--out", tmp.path().to_str().unwrap()]).status.success());
    let sim = &manifest(tmp.path())["resolved"]["simulator"];
    assert_eq!(sim["v2_override"], -0.2);
    assert_eq!(sim["V2"], -0.2);
    assert!((sim["V1"].as_f64().unwrap() - 0.2).abs() < 1e-12);
    let overrides = sim["pair_overrides"].as_array().unwrap();
    assert_eq!(overrides.len(), 2);
    assert!(overrides.iter().all(|o| o["v"] == -0.2));
}

#[test]
fn fig8_manifest_records_rho_and_k() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(cahm(&["compare", "--preset", "fig8", "--out", tmp.path().to_str().unwrap()]).status.success());
    let r = &manifest(tmp.path())["resolved"];
    assert_eq!(r["simulator"]["rho"], 0.326);
    assert_eq!(r["K"], 0.05464);
    assert!(r["simulator"]["V3"].as_f64().unwrap() > 0.0);
}

#[test]
fn manifest_config_reproduces_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    assert!(cahm(&["trotter", "--preset", "fig10", "--seed", "7", "--out", a.to_str().unwrap()]).status.success());
    let cfg = tmp.path().join("cfg.json");
    fs::write(&cfg, manifest(&a)["config"].to_string()).unwrap();
    assert!(cahm(&["trotter", "--config", cfg.to_str().unwrap(), "--out", b.to_str().unwrap()]).status.success());
    assert_eq!(fs::read(a.join("shots.json")).unwrap(), fs::read(b.join("shots.json")).unwrap());
    assert_eq!(fs::read(a.join("trotter.csv")).unwrap(), fs::read(b.join("trotter.csv")).unwrap());
}

#[test]
fn seed_changes_shots_only() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    cahm(&["trotter", "--preset", "fig10", "--seed", "1", "--out", a.to_str().unwrap()]);
    cahm(&["trotter", "--preset", "fig10", "--seed", "2", "--out", b.to_str().unwrap()]);
    assert_ne!(fs::read(a.join("shots.json")).unwrap(), fs::read(b.join("shots.json")).unwrap());
    assert_eq!(fs::read(a.join("circuit.json")).unwrap(), fs::read(b.join("circuit.json")).unwrap());
}

#[test]
fn flags_override_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("cfg.json");
    fs::write(&cfg, r#"{"system":"two-atom","target":{"u":1,"x":0.5},"simulator":{"blockade_ratio":64}}"#).unwrap();
    let out = tmp.path().join("o");
    let status = cahm(&["match", "--config", cfg.to_str().unwrap(), "--x", "1.5", "--out", out.to_str().unwrap()]);
    assert!(status.status.success());
    let r: Value = serde_json::from_str(&fs::read_to_string(out.join("match.json")).unwrap()).unwrap();
    assert_eq!(r["params"]["omega"], -1.5);
    assert_eq!(r["geometry"]["v0"], 96.0);
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let o = tmp.path().to_str().unwrap();
    let out = cahm(&["evolve", "--preset", "fig99", "--out", o]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("preset"));

    let cfg = tmp.path().join("cfg.json");
    fs::write(&cfg, r#"{"system":"four-atom","target":{"u":1,"x":1.2}}"#).unwrap();
    let out = cahm(&["compare", "--config", cfg.to_str().unwrap(), "--out", o]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("target.y"));

    fs::write(&cfg, r#"{"system":"two-atom","target":{"u":1,"x":0.5},"bogus":1}"#).unwrap();
    assert_eq!(cahm(&["match", "--config", cfg.to_str().unwrap(), "--out", o]).status.code(), Some(2));

    let out = cahm(&[
        "match", "--system", "three-atom", "--u", "0.064", "--x", "0.067", "--omega", "1", "--delta", "-0.5",
        "--delta0", "0.5", "--v0", "30", "--out", o,
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}
