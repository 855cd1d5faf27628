use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tronquee")).args(args).output().expect("run tronquee")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn error_kind(o: &Output) -> String {
    let text = [&o.stdout[..], &o.stderr[..]].concat();
    let text = String::from_utf8_lossy(&text);
    let line = text.lines().find(|l| l.starts_with("{\"error\"")).expect("error JSON line");
    let v: Value = serde_json::from_str(line).unwrap();
    v["error"]["kind"].as_str().unwrap().to_string()
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("tronquee-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

#[test]
fn coeffs_start_with_c4() {
    let o = run(&["coeffs", "--order", "20"]);
    assert!(o.status.success());
    let v = json(&o);
    let c = &v["data"]["h0"]["coeffs"];
    assert_eq!(c[0], serde_json::json!(["-392", "625"]));
    assert_eq!(c[1], serde_json::json!(["0", "1"]));
    assert_eq!(c.as_array().unwrap().len(), 17);
}

#[test]
fn header_block() {
    let v = json(&run(&["coeffs", "--order", "8"]));
    let h = &v["header"];
    let hash = h["config_hash"].as_str().unwrap();
    assert_eq!(hash.len(), 64);
    assert!(hash.chars().all(|ch| ch.is_ascii_hexdigit()));
    let modules = h["modules"].as_object().unwrap();
    for m in ["series", "borel", "ode", "connection", "pole_sector", "cycles", "cli"] {
        assert!(modules.contains_key(m), "missing module {m}: {modules:?}");
    }
}

#[test]
fn config_hash_tracks_configuration() {
    let hash = |args: &[&str]| json(&run(args))["header"]["config_hash"].as_str().unwrap().to_string();
    let a = hash(&["coeffs", "--order", "8"]);
    assert_eq!(a, hash(&["coeffs", "--order", "8"]));
    assert_ne!(a, hash(&["coeffs", "--order", "8", "--tol", "1e-10"]));
    let d = scratch("hash");
    let cfg = d.join("run.cfg");
    std::fs::write(&cfg, "# tighter ODE tolerance\node_tol = 1e-10\n").unwrap();
    assert_eq!(
        hash(&["coeffs", "--order", "8", "--config", cfg.to_str().unwrap()]),
        hash(&["coeffs", "--order", "8", "--tol", "1e-10"])
    );
}

#[test]
fn malformed_arguments_give_error_json() {
    let o = run(&["sum", "--C", "1x,2"]);
    assert!(!o.status.success());
    assert_eq!(error_kind(&o), "InvalidInput");
    let o = run(&["sum", "--grid", "10:5"]);
    assert!(!o.status.success());
    assert_eq!(error_kind(&o), "InvalidInput");
}

#[test]
fn unknown_config_key_is_rejected() {
    let d = scratch("cfg");
    let cfg = d.join("bad.cfg");
    std::fs::write(&cfg, "ode_tol = 1e-10\nbogus = 3\n").unwrap();
    let o = run(&["coeffs", "--config", cfg.to_str().unwrap()]);
    assert!(!o.status.success());
    assert_eq!(error_kind(&o), "Config");
    let missing = d.join("absent.cfg");
    assert!(!run(&["coeffs", "--config", missing.to_str().unwrap()]).status.success());
}

#[test]
fn module_errors_give_error_json() {
    let o = run(&["sum", "--phi", "0"]);
    assert!(!o.status.success());
    assert_eq!(error_kind(&o), "StokesDirection");
}

#[test]
fn outputs_are_deterministic() {
    let a = run(&["sum", "--C", "1,0", "--grid", "12:14:3"]);
    let b = run(&["sum", "--C", "1,0", "--grid", "12:14:3"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn csv_output_to_directory() {
    let d = scratch("out");
    let o = run(&["poles", "--n", "5..6", "--out", d.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let files: Vec<_> = std::fs::read_dir(&d).unwrap().map(|e| e.unwrap().path()).collect();
    assert!(!files.is_empty());
    let body = std::fs::read_to_string(&files[0]).unwrap();
    assert!(body.starts_with('#'));
    assert!(body.lines().any(|l| l.starts_with("# config_hash")));
    let first_data = body.lines().find(|l| !l.starts_with('#')).unwrap();
    assert!(first_data.contains(','));
}

#[test]
fn verify_reports_every_criterion() {
    let o = run(&["verify"]);
    let out = String::from_utf8_lossy(&o.stdout);
    let lines: Vec<&str> = out.lines().filter(|l| l.starts_with("criterion")).collect();
    assert_eq!(lines.len(), 12);
    // The pole-slope criterion fails; the exit status reflects it.
    assert!(lines[6].contains(" 7 FAIL"));
    assert_eq!(o.status.code(), Some(1));
}
