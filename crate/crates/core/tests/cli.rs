use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_resonance"));
    cmd.env_remove("RESONANCE_LOG");
    cmd
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/configs")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const SMALL: &str = r#"{
  "base": { "lambda0": 0.0, "period": "inf", "genus": 0 },
  "perturbation": {
    "R": 1.0,
    "contact_order": 0,
    "pieces": [{ "interval": [0.0, 1.0], "coeffs": [-4.0] }]
  },
  "kernel": { "h": 0.005 },
  "search": { "rect": [-80.0, 80.0, -8.0, 2.0] },
  "band": { "safe_indices": [15, 20], "samples": 100 }
}
"#;

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn header_lines(text: &str) -> Vec<&str> {
    text.lines().take_while(|l| l.starts_with('#')).collect()
}

#[test]
fn validate_accepts_the_shipped_configs() {
    for name in ["square_well.json", "rational_g1.json", "zero_perturbation.json"] {
        let cfg = configs().join(name);
        let o = run(&["validate", "--config", cfg.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", stderr(&o));
        let out = String::from_utf8(o.stdout).unwrap();
        assert!(out.contains("ok (config-sha256 "));
    }
}

#[test]
fn validation_errors_exit_2_with_a_line() {
    let dir = tempfile::tempdir().unwrap();
    let bad_h = SMALL.replace(r#""h": 0.005"#, r#""h": -1.0"#);
    let cfg = write_config(dir.path(), "bad_h.json", &bad_h);
    let o = run(&["validate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains(&format!("{}:8: kernel.h: must be positive", cfg.display())), "{err}");

    let unknown = SMALL.replace(r#""kernel": {"#, r#""kernal": {"#);
    let cfg = write_config(dir.path(), "unknown.json", &unknown);
    let o = run(&["forward", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains(&format!("{}:8:", cfg.display())), "{}", stderr(&o));

    let not_dividing = SMALL.replace(r#""h": 0.005"#, r#""h": 0.003"#);
    let cfg = write_config(dir.path(), "divide.json", &not_dividing);
    let o = run(&["validate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("kernel.h: must divide R"));

    let missing = SMALL.replace(r#""base": { "lambda0": 0.0, "period": "inf", "genus": 0 }"#, r#""base": "nowhere.json""#);
    let cfg = write_config(dir.path(), "missing.json", &missing);
    let o = run(&["validate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains(":2: base: file "), "{}", stderr(&o));

    let cfg = write_config(dir.path(), "ok.json", SMALL);
    let o = run(&["validate", "--config", cfg.to_str().unwrap(), "--tol-scale", "-1"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(run(&["validate"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn numerical_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let capped = SMALL.replace(r#""h": 0.005"#, r#""h": 0.005, "max_terms": 2"#);
    let cfg = write_config(dir.path(), "capped.json", &capped);
    let out = dir.path().join("out");
    let o = run(&["forward", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("Neumann series did not reach tolerance"));
}

fn forward(cfg: &Path, out: &Path, threads: &str) {
    let o = run(&["forward", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--threads", threads]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn forward_output_is_deterministic_and_headed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "small.json", SMALL);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    forward(&cfg, &a, "1");
    forward(&cfg, &b, "4");
    let hash = {
        let o = run(&["validate", "--config", cfg.to_str().unwrap()]);
        let s = String::from_utf8(o.stdout).unwrap();
        s.split("config-sha256 ").nth(1).unwrap().trim_end_matches(")\n").to_string()
    };
    for name in ["kernel.json", "zeros.json", "m_samples.csv"] {
        let x = fs::read(a.join(name)).unwrap();
        let y = fs::read(b.join(name)).unwrap();
        assert!(x == y, "{name} differs between thread counts");
        let text = String::from_utf8(x).unwrap();
        assert!(text.contains(&hash), "{name}");
        assert!(text.contains(&format!("resonance {}", env!("CARGO_PKG_VERSION"))), "{name}");
    }
    let csv = fs::read_to_string(a.join("m_samples.csv")).unwrap();
    assert_eq!(header_lines(&csv).len(), 2);
    let zeros: serde_json::Value = serde_json::from_str(&fs::read_to_string(a.join("zeros.json")).unwrap()).unwrap();
    assert_eq!(zeros["header"]["config_sha256"], hash.as_str());
    assert!(zeros["zeros"].as_array().unwrap().len() > 40);
}

#[test]
fn tol_scale_changes_the_hash() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "small.json", SMALL);
    let hash = |extra: &[&str]| {
        let mut args = vec!["validate", "--config", cfg.to_str().unwrap()];
        args.extend_from_slice(extra);
        String::from_utf8(run(&args).stdout).unwrap()
    };
    assert_eq!(hash(&[]), hash(&[]));
    assert_ne!(hash(&[]), hash(&["--tol-scale", "10"]));
}

#[test]
fn roundtrip_inverse_and_band() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "small.json", SMALL);
    let out = dir.path().join("rt");
    let o = run(&["roundtrip", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(String::from_utf8(o.stdout).unwrap().starts_with("max relative M error"));
    for name in ["zeros.json", "reconstruction.json", "m_comparison.csv", "band.csv", "band.json", "summary.json"] {
        assert!(out.join(name).is_file(), "{name}");
    }
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert!(summary["max_rel_err"].as_f64().unwrap() < 1e-2);
    let band: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("band.json")).unwrap()).unwrap();
    assert_eq!(band["nu"], 2);
    assert_eq!(band["resonances"], band["in_band"]);
    assert!(band["safe_circles"].as_array().unwrap().iter().all(|c| c["ok"] == true));

    let again = dir.path().join("inv");
    let zeros = out.join("zeros.json");
    let o = run(&[
        "inverse",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        again.to_str().unwrap(),
        "--zeros",
        zeros.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(
        fs::read(out.join("reconstruction.json")).unwrap(),
        fs::read(again.join("reconstruction.json")).unwrap()
    );

    fs::write(&zeros, r#"{"zeros": [{"z": [1, 1], "mult": 0, "class": "eigenvalue"}]}"#).unwrap();
    let o = run(&["inverse", "--config", cfg.to_str().unwrap(), "--zeros", zeros.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("zeros[0].mult"));
}

#[test]
fn band_needs_a_contact_derivative() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("zero_perturbation.json");
    let out = dir.path().join("z");
    let o = run(&["band", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let zeros: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("zeros.json")).unwrap()).unwrap();
    assert!(zeros["zeros"].as_array().unwrap().is_empty());
}

#[test]
fn logging_goes_to_stderr_when_enabled() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "small.json", SMALL);
    let out = dir.path().join("log");
    let o = bin()
        .env("RESONANCE_LOG", "info")
        .args(["forward", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("located"));
    assert!(o.stdout.is_empty());
}
