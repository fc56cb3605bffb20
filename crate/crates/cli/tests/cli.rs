use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pressure-lab"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str], out: &Path) -> Output {
    bin().args(args).arg("--out").arg(out).output().unwrap()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn selftest_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["selftest"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&dir.path().join("selftest.json"));
    assert_eq!(v["result"]["failed"], 0);
    assert!(v["result"]["checks"].as_array().unwrap().len() >= 15);
}

#[test]
fn pressure_routes_agree_on_golden_mean() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("golden_mean.toml");
    let out = run(&["pressure", "--route", "all", "--config", cfg.to_str().unwrap()], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&dir.path().join("pressure.json"));
    let r = &v["result"];
    let log_g = ((1.0 + 5f64.sqrt()) / 2.0).ln();
    assert!((r["transfer"]["value"].as_f64().unwrap() - log_g).abs() < 1e-12);
    assert_eq!(r["brute"]["agrees"], true);
    assert_eq!(r["separated"]["agrees"], true);
    for key in ["configHash", "seed", "version"] {
        assert!(!v[key].is_null(), "missing {key}");
    }
}

#[test]
fn single_route() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("golden_mean.toml");
    let out = run(&["pressure", "--route", "transfer", "--config", cfg.to_str().unwrap()], dir.path());
    assert!(out.status.success());
    let v = json(&dir.path().join("pressure.json"));
    assert!(v["result"]["brute"].is_null() && v["result"]["separated"].is_null());
}

/// Numbers are compared to a relative 1e-9, everything else byte for byte.
#[test]
fn gap_scan_matches_golden_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("fixed_point_damping.toml");
    let out = run(&["gap-scan", "--config", cfg.to_str().unwrap(), "--N", "64,128,256"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let got = std::fs::read_to_string(dir.path().join("gap_scan.csv")).unwrap();
    let want = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/gap_scan_fixed_point.csv")).unwrap();
    let (got, want): (Vec<&str>, Vec<&str>) = (got.lines().collect(), want.lines().collect());
    assert_eq!(got.len(), want.len());
    assert_eq!(got[..2], want[..2]);
    for (g, w) in got[2..].iter().zip(&want[2..]) {
        for (a, b) in g.split(',').zip(w.split(',')) {
            let (a, b): (f64, f64) = (a.parse().unwrap(), b.parse().unwrap());
            assert!((a - b).abs() <= 1e-9 * b.abs().max(1.0), "{g} vs {w}");
        }
    }
    let v = json(&dir.path().join("gap_scan.json"));
    assert!(v["result"]["undampedPressure"]["value"].as_f64().unwrap() < 0.0);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let cfg = configs().join("fixed_point_damping.toml");
    let cfg = cfg.to_str().unwrap();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for cmd in ["mass-scan", "entropy"] {
        assert!(run(&[cmd, "--config", cfg, "--N", "64"], a.path()).status.success());
        assert!(run(&[cmd, "--config", cfg, "--N", "64"], b.path()).status.success());
    }
    for f in ["mass_scan.csv", "mass_scan.json", "entropy.json"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn seed_changes_the_estimate_and_the_stamp() {
    let cfg = configs().join("golden_mean.toml");
    let cfg = cfg.to_str().unwrap();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(run(&["entropy", "--config", cfg, "--seed", "1"], a.path()).status.success());
    assert!(run(&["entropy", "--config", cfg, "--seed", "2"], b.path()).status.success());
    let (x, y) = (json(&a.path().join("entropy.json")), json(&b.path().join("entropy.json")));
    assert_ne!(x["configHash"], y["configHash"]);
    assert_eq!(y["seed"], 2);
    assert_ne!(x["result"]["smb"]["value"], y["result"]["smb"]["value"]);
    assert_eq!(x["result"]["entropy"], y["result"]["entropy"]);
}

#[test]
fn config_errors_exit_2_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[quantum]\ndims = [64\n").unwrap();
    let out = run(&["gap-scan", "--config", bad.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "config");
    assert!(err["message"].as_str().unwrap().contains("line 2"));

    std::fs::write(&bad, "[damping]\ntype = \"cells\"\nvalues = [0.0]\n").unwrap();
    let out = run(&["spectrum", "--config", bad.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("damping.values"));

    let out = run(&["spectrum", "--N", "64,1"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("quantum.dims[1]"));
}

#[test]
fn inadmissible_dimension_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "[map]\nmatrix = [[3, 2], [1, 1]]\n").unwrap();
    let out = run(&["spectrum", "--config", cfg.to_str().unwrap(), "--N", "64"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn caps_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("golden_mean.toml");
    let out = run(&["pressure", "--route", "brute", "--cap", "100", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(3));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "cap_exceeded");

    let small = dir.path().join("small.toml");
    std::fs::write(&small, "[quantum]\ndense_cap = 32\n").unwrap();
    let out = run(&["spectrum", "--config", small.to_str().unwrap(), "--N", "64"], dir.path());
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn spectrum_dump_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "[damping]\ntype = \"trig\"\nconstant = 0.5\ncos = [0.2]\n[quantum]\ndump_matrices = true\n").unwrap();
    let out = run(&["spectrum", "--config", cfg.to_str().unwrap(), "--N", "16"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let bytes = std::fs::read(dir.path().join("propagator_N16.bin")).unwrap();
    assert_eq!(bytes.len(), 24 + 16 * 16 * 16);
    assert_eq!(&bytes[..8], b"PLMATRX1");
    let (kind, m) = pressure_lab::quantum::read_matrix(&bytes).unwrap();
    assert_eq!((kind, m.nrows()), (2, 16));
    let v = json(&dir.path().join("spectrum.json"));
    let row = &v["result"][0];
    let (g, d) = (row["decaySum"].as_f64().unwrap(), row["dampingSum"].as_f64().unwrap());
    assert!((g - d).abs() < 1e-8);
    let csv = std::fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    assert!(csv.lines().nth(1).unwrap() == "N,id,re,im,decay_rate,phase,residual");
    assert_eq!(csv.lines().count(), 2 + 16);
}

#[test]
fn quantum_scans_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("fixed_point_damping.toml");
    let cfg = cfg.to_str().unwrap();
    for cmd in ["functional", "dispersive-check", "subinvariance", "counting-lemma"] {
        let out = run(&[cmd, "--config", cfg, "--N", "64"], dir.path());
        assert!(out.status.success(), "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let f = json(&dir.path().join("functional.json"));
    for row in f["result"].as_array().unwrap() {
        assert!((row["totalRe"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    }
    let d = json(&dir.path().join("dispersive.json"));
    assert_eq!(d["result"]["rows"][0]["holds"], true);
    let s = json(&dir.path().join("subinvariance.json"));
    assert!(s["result"]["maxIdentityDefect"].as_f64().unwrap() < 1e-10);
    let c = std::fs::read_to_string(dir.path().join("counting_lemma.csv")).unwrap();
    assert!(c.lines().skip(2).all(|l| l.ends_with(",true")));
}
