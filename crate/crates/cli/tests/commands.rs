use std::fs;
use std::path::Path;
use std::process::Command;

use serde_json::Value;

/// Runs the tool in-process; returns (exit code, stdout, stderr).
fn dicke(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("dicke").chain(args.iter().copied());
    let code = dicke_cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(line: &str) -> Value {
    serde_json::from_str(line.trim()).unwrap_or_else(|e| panic!("{e}: {line}"))
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn energy_of_the_chaotic_caption_state() {
    let (code, out, _) = dicke(&["energy", "--gamma", "1.5", "--alpha", "0.5", "--state=-6.736,0,1.5,0"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert!((v["energy"].as_f64().unwrap() + 2.0007).abs() < 2e-3, "{v}");
    assert_eq!(v["atomic_inversion"].as_f64(), Some(0.125));
}

#[test]
fn critical_alpha_at_gamma_one_and_a_half() {
    let (code, out, _) = dicke(&["critical-alpha", "--gamma", "1.5"]);
    assert_eq!(code, 0);
    let ac = json(&out)["alpha_c"].as_f64().unwrap();
    assert!((ac - 1.43019).abs() < 1e-3, "{ac}");
}

#[test]
fn uncoupled_vacuum_stays_put() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("traj.csv");
    let (code, out, _) =
        dicke(&["evolve", "--state", "0,0,0,0", "--t-end", "5", "--sample-dt", "0.5", "--out", path_str(&file)]);
    assert_eq!(code, 0);
    let summary = json(&out);
    assert_eq!(summary["rows"].as_u64(), Some(11));
    let text = fs::read_to_string(&file).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,q,p,Q,P,E"));
    for line in lines {
        let cells: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(&cells[1..5], &[0.0; 4]);
        assert_eq!(cells[5], -1.0);
    }
}

#[test]
fn exit_codes_separate_usage_domain_and_numerical_failures() {
    assert_eq!(dicke(&["energy", "--bogus"]).0, 2);
    assert_eq!(dicke(&["sweep", "--count", "1"]).0, 2);
    assert_eq!(dicke(&["shell-ic", "--gamma", "1.5", "--energy", "-1"]).0, 2);
    // outside the atomic disk
    assert_eq!(dicke(&["energy", "--state", "0,0,3,0"]).0, 3);
    // below the bottom of the well
    let (code, _, err) = dicke(&["shell-ic", "--gamma", "1.5", "--alpha", "0.5", "--energy", "-20", "--well", "right"]);
    assert_eq!(code, 3, "{err}");
    // too short to pass the convergence gate
    let (code, out, err) =
        dicke(&["lyapunov", "--gamma", "1.5", "--alpha", "0.5", "--state=-6.736,0,1.5,0", "--t-total", "3"]);
    assert_eq!(code, 4, "{out} {err}");
    assert!(err.contains("inconclusive"), "{err}");
}

#[test]
fn help_exits_cleanly() {
    let (code, out, _) = dicke(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("reproduce"));
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let out_file = dir.path().join("sweep.csv");
    fs::write(
        &cfg,
        format!(
            "[model]\ngamma = 1.0\n[sweep]\nvary = \"alpha\"\nlo = -0.5\nhi = 0.5\ncount = 11\n[output]\npath = \"{}\"\n",
            out_file.display()
        ),
    )
    .unwrap();
    let (code, out, err) = dicke(&["--config", path_str(&cfg), "sweep", "--count", "5"]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(json(&out)["rows"].as_u64(), Some(5));
    let text = fs::read_to_string(&out_file).unwrap();
    assert_eq!(text.lines().count(), 6);

    fs::write(&cfg, "[chaos]\nt_total = 10.0\n").unwrap();
    assert_eq!(dicke(&["--config", path_str(&cfg), "sweep"]).0, 2, "unused block must be rejected");
    fs::write(&cfg, "[model]\ngama = 1.0\n").unwrap();
    assert_eq!(dicke(&["--config", path_str(&cfg), "energy"]).0, 2);
}

#[test]
fn electrical_naming_changes_headers_only() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let base = ["evolve", "--gamma", "1.5", "--alpha", "0.5", "--state", "1.32,0,-1.5,0", "--t-end", "10"];
    let mut canonical = base.to_vec();
    canonical.extend(["--out", path_str(&a)]);
    let mut electrical = base.to_vec();
    electrical.extend(["--out", path_str(&b), "--naming", "electrical"]);
    assert_eq!(dicke(&canonical).0, 0);
    assert_eq!(dicke(&electrical).0, 0);
    let (a, b) = (fs::read_to_string(a).unwrap(), fs::read_to_string(b).unwrap());
    let (ha, rest_a) = a.split_once('\n').unwrap();
    let (hb, rest_b) = b.split_once('\n').unwrap();
    assert_eq!(ha, "t,q,p,Q,P,E");
    assert_eq!(hb, "t,I_L1,V_C1,I_L2,V_C2,E");
    assert_eq!(rest_a, rest_b);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let file = dir.path().join(name);
        let args = [
            "evolve", "--gamma", "1.5", "--alpha", "0.7", "--state", "2.374,0,-1,0", "--t-end", "20",
            "--noise-sigma", "0.01", "--seed", "11", "--out", path_str(&file),
        ];
        assert_eq!(dicke(&args).0, 0);
        fs::read(file).unwrap()
    };
    assert_eq!(run("one.csv"), run("two.csv"));
}

#[test]
fn json_output_parses() {
    let (code, out, err) = dicke(&["sweep", "--vary", "gamma", "--count", "3", "--format", "json"]);
    assert_eq!(code, 0, "{err}");
    let rows = json(&out);
    assert_eq!(rows.as_array().map(Vec::len), Some(3));
    assert_eq!(json(&err)["rows"].as_u64(), Some(3));
}

#[test]
fn reproduce_writes_data_and_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out, err) = dicke(&["reproduce", "fig1f", "--out", path_str(dir.path())]);
    assert_eq!(code, 0, "{err}");
    let v = json(&out);
    assert_eq!(v["jump_detected"], Value::Bool(true));
    assert!(v["jump_Q"].as_f64().unwrap() > 1.0);
    assert!(dir.path().join("fig1f.csv").exists());
    let on_disk = json(&fs::read_to_string(dir.path().join("fig1f.json")).unwrap());
    assert_eq!(on_disk, v);

    let (code, out, err) = dicke(&["reproduce", "fig3b", "--out", path_str(dir.path())]);
    assert_eq!(code, 0, "{err}");
    let v = json(&out);
    assert_eq!(v["label"], "chaotic");
    assert_eq!(v["confined"], Value::Bool(true));
}

#[test]
fn binary_reports_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_dicke");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap();
    let ok = status(&["critical-alpha", "--gamma", "1.5"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("alpha_c"));
    assert_eq!(status(&["critical-alpha"]).status.code(), Some(0));
    assert_eq!(status(&["nonsense"]).status.code(), Some(2));
    assert_eq!(status(&["energy", "--state", "0,0,0,2.5"]).status.code(), Some(3));
    let threads = Command::new(bin).args(["critical-alpha", "--gamma", "1.5"]).env("DICKE_THREADS", "zero").output();
    assert_eq!(threads.unwrap().status.code(), Some(2));
}
