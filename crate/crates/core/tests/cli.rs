//! End-to-end runs of the `trimqc` binary.

use std::path::Path;
use std::process::{Command, Output};

fn trimqc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trimqc"))
        .args(args)
        .env_remove("TRIMQC_THREADS")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

#[test]
fn lattice_dump() {
    let v = json(&trimqc(&["lattice", "--L", "4"]));
    assert_eq!(v["n_sites"], 10);
    assert_eq!(v["bonds"].as_array().unwrap().len(), 18);
    assert_eq!(v["bonds"][0], serde_json::json!([1, 2, "omega"]));
}

#[test]
fn ferro_triangle_is_nearly_maximal() {
    let v = json(&trimqc(&["mqc", "--L", "2", "--J", "-6", "--omega", "1", "--eta", "1", "--center", "2"]));
    let t_n = v["t_n"].as_f64().unwrap();
    assert!(t_n > 0.9 && t_n <= 1.0, "t_n = {t_n}");
    assert_eq!(v["center"], 2);
    assert_eq!(v["pairwise"].as_object().unwrap().len(), 2);
}

#[test]
fn spectrum_csv() {
    let out = trimqc(&["spectrum", "--L", "2", "--J", "6"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 9);
    assert_eq!(lines[0], "index,energy");
    assert_eq!(lines[1], "0,-2.60555127546");
}

#[test]
fn spectrum_with_vectors_writes_manifests() {
    let dir = tempfile::tempdir().unwrap();
    let energies = dir.path().join("e.csv");
    let vectors = dir.path().join("v.csv");
    let out = trimqc(&[
        "spectrum", "--L", "3", "--J", "6", "--k", "3",
        "--out", energies.to_str().unwrap(),
        "--vectors", vectors.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = std::fs::read_to_string(&vectors).unwrap();
    assert_eq!(v.lines().next().unwrap(), "basis,v0,v1,v2");
    assert_eq!(v.lines().count(), 65);
    for p in [&energies, &vectors] {
        let manifest = Path::new(&format!("{}.manifest.json", p.display())).to_path_buf();
        let m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(manifest).unwrap()).unwrap();
        assert_eq!(m["invocation"][1], "spectrum");
    }
}

#[test]
fn thermal_weights_sum_to_one() {
    let out = trimqc(&["thermal", "--L", "2", "--J", "6", "--T", "0.5"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let total: f64 = text.lines().skip(1).map(|l| l.split(',').nth(2).unwrap().parse::<f64>().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-10);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"L": 2, "J": -6, "center": 1}"#).unwrap();
    let from_cfg = json(&trimqc(&["--config", cfg.to_str().unwrap(), "mqc"]));
    assert_eq!(from_cfg["J"], -6.0);
    assert_eq!(from_cfg["center"], 1);
    let flagged = json(&trimqc(&["mqc", "--config", cfg.to_str().unwrap(), "--J", "6"]));
    assert_eq!(flagged["J"], 6.0);
    assert_eq!(flagged["L"], 2);
}

#[test]
fn usage_errors_exit_1() {
    for args in [
        vec!["mqc", "--L", "2"],
        vec!["mqc", "--L", "2", "--J", "6", "--omega", "-1"],
        vec!["mqc", "--L", "2", "--J", "6", "--center", "4"],
        vec!["lattice", "--L", "1"],
        vec!["sweep", "--preset", "fig99", "--out", "x"],
        vec!["frobnicate"],
    ] {
        let out = trimqc(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn expensive_thermal_is_refused_with_exit_2() {
    let out = trimqc(&["mqc", "--L", "5", "--J", "6", "--T", "0.1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("allow-expensive"));
    let dir = tempfile::tempdir().unwrap();
    let out = trimqc(&["sweep", "--preset", "fig8d", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    // refusal happens before anything is written
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn fig4_preset_writes_one_csv_per_size() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("runs/fig4");
    let out = trimqc(&["sweep", "--preset", "fig4", "--resolution", "3", "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut csvs: Vec<String> = std::fs::read_dir(&out_dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.ends_with(".csv"))
        .collect();
    csvs.sort();
    assert_eq!(csvs, ["fig4_N10.csv", "fig4_N15.csv", "fig4_N3.csv", "fig4_N6.csv"]);
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("fig4_N15.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["preset"], "fig4");
    assert!(manifest["spec"].is_object());
    let csv = std::fs::read_to_string(out_dir.join("fig4_N15.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 3 * 3);
}

#[test]
fn sweep_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("grid.json");
    std::fs::write(
        &spec,
        r#"{"L": 3, "axes": [{"param": "eta", "min": 0, "max": 3, "n_points": 4}, {"param": "T", "values": [0, 0.1]}],
            "fixed": {"J": 6, "omega": 1}, "observables": ["T_N(2)", "pairwise_sum(2)", "energies(3)"]}"#,
    )
    .unwrap();
    let mut outputs = Vec::new();
    for (run, threads) in [("a", "1"), ("b", "1"), ("c", "4")] {
        let out_dir = dir.path().join(run);
        let out = trimqc(&[
            "sweep", "--spec", spec.to_str().unwrap(), "--threads", threads, "--out", out_dir.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        outputs.push(std::fs::read(out_dir.join("grid.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
    let text = String::from_utf8(outputs[0].clone()).unwrap();
    assert!(text.starts_with("T,eta,T_N(2),pairwise_sum(2),E0,E1,E2,residual,clamped,truncation_weight,error\n"));
}

#[test]
fn help_and_version_exit_0() {
    assert!(trimqc(&["--help"]).status.success());
    assert!(trimqc(&["--version"]).status.success());
}
