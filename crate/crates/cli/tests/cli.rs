//! End-to-end checks of the magicbench binary.

use std::path::Path;
use std::process::Command;

fn magicbench() -> Command {
    Command::new(env!("CARGO_BIN_EXE_magicbench"))
}

#[test]
fn ed_prints_reference_values() {
    let out = magicbench()
        .args(["ed", "--n", "8", "--h", "1.0"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(
        text.contains("energy = -10.251661790966"),
        "unexpected output:\n{text}"
    );
    assert!(text.contains("m2 = "));
}

#[test]
fn ed_zero_field_notes_degeneracy() {
    let out = magicbench()
        .args(["ed", "--n", "4", "--h", "0.0"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("energy = -4.000000000000"));
    assert!(text.contains("even-parity representative"));
}

#[test]
fn magic_scores_a_state_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.state");
    // |T⟩ = (|0⟩ + e^{iπ/4}|1⟩)/√2: m2 = log2(4/3)
    let r = 0.5f64.sqrt();
    let c = std::f64::consts::FRAC_PI_4.cos() * r;
    let s = std::f64::consts::FRAC_PI_4.sin() * r;
    std::fs::write(&path, format!("magicbench-state v1 n=1\n{r} 0\n{c} {s}\n")).unwrap();
    let out = magicbench()
        .args(["magic", "--state", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("m2 = 0.415037499279"), "output:\n{text}");
}

#[test]
fn magic_rejects_malformed_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.state");
    std::fs::write(&path, "not a state\n").unwrap();
    let out = magicbench()
        .args(["magic", "--state", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(!out.status.success());
}

fn write_config(dir: &Path, extra: &str) -> std::path::PathBuf {
    let output = dir.join("out");
    let config = format!(
        r#"
n = 4
h_grid = [0.0, 1.0]
methods = ["ed", "dmrg", "vqe"]
repeats = 2
output_dir = "{}"
seed_base = 7
workers = 2

[dmrg]
max_bond = 8

[vqe]
layers = 1
max_inner_epochs = 120
max_restarts = 1
{extra}
"#,
        output.display()
    );
    let path = dir.join("sweep.toml");
    std::fs::write(&path, config).unwrap();
    path
}

#[test]
fn sweep_then_report_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "");
    let out = magicbench()
        .args(["sweep", "--config", config.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    let records_csv = dir.path().join("out/records.csv");
    assert!(records_csv.exists());
    let csv = std::fs::read_to_string(&records_csv).unwrap();
    assert!(csv.starts_with(
        "method,n,J,h,repeat,seed,energy,m2,infidelity,energy_error_abs,energy_error_rel,\
         m2_error_abs,wall_time_s,converged"
    ));
    // 2 h-points × (1 ED + 1 DMRG + 2 VQE)
    assert_eq!(csv.lines().count(), 1 + 8);

    // rebuild the report from the journal into a fresh directory
    let report_dir = dir.path().join("report");
    let out = magicbench()
        .args([
            "report",
            "--records",
            dir.path().join("out/records.jsonl").to_str().unwrap(),
            "--output",
            report_dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(report_dir.join("aggregates.csv").exists());
    assert!(report_dir.join("energy_error_abs_n4.svg").exists());

    let a = std::fs::read(dir.path().join("out/records.json")).unwrap();
    let b = std::fs::read(report_dir.join("records.json")).unwrap();
    assert_eq!(a, b, "report regeneration must be byte-identical");
}

#[test]
fn failed_records_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "\n[rbm]\nlearning_rate = 1e8\nmax_epochs = 50\nstop_patience = 10\nn_samples = 64\nn_chains = 4\nburn_in_sweeps = 5\n",
    );
    // swap methods to include the diverging RBM
    let text = std::fs::read_to_string(&config)
        .unwrap()
        .replace("[\"ed\", \"dmrg\", \"vqe\"]", "[\"ed\", \"rbm\"]");
    std::fs::write(&config, text).unwrap();
    let out = magicbench()
        .args(["sweep", "--config", config.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "stderr: {}",
        String::from_utf8_lossy(&out.stderr));
}

#[test]
fn missing_config_is_an_error() {
    let out = magicbench()
        .args(["sweep", "--config", "/nonexistent/sweep.toml"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}
