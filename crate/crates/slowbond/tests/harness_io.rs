//! End-to-end checks of the experiment driver surfaces: JSON configs, report
//! schema, deterministic reproduction, and the CLI binary.

use std::process::Command;

use slowbond::field::FieldSpec;
use slowbond::harness::{run, validate_report, ExperimentConfig, ExperimentKind};
use slowbond::profile::DensityProfile;

fn martingale_config() -> ExperimentConfig {
    ExperimentConfig {
        kind: ExperimentKind::MartingaleCheck,
        lattice_sizes: vec![16],
        grid_m: 64,
        dt: None,
        t_end: 0.05,
        replicas: 200,
        seed: 99,
        gamma: DensityProfile::Constant { value: 0.5 },
        field: FieldSpec::linear_u(0.5),
        box_eps: 1.0 / 8.0,
        snapshots: 16,
        family_size: 4,
    }
}

#[test]
fn reports_are_written_and_validate() {
    let dir = tempfile::tempdir().unwrap();
    let report = run(&martingale_config(), Some(dir.path())).unwrap();
    assert!(report.all_pass());
    let on_disk: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap())
            .unwrap();
    validate_report(&on_disk).unwrap();
    assert!(dir.path().join("report.schema.json").exists());
    assert!(dir.path().join("martingale.json").exists());
}

#[test]
fn rerunning_the_echoed_config_reproduces_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let first = run(&martingale_config(), Some(dir.path())).unwrap();
    // parse the echoed config back from disk and run it again
    let on_disk: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap())
            .unwrap();
    let echoed: ExperimentConfig = serde_json::from_value(on_disk["config"].clone()).unwrap();
    let second = run(&echoed, None).unwrap();
    assert_eq!(
        serde_json::to_string(&first.checks).unwrap(),
        serde_json::to_string(&second.checks).unwrap()
    );
}

#[test]
fn cli_verify_and_simulate_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("config.json");
    std::fs::write(
        &config_path,
        serde_json::to_string_pretty(&martingale_config()).unwrap(),
    )
    .unwrap();

    let out = dir.path().join("verify_out");
    let status = Command::new(env!("CARGO_BIN_EXE_slowbond"))
        .args(["verify", "--config"])
        .arg(&config_path)
        .arg("--out")
        .arg(&out)
        .arg("--threads")
        .arg("2")
        .status()
        .unwrap();
    assert!(status.success());
    assert!(out.join("report.json").exists());

    let out = dir.path().join("sim_out");
    let status = Command::new(env!("CARGO_BIN_EXE_slowbond"))
        .args(["simulate", "--config"])
        .arg(&config_path)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let csv = std::fs::read_to_string(out.join("trajectory.csv")).unwrap();
    assert!(csv.starts_with("time,site,occupancy"));
    let bin = std::fs::read(out.join("trajectory.bin")).unwrap();
    assert_eq!(u64::from_le_bytes(bin[0..8].try_into().unwrap()), 16);
}

#[test]
fn sweep_runs_config_array() {
    let dir = tempfile::tempdir().unwrap();
    let configs = vec![martingale_config()];
    let path = dir.path().join("sweep.json");
    std::fs::write(&path, serde_json::to_string(&configs).unwrap()).unwrap();
    let out = dir.path().join("sweep_out");
    let status = Command::new(env!("CARGO_BIN_EXE_slowbond"))
        .args(["sweep", "--config"])
        .arg(&path)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    assert!(out.join("summary.json").exists());
    assert!(out.join("run_000").join("report.json").exists());
}
