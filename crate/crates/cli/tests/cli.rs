use std::path::PathBuf;
use std::process::{Command, Output};

use lindsim::engine::step_count;
use lindsim_cli::config::{Model, ModelConfig};
use lindsim_cli::simulate::{simulate, RunMode, SimulateOptions, SIMULATE_HEADER};
use lindsim_cli::verify::VERIFY_HEADER;

fn configs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn bundled() -> Vec<PathBuf> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(configs_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    paths.sort();
    paths
}

fn lindsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lindsim")).args(args).output().unwrap()
}

fn dm_options(time: f64) -> SimulateOptions {
    SimulateOptions { time, epsilon: 1e-3, c0: 1.0, mode: RunMode::DensityMatrix, n_traj: 1, seed: 0 }
}

#[test]
fn bundled_configs_round_trip_and_build() {
    let paths = bundled();
    assert!(paths.len() >= 7);
    for path in paths {
        let cfg = ModelConfig::load(&path).unwrap();
        let again = ModelConfig::from_json(&cfg.to_json()).unwrap();
        assert_eq!(cfg, again, "{}", path.display());
        cfg.model().unwrap();
        cfg.initial_ensemble().unwrap();
        cfg.observable().unwrap();
    }
}

#[test]
fn reported_steps_match_step_count() {
    let cfg = ModelConfig::load(&configs_dir().join("depolarizing.json")).unwrap();
    let Model::Lindblad(spec) = cfg.model().unwrap() else { panic!("time-independent model expected") };
    let (record, _) = simulate(&cfg, &dm_options(1.0)).unwrap();
    assert_eq!(record.r, step_count(&spec, 1.0, 1e-3, 1.0).unwrap().r);
    assert_eq!(record.hamiltonian_queries, 2 * record.r);
    assert_eq!(record.dissipator_queries, record.r);
}

#[test]
fn zero_time_returns_input_state() {
    for path in bundled() {
        let cfg = ModelConfig::load(&path).unwrap();
        let (record, rho) = simulate(&cfg, &dm_options(0.0)).unwrap();
        assert_eq!(record.r, 0);
        assert_eq!(&rho.unwrap(), cfg.initial_ensemble().unwrap().density_matrix(), "{}", path.display());
    }
}

#[test]
fn bad_pauli_letter_exits_with_parse_code() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        "{\n  \"n_qubits\": 1,\n  \"hamiltonian\": [{\"coeff\": 1.0, \"pauli\": \"Q\"}],\n  \"dissipator\": {\"type\": \"dephasing\", \"gamma\": 1.0},\n  \"initial_state\": {\"basis\": \"0\"},\n  \"observable\": [{\"coeff\": 1.0, \"pauli\": \"Z\"}]\n}\n",
    )
    .unwrap();
    let out = lindsim(&["simulate", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3") && err.contains("hamiltonian[0].pauli"), "{err}");
}

#[test]
fn unknown_suite_exits_with_invalid_code() {
    assert_eq!(lindsim(&["verify", "--suite", "nope"]).status.code(), Some(3));
}

#[test]
fn oversized_register_exits_with_cap_code() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("big.json");
    let cfg = format!(
        r#"{{"n_qubits": 11, "dissipator": {{"type": "dephasing", "gamma": 1.0}}, "initial_state": {{"basis": "{}"}}, "observable": [{{"coeff": 1.0, "pauli": "{}"}}]}}"#,
        "0".repeat(11),
        "Z".repeat(11)
    );
    std::fs::write(&path, cfg).unwrap();
    assert_eq!(lindsim(&["simulate", "--config", path.to_str().unwrap()]).status.code(), Some(4));
}

#[test]
fn simulate_csv_has_documented_header() {
    let config = configs_dir().join("reset.json");
    let out = lindsim(&["simulate", "--config", config.to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(SIMULATE_HEADER));
    assert_eq!(lines.next().unwrap().split(',').count(), SIMULATE_HEADER.split(',').count());
}

#[test]
fn json_and_state_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let state = dir.path().join("state.csv");
    let config = configs_dir().join("pauli.json");
    let out = lindsim(&["simulate", "--config", config.to_str().unwrap(), "--json", "--state-out", state.to_str().unwrap()]);
    assert!(out.status.success());
    let record: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(record["mode"], "dm");
    let rows = std::fs::read_to_string(state).unwrap();
    assert_eq!(rows.lines().count(), 1 + 16);
}

#[test]
fn trajectory_output_is_deterministic() {
    let config = configs_dir().join("custom.json");
    let args = ["simulate", "--config", config.to_str().unwrap(), "--mode", "traj", "--ntraj", "500", "--seed", "5"];
    let a = lindsim(&args);
    let b = lindsim(&[&args[..], &["--threads", "3"]].concat());
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn thm3_commuting_instance_has_zero_bound() {
    let config = configs_dir().join("timedep_commuting.json");
    let out = lindsim(&["verify", "--suite", "thm3", "--config", config.to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(VERIFY_HEADER));
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols[2].parse::<f64>().unwrap(), 0.0);
        assert!(cols[1].parse::<f64>().unwrap() <= 1e-9);
        assert_eq!(cols[4], "true");
    }
}

#[test]
fn converge_suite_passes_on_default_model() {
    let out = lindsim(&["verify", "--suite", "converge"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8(out.stdout).unwrap();
    let slope: f64 = text.lines().last().unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((slope - 2.0).abs() <= 0.2);
}

#[test]
fn bounds_suite_passes() {
    assert!(lindsim(&["verify", "--suite", "bounds", "--seed", "3"]).status.success());
}
