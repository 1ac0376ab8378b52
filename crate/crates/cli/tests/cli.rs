use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn calibration() -> String {
    root().join("data/casablanca_2021-12-01.csv").display().to_string()
}

fn teleport(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_teleport")).args(args).output().expect("binary runs")
}

fn ok_json(args: &[&str]) -> (Value, Vec<u8>) {
    let out = teleport(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    (serde_json::from_slice(&out.stdout).expect("valid JSON"), out.stdout)
}

fn assert_valid(doc: &Value, schema: &str) {
    let path = root().join("schemas").join(format!("{schema}.schema.json"));
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    let errors: Vec<String> = validator.iter_errors(doc).map(|e| format!("{} at {}", e, e.instance_path)).collect();
    assert!(errors.is_empty(), "schema violations: {errors:#?}");
}

fn values_file(dir: &tempfile::TempDir, text: &str) -> String {
    let p = dir.path().join("values.txt");
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn noiseless_run_is_perfect_and_uniform() {
    let (doc, raw) = ok_json(&["run", "--seed", "3"]);
    assert_valid(&doc, "run");
    assert!(raw.ends_with(b"}\n"));
    assert_eq!(doc["schema_version"], "1.0.0");
    assert_eq!(doc["shots"], 8192);
    assert_eq!(doc["resources"]["bell_pairs"], 2);
    assert!((doc["ideal"]["fidelity"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    let dev = &doc["device"];
    assert!((dev["fidelity"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    assert_eq!(dev["cost"]["swap_count"], 0);
    let hist = dev["histogram"].as_object().unwrap();
    assert_eq!(hist.len(), 4);
    let total: u64 = hist.values().map(|v| v.as_u64().unwrap()).sum();
    assert_eq!(total, 8192);
    for v in hist.values() {
        assert!((v.as_u64().unwrap() as f64 - 2048.0).abs() < 4.0 * 39.2);
    }
}

#[test]
fn calibrated_run_beats_classical_limit() {
    let cal = calibration();
    let (doc, _) = ok_json(&["run", "--calibration", &cal, "--reps", "10", "--seed", "1"]);
    assert_valid(&doc, "run");
    let reps = &doc["device"]["repetitions"];
    assert_eq!(reps["fidelities_percent"].as_array().unwrap().len(), 10);
    let mean = reps["stats"]["mean"].as_f64().unwrap();
    assert!(mean > 200.0 / 3.0 && mean < 98.0, "mean {mean}");
    let f = doc["device"]["fidelity"].as_f64().unwrap();
    assert!(f > 2.0 / 3.0 && f < 0.98);
}

#[test]
fn output_is_byte_identical_for_a_seed() {
    let cal = calibration();
    let args = ["run", "--calibration", &cal, "--reps", "3", "--seed", "11", "--shots", "2000"];
    let (_, a) = ok_json(&args);
    let (_, b) = ok_json(&args);
    assert_eq!(a, b);
    let (_, one) = ok_json(&[&["--workers", "1"], &args[..]].concat());
    let (_, four) = ok_json(&[&["--workers", "4"], &args[..]].concat());
    assert_eq!(a, one);
    assert_eq!(one, four);
    let (_, other) = ok_json(&["run", "--calibration", &cal, "--reps", "3", "--seed", "12", "--shots", "2000"]);
    assert_ne!(a, other);
}

#[test]
fn out_and_csv_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run.json");
    let csv = dir.path().join("hist.csv");
    let o = teleport(&["run", "--shots", "1000", "--out", out.to_str().unwrap(), "--csv", csv.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let mut rdr = csv::Reader::from_path(&csv).unwrap();
    assert_eq!(rdr.headers().unwrap(), vec!["outcome", "count", "frequency"]);
    let mut total = 0;
    for rec in rdr.records() {
        let rec = rec.unwrap();
        let count: u64 = rec[1].parse().unwrap();
        assert_eq!(doc["device"]["histogram"][&rec[0]].as_u64().unwrap(), count);
        total += count;
    }
    assert_eq!(total, 1000);
}

#[test]
fn config_file_with_relative_calibration() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(calibration(), dir.path().join("cal.csv")).unwrap();
    let cfg = dir.path().join("exp.toml");
    std::fs::write(
        &cfg,
        "scheme = \"general_two_qubit\"\nshots = 4096\nseed = 5\nnoise = { calibration = \"cal.csv\" }\n\
         state = [[0.7071067811865476, 0.0], [0.0, 0.0], [0.0, 0.0], [0.7071067811865476, 0.0]]\n",
    )
    .unwrap();
    let (doc, _) = ok_json(&["run", "--config", cfg.to_str().unwrap()]);
    assert_valid(&doc, "run");
    assert_eq!(doc["scheme"], "general_two_qubit");
    assert_eq!(doc["shots"], 4096);
    assert_eq!(doc["seed"], 5);
    // Flags override the file.
    let (doc, _) = ok_json(&["run", "--config", cfg.to_str().unwrap(), "--shots", "100"]);
    assert_eq!(doc["shots"], 100);
}

#[test]
fn bad_config_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    std::fs::write(&cfg, "shotz = 10\n").unwrap();
    let o = teleport(&["run", "--config", cfg.to_str().unwrap()]);
    assert!(!o.status.success());
    std::fs::write(&cfg, "[chi_a]\nalpha = [0.9, 0.0]\nbeta = [0.9, 0.0]\n").unwrap();
    let o = teleport(&["run", "--config", cfg.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("norm"));
}

#[test]
fn cluster_scheme_has_no_device_section() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    std::fs::write(&cfg, "scheme = \"cluster5\"\n").unwrap();
    let (doc, _) = ok_json(&["run", "--config", cfg.to_str().unwrap()]);
    assert_valid(&doc, "run");
    assert!(doc["device"].is_null());
    assert_eq!(doc["resources"]["channel_qubits"], 5);
    let cal = calibration();
    assert!(!teleport(&["run", "--config", cfg.to_str().unwrap(), "--calibration", &cal]).status.success());
}

#[test]
fn compare_reports_equivalence() {
    let (doc, _) = ok_json(&["compare"]);
    assert_valid(&doc, "compare");
    assert_eq!(doc["equivalent"], true);
    assert_eq!(doc["cluster5"]["channel_qubits"], 5);
    assert_eq!(doc["two_bell"]["channel_qubits"], 4);
}

#[test]
fn tomography_sampled_and_exact() {
    let (doc, _) = ok_json(&["tomography", "--seed", "2"]);
    assert_valid(&doc, "tomography");
    assert_eq!(doc["mode"], "sampled");
    assert!(doc["fidelity"].as_f64().unwrap() > 0.99);
    let (doc, _) = ok_json(&["tomography", "--exact"]);
    assert_valid(&doc, "tomography");
    assert!((doc["fidelity"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    let cal = calibration();
    let (doc, _) = ok_json(&["tomography", "--calibration", &cal, "--reps", "4"]);
    assert_valid(&doc, "tomography");
    assert_eq!(doc["repetitions"]["reps"], 4);
}

#[test]
fn stats_of_listed_values() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(root().join("data/hardware_fidelities.txt")).unwrap();
    let (doc, _) = ok_json(&["stats", &values_file(&dir, &text)]);
    assert_valid(&doc, "stats");
    assert_eq!(doc["count"], 10);
    assert!((doc["mean"].as_f64().unwrap() - 79.636).abs() < 1e-3);
    assert!((doc["sample_std"].as_f64().unwrap() - 3.096).abs() < 1e-3);
}

#[test]
fn stats_needs_two_values() {
    let dir = tempfile::tempdir().unwrap();
    let o = teleport(&["stats", &values_file(&dir, "80.0\n")]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("need ≥ 2 values"));
}

#[test]
fn route_default_and_custom_graph() {
    let dir = tempfile::tempdir().unwrap();
    let circuit = dir.path().join("tri.txt");
    std::fs::write(&circuit, "qubits 3\nCNOT 0 1\nCNOT 1 2\nCNOT 2 0\n").unwrap();
    let (doc, _) = ok_json(&["route", circuit.to_str().unwrap()]);
    assert_valid(&doc, "route");
    assert_eq!(doc["cost"]["swap_count"], 1);
    assert_eq!(doc["cost"]["cnot_count"], 6);
    assert_eq!(doc["physical_qubits"], 7);

    let graph = dir.path().join("triangle.edges");
    std::fs::write(&graph, "# full triangle\n0 1\n1 2\n2 0\n").unwrap();
    let (doc, _) = ok_json(&["route", circuit.to_str().unwrap(), "--graph", graph.to_str().unwrap()]);
    assert_valid(&doc, "route");
    assert_eq!(doc["cost"]["swap_count"], 0);
    assert_eq!(doc["cost"]["cnot_count"], 3);
}

#[test]
fn missing_file_fails_cleanly() {
    let o = teleport(&["stats", "/nonexistent/values.txt"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
}
