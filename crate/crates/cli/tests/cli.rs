use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fragmentia(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fragmentia"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn fragmentia_threads(threads: &str, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fragmentia"))
        .env("FRAGMENTIA_THREADS", threads)
        .args(args)
        .output()
        .expect("binary runs")
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn manifest(out: &Path) -> Value {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    serde_json::from_str(&std::fs::read_to_string(name).unwrap()).unwrap()
}

#[test]
fn exact_two_wall_census() {
    let out = fragmentia(&["wall-prob", "--k", "2", "--exact"]);
    assert_eq!(out.status.code(), Some(0));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("90/6859"), "{stderr}");
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.lines().any(|l| l.starts_with("2,census,,,0.0131")), "{csv}");
}

#[test]
fn montecarlo_writes_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("k1.csv");
    let out = fragmentia(&["wall-prob", "--k", "1", "--samples", "100000", "--seed", "7", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(&path).unwrap();
    assert!(csv.starts_with("k,method,samples,hits,estimate,stderr,exact,sigma_deviation\n"));
    let m = manifest(&path);
    assert_eq!(m["parameters"]["seed"], 7);
    assert!(m["version"].as_str().unwrap().starts_with(env!("CARGO_PKG_VERSION")));
    let est = m["results"]["montecarlo"]["estimate"].as_f64().unwrap();
    assert!((est - 0.0249).abs() < 0.002);
}

#[test]
fn exit_codes() {
    assert_eq!(fragmentia(&["entropy", "--n", "8"]).status.code(), Some(2));
    assert_eq!(fragmentia(&["wall-prob", "--k", "1"]).status.code(), Some(2));
    assert_eq!(fragmentia(&["wall-prob", "--k", "3", "--exact"]).status.code(), Some(2));
    let guard = fragmentia(&["sff", "--setup", "transport", "--n", "13", "--p", "1", "--seed", "1"]);
    assert_eq!(guard.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&guard.stderr).contains("resource guard"));
    let guard = fragmentia(&["entropy", "--setup", "transport", "--n", "17", "--p", "1", "--seed", "1"]);
    assert_eq!(guard.status.code(), Some(3));
    // a single sample cannot land inside the k = 3 bounds
    assert_eq!(fragmentia(&["wall-prob", "--k", "3", "--samples", "1", "--seed", "1"]).status.code(), Some(1));
}

#[test]
fn output_is_byte_identical_across_thread_counts() {
    let args = [
        "entropy", "--setup", "localisation", "--n", "6", "--p", "0.5", "--realizations", "20", "--tmax", "30",
        "--seed", "3",
    ];
    let a = fragmentia_threads("1", &args);
    let b = fragmentia_threads("3", &args);
    assert_eq!(a.status.code(), Some(0));
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn run_config_matches_flags() {
    let dir = tempfile::tempdir().unwrap();
    let via_flags = dir.path().join("a.csv");
    let via_config = dir.path().join("b.csv");
    let out = fragmentia(&[
        "sff", "--setup", "transport", "--n", "4", "--p", "1", "--realizations", "5", "--tmax", "40", "--seed", "2",
        "--out", via_flags.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let config = dir.path().join("run.json");
    let json = serde_json::json!({
        "command": "sff", "setup": "transport", "n": 4, "p": 1.0, "realizations": 5, "tmax": 40, "seed": 2,
        "out": via_config,
    });
    std::fs::write(&config, json.to_string()).unwrap();
    assert_eq!(fragmentia(&["run", "--config", config.to_str().unwrap()]).status.code(), Some(0));
    assert_eq!(std::fs::read(&via_flags).unwrap(), std::fs::read(&via_config).unwrap());

    let first = std::fs::read_to_string(&via_flags).unwrap();
    let row = first.lines().nth(1).unwrap();
    assert!(row.starts_with("0,256,"), "{row}");

    std::fs::write(&config, r#"{"command":"sff","setup":"transport","n":4,"p":1.0}"#).unwrap();
    assert_eq!(fragmentia(&["run", "--config", config.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn sff_starts_at_d_squared() {
    let out = fragmentia(&[
        "sff", "--setup", "transport", "--n", "8", "--p", "1", "--realizations", "2", "--tmax", "10", "--seed", "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.starts_with("t,K,dK,K_smeared,K_cue,dK_cue\n0,65536,"), "{csv}");
}

#[test]
fn clifford_entropies_are_integers() {
    let out = fragmentia(&[
        "entropy", "--setup", "localisation", "--n", "8", "--p", "0", "--realizations", "50", "--tmax", "40",
        "--seed", "3", "--per-realization",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8(out.stdout).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("realization,t,S"));
    let values: Vec<&str> = lines.map(|l| l.rsplit(',').next().unwrap()).collect();
    assert_eq!(values.len(), 50 * 41);
    assert!(values.iter().all(|v| *v == "0" || *v == "1"));
}

fn scan_json(args: &[&str]) -> Value {
    let out = fragmentia(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn scan_finds_the_planted_wall() {
    let path = fixture("planted_wall.json");
    let v = scan_json(&["scan", "--circuit", path.to_str().unwrap(), "--kmax", "3"]);
    let walls = v["circuits"][0]["walls"].as_array().unwrap();
    assert_eq!(walls.len(), 1);
    assert_eq!(walls[0]["pos"], 5);
    assert_eq!(walls[0]["k"], 1);
    assert_eq!(walls[0]["unperturbed"], true);
}

#[test]
fn fully_rotated_circuits_have_no_unperturbed_walls() {
    let v = scan_json(&["scan", "--n", "60", "--p", "1", "--seed", "1", "--kmax", "2"]);
    assert_eq!(v["summary"]["unperturbed_walls"], 0);
    assert_eq!(v["summary"]["fragments"], 1);
}

#[test]
fn scan_reports_fragment_sizes() {
    let v = scan_json(&["scan", "--n", "50", "--p", "0", "--seed", "1", "--kmax", "2"]);
    let mu = v["summary"]["localisation_length"].as_f64().unwrap();
    assert!((mu - 25.78).abs() < 0.01);
    let fragments = v["circuits"][0]["fragments"].as_array().unwrap();
    assert_eq!(fragments[0]["start"], 0);
    assert_eq!(fragments.last().unwrap()["end"], 49);
}
