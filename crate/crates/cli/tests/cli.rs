use std::path::Path;
use std::process::{Command, Output};

use qcoh_core::coherence::coherence_report;
use qcoh_core::io::{load_document, load_state};
use qcoh_core::ProjectiveBasis;
use serde_json::Value;

fn qcoh(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcoh")).args(args).current_dir(dir).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json report")
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

const PLUS: &str = r#"{"kind":"density","dim":2,"matrix":[[[0.5,0],[0.5,0]],[[0.5,0],[0.5,0]]]}"#;
const MIXED: &str = r#"{"kind":"density","dim":2,"matrix":[[[0.7,0],[0.2,0.1]],[[0.2,-0.1],[0.3,0]]]}"#;
const BB84: &str = r#"{"kind":"ensemble","dim":2,"items":[
  {"p":0.25,"matrix":[[[1,0],[0,0]],[[0,0],[0,0]]]},
  {"p":0.25,"matrix":[[[0,0],[0,0]],[[0,0],[1,0]]]},
  {"p":0.25,"matrix":[[[0.5,0],[0.5,0]],[[0.5,0],[0.5,0]]]},
  {"p":0.25,"matrix":[[[0.5,0],[-0.5,0]],[[-0.5,0],[0.5,0]]]}]}"#;
const BELL: &str = r#"{"kind":"bipartite","dims":[2,2],"matrix":[
  [[0.5,0],[0,0],[0,0],[0.5,0]],
  [[0,0],[0,0],[0,0],[0,0]],
  [[0,0],[0,0],[0,0],[0,0]],
  [[0.5,0],[0,0],[0,0],[0.5,0]]]}"#;

#[test]
fn measure_plus_state() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "plus.json", PLUS);
    let v = json_of(&qcoh(dir.path(), &["measure", "plus.json"]));
    assert!((v["c_r"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(v["tool"], "qcoh");
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn measure_in_basis_file_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "mixed.json", MIXED);
    let s = 0.5f64.sqrt();
    write(
        dir.path(),
        "hadamard.json",
        &format!(r#"{{"kind":"basis","dim":2,"matrix":[[[{s},0],[{s},0]],[[{s},0],[{},0]]]}}"#, -s),
    );
    let v = json_of(&qcoh(dir.path(), &["measure", "mixed.json", "--basis", "hadamard.json"]));
    let rho = load_state(dir.path().join("mixed.json")).unwrap();
    let basis = load_document(dir.path().join("hadamard.json")).unwrap().into_basis().unwrap();
    let direct = coherence_report(&rho, Some(&basis)).unwrap();
    assert!((v["c_r"].as_f64().unwrap() - direct.c_r).abs() < 1e-12);
    assert!((v["c_l1"].as_f64().unwrap() - direct.c_l1).abs() < 1e-12);
    let builtin = coherence_report(&rho, Some(&ProjectiveBasis::hadamard())).unwrap();
    assert!((builtin.c_r - direct.c_r).abs() < 1e-12);
}

#[test]
fn invalid_file_exits_with_input_code() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "bad.json", r#"{"kind":"density","dim":2,"matrix":[[[0.5,0],[0.5,0]],[[0.5,0],[0.6,0]]]}"#);
    let out = qcoh(dir.path(), &["measure", "bad.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("trace"));

    write(dir.path(), "typo.json", r#"{"kind":"density","dim":2,"matrx":[]}"#);
    let out = qcoh(dir.path(), &["measure", "typo.json"]);
    assert_eq!(out.status.code(), Some(2));

    let out = qcoh(dir.path(), &["measure", "missing.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn holevo_of_bb84_is_one_bit() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "bb84.json", BB84);
    let v = json_of(&qcoh(dir.path(), &["holevo", "bb84.json"]));
    assert!((v["chi"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((v["il"].as_f64().unwrap() - v["cl"].as_f64().unwrap()).abs() < 1e-9);
}

#[test]
fn access_of_bb84_is_half_a_bit() {
    // A Z (or X) measurement identifies half of the states perfectly and
    // learns nothing about the other half.
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "bb84.json", BB84);
    let v = json_of(&qcoh(dir.path(), &["access", "bb84.json", "--restarts", "64", "--seed", "3"]));
    assert!((v["accessible_info"].as_f64().unwrap() - 0.5).abs() < 1e-6);
    assert_eq!(v["seed"], 3);
    assert_eq!(v["restarts"], 64);
}

#[test]
fn discord_of_bell_state_is_one() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "bell.json", BELL);
    let v = json_of(&qcoh(dir.path(), &["discord", "bell.json"]));
    assert!((v["discord"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    assert!((v["mutual_info"].as_f64().unwrap() - 2.0).abs() < 1e-9);
}

#[test]
fn erase_loses_all_coherence() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "plus.json", PLUS);
    let v = json_of(&qcoh(dir.path(), &["erase", "plus.json"]));
    assert!((v["il"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!(v["h_xy"].as_f64().unwrap().abs() < 1e-9);
}

#[test]
fn table_output_is_rounded() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "mixed.json", MIXED);
    let out = qcoh(dir.path(), &["measure", "mixed.json", "--format", "table"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let line = text.lines().find(|l| l.starts_with("c_r ")).unwrap();
    let value = line.split_whitespace().last().unwrap();
    assert_eq!(value.split('.').nth(1).unwrap().len(), 6);
}

#[test]
fn random_files_are_valid_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["s.json", "t.json"] {
        let out = qcoh(dir.path(), &["random", "density", "-d", "4", "--rank", "2", "--seed", "1", "-o", name]);
        assert!(out.status.success());
    }
    let a = std::fs::read(dir.path().join("s.json")).unwrap();
    let b = std::fs::read(dir.path().join("t.json")).unwrap();
    assert_eq!(a, b);
    assert_eq!(load_state(dir.path().join("s.json")).unwrap().dim(), 4);

    let out = qcoh(dir.path(), &["random", "separable", "--dims", "2x2", "-n", "3", "--seed", "1", "-o", "sep.json"]);
    assert!(out.status.success());
    let bip = load_document(dir.path().join("sep.json")).unwrap().into_bipartite().unwrap();
    assert_eq!(bip.dims(), (2, 2));

    let out = qcoh(dir.path(), &["random", "ensemble", "-d", "3", "-n", "4", "--seed", "2", "-o", "e.json"]);
    assert!(out.status.success());
    let v = json_of(&qcoh(dir.path(), &["holevo", "e.json"]));
    assert_eq!(v["members"], 4);
}

#[test]
fn random_rejects_bad_dims() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(qcoh(dir.path(), &["random", "separable", "--dims", "2by2"]).status.code(), Some(2));
    assert_eq!(qcoh(dir.path(), &["random", "density", "-d", "3", "--rank", "5"]).status.code(), Some(2));
}

#[test]
fn verify_all_smoke() {
    let dir = tempfile::tempdir().unwrap();
    let out = qcoh(dir.path(), &["verify", "all", "-n", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["n_instances"], v["n_passed"]);
    assert!(!dir.path().join("counterexamples").exists());
}

#[test]
fn verify_is_deterministic_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let run = || {
        let mut v = json_of(&qcoh(dir.path(), &["verify", "theorem1", "-n", "200", "--seed", "7"]));
        v["wall_time_s"] = Value::Null;
        for s in v["suites"].as_array_mut().unwrap() {
            s["wall_time_s"] = Value::Null;
        }
        v
    };
    let a = run();
    assert_eq!(a, run());
    assert_eq!(a["n_passed"], 200);
    assert!(a["suites"][0]["worst"]["max_abs_il_minus_cl"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn verify_eq5to8_on_two_qubits() {
    let dir = tempfile::tempdir().unwrap();
    let v = json_of(&qcoh(dir.path(), &["verify", "eq5to8", "-n", "40", "--seed", "7", "--dims", "2x2"]));
    let worst = &v["suites"][0]["worst"];
    for k in ["min_slack_eq5", "min_slack_eq6", "min_slack_eq7", "min_slack_eq8"] {
        assert!(worst[k].as_f64().unwrap() >= -1e-7, "{k}");
    }
}

#[test]
fn verify_rejects_unknown_suite() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(qcoh(dir.path(), &["verify", "theorem9"]).status.code(), Some(2));
    assert_eq!(qcoh(dir.path(), &["verify", "eq5to8", "--dims", "2x9"]).status.code(), Some(2));
}
