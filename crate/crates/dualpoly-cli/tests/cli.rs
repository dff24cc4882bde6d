//! Black-box tests of the `dualpoly` binary.

use std::path::Path;
use std::process::{Command, Output};

use dualpoly_cli::manifest::RunManifest;

fn dualpoly(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dualpoly")).args(args).env_remove("DUALPOLY_WORKDIR").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn parity_threshold_degree() {
    let o = dualpoly(&["oracle", "degthr", "--fn", "parity", "--n", "3"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("PASS: threshold degree = 3"));
}

#[test]
fn witness_artifacts_verify_and_reproduce() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = dualpoly(&["--out", out, "witness", "build", "dual-or", "--n", "8"]);
    assert!(o.status.success(), "{}", stdout(&o));
    for f in ["witness.json", "psi.csv", "manifest.json"] {
        assert!(dir.path().join(f).exists(), "missing {f}");
    }
    let m = RunManifest::load(&dir.path().join("manifest.json")).unwrap();
    assert!(m.pass);
    assert!(m.certificate_digests.contains_key("witness"));

    let v = dualpoly(&["verify", "--file", dir.path().join("witness.json").to_str().unwrap()]);
    assert!(v.status.success(), "{}", stdout(&v));

    let r = dualpoly(&["repro", "manifest", dir.path().join("manifest.json").to_str().unwrap()]);
    assert!(r.status.success(), "{}", stdout(&r));
}

#[test]
fn tampered_witness_fails_with_named_invariant() {
    let dir = tempfile::tempdir().unwrap();
    let o = dualpoly(&["--out", dir.path().to_str().unwrap(), "witness", "build", "corrector", "--n", "3", "--d", "1"]);
    assert!(o.status.success());
    let path = dir.path().join("witness.json");
    let mut doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    doc["content"]["table"]["entries"][0][1] = serde_json::json!("12345");
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, doc.to_string()).unwrap();
    let v = dualpoly(&["verify", "--file", bad.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(1));
    assert!(stdout(&v).contains("FAILED invariant"), "{}", stdout(&v));
}

#[test]
fn circuit_roundtrip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = dualpoly(&["--out", dir.path().to_str().unwrap(), "circuits", "mp", "--m", "2", "--r", "2"]);
    assert!(o.status.success());
    let circuit = dir.path().join("circuit.json");
    let env: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&circuit).unwrap()).unwrap();
    let bare = dir.path().join("bare.json");
    std::fs::write(&bare, env["content"].to_string()).unwrap();
    // MP_{2,2} = (x0 or x1) and (x2 or x3).
    for (x, want) in [("1010", "1"), ("1100", "0"), ("0001", "0"), ("0110", "1")] {
        let e = dualpoly(&["circuits", "eval", "--circuit", bare.to_str().unwrap(), "--x", x]);
        assert!(stdout(&e).contains(&format!("value = {want}")), "{x}: {}", stdout(&e));
    }
    assert!(Path::new(&dir.path().join("circuit.dot")).exists());
}

#[test]
fn sign_matrix_commands() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("h.csv");
    std::fs::write(&m, "1,1\n1,-1\n").unwrap();
    // Weights (0, 1/3, 1/3, 1/3) beat the uniform distribution (1/2).
    // Weights (0, 1/3, 1/3, 1/3) beat the uniform distribution, which gives 1/2.
    let d = dualpoly(&["oracle", "disc", "--matrix", m.to_str().unwrap()]);
    assert!(stdout(&d).starts_with("PASS: discrepancy = 1/3"), "{}", stdout(&d));
    let r = dualpoly(&["bounds", "rank1", "--matrix", m.to_str().unwrap()]);
    assert!(stdout(&r).contains("sign-rank <= 1: false"));
}

#[test]
fn usage_errors_exit_nonzero() {
    let o = dualpoly(&["oracle", "degthr"]);
    assert!(!o.status.success());
    let o = dualpoly(&["amplify", "booleanize", "--n", "1", "--m", "1", "--r", "1", "--d", "1", "--theta", "8"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("precondition"));
}
