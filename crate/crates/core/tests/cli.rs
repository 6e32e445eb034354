use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use nokey::harness::ExperimentReport;

fn nokey(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nokey"))
        .args(args)
        .env_remove("NOKEY_OUT_DIR")
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn run_writes_a_verifiable_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p2.json");
    let o = nokey(&[
        "run", "--protocol", "p2", "--n", "2", "--l", "1", "--x", "0", "--x", "0x3", "--seed", "5", "--average",
        "pads", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stderr(&o).contains("PASS"));
    let report = ExperimentReport::from_json(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report.summary.runs, 2);
    assert!(report.metadata.is_some());

    let v = nokey(&["verify", out.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(0), "{}", stderr(&v));
}

#[test]
fn verify_flags_a_tampered_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p1.json");
    let o = nokey(&["run", "--protocol", "p1", "--n", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let mut report = ExperimentReport::from_json(&fs::read_to_string(&out).unwrap()).unwrap();
    report.summary.recovered -= 1;
    fs::write(&out, report.to_json().unwrap()).unwrap();
    assert_eq!(nokey(&["verify", out.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn report_goes_to_stdout_without_out() {
    let o = nokey(&["run", "--protocol", "p1", "--n", "1", "--attack", "phase:x=1,passes=all"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report = ExperimentReport::from_json(&String::from_utf8(o.stdout).unwrap()).unwrap();
    assert_eq!(report.summary.matched_expectation, report.summary.runs);
}

#[test]
fn run_from_shipped_config() {
    let config = Path::new(env!("CARGO_MANIFEST_DIR")).join("experiments/p1_mim.json");
    let o = nokey(&["run", "--config", config.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn qubit_cap_is_a_usage_error() {
    let o = nokey(&["run", "--protocol", "p2", "--n", "3", "--l", "3", "--qubit-cap", "11"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("qubit cap"), "{}", stderr(&o));
}

#[test]
fn bad_arguments_exit_2() {
    assert_eq!(nokey(&["run", "--protocol", "p1", "--n", "2", "--bogus"]).status.code(), Some(2));
    assert_eq!(nokey(&["run", "--protocol", "p9", "--n", "2"]).status.code(), Some(2));
    assert_eq!(nokey(&["run", "--protocol", "p1", "--n", "2", "--x", "4"]).status.code(), Some(2));
    assert_eq!(nokey(&["run", "--protocol", "p2", "--n", "2", "--l", "0"]).status.code(), Some(2));
    assert_eq!(nokey(&["run", "--protocol", "p1", "--n", "2", "--trials", "0"]).status.code(), Some(2));
}

#[test]
fn tables_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let perm = dir.path().join("fa.txt");
    let func = dir.path().join("sa.txt");
    let a = nokey(&["tables", "emit", "--kind", "perm", "--n", "3", "--seed", "4", "--out", perm.to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(0));
    let b = nokey(&[
        "tables", "emit", "--kind", "func", "--n", "2", "--l", "2", "--seed", "4", "--out", func.to_str().unwrap(),
    ]);
    assert_eq!(b.status.code(), Some(0));

    let c = nokey(&["tables", "check", perm.to_str().unwrap()]);
    assert_eq!(c.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&c.stdout).contains("permutation n=3"));
    let d = nokey(&["tables", "check", func.to_str().unwrap()]);
    assert!(String::from_utf8_lossy(&d.stdout).contains("function n=2 l=2"));

    // Pinned tables flow into a run.
    let o = nokey(&[
        "run", "--protocol", "p2", "--n", "2", "--l", "2", "--sa-file", func.to_str().unwrap(), "--keys", "fixed",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    // Repeating an entry breaks bijectivity.
    let text = fs::read_to_string(&perm).unwrap();
    let mut lines: Vec<&str> = text.lines().collect();
    lines[2] = lines[1];
    fs::write(&perm, lines.join("\n") + "\n").unwrap();
    assert_eq!(nokey(&["tables", "check", perm.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn invalid_table_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("junk.txt");
    fs::write(&path, "not a table\n").unwrap();
    assert_ne!(nokey(&["tables", "check", path.to_str().unwrap()]).status.code(), Some(0));
}

#[test]
fn sweep_prints_csv_with_skipped_cells() {
    let o = nokey(&["sweep", "--protocols", "p1,p2", "--n", "1,2", "--l", "1", "--qubit-cap", "6"]);
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "protocol,n,l,t,status,runs,recovery_rate,max_deviation,max_distance,detection_rate,passed"
    );
    assert_eq!(lines.len(), 5);
    assert!(lines.iter().any(|l| l.starts_with("p1,1,0,0,ok")));
    // P2 at n=2, l=1 needs 3n + l = 7 qubits.
    assert!(lines.iter().any(|l| l.starts_with("p2,2,1,0,skipped")), "{text}");
    assert!(lines.iter().all(|l| l.split(',').count() == 11));
}

#[test]
fn out_dir_env_prefixes_relative_paths() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_nokey"))
        .args(["run", "--protocol", "p1", "--n", "1", "--name", "tiny"])
        .env("NOKEY_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert!(dir.path().join("tiny.json").exists());

    let o = Command::new(env!("CARGO_BIN_EXE_nokey"))
        .args(["tables", "emit", "--kind", "perm", "--n", "2", "--out", "sub/f.txt"])
        .env("NOKEY_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("sub/f.txt").exists());
}
