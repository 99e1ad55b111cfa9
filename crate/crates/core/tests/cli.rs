mod common;

use std::path::{Path, PathBuf};
use std::process::Command;

use common::*;
use jnr_core::cli::parse_operator_file;
use jnr_core::hermitian::HermitianOperator;
use jnr_core::JnrError;

fn write_op(dir: &Path, name: &str, op: &HermitianOperator) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, op.to_json_string()).unwrap();
    path
}

fn jnr(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_jnr")).args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn operator_file_examples() {
    let dir = tempfile::tempdir().unwrap();
    let z = dir.path().join("z.json");
    std::fs::write(&z, r#"{"d":2,"re":[[1,0],[0,-1]]}"#).unwrap();
    assert_eq!(parse_operator_file(&z).unwrap(), HermitianOperator::pauli_z());

    let y = dir.path().join("y.json");
    std::fs::write(&y, r#"{"d":2,"re":[[0,0],[0,0]],"im":[[0,1],[-1,0]]}"#).unwrap();
    let op = parse_operator_file(&y).unwrap();
    assert_eq!(op.matrix()[(0, 1)].im, 1.0);
    assert_eq!(op.matrix()[(1, 0)].im, -1.0);

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"d":2,"re":[[0,1],[2,0]]}"#).unwrap();
    assert!(matches!(
        parse_operator_file(&bad),
        Err(JnrError::NonHermitianInput { .. })
    ));

    let garbled = dir.path().join("garbled.json");
    std::fs::write(&garbled, "{\"d\":2,\n\"re\":[[1,0],").unwrap();
    match parse_operator_file(&garbled) {
        Err(JnrError::Parse { context, .. }) => assert!(context.contains("line 2"), "{context}"),
        other => panic!("expected parse error, got {other:?}"),
    }
}

#[test]
fn boundary_csv_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = face_pair();
    let ops = format!(
        "{},{}",
        s(&write_op(dir.path(), "a.json", &a)),
        s(&write_op(dir.path(), "b.json", &b))
    );
    let out1 = dir.path().join("p1.csv");
    let out2 = dir.path().join("p2.csv");
    for out in [&out1, &out2] {
        let r = jnr(&["boundary", "--ops", &ops, "--directions", "360", "--out", s(out)]);
        assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    }
    let t1 = std::fs::read(&out1).unwrap();
    assert_eq!(t1, std::fs::read(&out2).unwrap());
    let text = String::from_utf8(t1).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "dir_1,dir_2,p_1,p_2,support,multiplicity,depth"
    );
    assert!(lines.count() >= 360);
}

#[test]
fn boundary_general_strategy_with_seed() {
    let dir = tempfile::tempdir().unwrap();
    let (x, y) = complex_pair();
    let ops = format!(
        "{},{},{}",
        s(&write_op(dir.path(), "x.json", &x)),
        s(&write_op(dir.path(), "y.json", &y)),
        s(&write_op(dir.path(), "s.json", &x.square().add(&y.square()).unwrap()))
    );
    let run = |seed: &str| {
        let r = jnr(&[
            "boundary", "--ops", &ops, "--directions", "40", "--strategy", "seeded_uniform",
            "--seed", seed, "--threads", "2",
        ]);
        assert!(r.status.success());
        r.stdout
    };
    assert_eq!(run("5"), run("5"));
    assert_ne!(run("5"), run("6"));
}

#[test]
fn uncertainty_bracket_json() {
    let dir = tempfile::tempdir().unwrap();
    let (x, y) = complex_pair();
    let xp = write_op(dir.path(), "x.json", &x);
    let yp = write_op(dir.path(), "y.json", &y);
    let out = dir.path().join("bracket.json");
    let r = jnr(&[
        "uncertainty", "--x", s(&xp), "--y", s(&yp), "--kind", "sum", "--directions", "1082",
        "--out", s(&out),
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    let (lo, up) = (v["lower"].as_f64().unwrap(), v["upper"].as_f64().unwrap());
    assert!(lo <= 0.46875 && 0.46875 <= up, "[{lo}, {up}]");
    assert_eq!(v["directions"].as_u64().unwrap(), 1082);
    assert_eq!(v["argmin_point"].as_array().unwrap().len(), 3);
    assert_eq!(v["argmin_variances"].as_array().unwrap().len(), 2);
}

#[test]
fn hamiltonian_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("ising");
    let r = jnr(&["hamiltonian", "--model", "ising", "--sites", "2", "--out-prefix", s(&prefix)]);
    assert!(r.status.success());
    for t in ["H1", "H2", "H3"] {
        assert!(dir.path().join(format!("ising_{t}.json")).exists());
    }
    let h1 = parse_operator_file(&dir.path().join("ising_H1.json")).unwrap();
    let zz = HermitianOperator::pauli_z().kron(&HermitianOperator::pauli_z());
    assert!(h1.approx_eq(&zz, 1e-15));
}

#[test]
fn classify_thermal_separable_spectrum_energy() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = cusp_pair();
    let ops = format!(
        "{},{}",
        s(&write_op(dir.path(), "h0.json", &a)),
        s(&write_op(dir.path(), "h1.json", &b))
    );
    let r = jnr(&["classify", "--ops", &ops]);
    assert!(r.status.success());
    let v: serde_json::Value = serde_json::from_slice(&r.stdout).unwrap();
    assert_eq!(v["flat_parts"].as_array().unwrap().len(), 2);

    let r = jnr(&["thermal", "--ops", &ops, "--betas", "0,1,inf", "--directions", "16"]);
    assert!(r.status.success());
    let text = String::from_utf8(r.stdout).unwrap();
    assert_eq!(text.lines().count(), 1 + 3 * 16);
    assert!(text.lines().nth(1).unwrap().starts_with("0,"));

    let report = dir.path().join("report.json");
    let r = jnr(&["spectrum", "--ops", &ops, "--num-thetas", "360", "--report", s(&report)]);
    assert!(r.status.success());
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&report).unwrap()).unwrap();
    assert_eq!(v["crossings"].as_array().unwrap().len(), 2);

    let r = jnr(&["energy-bounds", "--ops", &ops, "--known", "-1,1", "--query", "0,0.5"]);
    assert!(r.status.success());
    let v: serde_json::Value = serde_json::from_slice(&r.stdout).unwrap();
    for b in v["bounds"].as_array().unwrap() {
        assert!(b["lower"].as_f64().unwrap() <= b["upper"].as_f64().unwrap());
    }

    let zz = HermitianOperator::pauli_z().kron(&HermitianOperator::pauli_z());
    let xx = HermitianOperator::pauli_x().kron(&HermitianOperator::pauli_x());
    let two = format!(
        "{},{}",
        s(&write_op(dir.path(), "zz.json", &zz)),
        s(&write_op(dir.path(), "xx.json", &xx))
    );
    let r = jnr(&["separable", "--ops", &two, "--dims", "2,2", "--directions", "8", "--restarts", "4"]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    assert_eq!(String::from_utf8(r.stdout).unwrap().lines().count(), 9);
}

#[test]
fn error_exits() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"d":2,"re":[[0,1],[2,0]]}"#).unwrap();
    let z = write_op(dir.path(), "z.json", &HermitianOperator::pauli_z());

    let r = jnr(&["boundary", "--ops", &format!("{},{}", s(&bad), s(&z))]);
    assert_eq!(r.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&r.stderr).unwrap();
    assert_eq!(v["error"], "NonHermitianInput");
    assert!(v["message"].as_str().unwrap().contains("max |H - H^dagger|"));

    let missing = dir.path().join("missing.json");
    let r = jnr(&["classify", "--ops", &format!("{},{}", s(&missing), s(&z))]);
    assert_eq!(r.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&r.stderr).unwrap();
    assert_eq!(v["error"], "IoError");

    let r = jnr(&["thermal", "--ops", s(&z), "--betas", "-1"]);
    assert_eq!(r.status.code(), Some(2));
    let r = jnr(&["boundary", "--ops", s(&z), "--strategy", "nope"]);
    assert_eq!(r.status.code(), Some(2));
    let r = jnr(&["uncertainty", "--x", s(&z), "--y", s(&z), "--directions", "10"]);
    assert_eq!(r.status.code(), Some(2));
    let r = jnr(&["bogus"]);
    assert_eq!(r.status.code(), Some(2));
    let r = jnr(&["boundary", "--ops", s(&z), "--gap-tol", "0"]);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn failed_run_leaves_no_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let z = write_op(dir.path(), "z.json", &HermitianOperator::pauli_z());
    let x = write_op(dir.path(), "x.json", &HermitianOperator::pauli_x());
    let out = dir.path().join("out.csv");
    std::fs::write(&out, "previous").unwrap();
    let r = jnr(&[
        "boundary", "--ops", &format!("{},{}", s(&z), s(&x)), "--strategy", "fibonacci3d",
        "--out", s(&out),
    ]);
    assert_ne!(r.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&out).unwrap(), "previous");
    let leftovers = std::fs::read_dir(dir.path()).unwrap().count();
    assert_eq!(leftovers, 3);
}

#[test]
fn csv_numbers_round_trip() {
    use jnr_core::cli::num;
    for x in [0.0, -0.0, 1.0, 0.1, -2.5e-17, 1e-5, 9.99e-6, std::f64::consts::SQRT_2, 3e20, f64::MIN_POSITIVE] {
        let text = num(x);
        assert_eq!(text.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{text}");
    }
    assert_eq!(num(1.2246467991473532e-16), "1.2246467991473532e-16");
    assert_eq!(num(0.25), "0.25");
    assert_eq!(num(f64::INFINITY), "inf");
}

#[test]
fn output_does_not_depend_on_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let (x, y) = complex_pair();
    let xp = write_op(dir.path(), "x.json", &x);
    let yp = write_op(dir.path(), "y.json", &y);
    let ops = format!("{},{},{}", s(&xp), s(&yp), s(&xp));
    let run = |threads: &str, args: &[&str]| {
        let mut all = vec!["--seed", "3", "--threads", threads];
        all.extend_from_slice(args);
        let r = jnr(&all);
        assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
        r.stdout
    };
    let boundary = ["boundary", "--ops", &ops, "--directions", "200", "--strategy", "seeded_uniform"];
    assert_eq!(run("1", &boundary), run("4", &boundary));
    let bracket = ["uncertainty", "--x", s(&xp), "--y", s(&yp)];
    assert_eq!(run("1", &bracket), run("4", &bracket));
}
