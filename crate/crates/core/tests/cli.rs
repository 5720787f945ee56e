use std::path::Path;
use std::process::{Command, Output};

use islr::io::{read_matrix_csv, write_matrix_csv};
use islr::DenseMatrix;

fn islr(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_islr"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn sample_matrix(dir: &Path) {
    let y = DenseMatrix::from_fn(8, 6, |i, j| ((i * 6 + j) as f64 * 0.37).sin() * 2.0);
    write_matrix_csv(&y, dir.join("y.csv")).unwrap();
}

#[test]
fn denoise_without_regularization_returns_input() {
    let dir = tempfile::tempdir().unwrap();
    sample_matrix(dir.path());
    let out = islr(
        &["denoise", "--input", "y.csv", "--output", "x.csv", "--lambda0", "0", "--lambda1", "0"],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let y = read_matrix_csv(dir.path().join("y.csv")).unwrap();
    assert_eq!(read_matrix_csv(dir.path().join("x.csv")).unwrap(), y);
}

#[test]
fn denoise_writes_history() {
    let dir = tempfile::tempdir().unwrap();
    sample_matrix(dir.path());
    let out = islr(
        &[
            "denoise", "--input", "y.csv", "--output", "x.csv", "--lambda0", "0.5", "--lambda1", "0.2",
            "--penalty", "log", "--history", "h.csv",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    let history = std::fs::read_to_string(dir.path().join("h.csv")).unwrap();
    assert!(history.starts_with("iter,objective\n1,"));
    assert!(String::from_utf8(out.stdout).unwrap().contains("converged\ttrue"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    sample_matrix(dir.path());
    let rejected = islr(&["validate", "--lambda0", "1", "--lambda1", "1", "--a0", "0.8", "--a1", "1"], dir.path());
    assert_eq!(code(&rejected), 2);
    assert!(String::from_utf8_lossy(&rejected.stdout).contains("a0*lambda0 + a1*lambda1 < 1"));

    let low_mu = islr(&["validate", "--lambda0", "1", "--lambda1", "1", "--a0", "0.1", "--a1", "0.1", "--mu", "1"], dir.path());
    assert_eq!(code(&low_mu), 2);

    let bad_penalty = islr(
        &["denoise", "--input", "y.csv", "--output", "x.csv", "--lambda0", "1", "--lambda1", "1", "--a0", "0.6", "--a1", "0.6"],
        dir.path(),
    );
    assert_eq!(code(&bad_penalty), 2);

    let loose = islr(
        &["denoise", "--input", "y.csv", "--output", "x.csv", "--lambda0", "1", "--lambda1", "1", "--residual-tol", "0.01"],
        dir.path(),
    );
    assert_eq!(code(&loose), 2);

    let missing = islr(
        &["denoise", "--input", "nope.csv", "--output", "x.csv", "--lambda0", "1", "--lambda1", "1"],
        dir.path(),
    );
    assert_eq!(code(&missing), 3);

    std::fs::write(dir.path().join("bad.csv"), "1,2\n3\n").unwrap();
    let ragged = islr(
        &["denoise", "--input", "bad.csv", "--output", "x.csv", "--lambda0", "1", "--lambda1", "1"],
        dir.path(),
    );
    assert_eq!(code(&ragged), 3);

    assert_eq!(code(&islr(&["bogus"], dir.path())), 2);
    assert_eq!(code(&islr(&["--help"], dir.path())), 0);
}

#[test]
fn prox_prints_soft_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let out = islr(&["prox", "--penalty", "rat", "--a", "0", "--lambda", "1", "--values", "2"], dir.path());
    assert_eq!(code(&out), 0);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "2\t1\n");
}

#[test]
fn graph_reads_edge_lists() {
    let dir = tempfile::tempdir().unwrap();
    let mut text = String::from("# toy graph\n");
    for i in 0..6 {
        for j in (i + 1)..6 {
            text.push_str(&format!("p{i}\tp{j}\t1.2\n"));
        }
    }
    for i in 6..12 {
        text.push_str(&format!("p{i}\tp{}\t0.8\n", (i + 1) % 6 + 6));
    }
    std::fs::write(dir.path().join("g.tsv"), text).unwrap();
    let out = islr(
        &["graph", "--edges", "g.tsv", "--output", "x.csv", "--noisy-output", "n.csv", "--beta0", "0.5", "--beta1", "0.5"],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(read_matrix_csv(dir.path().join("x.csv")).unwrap().shape(), (12, 12));
    assert!(String::from_utf8(out.stdout).unwrap().contains("rse_denoised"));
}
