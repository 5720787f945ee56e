use islr::io::{read_edge_list, read_matrix_csv, read_wav, write_matrix_csv, write_wav};
use islr::{DenseMatrix, Error};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matrix_csv_round_trips(rows in 1usize..8, cols in 1usize..8, data in prop::collection::vec(prop::num::f64::NORMAL | prop::num::f64::ZERO, 64)) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        let m = DenseMatrix::from_fn(rows, cols, |i, j| data[i * 8 + j]);
        write_matrix_csv(&m, &path).unwrap();
        let back = read_matrix_csv(&path).unwrap();
        prop_assert_eq!(back.shape(), m.shape());
        for (a, b) in m.as_slice().iter().zip(back.as_slice()) {
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }

    #[test]
    fn wav_round_trip_within_one_step(samples in prop::collection::vec(-1.0f64..1.0, 1..400)) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.wav");
        write_wav(&samples, 16000, &path).unwrap();
        let (back, rate) = read_wav(&path).unwrap();
        prop_assert_eq!(rate, 16000);
        prop_assert_eq!(back.len(), samples.len());
        for (a, b) in samples.iter().zip(&back) {
            prop_assert!((a - b).abs() <= 1.0 / 32768.0);
        }
    }
}

#[test]
fn malformed_files_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("trailing.csv", "1,2\n3,4\n5\n"),
        ("text.csv", "1,2\n3,four\n"),
        ("wide.csv", "1,2\n3,4,5\n"),
        ("header_only.csv", "a,b\n"),
    ];
    for (name, text) in cases {
        let p = dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        assert!(read_matrix_csv(&p).is_err(), "{name} was accepted");
    }
    let edges = dir.path().join("e.tsv");
    std::fs::write(&edges, "a\tb\t1\nb\tc\n").unwrap();
    assert!(read_edge_list(&edges).is_err());
    let garbage = dir.path().join("g.wav");
    std::fs::write(&garbage, b"RIFF....WAVEjunk").unwrap();
    assert!(matches!(read_wav(&garbage), Err(Error::Wav(_))));
}
