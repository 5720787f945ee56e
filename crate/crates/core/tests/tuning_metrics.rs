use islr::datagen::{add_awgn, SyntheticSpec};
use islr::metrics::{rse, snr_db};
use islr::tuning::{grid_search, Method, SolverDefaults};
use islr::DenseMatrix;
use proptest::prelude::*;

proptest! {
    #[test]
    fn rse_is_scale_covariant(seed: u64, s in prop_oneof![-100.0f64..-1e-3, 1e-3f64..100.0]) {
        let inst = SyntheticSpec { m: 6, n: 5, rank: 2, zero_fraction: 0.3, sigma: 0.5, seed }.generate().unwrap();
        let base = rse(&inst.noisy, &inst.clean).unwrap();
        let scaled = rse(&inst.noisy.scaled(s), &inst.clean.scaled(s)).unwrap();
        prop_assert!((base - scaled).abs() < 1e-12);
    }
}

#[test]
fn snr_falls_as_noise_grows() {
    let clean = SyntheticSpec::standard(1).generate().unwrap().clean;
    let mut last = f64::INFINITY;
    for step in 1..=12 {
        let sigma = 0.05 * step as f64;
        let noisy = add_awgn(&clean, sigma, 77).unwrap();
        let snr = snr_db(clean.as_slice(), noisy.as_slice()).unwrap();
        assert!(snr < last, "σ = {sigma}: {snr} dB after {last} dB");
        last = snr;
    }
}

#[test]
fn grid_table_is_complete() {
    let inst = SyntheticSpec { m: 12, n: 10, rank: 2, zero_fraction: 0.4, sigma: 0.2, seed: 4 }.generate().unwrap();
    let b0 = [0.5, 1.0, 2.0];
    let b1 = [0.25, 1.0];
    for method in [Method::Islr, Method::Slr] {
        let r = grid_search(&inst.noisy, &inst.clean, &b0, &b1, 0.5, 0.2, method, &SolverDefaults::default()).unwrap();
        assert_eq!(r.rows.len(), b0.len() * b1.len());
        assert!(r.rows.iter().all(|row| row.rse.is_finite()));
        let best = r.best_row().rse;
        assert!(r.rows.iter().all(|row| row.rse >= best));
    }
    assert!(grid_search(&inst.noisy, &inst.clean, &[], &b1, 0.5, 0.2, Method::Islr, &SolverDefaults::default()).is_err());
    let wrong = DenseMatrix::zeros(3, 3);
    assert!(grid_search(&inst.noisy, &wrong, &b0, &b1, 0.5, 0.2, Method::Islr, &SolverDefaults::default()).is_err());
}
