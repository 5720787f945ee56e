use islr::datagen::{add_awgn, corrupt_uniform, gen_low_rank, sparsify, GraphSpec, SyntheticSpec};
use islr::DenseMatrix;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn generators_are_pure(seed: u64, m in 1usize..20, n in 1usize..20, frac in 0.0f64..=1.0) {
        let k = 1 + (seed as usize) % m.min(n);
        let a = gen_low_rank(m, n, k, seed).unwrap();
        prop_assert_eq!(&a, &gen_low_rank(m, n, k, seed).unwrap());
        prop_assert_eq!(sparsify(&a, frac, seed).unwrap(), sparsify(&a, frac, seed).unwrap());
        prop_assert_eq!(add_awgn(&a, 0.3, seed).unwrap(), add_awgn(&a, 0.3, seed).unwrap());
        prop_assert_eq!(corrupt_uniform(&a, frac, 0.3, seed).unwrap(), corrupt_uniform(&a, frac, 0.3, seed).unwrap());
    }

    #[test]
    fn positions_are_distinct(seed: u64, m in 1usize..30, n in 1usize..30, frac in 0.0f64..=1.0) {
        let expected = (frac * (m * n) as f64).round() as usize;
        let ones = DenseMatrix::from_fn(m, n, |_, _| 1.0);
        prop_assert_eq!(m * n - sparsify(&ones, frac, seed).unwrap().count_nonzero(), expected);
        let zeros = DenseMatrix::zeros(m, n);
        let hit = corrupt_uniform(&zeros, frac, 1.0, seed).unwrap();
        // a zero draw from Uniform[0, 1] has probability zero
        prop_assert_eq!(hit.count_nonzero(), expected);
    }
}

#[test]
fn rejects_bad_inputs() {
    let m = DenseMatrix::zeros(3, 3);
    assert!(sparsify(&m, -0.1, 0).is_err());
    assert!(corrupt_uniform(&m, 0.5, -1.0, 0).is_err());
    assert!(add_awgn(&m, f64::NAN, 0).is_err());
    assert!(SyntheticSpec { m: 5, n: 5, rank: 6, zero_fraction: 0.0, sigma: 0.0, seed: 0 }.generate().is_err());
    assert!(GraphSpec { nodes: 5, communities: 0, active_fraction: 0.5, seed: 0 }.adjacency().is_err());
}

#[test]
fn noise_is_added_after_sparsification() {
    let spec = SyntheticSpec { m: 30, n: 30, rank: 4, zero_fraction: 0.5, sigma: 0.0, seed: 8 };
    let inst = spec.generate().unwrap();
    assert_eq!(inst.clean, inst.noisy);
    assert_eq!(inst.clean.count_nonzero(), 450);
    let noisy = SyntheticSpec { sigma: 0.2, ..spec }.generate().unwrap();
    assert_eq!(noisy.clean, inst.clean);
    assert_eq!(noisy.noisy.count_nonzero(), 900);
}
