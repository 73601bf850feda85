use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dasc_core::study_analysis::{bt_fit, bt_log_likelihood, bt_step, BtConfig, ComparisonMatrix};

fn random_matrix(seed: u64, n: usize) -> ComparisonMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut wins = vec![vec![0u64; n]; n];
    for (i, row) in wins.iter_mut().enumerate() {
        for (j, w) in row.iter_mut().enumerate() {
            if i != j {
                *w = rng.random_range(1..40);
            }
        }
    }
    ComparisonMatrix::new("random", (0..n as u32).map(|r| 3 * r).collect(), wins).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn each_step_does_not_lower_likelihood(seed in any::<u64>(), n in 2usize..7) {
        let m = random_matrix(seed, n);
        let mut q = vec![1.0; n];
        let mut ll = bt_log_likelihood(&m, &q);
        for _ in 0..50 {
            q = bt_step(&m, &q, None);
            let next = bt_log_likelihood(&m, &q);
            prop_assert!(next >= ll - 1e-9 * ll.abs().max(1.0), "{ll} -> {next}");
            ll = next;
        }
    }

    #[test]
    fn fit_is_scale_free(seed in any::<u64>()) {
        let m = random_matrix(seed, 5);
        let s = bt_fit(&m, &BtConfig::default()).unwrap();
        let log_mean: f64 = s.q.iter().map(|q| q.ln()).sum::<f64>() / 5.0;
        prop_assert!(log_mean.abs() < 1e-9);
        prop_assert!(s.converged);
    }
}
