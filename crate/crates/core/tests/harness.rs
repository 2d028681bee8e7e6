mod common;

use lassolab_core::harness::{talpha_statistic, talpha_sup_alpha1, talpha_sup_estimate, SupSearch};
use lassolab_core::NoiseModel;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn statistic_nonincreasing_in_alpha(d in common::design(2..=8), seed in any::<u64>(), raw in proptest::collection::vec(-1.0..1.0f64, 8)) {
        let eps = NoiseModel::gaussian(1.0).unwrap().draw(d.n(), seed);
        let beta: Vec<f64> = raw[..d.p()].to_vec();
        let l1: f64 = beta.iter().map(|x| x.abs()).sum();
        prop_assume!(l1 > 1e-6);
        let unit: Vec<f64> = beta.iter().map(|x| x / l1).collect();
        let grid = [0.0, 0.25, 0.5, 0.75, 1.0];
        let vals: Vec<f64> = grid.iter().map(|&a| talpha_statistic(&d, &eps, &unit, a).unwrap()).collect();
        for w in vals.windows(2) {
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-12) + 1e-15, "{vals:?}");
        }
    }

    #[test]
    fn sup_estimate_within_cauchy_schwarz(d in common::design(2..=8), seed in any::<u64>(), alpha in 0.0..1.0f64) {
        let eps = NoiseModel::gaussian(1.0).unwrap().draw(d.n(), seed);
        let en = (eps.iter().map(|x| x * x).sum::<f64>() / d.n() as f64).sqrt();
        let est = talpha_sup_estimate(&d, &eps, alpha, &SupSearch { budget: 50, ascent_steps: 50, starts: 4 }, seed).unwrap();
        prop_assert!(est <= 4.0 * en * (1.0 + 1e-9), "{est} > 4‖ε‖ = {}", 4.0 * en);
        prop_assert!(est >= talpha_sup_alpha1(&d, &eps).unwrap() * (1.0 - 1e-12));
    }
}

#[test]
fn draws_are_reproducible() {
    let m = NoiseModel::gaussian(0.7).unwrap();
    assert_eq!(m.draw(50, 9), m.draw(50, 9));
    assert_ne!(m.draw(50, 9), m.draw(50, 10));
}
