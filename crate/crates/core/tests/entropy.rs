mod common;

use lassolab_core::entropy::{derive_constants, entropy_from_covering, entropy_from_eigenvalues};
use lassolab_core::{covering::covering_profile, EntropyBoundParams, ProfileOptions};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn bounds_shrink_with_delta(d in common::design(2..=8), a in 0.05..0.9f64, b in 0.05..0.9f64) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let sp = d.spectral().unwrap();
        prop_assert!(entropy_from_eigenvalues(sp, hi).unwrap() <= entropy_from_eigenvalues(sp, lo).unwrap() + 1e-12);
        let prof = covering_profile(&d, &ProfileOptions::default()).unwrap();
        prop_assert!(entropy_from_covering(&prof, hi).unwrap() <= entropy_from_covering(&prof, lo).unwrap() + 1e-9);
    }

    #[test]
    fn lambda0_scales_like_inverse_root_n(alpha in 0.05..0.95f64, a in 0.1..5.0f64, t in 0.1..4.0f64, n in 1usize..10_000) {
        let p = EntropyBoundParams { alpha, a, k: 2.0, sigma0: 1.3, t, n };
        let c1 = derive_constants(&p).unwrap();
        let c4 = derive_constants(&EntropyBoundParams { n: 4 * n, ..p }).unwrap();
        prop_assert_eq!(c4.lambda0, c1.lambda0 / 2.0);
        prop_assert_eq!(c4.b, c1.b);
    }

    #[test]
    fn larger_t_means_larger_lambda0(alpha in 0.05..0.95f64, a in 0.1..5.0f64, t in 0.1..4.0f64) {
        let p = EntropyBoundParams { alpha, a, k: 2.0, sigma0: 1.3, t, n: 100 };
        let q = EntropyBoundParams { t: 2.0 * t, ..p };
        prop_assert!(derive_constants(&q).unwrap().lambda0 > derive_constants(&p).unwrap().lambda0);
    }
}
