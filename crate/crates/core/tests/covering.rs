mod common;

use lassolab_core::covering::{covering_exact, covering_profile, decorrelation, greedy_packing, points, squared_distance, Point};
use lassolab_core::{DesignMatrix, ProfileOptions};
use proptest::prelude::*;
use proptest::strategy::ValueTree;

fn dist(d: &DesignMatrix, a: Point, b: Point) -> f64 {
    squared_distance(d, a, b).max(0.0).sqrt()
}

/// Smallest cover by trying every subset of centers.
fn exhaustive_cover(d: &DesignMatrix, u: f64, signs: bool) -> usize {
    let pts = points(d.p(), signs);
    let m = pts.len();
    (1u32..(1 << m))
        .filter(|mask| pts.iter().all(|&x| (0..m).any(|c| mask & (1 << c) != 0 && dist(d, x, pts[c]) <= u * (1.0 + 1e-12))))
        .map(|mask| mask.count_ones() as usize)
        .min()
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn packing_is_separated_and_covers(d in common::design(2..=12), u in 0.05..2.0f64, signs in any::<bool>()) {
        let pack = greedy_packing(&d, u, signs).unwrap();
        for (i, &a) in pack.iter().enumerate() {
            for &b in &pack[i + 1..] {
                prop_assert!(dist(&d, a, b) >= u * (1.0 - 1e-9));
            }
        }
        for x in points(d.p(), signs) {
            prop_assert!(pack.iter().any(|&c| dist(&d, x, c) < u * (1.0 + 1e-9)));
        }
    }

    #[test]
    fn distance_matches_correlation(d in common::design(2..=10)) {
        let g = d.gram();
        for j in 0..d.p() {
            for k in 0..d.p() {
                let sq = squared_distance(&d, Point { column: j, negative: false }, Point { column: k, negative: true });
                prop_assert!((sq - 2.0 * (1.0 + g.get(j, k))).abs() < 1e-9);
                let sq = squared_distance(&d, Point { column: j, negative: false }, Point { column: k, negative: false });
                prop_assert!((sq - 2.0 * (1.0 - g.get(j, k))).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn covering_within_twice_decorrelation(d in common::design(2..=6), u in 0.1..0.95f64) {
        let n = covering_exact(&d, 2f64.sqrt() * u, true, 12).unwrap();
        let m = decorrelation(&d, 1.0 - u * u, 40).unwrap();
        prop_assert!(m.exact);
        // each decorrelated column and its negative cover everything correlated with it
        prop_assert!(n <= 2 * m.size, "N = {n}, M = {}", m.size);
    }

    #[test]
    fn profile_shape(d in common::design(2..=6)) {
        let prof = covering_profile(&d, &ProfileOptions::default()).unwrap();
        for w in prof.packing_sizes.windows(2) {
            prop_assert!(w[0] >= w[1]);
        }
        let ex = prof.covering_exact.as_ref().unwrap();
        for i in 0..prof.radii.len() {
            prop_assert!(ex[i] <= prof.covering_upper[i]);
        }
    }
}

#[test]
fn exact_cover_matches_exhaustive_search() {
    let mut runner = proptest::test_runner::TestRunner::deterministic();
    let strat = (common::design(2..=5), 0.1..1.6f64, any::<bool>());
    for _ in 0..40 {
        let (d, u, signs) = strat.new_tree(&mut runner).unwrap().current();
        assert_eq!(covering_exact(&d, u, signs, 12).unwrap(), exhaustive_cover(&d, u, signs));
    }
}
