mod common;

use lassolab_core::geometry::compatibility;
use lassolab_core::oracle::{conjugate_bound, estimation_error, project, ORACLE_L};
use lassolab_core::{DesignMatrix, GeometryOptions};
use proptest::prelude::*;
use proptest::sample::subsequence;

/// Dense Gaussian elimination with partial pivoting, kept separate from the library.
fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x
}

fn instance() -> impl Strategy<Value = (DesignMatrix, Vec<usize>, Vec<f64>)> {
    common::design(3..=7).prop_flat_map(|d| {
        let (n, p) = (d.n(), d.p());
        (Just(d), (1..=p.min(4)).prop_flat_map(move |s| subsequence((0..p).collect::<Vec<_>>(), s)), proptest::collection::vec(-2.0..2.0f64, n))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn conjugate_inequality(a in 0.0..10.0f64, b in 0.0..10.0f64, l0 in 1e-3..5.0f64, l in 1e-3..5.0f64,
                            alpha in prop_oneof![Just(0.0), Just(1.0), 0.0..1.0f64]) {
        let lhs = l0 * a.powf(1.0 - alpha) * b.powf(alpha);
        let rhs = conjugate_bound(a, b, l0, l, alpha);
        prop_assert!(lhs <= rhs * (1.0 + 1e-12) + 1e-12, "{lhs} > {rhs}");
    }

    #[test]
    fn projection_matches_normal_equations((d, s, f0) in instance()) {
        let n = d.n() as f64;
        let cols: Vec<&[f64]> = s.iter().map(|&j| d.column(j)).collect();
        let g: Vec<Vec<f64>> = cols.iter().map(|a| cols.iter().map(|b| a.iter().zip(*b).map(|(x, y)| x * y).sum::<f64>() / n).collect()).collect();
        let r: Vec<f64> = cols.iter().map(|a| a.iter().zip(&f0).map(|(x, y)| x * y).sum::<f64>() / n).collect();
        let res = project(&d, &s, &f0).unwrap();
        if res.rank_deficient {
            return Ok(());
        }
        let x = gauss_solve(g, r);
        for (k, &j) in s.iter().enumerate() {
            prop_assert!(common::rel_close(res.b_s.0[j], x[k], 1e-6), "{} vs {}", res.b_s.0[j], x[k]);
        }
        // residual is orthogonal to the span
        let resid: Vec<f64> = res.f_s.iter().zip(&f0).map(|(a, b)| a - b).collect();
        for c in cols {
            prop_assert!(c.iter().zip(&resid).map(|(x, y)| x * y).sum::<f64>().abs() / n < 1e-8);
        }
    }

    #[test]
    fn estimation_error_matches_enumeration((d, s, f0) in instance(), lambda in 0.01..1.0f64) {
        let opts = GeometryOptions::default();
        let Ok((e, part)) = estimation_error(&d, &f0, &s, lambda, &opts) else { return Ok(()) };
        let b = project(&d, &s, &f0).unwrap().b_s;
        let mut best = f64::INFINITY;
        for mask in 0u32..(1 << s.len()) {
            let s1: Vec<usize> = s.iter().enumerate().filter(|(k, _)| mask & (1 << k) != 0).map(|(_, &j)| j).collect();
            let first = if s1.is_empty() {
                0.0
            } else {
                match compatibility(&d, &s1, ORACLE_L, &opts) {
                    Ok(g) if g.value > 0.0 => 8.0 * lambda * lambda * s1.len() as f64 / g.value,
                    _ => f64::INFINITY,
                }
            };
            let second: f64 = s.iter().filter(|j| !s1.contains(j)).map(|&j| b.0[j].abs()).sum::<f64>() * 4.0 / 3.0 * lambda;
            best = best.min(first + second);
        }
        prop_assert!(common::rel_close(e, best, 1e-12), "{e} vs {best}");
        prop_assert_eq!(part.s1.len() + part.s2.len(), s.len());
    }
}
