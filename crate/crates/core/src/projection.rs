//! Euclidean projections onto the simplex and the ℓ1 ball.

use alloc::vec::Vec;

use crate::num::abs;

/// Projects `v` in place onto {w ≥ 0, Σ w = radius} (sort-and-shift).
pub fn project_simplex(v: &mut [f64], radius: f64) {
    if v.is_empty() {
        return;
    }
    let mut u: Vec<f64> = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (k, uk) in u.iter().enumerate() {
        cum += uk;
        let t = (cum - radius) / (k + 1) as f64;
        if *uk - t > 0.0 {
            theta = t;
        }
    }
    for x in v.iter_mut() {
        *x = (*x - theta).max(0.0);
    }
}

/// Projects `v` in place onto {‖x‖₁ ≤ radius}.
pub fn project_l1_ball(v: &mut [f64], radius: f64) {
    if radius <= 0.0 {
        v.iter_mut().for_each(|x| *x = 0.0);
        return;
    }
    let l1: f64 = v.iter().map(|x| abs(*x)).sum();
    if l1 <= radius {
        return;
    }
    let mut mag: Vec<f64> = v.iter().map(|x| abs(*x)).collect();
    project_simplex(&mut mag, radius);
    for (x, m) in v.iter_mut().zip(mag) {
        *x = if *x < 0.0 { -m } else { m };
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn simplex_projection_cases() {
        let mut v = vec![0.2, 0.3, 0.5];
        project_simplex(&mut v, 1.0);
        assert_eq!(v, vec![0.2, 0.3, 0.5]);
        let mut v = vec![2.0, 0.0];
        project_simplex(&mut v, 1.0);
        assert_eq!(v, vec![1.0, 0.0]);
        let mut v = vec![0.5, 0.5, -3.0];
        project_simplex(&mut v, 2.0);
        assert!((v[0] - 1.0).abs() < 1e-15 && (v[1] - 1.0).abs() < 1e-15 && v[2] == 0.0);
    }

    #[test]
    fn l1_ball_projection_cases() {
        let mut v = vec![0.1, -0.2];
        project_l1_ball(&mut v, 1.0);
        assert_eq!(v, vec![0.1, -0.2]);
        let mut v = vec![3.0, -1.0];
        project_l1_ball(&mut v, 1.0);
        assert!((v[0] - 1.0).abs() < 1e-15 && v[1] == 0.0);
        let mut v = vec![1.0, -1.0];
        project_l1_ball(&mut v, 1.0);
        assert!((v[0] - 0.5).abs() < 1e-15 && (v[1] + 0.5).abs() < 1e-15);
    }
}
