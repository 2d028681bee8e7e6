//! ℓ1-penalised least squares by cyclic coordinate descent.
//!
//! The objective is ‖Y − f_β‖₂²/n + λ‖β‖₁: a factor 1/n on the residual
//! sum of squares and no 1/2. With Σ̂ = XᵀX/n and c = XᵀY/n this reads
//! YᵀY/n − 2cᵀβ + βᵀΣ̂β + λ‖β‖₁, so the exact coordinate update is
//! β_j = S(c_j − Σ_{k≠j} Σ̂_jk β_k, λ/2) / Σ̂_jj with S the soft threshold.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::design::{CoefficientVector, DesignMatrix};
use crate::error::{Error, Result};
use crate::linalg::{dot, norm1};
use crate::num::{abs, signum};

/// sign(z)·max(|z| − t, 0).
#[inline]
pub fn soft_threshold(z: f64, t: f64) -> f64 {
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        0.0
    }
}

/// ‖y − f_β‖₂²/n + λ‖β‖₁, evaluated from the residual.
pub fn objective(design: &DesignMatrix, y: &[f64], beta: &[f64], lambda: f64) -> Result<f64> {
    design.check_n(y.len())?;
    let f = design.predict(beta)?;
    let rss: f64 = y.iter().zip(&f).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok(rss / design.n() as f64 + lambda * norm1(beta))
}

/// Largest violation of the subgradient optimality conditions.
///
/// With g_j = 2ψ_jᵀ(f_β − y)/n: |g_j + λ sign(β_j)| where β_j ≠ 0 and
/// max(|g_j| − λ, 0) where β_j = 0.
pub fn kkt_residual(design: &DesignMatrix, y: &[f64], beta: &[f64], lambda: f64) -> Result<f64> {
    design.check_n(y.len())?;
    let f = design.predict(beta)?;
    let r: Vec<f64> = f.iter().zip(y).map(|(a, b)| a - b).collect();
    let g = design.xt_scaled(&r)?;
    Ok(kkt_from_gradient(&g.iter().map(|x| 2.0 * x).collect::<Vec<_>>(), beta, lambda))
}

fn kkt_from_gradient(grad: &[f64], beta: &[f64], lambda: f64) -> f64 {
    grad.iter()
        .zip(beta)
        .map(|(g, b)| if *b != 0.0 { abs(g + lambda * signum(*b)) } else { (abs(*g) - lambda).max(0.0) })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LassoOptions {
    /// Maximum number of full sweeps.
    pub max_iters: usize,
    pub kkt_tol: f64,
    /// Stop when no coordinate moves by more than this in a sweep.
    pub change_tol: f64,
    pub init: Option<Vec<f64>>,
    /// Keep the objective after every sweep in [`LassoFit::trace`].
    pub record_trace: bool,
}

impl Default for LassoOptions {
    fn default() -> Self {
        LassoOptions { max_iters: 100_000, kkt_tol: 1e-8, change_tol: 1e-14, init: None, record_trace: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LassoFit {
    pub beta_hat: CoefficientVector,
    pub lambda: f64,
    pub objective: f64,
    pub kkt_residual: f64,
    pub iterations: usize,
    pub converged: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub trace: Option<Vec<f64>>,
}

/// Cyclic coordinate descent in ascending index order.
///
/// Columns with ‖ψ_j‖_n = 0 are never updated. Hitting `max_iters` is not
/// an error; the fit comes back with `converged = false`.
pub fn fit(design: &DesignMatrix, y: &[f64], lambda: f64, opts: &LassoOptions) -> Result<LassoFit> {
    design.check_n(y.len())?;
    if y.iter().any(|v| v.is_nan()) {
        return Err(Error::Input("response contains NaN".into()));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Parameter(format!("lambda must be positive and finite, got {lambda}")));
    }
    let p = design.p();
    let gram = design.gram();
    let c = design.xt_scaled(y)?;
    let yy = dot(y, y) / design.n() as f64;
    let mut beta = match &opts.init {
        Some(b) => {
            design.check_p(b.len())?;
            b.clone()
        }
        None => vec![0.0; p],
    };
    // g = Σ̂β, kept in sync with β.
    let mut g = gram.mul_vec(&beta);
    let smooth = |beta: &[f64], g: &[f64]| yy - 2.0 * dot(&c, beta) + dot(beta, g);
    let mut trace = if opts.record_trace { Some(vec![smooth(&beta, &g) + lambda * norm1(&beta)]) } else { None };

    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iters {
        iterations += 1;
        let mut max_change: f64 = 0.0;
        for j in 0..p {
            let djj = gram.get(j, j);
            if djj <= 0.0 {
                continue;
            }
            let old = beta[j];
            let z = c[j] - (g[j] - djj * old);
            let new = soft_threshold(z, 0.5 * lambda) / djj;
            let delta = new - old;
            if delta != 0.0 {
                beta[j] = new;
                let row = gram.row(j);
                for (gk, gjk) in g.iter_mut().zip(row) {
                    *gk += delta * gjk;
                }
                max_change = max_change.max(abs(delta));
            }
        }
        if let Some(t) = trace.as_mut() {
            t.push(smooth(&beta, &g) + lambda * norm1(&beta));
        }
        let grad: Vec<f64> = g.iter().zip(&c).map(|(gi, ci)| 2.0 * (gi - ci)).collect();
        let stalled = max_change <= opts.change_tol;
        if kkt_from_gradient(&grad, &beta, lambda) <= opts.kkt_tol || stalled {
            // Confirm against the residual itself rather than the running Σ̂β.
            if kkt_residual(design, y, &beta, lambda)? <= opts.kkt_tol {
                converged = true;
                break;
            }
            g = gram.mul_vec(&beta);
            if stalled {
                break;
            }
        }
    }
    let objective = objective(design, y, &beta, lambda)?;
    let kkt_residual = kkt_residual(design, y, &beta, lambda)?;
    Ok(LassoFit {
        beta_hat: CoefficientVector(beta),
        lambda,
        objective,
        kkt_residual,
        iterations,
        converged,
        trace,
    })
}

/// 2·max_j |ψ_jᵀy|/n: the smallest λ at which β̂ = 0.
pub fn lambda_max(design: &DesignMatrix, y: &[f64]) -> Result<f64> {
    Ok(2.0 * design.xt_scaled(y)?.iter().map(|v| abs(*v)).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::{generate, DesignFamily};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn response(d: &DesignMatrix, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut beta = vec![0.0; d.p()];
        beta[0] = 1.0;
        beta[1] = -0.5;
        let mut y = d.predict(&beta).unwrap();
        y.iter_mut().for_each(|v| *v += 0.3 * (rng.random::<f64>() - 0.5));
        y
    }

    #[test]
    fn soft_threshold_examples() {
        assert_eq!(soft_threshold(3.0, 1.0), 2.0);
        assert_eq!(soft_threshold(-0.5, 1.0), 0.0);
        assert_eq!(soft_threshold(-3.0, 1.0), -2.0);
        for x in [-2.5, 0.0, 1e-300, 7.0] {
            assert_eq!(soft_threshold(x, 0.0), x);
        }
    }

    #[test]
    fn objective_examples() {
        let d = generate(DesignFamily::Equicorrelated { r: 0.3 }, 20, 4, 1).unwrap();
        let y = response(&d, 2);
        let yy: f64 = y.iter().map(|v| v * v).sum::<f64>() / 20.0;
        assert!(abs(objective(&d, &y, &[0.0; 4], 0.7).unwrap() - yy) < 1e-15);
        let b = [0.3, 0.0, -1.2, 0.1];
        let yb = d.predict(&b).unwrap();
        assert!(abs(objective(&d, &yb, &b, 0.5).unwrap() - 0.5 * 1.6) < 1e-14);
        // independent loop over rows
        let mut rss = 0.0;
        for i in 0..20 {
            let fi: f64 = d.row(i).iter().zip(&b).map(|(x, bj)| x * bj).sum();
            rss += (y[i] - fi) * (y[i] - fi);
        }
        let direct = rss / 20.0 + 0.25 * 1.6;
        assert!(abs(objective(&d, &y, &b, 0.25).unwrap() - direct) < 1e-13);
    }

    #[test]
    fn orthonormal_closed_form() {
        let d = generate(DesignFamily::Orthonormal, 30, 6, 4).unwrap();
        let y = response(&d, 5);
        let lambda = 0.2;
        let fit = fit(&d, &y, lambda, &LassoOptions::default()).unwrap();
        let c = d.xt_scaled(&y).unwrap();
        for j in 0..6 {
            assert!(abs(fit.beta_hat.0[j] - soft_threshold(c[j], lambda / 2.0)) < 1e-10);
        }
        assert!(fit.converged);
        let exact: Vec<f64> = c.iter().map(|cj| soft_threshold(*cj, lambda / 2.0)).collect();
        assert!(kkt_residual(&d, &y, &exact, lambda).unwrap() <= 1e-10);
    }

    #[test]
    fn zero_solution_above_lambda_max() {
        let d = generate(DesignFamily::Ar1 { r: 0.6 }, 25, 8, 6).unwrap();
        let y = response(&d, 7);
        let lmax = lambda_max(&d, &y).unwrap();
        let fit = fit(&d, &y, lmax, &LassoOptions::default()).unwrap();
        assert!(fit.beta_hat.0.iter().all(|b| *b == 0.0));
        assert_eq!(kkt_residual(&d, &y, &[0.0; 8], lmax * 1.5).unwrap(), 0.0);
        let fit0 = super::fit(&d, &[0.0; 25], 0.1, &LassoOptions::default()).unwrap();
        assert!(fit0.beta_hat.0.iter().all(|b| *b == 0.0) && fit0.objective == 0.0);
    }

    #[test]
    fn objective_monotone_across_sweeps() {
        let d = generate(DesignFamily::Equicorrelated { r: 0.9 }, 40, 12, 8).unwrap();
        let y = response(&d, 9);
        let opts = LassoOptions { record_trace: true, ..LassoOptions::default() };
        let fit = fit(&d, &y, 0.01, &opts).unwrap();
        let t = fit.trace.unwrap();
        for w in t.windows(2) {
            assert!(w[1] <= w[0] + 1e-14 * w[0].abs().max(1.0));
        }
        assert!(fit.converged);
        let yy: f64 = y.iter().map(|v| v * v).sum::<f64>() / 40.0;
        assert!(fit.objective <= yy + 1e-12);
    }

    #[test]
    fn perturbing_optimum_raises_residual() {
        let d = generate(DesignFamily::Ar1 { r: 0.5 }, 30, 5, 10).unwrap();
        let y = response(&d, 11);
        let fit = fit(&d, &y, 0.05, &LassoOptions::default()).unwrap();
        let base = kkt_residual(&d, &y, &fit.beta_hat.0, 0.05).unwrap();
        let mut b = fit.beta_hat.0.clone();
        b[0] += 0.1;
        assert!(kkt_residual(&d, &y, &b, 0.05).unwrap() > base);
    }

    #[test]
    fn input_errors() {
        let d = generate(DesignFamily::Orthonormal, 5, 2, 0).unwrap();
        assert!(matches!(fit(&d, &[f64::NAN; 5], 0.1, &LassoOptions::default()), Err(Error::Input(_))));
        assert!(fit(&d, &[0.0; 5], 0.0, &LassoOptions::default()).is_err());
        assert!(fit(&d, &[0.0; 4], 0.1, &LassoOptions::default()).is_err());
    }

    #[test]
    fn max_iters_gives_unconverged_fit() {
        let d = generate(DesignFamily::Equicorrelated { r: 0.95 }, 40, 10, 12).unwrap();
        let y = response(&d, 13);
        let opts = LassoOptions { max_iters: 1, ..LassoOptions::default() };
        let fit = fit(&d, &y, 1e-4, &opts).unwrap();
        assert!(!fit.converged);
        assert_eq!(fit.iterations, 1);
    }
}
