//! Monte Carlo checks: the 𝒯_α statistic, per-draw verification of the
//! oracle inequality, and empirical failure rates of the concentration bound.
//!
//! Draw i uses the noise seed `mix_seed(master_seed, i)`; calibration draws
//! use `mix_seed(master_seed ^ CALIBRATION_SALT, i)`. Records depend only on
//! their index, so any scheduler that keeps index order reproduces a report.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::design::DesignMatrix;
use crate::entropy::{derive_constants, EntropyBoundParams};
use crate::error::{Error, Result};
use crate::geometry::GeometryOptions;
use crate::lasso::{self, LassoOptions};
use crate::linalg::{dot, norm1};
use crate::noise::NoiseModel;
use crate::num::{abs, ceil, exp, ln, mix_seed, powf, sqrt};
use crate::oracle::{LambdaRule, SupportAnalysis};

pub const CALIBRATION_SALT: u64 = 0xC0FF_EE00_D15E_A5E5;
/// Relative slack in lhs > rhs·(1 + VIOLATION_TOL).
pub const VIOLATION_TOL: f64 = 1e-9;

/// 4|εᵀf_β|/n / (‖f_β‖_n^{1−α}‖β‖₁^α).
pub fn talpha_statistic(design: &DesignMatrix, eps: &[f64], beta: &[f64], alpha: f64) -> Result<f64> {
    design.check_n(eps.len())?;
    design.check_p(beta.len())?;
    check_alpha(alpha)?;
    let b1 = norm1(beta);
    if b1 == 0.0 {
        return Err(Error::Input("the statistic is undefined at beta = 0".into()));
    }
    let c = design.xt_scaled(eps)?;
    let q = design.quad_form(beta)?;
    Ok(ratio(4.0 * abs(dot(&c, beta)), q, b1, alpha))
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Parameter(format!("alpha must lie in [0, 1], got {alpha}")));
    }
    Ok(())
}

/// num / ((√q)^{1−α} b1^α) with 0/0 read as 0.
fn ratio(num: f64, q: f64, b1: f64, alpha: f64) -> f64 {
    let fnorm = sqrt(q.max(0.0));
    let denom = powf(fnorm, 1.0 - alpha) * powf(b1, alpha);
    if denom > 0.0 {
        num / denom
    } else {
        0.0
    }
}

/// max_j 4|εᵀψ_j|/n, the exact supremum for α = 1.
pub fn talpha_sup_alpha1(design: &DesignMatrix, eps: &[f64]) -> Result<f64> {
    let c = design.xt_scaled(eps)?;
    Ok(4.0 * c.iter().fold(0.0f64, |m, v| m.max(abs(*v))))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupSearch {
    /// Random unit-ℓ1 probes.
    pub budget: usize,
    /// Coordinate-ascent passes from each of the best starts.
    pub ascent_steps: usize,
    pub starts: usize,
}

impl Default for SupSearch {
    fn default() -> Self {
        SupSearch { budget: 200, ascent_steps: 200, starts: 10 }
    }
}

/// Lower bound on sup_β of the 𝒯_α statistic: vertices ±e_j, random unit-ℓ1
/// probes, then coordinate ascent from the best starts.
pub fn talpha_sup_estimate(design: &DesignMatrix, eps: &[f64], alpha: f64, search: &SupSearch, seed: u64) -> Result<f64> {
    design.check_n(eps.len())?;
    check_alpha(alpha)?;
    let c = design.xt_scaled(eps)?;
    Ok(sup_estimate_from(design, &c, alpha, search, seed))
}

fn sup_estimate_from(design: &DesignMatrix, c: &[f64], alpha: f64, search: &SupSearch, seed: u64) -> f64 {
    let p = design.p();
    let g = design.gram();
    let mut starts: Vec<(f64, Vec<f64>)> = Vec::new();
    let keep = search.starts.max(1);
    let offer = |val: f64, beta: Vec<f64>, starts: &mut Vec<(f64, Vec<f64>)>| {
        if starts.len() < keep || val > starts[starts.len() - 1].0 {
            starts.push((val, beta));
            starts.sort_by(|a, b| b.0.total_cmp(&a.0));
            starts.truncate(keep);
        }
    };
    for j in 0..p {
        let val = ratio(4.0 * abs(c[j]), g.get(j, j), 1.0, alpha);
        let mut e = vec![0.0; p];
        e[j] = 1.0;
        offer(val, e, &mut starts);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..search.budget {
        let mut beta: Vec<f64> = (0..p).map(|_| -ln(1.0 - rng.random::<f64>())).collect();
        let tot: f64 = beta.iter().sum();
        for b in beta.iter_mut() {
            *b /= tot;
            if rng.random::<bool>() {
                *b = -*b;
            }
        }
        let q: f64 = (0..p).map(|i| beta[i] * dot(g.row(i), &beta)).sum();
        let val = ratio(4.0 * abs(dot(c, &beta)), q, 1.0, alpha);
        offer(val, beta, &mut starts);
    }
    let mut best = starts.first().map_or(0.0, |s| s.0);
    for (mut val, mut beta) in starts {
        // running quantities: cᵀβ, Σ̂β, βᵀΣ̂β, ‖β‖₁
        let mut cb = dot(c, &beta);
        let mut gb: Vec<f64> = (0..p).map(|i| dot(g.row(i), &beta)).collect();
        let mut q = dot(&beta, &gb);
        let mut b1 = norm1(&beta);
        let mut h = 0.25 * b1;
        for _ in 0..search.ascent_steps {
            let mut moved = false;
            for j in 0..p {
                for dir in [1.0, -1.0] {
                    let d = dir * h;
                    let ncb = cb + d * c[j];
                    let nq = q + 2.0 * d * gb[j] + d * d * g.get(j, j);
                    let nb1 = b1 - abs(beta[j]) + abs(beta[j] + d);
                    if nb1 <= 0.0 {
                        continue;
                    }
                    if ratio(4.0 * abs(ncb), nq, nb1, alpha) <= val {
                        continue;
                    }
                    // the incremental βᵀΣ̂β cancels badly near null directions, so
                    // a candidate is only accepted on exactly recomputed values
                    let mut trial = beta.clone();
                    trial[j] += d;
                    let tgb: Vec<f64> = (0..p).map(|i| dot(g.row(i), &trial)).collect();
                    let (tcb, tq, tb1) = (dot(c, &trial), dot(&trial, &tgb), norm1(&trial));
                    let tv = ratio(4.0 * abs(tcb), tq, tb1, alpha);
                    if tv > val {
                        val = tv;
                        cb = tcb;
                        q = tq;
                        b1 = tb1;
                        beta = trial;
                        gb = tgb;
                        moved = true;
                    }
                }
            }
            if !moved {
                h *= 0.5;
                if h < 1e-12 * b1 {
                    break;
                }
            }
        }
        if val > best {
            best = val;
        }
    }
    best
}

/// Sup statistic of one draw: exact for α = 1, the search lower bound otherwise.
pub fn sup_statistic(design: &DesignMatrix, eps: &[f64], alpha: f64, search: &SupSearch, seed: u64) -> Result<f64> {
    if alpha >= 1.0 {
        talpha_sup_alpha1(design, eps)
    } else {
        talpha_sup_estimate(design, eps, alpha, search, seed)
    }
}

/// Smallest sample value v with at least ⌈qN⌉ samples ≤ v.
pub fn empirical_quantile(values: &[f64], q: f64) -> Result<f64> {
    if values.is_empty() || !(q > 0.0 && q <= 1.0) {
        return Err(Error::Input("quantile needs a nonempty sample and q in (0, 1]".into()));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let k = (ceil(q * v.len() as f64) as usize).clamp(1, v.len());
    Ok(v[k - 1])
}

/// exp(−t²)(1 + 2/B).
pub fn failure_bound(t: f64, b: f64) -> f64 {
    exp(-t * t) * (1.0 + 2.0 / b)
}

/// Where λ₀ comes from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum Lambda0Source {
    Given { value: f64 },
    /// λ₀ from the entropy constants.
    Entropy { params: EntropyBoundParams },
    /// λ₀ = max_j 4|εᵀψ_j|/n of each draw; requires α = 1.
    PerDrawSup,
    /// Empirical quantile of the sup statistic over independent calibration draws.
    Calibrated { quantile: f64, draws: usize },
}

/// λ₀ once the calibration, if any, has been done.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ResolvedLambda0 {
    Fixed { value: f64 },
    PerDraw,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifySpec {
    #[serde(rename = "S")]
    pub s: Vec<usize>,
    pub alpha: f64,
    pub lambda0: Lambda0Source,
    pub rule: LambdaRule,
    pub draws: usize,
    pub master_seed: u64,
    pub sup_search: SupSearch,
    pub lasso: LassoOptions,
    pub geometry: GeometryOptions,
}

/// Everything shared by the draws of one verification run.
#[derive(Debug, Clone)]
pub struct VerifySetup<'a> {
    pub design: &'a DesignMatrix,
    pub f0: Vec<f64>,
    pub noise: NoiseModel,
    pub spec: VerifySpec,
    pub analysis: SupportAnalysis,
    pub lambda0: ResolvedLambda0,
    /// λ and the partition the rule targets, when λ₀ is fixed.
    pub lambda: Option<(f64, usize)>,
    /// exp(−t²)(1 + 2/B) when λ₀ comes from entropy constants.
    pub failure_bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrawRecord {
    pub index: usize,
    pub lambda: f64,
    pub lambda0: f64,
    pub talpha_pointwise_ok: bool,
    pub talpha_global_estimate: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// Partition of S attaining `rhs`, as a bitmask over the sorted S.
    pub rhs_partition: u32,
    pub violation: bool,
    pub converged: bool,
    pub kkt_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McAggregates {
    pub violations_given_certificate: usize,
    pub certified_draws: usize,
    pub nonconverged_draws: usize,
    pub empirical_talpha_failure_rate: f64,
    pub bound_exp_minus_t2_times_1_plus_2_over_b: Option<f64>,
    pub max_lhs_over_rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub master_seed: u64,
    pub draws: usize,
    pub alpha: f64,
    pub lambda_rule: String,
    pub records: Vec<DrawRecord>,
    pub aggregates: McAggregates,
}

impl<'a> VerifySetup<'a> {
    /// Projects f⁰, computes compatibility constants of every S₁ ⊆ S and
    /// fixes λ when λ₀ does not vary per draw. `calibrated` must hold λ₀ for
    /// a [`Lambda0Source::Calibrated`] source (see [`calibration_draw`]).
    pub fn new(design: &'a DesignMatrix, f0: &[f64], noise: NoiseModel, spec: VerifySpec, calibrated: Option<f64>) -> Result<Self> {
        design.check_n(f0.len())?;
        check_alpha(spec.alpha)?;
        if spec.s.is_empty() {
            return Err(Error::Input("S must be nonempty".into()));
        }
        let analysis = SupportAnalysis::new(design, f0, &spec.s, &spec.geometry)?;
        let mut failure = None;
        let lambda0 = match spec.lambda0 {
            Lambda0Source::Given { value } => ResolvedLambda0::Fixed { value },
            Lambda0Source::Entropy { params } => {
                let c = derive_constants(&params)?;
                failure = Some(failure_bound(params.t, c.b));
                ResolvedLambda0::Fixed { value: c.lambda0 }
            }
            Lambda0Source::PerDrawSup => {
                if spec.alpha < 1.0 {
                    return Err(Error::Parameter("a per-draw lambda0 is only exact for alpha = 1".into()));
                }
                ResolvedLambda0::PerDraw
            }
            Lambda0Source::Calibrated { .. } => match calibrated {
                Some(value) => ResolvedLambda0::Fixed { value },
                None => return Err(Error::Input("calibrated lambda0 requested but not supplied".into())),
            },
        };
        let lambda = match lambda0 {
            ResolvedLambda0::Fixed { value } => {
                if !(value > 0.0 && value.is_finite()) {
                    return Err(Error::Parameter(format!("lambda0 must be positive, got {value}")));
                }
                Some(spec.rule.resolve(&analysis, value, spec.alpha)?)
            }
            ResolvedLambda0::PerDraw => None,
        };
        Ok(VerifySetup { design, f0: f0.to_vec(), noise, spec, analysis, lambda0, lambda, failure_bound: failure })
    }

    pub fn draw_seed(&self, index: usize) -> u64 {
        mix_seed(self.spec.master_seed, index as u64)
    }

    /// Samples ε, fits the Lasso and checks the inequality on draw `index`.
    pub fn run_draw(&self, index: usize) -> Result<DrawRecord> {
        let (n, alpha) = (self.design.n(), self.spec.alpha);
        let seed = self.draw_seed(index);
        let eps = self.noise.draw(n, seed);
        let c = self.design.xt_scaled(&eps)?;
        let global = if alpha >= 1.0 {
            4.0 * c.iter().fold(0.0f64, |m, v| m.max(abs(*v)))
        } else {
            sup_estimate_from(self.design, &c, alpha, &self.spec.sup_search, seed ^ 0x5A5A)
        };
        let (lambda0, (lambda, _)) = match (self.lambda0, self.lambda) {
            (ResolvedLambda0::Fixed { value }, Some(l)) => (value, l),
            _ => {
                let l0 = global.max(f64::MIN_POSITIVE);
                (l0, self.spec.rule.resolve(&self.analysis, l0, alpha)?)
            }
        };
        let y: Vec<f64> = self.f0.iter().zip(&eps).map(|(a, b)| a + b).collect();
        let fit = lasso::fit(self.design, &y, lambda, &self.spec.lasso)?;
        let b_s = &self.analysis.projection.b_s.0;
        let diff: Vec<f64> = fit.beta_hat.0.iter().zip(b_s).map(|(a, b)| a - b).collect();
        let fhat = self.design.predict(&fit.beta_hat.0)?;
        let err: Vec<f64> = fhat.iter().zip(&self.f0).map(|(a, b)| a - b).collect();
        let pred = self.design.empirical_norm(&err)?;
        let lhs = pred * pred + lambda * norm1(&diff);
        let (mask, terms) = self.analysis.min_rhs(lambda, lambda0, alpha);
        let rhs = terms.total();
        let d1 = norm1(&diff);
        let cert = if d1 == 0.0 {
            true
        } else {
            let num = 4.0 * abs(dot(&c, &diff));
            let q = self.design.quad_form(&diff)?;
            num <= lambda0 * powf(sqrt(q.max(0.0)), 1.0 - alpha) * powf(d1, alpha)
        };
        let violation = cert && fit.converged && lhs > rhs * (1.0 + VIOLATION_TOL);
        Ok(DrawRecord {
            index,
            lambda,
            lambda0,
            talpha_pointwise_ok: cert,
            talpha_global_estimate: global,
            lhs,
            rhs,
            rhs_partition: mask as u32,
            violation,
            converged: fit.converged,
            kkt_residual: fit.kkt_residual,
        })
    }

    /// Aggregates records that are in index order.
    pub fn report(&self, records: Vec<DrawRecord>) -> McReport {
        let certified = records.iter().filter(|r| r.talpha_pointwise_ok && r.converged).count();
        let violations = records.iter().filter(|r| r.violation).count();
        let nonconverged = records.iter().filter(|r| !r.converged).count();
        let failures = records.iter().filter(|r| r.talpha_global_estimate > r.lambda0).count();
        let max_ratio = records.iter().filter(|r| r.rhs > 0.0).map(|r| r.lhs / r.rhs).fold(0.0, f64::max);
        McReport {
            master_seed: self.spec.master_seed,
            draws: records.len(),
            alpha: self.spec.alpha,
            lambda_rule: self.spec.rule.tag(),
            aggregates: McAggregates {
                violations_given_certificate: violations,
                certified_draws: certified,
                nonconverged_draws: nonconverged,
                empirical_talpha_failure_rate: if records.is_empty() { 0.0 } else { failures as f64 / records.len() as f64 },
                bound_exp_minus_t2_times_1_plus_2_over_b: self.failure_bound,
                max_lhs_over_rhs: max_ratio,
            },
            records,
        }
    }
}

/// Sup statistic of calibration draw `index`.
pub fn calibration_draw(design: &DesignMatrix, noise: &NoiseModel, alpha: f64, search: &SupSearch, master_seed: u64, index: usize) -> Result<f64> {
    let seed = mix_seed(master_seed ^ CALIBRATION_SALT, index as u64);
    let eps = noise.draw(design.n(), seed);
    sup_statistic(design, &eps, alpha, search, seed ^ 0x5A5A)
}

/// Sequential verification run.
pub fn verify_run(design: &DesignMatrix, f0: &[f64], noise: NoiseModel, spec: VerifySpec) -> Result<McReport> {
    let calibrated = match spec.lambda0 {
        Lambda0Source::Calibrated { quantile, draws } => {
            let stats = (0..draws)
                .map(|i| calibration_draw(design, &noise, spec.alpha, &spec.sup_search, spec.master_seed, i))
                .collect::<Result<Vec<_>>>()?;
            Some(empirical_quantile(&stats, quantile)?)
        }
        _ => None,
    };
    let setup = VerifySetup::new(design, f0, noise, spec, calibrated)?;
    let records = (0..setup.spec.draws).map(|i| setup.run_draw(i)).collect::<Result<Vec<_>>>()?;
    Ok(setup.report(records))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbSpec {
    pub alpha: f64,
    /// Used for the theoretical λ₀ and bound when present.
    pub entropy: Option<EntropyBoundParams>,
    /// Used when no entropy parameters are given.
    pub lambda0: Option<f64>,
    pub draws: usize,
    pub master_seed: u64,
    pub quantile: f64,
    pub sup_search: SupSearch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbReport {
    pub master_seed: u64,
    pub draws: usize,
    pub alpha: f64,
    pub lambda0: Option<f64>,
    pub failure_frequency: Option<f64>,
    pub bound_exp_minus_t2_times_1_plus_2_over_b: Option<f64>,
    /// Bound plus three binomial standard errors.
    pub bound_with_tolerance: Option<f64>,
    pub quantile: f64,
    /// Empirical quantile of the sup statistic over calibration draws.
    pub calibrated_lambda0: f64,
    /// Frequency of {sup > calibrated λ₀} on the main draws.
    pub calibrated_failure_frequency: f64,
    /// True when the statistic for α < 1 is a search lower bound.
    pub lower_bound_statistic: bool,
}

impl ProbSpec {
    pub fn theoretical(&self) -> Result<(Option<f64>, Option<f64>)> {
        match (&self.entropy, self.lambda0) {
            (Some(p), _) => {
                let c = derive_constants(p)?;
                Ok((Some(c.lambda0), Some(failure_bound(p.t, c.b))))
            }
            (None, l) => Ok((l, None)),
        }
    }
}

/// Sup statistic of main draw `index`.
pub fn probability_draw(design: &DesignMatrix, noise: &NoiseModel, spec: &ProbSpec, index: usize) -> Result<f64> {
    let seed = mix_seed(spec.master_seed, index as u64);
    let eps = noise.draw(design.n(), seed);
    sup_statistic(design, &eps, spec.alpha, &spec.sup_search, seed ^ 0x5A5A)
}

/// Builds the report from per-draw statistics in index order.
pub fn probability_report(spec: &ProbSpec, main: &[f64], calibration: &[f64]) -> Result<ProbReport> {
    let (lambda0, bound) = spec.theoretical()?;
    let freq = |l0: f64| main.iter().filter(|&&s| s > l0).count() as f64 / main.len().max(1) as f64;
    let calibrated = empirical_quantile(calibration, spec.quantile)?;
    let tol = bound.map(|q| {
        let qq = q.min(1.0);
        q + 3.0 * sqrt(qq * (1.0 - qq) / main.len().max(1) as f64)
    });
    Ok(ProbReport {
        master_seed: spec.master_seed,
        draws: main.len(),
        alpha: spec.alpha,
        lambda0,
        failure_frequency: lambda0.map(freq),
        bound_exp_minus_t2_times_1_plus_2_over_b: bound,
        bound_with_tolerance: tol,
        quantile: spec.quantile,
        calibrated_lambda0: calibrated,
        calibrated_failure_frequency: freq(calibrated),
        lower_bound_statistic: spec.alpha < 1.0,
    })
}

/// Sequential probability check.
pub fn probability_check(design: &DesignMatrix, noise: &NoiseModel, spec: &ProbSpec) -> Result<ProbReport> {
    check_alpha(spec.alpha)?;
    let main = (0..spec.draws).map(|i| probability_draw(design, noise, spec, i)).collect::<Result<Vec<_>>>()?;
    let cal = (0..spec.draws)
        .map(|i| calibration_draw(design, noise, spec.alpha, &spec.sup_search, spec.master_seed, i))
        .collect::<Result<Vec<_>>>()?;
    probability_report(spec, &main, &cal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::{generate, DesignFamily};

    #[test]
    fn statistic_examples() {
        let d = generate(DesignFamily::Orthonormal, 10, 4, 1).unwrap();
        // noise orthogonal to all columns: use a vector from the complement
        let mut eps = vec![1.0; 10];
        for j in 0..4 {
            let col = d.column(j);
            let proj = dot(col, &eps) / 10.0;
            eps.iter_mut().zip(col).for_each(|(e, c)| *e -= proj * c);
        }
        assert!(talpha_statistic(&d, &eps, &[0.3, -0.2, 0.0, 0.5], 0.5).unwrap() < 1e-12);
        let eps: Vec<f64> = d.column(0).to_vec();
        assert!(abs(talpha_sup_alpha1(&d, &eps).unwrap() - 4.0) < 1e-12);
        let e0 = [0.0, 1.0, 0.0, 0.0];
        let raw: Vec<f64> = (0..10).map(|i| (i as f64).sin()).collect();
        let direct = 4.0 * abs(dot(&raw, d.column(1))) / 10.0;
        assert!(abs(talpha_statistic(&d, &raw, &e0, 1.0).unwrap() - direct) < 1e-12);
        assert!(talpha_statistic(&d, &raw, &[0.0; 4], 0.5).is_err());
        assert_eq!(talpha_sup_alpha1(&d, &[0.0; 10]).unwrap(), 0.0);
    }

    #[test]
    fn estimate_near_alpha_one_matches_vertex_sup() {
        let d = generate(DesignFamily::Ar1 { r: 0.6 }, 30, 8, 2).unwrap();
        let eps = NoiseModel::gaussian(1.0).unwrap().draw(30, 4);
        let exact = talpha_sup_alpha1(&d, &eps).unwrap();
        let est = talpha_sup_estimate(&d, &eps, 1.0 - 1e-9, &SupSearch::default(), 1).unwrap();
        assert!(est >= exact * (1.0 - 1e-6));
        assert_eq!(talpha_sup_estimate(&d, &[0.0; 30], 0.5, &SupSearch::default(), 1).unwrap(), 0.0);
    }

    #[test]
    fn quantile_and_bound() {
        let v: Vec<f64> = (1..=100).map(|i| i as f64).collect();
        assert_eq!(empirical_quantile(&v, 0.95).unwrap(), 95.0);
        assert_eq!(empirical_quantile(&v, 1.0).unwrap(), 100.0);
        assert!(empirical_quantile(&[], 0.5).is_err());
        let b = failure_bound(2.0, 3.0);
        assert!(abs(b - exp(-4.0) * (1.0 + 2.0 / 3.0)) < 1e-15);
    }

    #[test]
    fn noiseless_run_has_no_violations() {
        let d = generate(DesignFamily::Orthonormal, 20, 6, 1).unwrap();
        let f0 = d.predict(&[1.0, -1.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let spec = VerifySpec {
            s: vec![0, 1],
            alpha: 1.0,
            lambda0: Lambda0Source::Given { value: 0.01 },
            rule: LambdaRule::Classic { c: 2.0 },
            draws: 5,
            master_seed: 3,
            sup_search: SupSearch::default(),
            lasso: LassoOptions::default(),
            geometry: GeometryOptions::default(),
        };
        let rep = verify_run(&d, &f0, NoiseModel::gaussian(0.0).unwrap(), spec).unwrap();
        assert_eq!(rep.aggregates.violations_given_certificate, 0);
        assert_eq!(rep.aggregates.certified_draws, 5);
        assert!(rep.records.iter().all(|r| r.lhs <= r.rhs));
    }
}
