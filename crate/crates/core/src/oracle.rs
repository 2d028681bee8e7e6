//! Projection onto support spans, the conjugate inequality, the oracle
//! inequality's right-hand side, oracle-set search and tuning rules.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::design::{CoefficientVector, DesignMatrix};
use crate::error::{Error, Result};
use crate::geometry::{compatibility, GeometryOptions, SupportPartition};
use crate::linalg::{self, norm1};
use crate::num::{exp, ln, powf, sqrt};

/// L in φ²(L, S₁) throughout the oracle inequality.
pub const ORACLE_L: f64 = 6.0;
/// Largest support for which all 2^s partitions are enumerated.
pub const PARTITION_CAP: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionResult {
    /// b^S, zero outside S.
    #[serde(rename = "bS")]
    pub b_s: CoefficientVector,
    #[serde(rename = "fS")]
    pub f_s: Vec<f64>,
    /// ‖f_S − f⁰‖_n.
    pub approx_error: f64,
    /// The columns of S were dependent; b^S is the minimum-norm solution.
    pub rank_deficient: bool,
}

/// Least-squares projection of f⁰ on span{ψ_j : j ∈ S}.
pub fn project(design: &DesignMatrix, s: &[usize], f0: &[f64]) -> Result<ProjectionResult> {
    design.check_n(f0.len())?;
    design.check_support(s)?;
    let p = design.p();
    let mut b_s = vec![0.0; p];
    let mut rank_deficient = false;
    if !s.is_empty() {
        let xtf = design.xt_scaled(f0)?;
        let rhs: Vec<f64> = s.iter().map(|&j| xtf[j]).collect();
        let gram = design.gram().principal(s);
        let coef = match linalg::cholesky(&gram, 1e-12) {
            Some(l) => linalg::cholesky_solve(&l, &rhs),
            None => {
                rank_deficient = true;
                linalg::psd_pinv_solve(&gram, &rhs, 1e-12)?
            }
        };
        for (k, &j) in s.iter().enumerate() {
            b_s[j] = coef[k];
        }
    }
    let f_s = design.predict(&b_s)?;
    let diff: Vec<f64> = f_s.iter().zip(f0).map(|(a, b)| a - b).collect();
    let approx_error = design.empirical_norm(&diff)?;
    Ok(ProjectionResult { b_s: CoefficientVector(b_s), f_s, approx_error, rank_deficient })
}

/// (λ₀/λ^α)^{2/(1−α)}; for α = 1 this is ∞, 1 or 0 as λ <, =, > λ₀.
pub fn tuning_power(lambda0: f64, lambda: f64, alpha: f64) -> f64 {
    if alpha >= 1.0 {
        return match lambda.partial_cmp(&lambda0) {
            Some(Ordering::Less) => f64::INFINITY,
            Some(Ordering::Equal) => 1.0,
            _ => 0.0,
        };
    }
    powf(lambda0 / powf(lambda, alpha), 2.0 / (1.0 - alpha))
}

/// a²/2 + λb + (λ₀/λ^α)^{2/(1−α)}/2, an upper bound for λ₀a^{1−α}b^α.
pub fn conjugate_bound(a: f64, b: f64, lambda0: f64, lambda: f64, alpha: f64) -> f64 {
    0.5 * a * a + lambda * b + 0.5 * tuning_power(lambda0, lambda, alpha)
}

/// Constants of the four right-hand-side terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RhsScale {
    /// 56, 28/3, 7/6, 7.
    Theorem,
    /// 8, 4/3, 1/6, 1.
    Remark,
}

impl RhsScale {
    fn constants(self) -> [f64; 4] {
        match self {
            RhsScale::Theorem => [56.0, 28.0 / 3.0, 7.0 / 6.0, 7.0],
            RhsScale::Remark => [8.0, 4.0 / 3.0, 1.0 / 6.0, 1.0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RhsTerms {
    pub estimation: f64,
    pub ell1: f64,
    pub tuning: f64,
    pub approx: f64,
}

impl RhsTerms {
    pub fn total(&self) -> f64 {
        self.estimation + self.ell1 + self.tuning + self.approx
    }

    /// Evaluates the four terms. An empty S₁ drops the estimation term; φ² = 0
    /// with s₁ > 0 makes it infinite.
    #[allow(clippy::too_many_arguments)]
    pub fn evaluate(scale: RhsScale, lambda: f64, lambda0: f64, alpha: f64, s1: usize, phi2: f64, b_s2_l1: f64, approx_sq: f64) -> Self {
        let [c1, c2, c3, c4] = scale.constants();
        let estimation = if s1 == 0 {
            0.0
        } else if phi2 > 0.0 {
            c1 * lambda * lambda * s1 as f64 / phi2
        } else {
            f64::INFINITY
        };
        RhsTerms { estimation, ell1: c2 * lambda * b_s2_l1, tuning: c3 * tuning_power(lambda0, lambda, alpha), approx: c4 * approx_sq }
    }
}

/// φ²(6, S₁) for every S₁ ⊆ S together with the projection of f⁰ on S.
/// Everything here is independent of λ and of the noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportAnalysis {
    pub s: Vec<usize>,
    pub projection: ProjectionResult,
    /// Indexed by bitmask over positions in `s`; entry 0 is unused.
    pub phi2: Vec<f64>,
    pub rank_deficient: Vec<bool>,
}

impl SupportAnalysis {
    pub fn new(design: &DesignMatrix, f0: &[f64], s: &[usize], opts: &GeometryOptions) -> Result<Self> {
        let mut s = s.to_vec();
        s.sort_unstable();
        s.dedup();
        if s.len() > PARTITION_CAP {
            return Err(Error::Capacity { what: "partition enumeration", limit: PARTITION_CAP, got: s.len() });
        }
        let projection = project(design, &s, f0)?;
        let count = 1usize << s.len();
        let mut phi2 = vec![0.0; count];
        let mut rank_deficient = vec![false; count];
        for mask in 1..count {
            let s1 = mask_members(&s, mask);
            match compatibility(design, &s1, ORACLE_L, opts) {
                Ok(g) => phi2[mask] = g.value,
                Err(Error::RankDeficient { .. }) => rank_deficient[mask] = true,
                Err(e) => return Err(e),
            }
        }
        Ok(SupportAnalysis { s, projection, phi2, rank_deficient })
    }

    pub fn approx_sq(&self) -> f64 {
        self.projection.approx_error * self.projection.approx_error
    }

    /// ‖(b^S)_{S₂}‖₁ for S₁ given by `mask`.
    pub fn b_s2_l1(&self, mask: usize) -> f64 {
        self.s.iter().enumerate().filter(|(k, _)| mask & (1 << k) == 0).map(|(_, &j)| crate::num::abs(self.projection.b_s.0[j])).sum()
    }

    pub fn partition(&self, mask: usize) -> SupportPartition {
        SupportPartition::from_mask(&self.s, mask as u32)
    }

    pub fn terms(&self, mask: usize, scale: RhsScale, lambda: f64, lambda0: f64, alpha: f64) -> RhsTerms {
        let s1 = (mask as u32).count_ones() as usize;
        RhsTerms::evaluate(scale, lambda, lambda0, alpha, s1, self.phi2[mask], self.b_s2_l1(mask), self.approx_sq())
    }

    /// Partition minimising the theorem-scale right-hand side.
    pub fn min_rhs(&self, lambda: f64, lambda0: f64, alpha: f64) -> (usize, RhsTerms) {
        self.argmin_masks(|m| self.terms(m, RhsScale::Theorem, lambda, lambda0, alpha))
    }

    /// ℰ(S) = min over S₁ of 8λ²s₁/φ²(6,S₁) + (4/3)λ‖(b^S)_{S₂}‖₁.
    pub fn estimation_error(&self, lambda: f64) -> (f64, usize) {
        let (mask, t) = self.argmin_masks(|m| {
            let t = self.terms(m, RhsScale::Remark, lambda, 0.0, 1.0);
            RhsTerms { tuning: 0.0, approx: 0.0, ..t }
        });
        (t.total(), mask)
    }

    fn argmin_masks(&self, f: impl Fn(usize) -> RhsTerms) -> (usize, RhsTerms) {
        let mut best: Option<(usize, RhsTerms)> = None;
        for mask in 0..self.phi2.len() {
            let t = f(mask);
            let better = match &best {
                None => true,
                Some((bm, bt)) => match t.total().total_cmp(&bt.total()) {
                    Ordering::Less => true,
                    Ordering::Greater => false,
                    Ordering::Equal => partition_order(&self.s, mask, *bm) == Ordering::Less,
                },
            };
            if better {
                best = Some((mask, t));
            }
        }
        best.expect("at least the empty partition")
    }
}

/// Smaller s₁ first, then lexicographic S₁.
fn partition_order(s: &[usize], a: usize, b: usize) -> Ordering {
    let (ca, cb) = ((a as u32).count_ones(), (b as u32).count_ones());
    ca.cmp(&cb).then_with(|| mask_members(s, a).cmp(&mask_members(s, b)))
}

fn mask_members(s: &[usize], mask: usize) -> Vec<usize> {
    s.iter().enumerate().filter(|(k, _)| mask & (1 << k) != 0).map(|(_, &j)| j).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub lambda: f64,
    pub lambda0: f64,
    pub alpha: f64,
    pub partition: SupportPartition,
    pub phi2_s1: f64,
    pub rhs_terms: RhsTerms,
    pub rhs_total: f64,
    #[serde(rename = "estimation_error_ES")]
    pub estimation_error_es: f64,
    pub rule: String,
    /// φ²(6, S₁) vanished or S₁ was dependent, making the estimation term infinite.
    pub degenerate: bool,
}

fn validate_lambdas(lambda: f64, lambda0: f64, alpha: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda0 > 0.0 && lambda.is_finite() && lambda0.is_finite()) {
        return Err(Error::Parameter(format!("lambda and lambda0 must be positive, got {lambda} and {lambda0}")));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Parameter(format!("alpha must lie in [0, 1], got {alpha}")));
    }
    Ok(())
}

/// Builds the report for a given partition from precomputed support data.
pub fn report_for(analysis: &SupportAnalysis, mask: usize, lambda: f64, lambda0: f64, alpha: f64, rule: &str) -> OracleReport {
    let t = analysis.terms(mask, RhsScale::Theorem, lambda, lambda0, alpha);
    let s1 = (mask as u32).count_ones();
    OracleReport {
        lambda,
        lambda0,
        alpha,
        partition: analysis.partition(mask),
        phi2_s1: if mask == 0 { f64::NAN } else { analysis.phi2[mask] },
        rhs_terms: t,
        rhs_total: t.total(),
        estimation_error_es: analysis.estimation_error(lambda).0,
        rule: rule.into(),
        degenerate: s1 > 0 && !(analysis.phi2[mask] > 0.0),
    }
}

/// Right-hand side of the oracle inequality for an explicit partition.
pub fn theorem_rhs(
    design: &DesignMatrix,
    f0: &[f64],
    partition: &SupportPartition,
    lambda: f64,
    lambda0: f64,
    alpha: f64,
    opts: &GeometryOptions,
) -> Result<OracleReport> {
    validate_lambdas(lambda, lambda0, alpha)?;
    let analysis = SupportAnalysis::new(design, f0, &partition.s, opts)?;
    let mask = analysis.s.iter().enumerate().filter(|(_, j)| partition.s1.contains(j)).fold(0usize, |m, (k, _)| m | 1 << k);
    Ok(report_for(&analysis, mask, lambda, lambda0, alpha, "fixed"))
}

/// ℰ(S) and the partition attaining it.
pub fn estimation_error(design: &DesignMatrix, f0: &[f64], s: &[usize], lambda: f64, opts: &GeometryOptions) -> Result<(f64, SupportPartition)> {
    if !(lambda > 0.0) {
        return Err(Error::Parameter(format!("lambda must be positive, got {lambda}")));
    }
    let analysis = SupportAnalysis::new(design, f0, s, opts)?;
    let (e, mask) = analysis.estimation_error(lambda);
    Ok((e, analysis.partition(mask)))
}

/// λ = cλ₀(φ²/s₁)^{(1−α)/2}.
pub fn lambda_classic_from(phi2: f64, s1: usize, lambda0: f64, alpha: f64, c: f64) -> Result<f64> {
    if !(c > 0.0 && lambda0 > 0.0) {
        return Err(Error::Parameter("c and lambda0 must be positive".into()));
    }
    if alpha >= 1.0 {
        return Ok(c * lambda0);
    }
    if !(phi2 > 0.0) || s1 == 0 {
        return Err(Error::Domain(format!("classic rule needs a nonempty S1 with positive compatibility, got phi2 = {phi2}")));
    }
    Ok(c * lambda0 * powf(phi2 / s1 as f64, (1.0 - alpha) / 2.0))
}

pub fn lambda_classic(design: &DesignMatrix, s1: &[usize], lambda0: f64, alpha: f64, c: f64, opts: &GeometryOptions) -> Result<f64> {
    if alpha >= 1.0 {
        return lambda_classic_from(1.0, 1, lambda0, alpha, c);
    }
    let phi2 = match compatibility(design, s1, ORACLE_L, opts) {
        Ok(g) => g.value,
        Err(Error::RankDeficient { .. }) => 0.0,
        Err(e) => return Err(e),
    };
    lambda_classic_from(phi2, s1.len(), lambda0, alpha, c)
}

/// λ = cλ₀^{2/(1+α)}‖b‖₁^{−(1−α)/(1+α)}; for α = 1 this is cλ₀ with c > 1.
pub fn lambda_slow(b_norm: f64, lambda0: f64, alpha: f64, c: f64) -> Result<f64> {
    if !(c > 0.0 && lambda0 > 0.0) {
        return Err(Error::Parameter("c and lambda0 must be positive".into()));
    }
    if alpha >= 1.0 {
        if c <= 1.0 {
            return Err(Error::Parameter(format!("with alpha = 1 the slow rule needs lambda > lambda0, i.e. c > 1 (got c = {c})")));
        }
        return Ok(c * lambda0);
    }
    if !(b_norm > 0.0) {
        return Err(Error::Domain("slow rule needs a nonzero coefficient norm; use the classic rule instead".into()));
    }
    Ok(c * powf(lambda0, 2.0 / (1.0 + alpha)) * powf(b_norm, -(1.0 - alpha) / (1.0 + alpha)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradeoffChoice {
    pub lambda: f64,
    pub partition: SupportPartition,
    pub balanced: bool,
    /// |log ratio| of the two balanced quantities; ∞ when nothing balances.
    pub distance: f64,
}

/// Picks S₁ balancing λ₀^{2/(1+α)}s₁/φ² against ‖(b^S)_{S₂}‖₁^{2/(1+α)} and
/// returns λ = cλ₀(s₁²/φ²)^{(1−α)/2}.
pub fn lambda_tradeoff_from(analysis: &SupportAnalysis, lambda0: f64, alpha: f64, c: f64) -> Result<TradeoffChoice> {
    if !(c > 0.0 && lambda0 > 0.0) {
        return Err(Error::Parameter("c and lambda0 must be positive".into()));
    }
    let e = 2.0 / (1.0 + alpha);
    let mut best: Option<(f64, usize)> = None;
    for mask in 1..analysis.phi2.len() {
        let phi2 = analysis.phi2[mask];
        let b = analysis.b_s2_l1(mask);
        if !(phi2 > 0.0) || !(b > 0.0) {
            continue;
        }
        let s1 = (mask as u32).count_ones() as f64;
        let d = crate::num::abs(e * ln(lambda0) + ln(s1) - ln(phi2) - e * ln(b));
        let better = match best {
            None => true,
            Some((bd, bm)) => d < bd || (d == bd && partition_order(&analysis.s, mask, bm) == Ordering::Less),
        };
        if better {
            best = Some((d, mask));
        }
    }
    let full = analysis.phi2.len() - 1;
    let (distance, mask) = best.unwrap_or((f64::INFINITY, full));
    let phi2 = analysis.phi2[mask];
    let s1 = (mask as u32).count_ones() as f64;
    let lambda = if alpha >= 1.0 {
        c * lambda0
    } else if phi2 > 0.0 {
        c * lambda0 * powf(s1 * s1 / phi2, (1.0 - alpha) / 2.0)
    } else {
        return Err(Error::Domain("trade-off rule fell back to S1 = S, whose compatibility constant vanishes".into()));
    };
    Ok(TradeoffChoice { lambda, partition: analysis.partition(mask), balanced: distance <= ln(10.0), distance })
}

pub fn lambda_tradeoff(
    design: &DesignMatrix,
    f0: &[f64],
    s: &[usize],
    lambda0: f64,
    alpha: f64,
    c: f64,
    opts: &GeometryOptions,
) -> Result<TradeoffChoice> {
    let analysis = SupportAnalysis::new(design, f0, s, opts)?;
    lambda_tradeoff_from(&analysis, lambda0, alpha, c)
}

/// Tuning-parameter rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum LambdaRule {
    /// S₁ = S.
    Classic { c: f64 },
    /// S₁ = ∅.
    Slow { c: f64 },
    Tradeoff { c: f64 },
    Fixed { value: f64 },
}

impl LambdaRule {
    pub fn tag(&self) -> String {
        match self {
            LambdaRule::Classic { .. } => "classic".into(),
            LambdaRule::Slow { .. } => "slow".into(),
            LambdaRule::Tradeoff { .. } => "tradeoff".into(),
            LambdaRule::Fixed { value } => format!("fixed:{value}"),
        }
    }

    /// λ for this rule; the partition hint is the one the rule is built for.
    pub fn resolve(&self, analysis: &SupportAnalysis, lambda0: f64, alpha: f64) -> Result<(f64, usize)> {
        let full = analysis.phi2.len() - 1;
        match *self {
            LambdaRule::Classic { c } => {
                let phi2 = if full == 0 { 1.0 } else { analysis.phi2[full] };
                Ok((lambda_classic_from(phi2, analysis.s.len().max(1), lambda0, alpha, c)?, full))
            }
            LambdaRule::Slow { c } => Ok((lambda_slow(norm1(&analysis.projection.b_s.0), lambda0, alpha, c)?, 0)),
            LambdaRule::Tradeoff { c } => {
                let t = lambda_tradeoff_from(analysis, lambda0, alpha, c)?;
                let mask = analysis.s.iter().enumerate().filter(|(_, j)| t.partition.s1.contains(j)).fold(0, |m, (k, _)| m | 1 << k);
                Ok((t.lambda, mask))
            }
            LambdaRule::Fixed { value } => {
                if !(value > 0.0 && value.is_finite()) {
                    return Err(Error::Parameter(format!("fixed lambda must be positive, got {value}")));
                }
                Ok((value, full))
            }
        }
    }
}

/// 32 geometric points from λ₀/10 to 10·max(λ₀, 2·dual).
pub fn default_lambda_grid(lambda0: f64, dual_stat: f64) -> Vec<f64> {
    let lo = lambda0 / 10.0;
    let hi = 10.0 * lambda0.max(2.0 * dual_stat);
    let r = ln(hi / lo) / 31.0;
    (0..32).map(|k| lo * exp(r * k as f64)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSearch {
    #[serde(rename = "S_star")]
    pub s_star: Vec<usize>,
    pub lambda_star: f64,
    pub objective: f64,
    pub report: OracleReport,
}

/// Minimises ℰ(S) + ‖f_S − f⁰‖² over candidates for each λ, then
/// ℰ(S*(λ)) + (1/6)(λ₀/λ^α)^{2/(1−α)} + ‖f_{S*} − f⁰‖² over the grid.
pub fn oracle_search(
    design: &DesignMatrix,
    f0: &[f64],
    lambda0: f64,
    alpha: f64,
    candidates: &[Vec<usize>],
    lambda_grid: &[f64],
    opts: &GeometryOptions,
) -> Result<OracleSearch> {
    if candidates.is_empty() || lambda_grid.is_empty() {
        return Err(Error::Input("oracle search needs at least one candidate set and one lambda".into()));
    }
    let analyses = candidates.iter().map(|s| SupportAnalysis::new(design, f0, s, opts)).collect::<Result<Vec<_>>>()?;
    search_analyses(&analyses, lambda0, alpha, lambda_grid)
}

pub fn search_analyses(analyses: &[SupportAnalysis], lambda0: f64, alpha: f64, lambda_grid: &[f64]) -> Result<OracleSearch> {
    let mut grid = lambda_grid.to_vec();
    for &l in &grid {
        validate_lambdas(l, lambda0, alpha)?;
    }
    grid.sort_by(f64::total_cmp);
    let mut best: Option<(f64, f64, usize, usize)> = None;
    for &lambda in &grid {
        let mut s_best: Option<(f64, usize, usize)> = None;
        for (i, a) in analyses.iter().enumerate() {
            let (e, mask) = a.estimation_error(lambda);
            let v = e + a.approx_sq();
            let better = match s_best {
                None => true,
                Some((bv, bi, _)) => v < bv || (v == bv && a.s < analyses[bi].s),
            };
            if better {
                s_best = Some((v, i, mask));
            }
        }
        let (v, i, mask) = s_best.expect("nonempty candidates");
        let obj = v + tuning_power(lambda0, lambda, alpha) / 6.0;
        // the grid is ascending, so strict improvement keeps the smaller λ on ties
        if best.map_or(true, |(bo, ..)| obj < bo) {
            best = Some((obj, lambda, i, mask));
        }
    }
    let (objective, lambda_star, i, mask) = best.expect("nonempty grid");
    Ok(OracleSearch {
        s_star: analyses[i].s.clone(),
        lambda_star,
        objective,
        report: report_for(&analyses[i], mask, lambda_star, lambda0, alpha, "oracle"),
    })
}

/// ‖f_β‖_n.
pub fn prediction_norm(design: &DesignMatrix, beta: &[f64]) -> Result<f64> {
    Ok(sqrt(design.quad_form(beta)?.max(0.0)))
}
