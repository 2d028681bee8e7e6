//! Compatibility constant, minimal ℓ1- and ℓ2-eigenvalues and the restricted
//! eigenvalue of a support set, plus a random-search oracle used to
//! cross-check the solvers.
//!
//! With β_S = σ∘w (σ a sign pattern, w in the unit simplex) and v = β_{Sᶜ},
//! ‖f_{β_S} − f_{β_{Sᶜ}}‖_n² = wᵀA_σw − 2wᵀB_σv + vᵀCv where A_σ = D_σΣ̂_SS D_σ,
//! B_σ = D_σΣ̂_{S,Sᶜ} and C = Σ̂_{Sᶜ,Sᶜ}. Inside each sign orthant this is a
//! convex quadratic over simplex × ℓ1-ball, solved by accelerated projected
//! gradient followed by an exact solve on the final active face. Flipping
//! every sign maps an orthant onto an equivalent one, so only patterns with
//! σ_1 = +1 are visited.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::design::{CoefficientVector, DesignMatrix};
use crate::error::{Error, Result};
use crate::linalg::{self, dot, norm1, norm2, Matrix};
use crate::num::{abs, ln, mix_seed, sqrt};
use crate::projection::{project_l1_ball, project_simplex};

/// S = S₁ ∪ S₂ with S₁ ∩ S₂ = ∅; all sets sorted, 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportPartition {
    pub s: Vec<usize>,
    pub s1: Vec<usize>,
    pub s2: Vec<usize>,
}

impl SupportPartition {
    /// Splits `s` by putting the members of `s1` into S₁ and the rest into S₂.
    pub fn new(s: &[usize], s1: &[usize]) -> Result<Self> {
        let mut s = s.to_vec();
        s.sort_unstable();
        if s.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Input("support contains duplicate indices".into()));
        }
        let mut s1 = s1.to_vec();
        s1.sort_unstable();
        s1.dedup();
        if let Some(j) = s1.iter().find(|j| s.binary_search(j).is_err()) {
            return Err(Error::Input(format!("index {} of S1 is not in S", j + 1)));
        }
        let s2 = s.iter().copied().filter(|j| s1.binary_search(j).is_err()).collect();
        Ok(SupportPartition { s, s1, s2 })
    }

    /// S₁ given as a bitmask over the positions of S.
    pub fn from_mask(s: &[usize], mask: u32) -> Self {
        let mut s1 = Vec::new();
        let mut s2 = Vec::new();
        for (pos, &j) in s.iter().enumerate() {
            if mask & (1 << pos) != 0 {
                s1.push(j);
            } else {
                s2.push(j);
            }
        }
        SupportPartition { s: s.to_vec(), s1, s2 }
    }

    pub fn size(&self) -> usize {
        self.s.len()
    }

    pub fn s1_size(&self) -> usize {
        self.s1.len()
    }

    /// S₃ = Sᶜ within {0..p}.
    pub fn complement(&self, p: usize) -> Vec<usize> {
        complement(&self.s, p)
    }
}

pub(crate) fn complement(s: &[usize], p: usize) -> Vec<usize> {
    (0..p).filter(|j| s.binary_search(j).is_err()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryOptions {
    /// Largest |S| for which sign orthants are enumerated.
    pub orthant_cap: usize,
    /// Projected-gradient iterations per orthant.
    pub max_iters: usize,
    /// Stop once the gradient-mapping norm drops below this.
    pub pg_tol: f64,
    /// Relative pivot tolerance of the independence check on Σ̂_S.
    pub rank_tol: f64,
    /// Random restarts of the restricted-eigenvalue heuristic.
    pub re_restarts: usize,
    pub re_seed: u64,
    pub re_outer_iters: usize,
}

impl Default for GeometryOptions {
    fn default() -> Self {
        GeometryOptions {
            orthant_cap: 16,
            max_iters: 5000,
            pg_tol: 1e-10,
            rank_tol: 1e-10,
            re_restarts: 32,
            re_seed: 0x5EED,
            re_outer_iters: 300,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverStatus {
    /// Every subproblem met the stopping rule.
    pub converged: bool,
    pub iterations: usize,
    pub subproblems: usize,
    /// Set for values that are only upper bounds on the true minimum.
    pub heuristic: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryValue {
    pub value: f64,
    /// Coefficients attaining `value`; for the compatibility constant the
    /// Sᶜ block enters with a minus sign, i.e. value = s‖f_{β_S} − f_{β_{Sᶜ}}‖_n².
    pub minimizer: CoefficientVector,
    pub status: SolverStatus,
}

/// All four design constants of a support set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryReport {
    pub phi2: f64,
    pub lambda1_min2: f64,
    pub lambda_min2: f64,
    /// Heuristic upper bound on the restricted eigenvalue.
    pub phi2_re: f64,
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "S")]
    pub s: Vec<usize>,
    pub minimizer_phi: CoefficientVector,
    pub status: GeometryStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryStatus {
    pub phi2: SolverStatus,
    pub lambda1_min2: SolverStatus,
    pub phi2_re: SolverStatus,
}

struct Blocks {
    s: Vec<usize>,
    c: Vec<usize>,
    a: Matrix,
    b: Matrix,
    cc: Matrix,
}

impl Blocks {
    fn new(design: &DesignMatrix, s: &[usize], include_complement: bool) -> Self {
        let g = design.gram();
        let c = if include_complement { complement(s, design.p()) } else { Vec::new() };
        let a = g.principal(s);
        let cc = g.principal(&c);
        let mut b = Matrix::zeros(s.len(), c.len());
        for (i, &si) in s.iter().enumerate() {
            for (k, &ck) in c.iter().enumerate() {
                b.set(i, k, g.get(si, ck));
            }
        }
        Blocks { s: s.to_vec(), c, a, b, cc }
    }

    fn ns(&self) -> usize {
        self.s.len()
    }

    fn nc(&self) -> usize {
        self.c.len()
    }

    /// F(w, v) for signed w (β_S = w directly, signs already applied).
    fn value(&self, bs: &[f64], v: &[f64]) -> f64 {
        let mut val = 0.0;
        for i in 0..self.ns() {
            val += bs[i] * dot(self.a.row(i), bs);
            if !v.is_empty() {
                val -= 2.0 * bs[i] * dot(self.b.row(i), v);
            }
        }
        for k in 0..self.nc() {
            val += v[k] * dot(self.cc.row(k), v);
        }
        val.max(0.0)
    }

    /// Gradients of F with respect to β_S and v.
    fn grad(&self, bs: &[f64], v: &[f64], gs: &mut [f64], gv: &mut [f64]) {
        for i in 0..self.ns() {
            let mut t = dot(self.a.row(i), bs);
            if !v.is_empty() {
                t -= dot(self.b.row(i), v);
            }
            gs[i] = 2.0 * t;
        }
        for k in 0..self.nc() {
            let mut t = dot(self.cc.row(k), v);
            for i in 0..self.ns() {
                t -= self.b.get(i, k) * bs[i];
            }
            gv[k] = 2.0 * t;
        }
    }
}

fn lipschitz(design: &DesignMatrix, idx: &[usize]) -> Result<f64> {
    let sub = design.gram().principal(idx);
    let top = linalg::sym_eigen(&sub)?.values.first().copied().unwrap_or(0.0);
    Ok((2.0 * top).max(1e-12))
}

fn check_independent(design: &DesignMatrix, s: &[usize], tol: f64) -> Result<()> {
    let sub = design.gram().principal(s);
    if linalg::cholesky(&sub, tol).is_none() {
        return Err(Error::RankDeficient { support: s.to_vec() });
    }
    Ok(())
}

fn validate_support(design: &DesignMatrix, s: &[usize], opts: &GeometryOptions) -> Result<()> {
    if s.is_empty() {
        return Err(Error::Input("support set must be nonempty".into()));
    }
    design.check_support(s)?;
    if s.len() > opts.orthant_cap {
        return Err(Error::Capacity {
            what: "sign-orthant enumeration (use brute_force_min for larger supports)",
            limit: opts.orthant_cap,
            got: s.len(),
        });
    }
    check_independent(design, s, opts.rank_tol)
}

struct OrthantResult {
    w: Vec<f64>,
    v: Vec<f64>,
    value: f64,
    iterations: usize,
    converged: bool,
}

/// Minimises F over (σ∘w, v) with w in the simplex and ‖v‖₁ ≤ radius.
fn solve_orthant(
    blocks: &Blocks,
    sigma: &[f64],
    radius: f64,
    lip: f64,
    w0: &[f64],
    v0: &[f64],
    opts: &GeometryOptions,
) -> OrthantResult {
    let (ns, nc) = (blocks.ns(), blocks.nc());
    let signed = |w: &[f64]| -> Vec<f64> { w.iter().zip(sigma).map(|(a, b)| a * b).collect() };
    let project = |w: &mut [f64], v: &mut [f64]| {
        project_simplex(w, 1.0);
        project_l1_ball(v, radius);
    };
    let mut xw = w0.to_vec();
    let mut xv = v0.to_vec();
    project(&mut xw, &mut xv);
    let mut yw = xw.clone();
    let mut yv = xv.clone();
    let mut t = 1.0;
    let mut f_prev = blocks.value(&signed(&xw), &xv);
    let mut best = (xw.clone(), xv.clone(), f_prev);
    let mut gs = vec![0.0; ns];
    let mut gv = vec![0.0; nc];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iters {
        iterations += 1;
        blocks.grad(&signed(&yw), &yv, &mut gs, &mut gv);
        // chain rule through β_S = σ∘w
        let mut nw: Vec<f64> = yw.iter().zip(&gs).zip(sigma).map(|((y, g), s)| y - g * s / lip).collect();
        let mut nv: Vec<f64> = yv.iter().zip(&gv).map(|(y, g)| y - g / lip).collect();
        project(&mut nw, &mut nv);
        let gm2: f64 = nw.iter().zip(&yw).chain(nv.iter().zip(&yv)).map(|(a, b)| (a - b) * (a - b)).sum();
        let f_new = blocks.value(&signed(&nw), &nv);
        if f_new < best.2 {
            best = (nw.clone(), nv.clone(), f_new);
        }
        if lip * sqrt(gm2) < opts.pg_tol {
            converged = true;
            break;
        }
        if f_new > f_prev {
            t = 1.0;
            yw.clone_from(&nw);
            yv.clone_from(&nv);
        } else {
            let t_new = 0.5 * (1.0 + sqrt(1.0 + 4.0 * t * t));
            let mom = (t - 1.0) / t_new;
            yw = nw.iter().zip(&xw).map(|(a, b)| a + mom * (a - b)).collect();
            yv = nv.iter().zip(&xv).map(|(a, b)| a + mom * (a - b)).collect();
            t = t_new;
        }
        xw = nw;
        xv = nv;
        f_prev = f_new;
    }
    let (mut w, mut v, mut value) = best;
    if let Some((pw, pv, pf)) = polish_face(blocks, sigma, radius, &w, &v) {
        if pf < value {
            w = pw;
            v = pv;
            value = pf;
        }
    }
    OrthantResult { w, v, value, iterations, converged }
}

/// Solves the equality-constrained quadratic on the face of simplex × ball
/// that contains (w, v); returns the solution if it is feasible.
fn polish_face(blocks: &Blocks, sigma: &[f64], radius: f64, w: &[f64], v: &[f64]) -> Option<(Vec<f64>, Vec<f64>, f64)> {
    const ACTIVE: f64 = 1e-12;
    let iw: Vec<usize> = (0..w.len()).filter(|&i| w[i] > ACTIVE).collect();
    let jv: Vec<usize> = (0..v.len()).filter(|&k| abs(v[k]) > ACTIVE).collect();
    let tau: Vec<f64> = jv.iter().map(|&k| if v[k] < 0.0 { -1.0 } else { 1.0 }).collect();
    let ball_active = !jv.is_empty() && abs(norm1(v) - radius) <= 1e-9 * radius.max(1.0);
    let nz = iw.len() + jv.len();
    let neq = 1 + usize::from(ball_active);
    let dim = nz + neq;
    // Lagrangian system [[2H, Eᵀ], [E, 0]] [z; μ] = [0; e].
    let mut kkt = Matrix::zeros(dim, dim);
    let h = |a: usize, b: usize| -> f64 {
        let (ia, ib) = (a < iw.len(), b < iw.len());
        match (ia, ib) {
            (true, true) => sigma[iw[a]] * sigma[iw[b]] * blocks.a.get(iw[a], iw[b]),
            (true, false) => -sigma[iw[a]] * blocks.b.get(iw[a], jv[b - iw.len()]),
            (false, true) => -sigma[iw[b]] * blocks.b.get(iw[b], jv[a - iw.len()]),
            (false, false) => blocks.cc.get(jv[a - iw.len()], jv[b - iw.len()]),
        }
    };
    for a in 0..nz {
        for b in 0..nz {
            kkt.set(a, b, 2.0 * h(a, b));
        }
    }
    let mut rhs = vec![0.0; dim];
    for a in 0..iw.len() {
        kkt.set(a, nz, 1.0);
        kkt.set(nz, a, 1.0);
    }
    rhs[nz] = 1.0;
    if ball_active {
        for (b, t) in tau.iter().enumerate() {
            kkt.set(iw.len() + b, nz + 1, *t);
            kkt.set(nz + 1, iw.len() + b, *t);
        }
        rhs[nz + 1] = radius;
    }
    let z = linalg::solve(&kkt, &rhs)?;
    let mut nw = vec![0.0; w.len()];
    let mut nv = vec![0.0; v.len()];
    for (a, &i) in iw.iter().enumerate() {
        if z[a] < 0.0 {
            return None;
        }
        nw[i] = z[a];
    }
    for (b, &k) in jv.iter().enumerate() {
        let x = z[iw.len() + b];
        if x * tau[b] < 0.0 {
            return None;
        }
        nv[k] = x;
    }
    if norm1(&nv) > radius * (1.0 + 1e-12) {
        return None;
    }
    let bs: Vec<f64> = nw.iter().zip(sigma).map(|(a, b)| a * b).collect();
    let f = blocks.value(&bs, &nv);
    if !f.is_finite() {
        return None;
    }
    Some((nw, nv, f))
}

fn sign_patterns(s: usize) -> impl Iterator<Item = Vec<f64>> {
    let count = 1u64 << (s - 1);
    (0..count).map(move |mask| (0..s).map(|i| if i > 0 && mask & (1 << (i - 1)) != 0 { -1.0 } else { 1.0 }).collect())
}

struct L1Orthants {
    per_orthant: Vec<(Vec<f64>, Vec<f64>, f64)>,
    best: usize,
    iterations: usize,
    converged: bool,
}

fn l1_orthants(design: &DesignMatrix, s: &[usize], opts: &GeometryOptions) -> Result<L1Orthants> {
    let blocks = Blocks::new(design, s, false);
    let lip = lipschitz(design, s)?;
    let ns = s.len();
    let uniform = vec![1.0 / ns as f64; ns];
    let mut per_orthant = Vec::new();
    let mut iterations = 0;
    let mut converged = true;
    for sigma in sign_patterns(ns) {
        // warm start at the best vertex of this orthant as well as the centre
        let r = solve_orthant(&blocks, &sigma, 0.0, lip, &uniform, &[], opts);
        iterations += r.iterations;
        converged &= r.converged;
        per_orthant.push((sigma, r.w, r.value));
    }
    let best = argmin(per_orthant.iter().map(|o| o.2));
    Ok(L1Orthants { per_orthant, best, iterations, converged })
}

fn argmin(vals: impl Iterator<Item = f64>) -> usize {
    let mut best = (0, f64::INFINITY);
    for (i, v) in vals.enumerate() {
        if v < best.1 {
            best = (i, v);
        }
    }
    best.0
}

fn embed(p: usize, s: &[usize], bs: &[f64], c: &[usize], v: &[f64]) -> CoefficientVector {
    let mut beta = vec![0.0; p];
    for (i, &j) in s.iter().enumerate() {
        beta[j] = bs[i];
    }
    for (k, &j) in c.iter().enumerate() {
        beta[j] = v[k];
    }
    CoefficientVector(beta)
}

/// Λ²_min,1(S) = min{ s·β_SᵀΣ̂β_S : ‖β_S‖₁ = 1 }.
pub fn l1_eigenvalue(design: &DesignMatrix, s: &[usize], opts: &GeometryOptions) -> Result<GeometryValue> {
    validate_support(design, s, opts)?;
    let o = l1_orthants(design, s, opts)?;
    let (sigma, w, val) = &o.per_orthant[o.best];
    let bs: Vec<f64> = w.iter().zip(sigma).map(|(a, b)| a * b).collect();
    Ok(GeometryValue {
        value: s.len() as f64 * val,
        minimizer: embed(design.p(), s, &bs, &[], &[]),
        status: SolverStatus {
            converged: o.converged,
            iterations: o.iterations,
            subproblems: o.per_orthant.len(),
            heuristic: false,
        },
    })
}

/// φ²(L,S) = min{ s‖f_{β_S} − f_{β_{Sᶜ}}‖_n² : ‖β_S‖₁ = 1, ‖β_{Sᶜ}‖₁ ≤ L }.
///
/// With Sᶜ = ∅ this is the minimal ℓ1-eigenvalue.
pub fn compatibility(design: &DesignMatrix, s: &[usize], l: f64, opts: &GeometryOptions) -> Result<GeometryValue> {
    if !(l >= 0.0 && l.is_finite()) {
        return Err(Error::Parameter(format!("L must be finite and nonnegative, got {l}")));
    }
    validate_support(design, s, opts)?;
    let p = design.p();
    let ns = s.len() as f64;
    let l1 = l1_orthants(design, s, opts)?;
    let blocks = Blocks::new(design, s, true);
    if blocks.nc() == 0 || l == 0.0 {
        let (sigma, w, val) = &l1.per_orthant[l1.best];
        let bs: Vec<f64> = w.iter().zip(sigma).map(|(a, b)| a * b).collect();
        return Ok(GeometryValue {
            value: ns * val,
            minimizer: embed(p, s, &bs, &[], &[]),
            status: SolverStatus {
                converged: l1.converged,
                iterations: l1.iterations,
                subproblems: l1.per_orthant.len(),
                heuristic: false,
            },
        });
    }
    let all: Vec<usize> = (0..p).collect();
    let lip = lipschitz(design, &all)?;
    let nc = blocks.nc();
    let zero_v = vec![0.0; nc];

    // Pair seeds: β_S = ±e_i, β_{Sᶜ} = t e_k with the best t ∈ [−L, L].
    let mut best_bs = Vec::new();
    let mut best_v = Vec::new();
    let mut best_val = f64::INFINITY;
    for i in 0..blocks.ns() {
        for k in 0..nc {
            let ckk = blocks.cc.get(k, k);
            let bik = blocks.b.get(i, k);
            let t = if ckk > 0.0 { (bik / ckk).clamp(-l, l) } else { 0.0 };
            let val = (blocks.a.get(i, i) - 2.0 * t * bik + t * t * ckk).max(0.0);
            if val < best_val {
                best_val = val;
                best_bs = vec![0.0; blocks.ns()];
                best_bs[i] = 1.0;
                best_v = vec![0.0; nc];
                best_v[k] = t;
            }
        }
    }

    let mut iterations = l1.iterations;
    let mut converged = l1.converged;
    for (sigma, w_l1, val_l1) in &l1.per_orthant {
        let r = solve_orthant(&blocks, sigma, l, lip, w_l1, &zero_v, opts);
        iterations += r.iterations;
        converged &= r.converged;
        let (w, v, val) = if r.value <= *val_l1 { (r.w, r.v, r.value) } else { (w_l1.clone(), zero_v.clone(), *val_l1) };
        if val < best_val {
            best_val = val;
            best_bs = w.iter().zip(sigma).map(|(a, b)| a * b).collect();
            best_v = v;
        }
    }
    Ok(GeometryValue {
        value: ns * best_val,
        minimizer: embed(p, s, &best_bs, &blocks.c, &best_v),
        status: SolverStatus { converged, iterations, subproblems: 2 * l1.per_orthant.len(), heuristic: false },
    })
}

/// Λ²_min(S): smallest eigenvalue of Σ̂_S, clamped at zero.
pub fn min_eigenvalue(design: &DesignMatrix, s: &[usize]) -> Result<f64> {
    if s.is_empty() {
        return Err(Error::Input("support set must be nonempty".into()));
    }
    design.check_support(s)?;
    let eig = linalg::sym_eigen(&design.gram().principal(s))?;
    Ok(eig.values.last().copied().unwrap_or(0.0).max(0.0))
}

/// Heuristic minimum of ‖f_{β_S} − f_{β_{Sᶜ}}‖_n² / ‖β_S‖₂² subject to
/// ‖β_{Sᶜ}‖₁ ≤ L‖β_S‖₁. The result is an upper bound on the true value.
pub fn restricted_eigenvalue(design: &DesignMatrix, s: &[usize], l: f64, opts: &GeometryOptions) -> Result<GeometryValue> {
    restricted_eigenvalue_seeded(design, s, l, opts, &[])
}

/// As [`restricted_eigenvalue`], additionally starting from each β in `seeds`.
pub fn restricted_eigenvalue_seeded(
    design: &DesignMatrix,
    s: &[usize],
    l: f64,
    opts: &GeometryOptions,
    seeds: &[CoefficientVector],
) -> Result<GeometryValue> {
    if !(l >= 0.0 && l.is_finite()) {
        return Err(Error::Parameter(format!("L must be finite and nonnegative, got {l}")));
    }
    validate_support(design, s, opts)?;
    let p = design.p();
    let blocks = Blocks::new(design, s, true);
    let (ns, nc) = (blocks.ns(), blocks.nc());
    let lip_c = if nc > 0 { lipschitz(design, &blocks.c)? } else { 1.0 };
    let lip_all = lipschitz(design, &(0..p).collect::<Vec<_>>())?;

    let mut starts: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
    let eig = linalg::sym_eigen(&blocks.a)?;
    starts.push((eig.vectors.column(ns - 1), vec![0.0; nc]));
    for beta in seeds {
        design.check_p(beta.len())?;
        let b: Vec<f64> = s.iter().map(|&j| beta.0[j]).collect();
        let v: Vec<f64> = blocks.c.iter().map(|&j| beta.0[j]).collect();
        if norm2(&b) > 0.0 {
            starts.push((b, v));
        }
    }
    for r in 0..opts.re_restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(opts.re_seed, r as u64));
        let b: Vec<f64> = (0..ns).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        starts.push((b, vec![0.0; nc]));
    }

    let ratio = |b: &[f64], v: &[f64]| blocks.value(b, v) / dot(b, b);
    let inner = |b: &[f64], v: &mut Vec<f64>| {
        if nc == 0 {
            return;
        }
        let radius = l * norm1(b);
        project_l1_ball(v, radius);
        let mut y = v.clone();
        let mut x = v.clone();
        let mut t = 1.0;
        let mut gs = vec![0.0; ns];
        let mut gv = vec![0.0; nc];
        for _ in 0..500 {
            blocks.grad(b, &y, &mut gs, &mut gv);
            let mut nx: Vec<f64> = y.iter().zip(&gv).map(|(a, g)| a - g / lip_c).collect();
            project_l1_ball(&mut nx, radius);
            let step: f64 = nx.iter().zip(&y).map(|(a, c)| (a - c) * (a - c)).sum();
            let t_new = 0.5 * (1.0 + sqrt(1.0 + 4.0 * t * t));
            y = nx.iter().zip(&x).map(|(a, c)| a + (t - 1.0) / t_new * (a - c)).collect();
            x = nx;
            t = t_new;
            if lip_c * sqrt(step) < opts.pg_tol {
                break;
            }
        }
        if blocks.value(b, &x) <= blocks.value(b, v) {
            *v = x;
        }
    };

    let mut best = (f64::INFINITY, Vec::new(), Vec::new());
    let mut iterations = 0;
    for (b0, v0) in starts {
        let nb = norm2(&b0);
        if nb == 0.0 {
            continue;
        }
        let mut b: Vec<f64> = b0.iter().map(|x| x / nb).collect();
        let mut v: Vec<f64> = v0.iter().map(|x| x / nb).collect();
        project_l1_ball(&mut v, l * norm1(&b));
        let mut cur = ratio(&b, &v);
        let mut eta = 1.0 / lip_all;
        let mut gs = vec![0.0; ns];
        let mut gv = vec![0.0; nc];
        for _ in 0..opts.re_outer_iters {
            iterations += 1;
            inner(&b, &mut v);
            cur = cur.min(ratio(&b, &v));
            blocks.grad(&b, &v, &mut gs, &mut gv);
            let r = ratio(&b, &v);
            let rg: Vec<f64> = gs.iter().zip(&b).map(|(g, x)| g - 2.0 * r * x).collect();
            let mut improved = false;
            for _ in 0..40 {
                let mut nb: Vec<f64> = b.iter().zip(&rg).map(|(x, g)| x - eta * g).collect();
                let nrm = norm2(&nb);
                if nrm == 0.0 {
                    eta *= 0.5;
                    continue;
                }
                nb.iter_mut().for_each(|x| *x /= nrm);
                let mut nv = v.clone();
                project_l1_ball(&mut nv, l * norm1(&nb));
                let nr = ratio(&nb, &nv);
                if nr < r - 1e-15 * r.max(1e-300) {
                    b = nb;
                    v = nv;
                    cur = nr;
                    eta *= 2.0;
                    improved = true;
                    break;
                }
                eta *= 0.5;
            }
            if !improved {
                break;
            }
        }
        if cur < best.0 {
            best = (cur, b.clone(), v.clone());
        }
    }
    let (value, b, v) = best;
    Ok(GeometryValue {
        value: value.max(0.0),
        minimizer: embed(p, s, &b, &blocks.c, &v),
        status: SolverStatus { converged: true, iterations, subproblems: opts.re_restarts + 1 + seeds.len(), heuristic: true },
    })
}

/// Computes φ², Λ²_min,1, Λ²_min and the restricted-eigenvalue heuristic.
pub fn geometry_report(design: &DesignMatrix, s: &[usize], l: f64, opts: &GeometryOptions) -> Result<GeometryReport> {
    let phi = compatibility(design, s, l, opts)?;
    let l1 = l1_eigenvalue(design, s, opts)?;
    let lmin = min_eigenvalue(design, s)?;
    let re = restricted_eigenvalue_seeded(design, s, l, opts, &[phi.minimizer.clone(), l1.minimizer.clone()])?;
    Ok(GeometryReport {
        phi2: phi.value,
        lambda1_min2: l1.value,
        lambda_min2: lmin,
        phi2_re: re.value,
        l,
        s: s.to_vec(),
        minimizer_phi: phi.minimizer,
        status: GeometryStatus { phi2: phi.status, lambda1_min2: l1.status, phi2_re: re.status },
    })
}

/// Which quantity [`brute_force_min`] estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeometryObjective {
    Compatibility,
    L1Eig,
    Re,
}

/// Random search over the constraint set followed by coordinate refinement
/// of the ten best samples. Returns an upper bound on the minimum.
///
/// β_S has uniform random signs and flat-Dirichlet magnitudes on the unit
/// ℓ1 sphere; β_{Sᶜ} is uniform in the ℓ1 ball of radius L.
pub fn brute_force_min(
    design: &DesignMatrix,
    s: &[usize],
    l: f64,
    objective: GeometryObjective,
    budget: usize,
    seed: u64,
) -> Result<f64> {
    if s.is_empty() {
        return Err(Error::Input("support set must be nonempty".into()));
    }
    design.check_support(s)?;
    let with_c = objective != GeometryObjective::L1Eig;
    let blocks = Blocks::new(design, s, with_c);
    let (ns, nc) = (blocks.ns(), blocks.nc());
    let eval = |bs: &[f64], v: &[f64]| -> f64 {
        let f = blocks.value(bs, v);
        match objective {
            GeometryObjective::Compatibility | GeometryObjective::L1Eig => ns as f64 * f,
            GeometryObjective::Re => f / dot(bs, bs),
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let exp1 = |rng: &mut ChaCha8Rng| -> f64 { -ln(1.0 - rng.random::<f64>()) };
    const KEEP: usize = 10;
    let mut top: Vec<(f64, Vec<f64>, Vec<f64>)> = Vec::with_capacity(KEEP + 1);
    for _ in 0..budget.max(1) {
        let mut bs: Vec<f64> = (0..ns).map(|_| exp1(&mut rng)).collect();
        let tot: f64 = bs.iter().sum();
        for x in bs.iter_mut() {
            *x /= tot;
            if rng.random::<bool>() {
                *x = -*x;
            }
        }
        let mut v = vec![0.0; nc];
        if nc > 0 {
            let e: Vec<f64> = (0..=nc).map(|_| exp1(&mut rng)).collect();
            let tot: f64 = e.iter().sum();
            for k in 0..nc {
                v[k] = l * e[k] / tot * if rng.random::<bool>() { -1.0 } else { 1.0 };
            }
        }
        let f = eval(&bs, &v);
        if top.len() < KEEP || f < top[top.len() - 1].0 {
            top.push((f, bs, v));
            top.sort_by(|a, b| a.0.total_cmp(&b.0));
            top.truncate(KEEP);
        }
    }

    // Pattern search on z = (β_S, β_{Sᶜ}) with the objective written in its
    // scale-invariant form. Moves are ±h on one coordinate or on a pair of
    // coordinates, so valleys along two-column cancellations are followed.
    let hom = |z: &[f64]| -> f64 {
        let (bs, v) = z.split_at(ns);
        let n1 = norm1(bs);
        if n1 == 0.0 || norm1(v) > l * n1 * (1.0 + 1e-12) {
            return f64::INFINITY;
        }
        match objective {
            GeometryObjective::Compatibility | GeometryObjective::L1Eig => ns as f64 * blocks.value(bs, v) / (n1 * n1),
            GeometryObjective::Re => blocks.value(bs, v) / dot(bs, bs),
        }
    };
    let dim = ns + nc;
    let mut best = f64::INFINITY;
    for (_, bs, v) in top {
        let mut z: Vec<f64> = bs.into_iter().chain(v).collect();
        let mut f = hom(&z);
        let mut h = 0.1;
        let mut rounds = 0;
        while h > 1e-10 && rounds < 5000 {
            rounds += 1;
            let mut improved = false;
            for i in 0..dim {
                for k in i..dim {
                    for (di, dk) in [(1.0, 0.0), (-1.0, 0.0), (1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                        if k == i && dk != 0.0 {
                            continue;
                        }
                        let mut nz = z.clone();
                        nz[i] += di * h;
                        nz[k] += dk * h;
                        let nf = hom(&nz);
                        if nf < f {
                            f = nf;
                            z = nz;
                            improved = true;
                        }
                    }
                }
            }
            // keep ‖β_S‖₁ = 1 so that h stays on the scale of the coefficients
            let n1 = norm1(&z[..ns]);
            z.iter_mut().for_each(|x| *x /= n1);
            if !improved {
                h *= 0.5;
            }
        }
        best = best.min(f);
    }
    Ok(best.max(0.0))
}
