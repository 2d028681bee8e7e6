//! The design matrix and everything that depends on it only through its
//! columns: empirical norms, the Gram matrix, its spectrum, normalisation
//! and the synthetic design families used by the harness.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use once_cell::race::OnceBox;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, dot, Matrix};
use crate::num::{abs, powf, sqrt};

/// Slack allowed on ‖ψ_j‖_n² ≤ 1 for floating point round-off.
pub const NORM_SLACK: f64 = 1e-12;

/// What to do with a column whose empirical norm exceeds one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NormPolicy {
    #[default]
    Reject,
    /// Divide offending columns by their norm.
    Rescale,
}

/// n×p design with columns ψ_1..ψ_p stored contiguously.
///
/// The Gram matrix Σ̂ = XᵀX/n and its spectral decomposition are computed on
/// first use and cached. Both caches are write-once; concurrent first calls
/// may race, in which case all racers compute the same value and one wins.
pub struct DesignMatrix {
    n: usize,
    p: usize,
    columns: Vec<f64>,
    gram: OnceBox<Matrix>,
    spectral: OnceBox<SpectralProfile>,
}

impl Clone for DesignMatrix {
    fn clone(&self) -> Self {
        DesignMatrix::new_unchecked(self.n, self.p, self.columns.clone())
    }
}

impl fmt::Debug for DesignMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DesignMatrix").field("n", &self.n).field("p", &self.p).finish()
    }
}

impl PartialEq for DesignMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.p == other.p && self.columns == other.columns
    }
}

impl DesignMatrix {
    fn new_unchecked(n: usize, p: usize, columns: Vec<f64>) -> Self {
        DesignMatrix { n, p, columns, gram: OnceBox::new(), spectral: OnceBox::new() }
    }

    /// Builds a design from column-major data (`data[j*n + i]` = ψ_j(x_i)).
    pub fn from_column_major(n: usize, p: usize, mut data: Vec<f64>, policy: NormPolicy) -> Result<Self> {
        if n == 0 || p == 0 {
            return Err(Error::Input(format!("design must be non-empty, got {n}x{p}")));
        }
        if data.len() != n * p {
            return Err(Error::Dimension { expected: n * p, got: data.len() });
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::Input("design contains non-finite entries".into()));
        }
        for j in 0..p {
            let col = &mut data[j * n..(j + 1) * n];
            let sq = dot(col, col) / n as f64;
            if sq > 1.0 + NORM_SLACK {
                match policy {
                    NormPolicy::Reject => return Err(Error::ColumnNorm { column: j, norm: sqrt(sq) }),
                    NormPolicy::Rescale => {
                        let s = sqrt(sq);
                        col.iter_mut().for_each(|x| *x /= s);
                    }
                }
            }
        }
        Ok(DesignMatrix::new_unchecked(n, p, data))
    }

    pub fn from_columns(columns: &[Vec<f64>], policy: NormPolicy) -> Result<Self> {
        let p = columns.len();
        let n = columns.first().map_or(0, |c| c.len());
        let mut data = Vec::with_capacity(n * p);
        for c in columns {
            if c.len() != n {
                return Err(Error::Dimension { expected: n, got: c.len() });
            }
            data.extend_from_slice(c);
        }
        DesignMatrix::from_column_major(n, p, data, policy)
    }

    /// Builds a design from observations (one row per x_i).
    pub fn from_rows(rows: &[Vec<f64>], policy: NormPolicy) -> Result<Self> {
        let n = rows.len();
        let p = rows.first().map_or(0, |r| r.len());
        let mut data = vec![0.0; n * p];
        for (i, r) in rows.iter().enumerate() {
            if r.len() != p {
                return Err(Error::Dimension { expected: p, got: r.len() });
            }
            for (j, x) in r.iter().enumerate() {
                data[j * n + i] = *x;
            }
        }
        DesignMatrix::from_column_major(n, p, data, policy)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn p(&self) -> usize {
        self.p
    }

    #[inline]
    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j * self.n..(j + 1) * self.n]
    }

    /// Observation `i` as a row vector.
    pub fn row(&self, i: usize) -> Vec<f64> {
        (0..self.p).map(|j| self.columns[j * self.n + i]).collect()
    }

    /// Σ̂ = XᵀX/n.
    pub fn gram(&self) -> &Matrix {
        self.gram.get_or_init(|| {
            let (n, p) = (self.n, self.p);
            let mut g = Matrix::zeros(p, p);
            for j in 0..p {
                for k in j..p {
                    let v = dot(self.column(j), self.column(k)) / n as f64;
                    g.set(j, k, v);
                    g.set(k, j, v);
                }
            }
            Box::new(g)
        })
    }

    /// ‖v‖_n = sqrt(Σ v_i² / n).
    pub fn empirical_norm(&self, v: &[f64]) -> Result<f64> {
        self.check_n(v.len())?;
        Ok(sqrt(dot(v, v) / self.n as f64))
    }

    /// f_β = Σ_j ψ_j β_j.
    pub fn predict(&self, beta: &[f64]) -> Result<Vec<f64>> {
        self.check_p(beta.len())?;
        let mut f = vec![0.0; self.n];
        for (j, b) in beta.iter().enumerate() {
            if *b == 0.0 {
                continue;
            }
            for (fi, x) in f.iter_mut().zip(self.column(j)) {
                *fi += b * x;
            }
        }
        Ok(f)
    }

    /// (ψ_jᵀ v / n)_j.
    pub fn xt_scaled(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.check_n(v.len())?;
        let n = self.n as f64;
        Ok((0..self.p).map(|j| dot(self.column(j), v) / n).collect())
    }

    /// βᵀ Σ̂ β, which equals ‖f_β‖_n².
    pub fn quad_form(&self, beta: &[f64]) -> Result<f64> {
        self.check_p(beta.len())?;
        let g = self.gram();
        let mut s = 0.0;
        for (j, bj) in beta.iter().enumerate() {
            if *bj == 0.0 {
                continue;
            }
            s += bj * dot(g.row(j), beta);
        }
        Ok(s.max(0.0))
    }

    /// ρ(ψ_j, ψ_k) = ψ_jᵀψ_k / n.
    #[inline]
    pub fn corr(&self, j: usize, k: usize) -> f64 {
        self.gram().get(j, k)
    }

    pub fn column_norm(&self, j: usize) -> f64 {
        sqrt(self.gram().get(j, j).max(0.0))
    }

    /// True when every column has ‖ψ_j‖_n = 1 within `tol`.
    pub fn is_normalized(&self, tol: f64) -> bool {
        (0..self.p).all(|j| abs(self.column_norm(j) - 1.0) <= tol)
    }

    pub fn spectral(&self) -> Result<&SpectralProfile> {
        self.spectral.get_or_try_init(|| SpectralProfile::of(self.gram()).map(Box::new))
    }

    /// Rescales every column to ‖ψ_j‖_n = 1.
    pub fn normalize(&self) -> Result<DesignMatrix> {
        let mut data = self.columns.clone();
        let n = self.n;
        for j in 0..self.p {
            let col = &mut data[j * n..(j + 1) * n];
            let norm = sqrt(dot(col, col) / n as f64);
            if norm == 0.0 {
                return Err(Error::DegenerateColumn { column: j });
            }
            if norm != 1.0 {
                col.iter_mut().for_each(|x| *x /= norm);
            }
        }
        DesignMatrix::from_column_major(n, self.p, data, NormPolicy::Reject)
    }

    /// Same design with columns reordered so that new column `k` is old
    /// column `perm[k]`.
    pub fn permute_columns(&self, perm: &[usize]) -> Result<DesignMatrix> {
        self.check_p(perm.len())?;
        let mut data = Vec::with_capacity(self.n * self.p);
        for &j in perm {
            if j >= self.p {
                return Err(Error::Input(format!("column index {j} out of range")));
            }
            data.extend_from_slice(self.column(j));
        }
        Ok(DesignMatrix::new_unchecked(self.n, self.p, data))
    }

    pub(crate) fn check_n(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(Error::Dimension { expected: self.n, got: len });
        }
        Ok(())
    }

    pub(crate) fn check_p(&self, len: usize) -> Result<()> {
        if len != self.p {
            return Err(Error::Dimension { expected: self.p, got: len });
        }
        Ok(())
    }

    pub(crate) fn check_support(&self, s: &[usize]) -> Result<()> {
        for w in s.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::Input("support indices must be strictly increasing".into()));
            }
        }
        if let Some(&j) = s.last() {
            if j >= self.p {
                return Err(Error::Input(format!("support index {} exceeds p = {}", j + 1, self.p)));
            }
        }
        Ok(())
    }
}

/// Σ̂ = E Ω² Eᵀ with eigenvalues ω_1² ≥ … ≥ ω_p² ≥ 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralProfile {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Matrix,
}

impl SpectralProfile {
    pub fn of(gram: &Matrix) -> Result<Self> {
        let eig = linalg::sym_eigen(gram)?;
        let eigenvalues = eig.values.into_iter().map(|v| v.max(0.0)).collect();
        Ok(SpectralProfile { eigenvalues, eigenvectors: eig.vectors })
    }

    /// Builds a profile directly from eigenvalues, with the identity basis.
    pub fn from_eigenvalues(mut eigenvalues: Vec<f64>) -> Self {
        eigenvalues.sort_by(|a, b| b.total_cmp(a));
        let p = eigenvalues.len();
        SpectralProfile { eigenvalues, eigenvectors: Matrix::identity(p) }
    }

    /// ω_j = sqrt of the j-th eigenvalue, nonincreasing.
    pub fn omegas(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|v| sqrt(*v)).collect()
    }

    pub fn reconstruct(&self) -> Matrix {
        let p = self.eigenvalues.len();
        let mut out = Matrix::zeros(p, p);
        for i in 0..p {
            for j in 0..p {
                let mut s = 0.0;
                for k in 0..p {
                    s += self.eigenvectors.get(i, k) * self.eigenvalues[k] * self.eigenvectors.get(j, k);
                }
                out.set(i, j, s);
            }
        }
        out
    }
}

/// Coefficients β ∈ ℝ^p.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CoefficientVector(pub Vec<f64>);

impl CoefficientVector {
    pub fn zeros(p: usize) -> Self {
        CoefficientVector(vec![0.0; p])
    }

    pub fn unit(p: usize, j: usize) -> Self {
        let mut v = vec![0.0; p];
        v[j] = 1.0;
        CoefficientVector(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn l1(&self) -> f64 {
        linalg::norm1(&self.0)
    }

    pub fn l2(&self) -> f64 {
        linalg::norm2(&self.0)
    }

    pub fn support(&self) -> Vec<usize> {
        self.0.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(j, _)| j).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for CoefficientVector {
    fn from(v: Vec<f64>) -> Self {
        CoefficientVector(v)
    }
}

/// Synthetic design families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DesignFamily {
    /// Σ̂ = I (requires p ≤ n).
    Orthonormal,
    /// Σ̂_jk = r for j ≠ k.
    Equicorrelated { r: f64 },
    /// Σ̂_jk = r^|j−k|.
    Ar1 { r: f64 },
    /// `blocks` groups of near-copies; within-group correlation 1/(1+jitter²).
    DuplicatedBlocks { blocks: usize, jitter: f64 },
    /// Gram spectrum ω_j = c / j^m (square roots of the eigenvalues), with an
    /// overall rescale if some column would exceed unit norm.
    SpikedDecay { m: f64, c: f64 },
}

/// Draws a design from `family`. The result is a pure function of the inputs.
///
/// For the correlation families with p ≤ n the Gram matrix is hit exactly:
/// X = √n · Q · Σ^{1/2} with Q an n×p orthonormal frame, so XᵀX/n = Σ. For
/// p > n rows are sampled as N(0, Σ) and the columns normalised.
pub fn generate(family: DesignFamily, n: usize, p: usize, seed: u64) -> Result<DesignMatrix> {
    if n == 0 || p == 0 {
        return Err(Error::Parameter(format!("n and p must be positive, got n={n}, p={p}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match family {
        DesignFamily::Orthonormal => {
            if p > n {
                return Err(Error::Parameter(format!("orthonormal design needs p <= n, got p={p}, n={n}")));
            }
            let q = orthonormal_frame(n, p, &mut rng);
            Ok(from_frame(n, &q, None))
        }
        DesignFamily::Equicorrelated { r } => {
            let lower = if p > 1 { -1.0 / (p as f64 - 1.0) } else { f64::NEG_INFINITY };
            if !(r > lower && r < 1.0) {
                return Err(Error::Parameter(format!("equicorrelation r={r} outside ({lower}, 1)")));
            }
            let mut sigma = Matrix::zeros(p, p);
            for j in 0..p {
                for k in 0..p {
                    sigma.set(j, k, if j == k { 1.0 } else { r });
                }
            }
            from_target_gram(n, &sigma, &mut rng)
        }
        DesignFamily::Ar1 { r } => {
            if !(r > -1.0 && r < 1.0) {
                return Err(Error::Parameter(format!("AR(1) coefficient r={r} outside (-1, 1)")));
            }
            let mut sigma = Matrix::zeros(p, p);
            for j in 0..p {
                for k in 0..p {
                    sigma.set(j, k, powf(r, abs(j as f64 - k as f64)));
                }
            }
            from_target_gram(n, &sigma, &mut rng)
        }
        DesignFamily::DuplicatedBlocks { blocks, jitter } => {
            if blocks == 0 || blocks > p {
                return Err(Error::Parameter(format!("block count {blocks} must lie in 1..={p}")));
            }
            if !(jitter >= 0.0 && jitter.is_finite()) {
                return Err(Error::Parameter(format!("jitter must be finite and >= 0, got {jitter}")));
            }
            duplicated_blocks(n, p, blocks, jitter, &mut rng)
        }
        DesignFamily::SpikedDecay { m, c } => {
            if !(m > 0.0 && c > 0.0 && m.is_finite() && c.is_finite()) {
                return Err(Error::Parameter(format!("spiked decay needs m > 0 and C > 0, got m={m}, C={c}")));
            }
            spiked_decay(n, p, m, c, &mut rng)
        }
    }
}

fn gaussian_vec(len: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..len).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

/// `k` orthonormal vectors in ℝ^n (unit ℓ2 norm), by twice-applied modified
/// Gram–Schmidt on Gaussian vectors. Requires k ≤ n.
fn orthonormal_frame(n: usize, k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(k);
    while q.len() < k {
        let mut v = gaussian_vec(n, rng);
        for _ in 0..2 {
            for u in &q {
                let c = dot(u, &v);
                v.iter_mut().zip(u).for_each(|(a, b)| *a -= c * b);
            }
        }
        let norm = linalg::norm2(&v);
        if norm < 1e-8 {
            continue;
        }
        v.iter_mut().for_each(|x| *x /= norm);
        q.push(v);
    }
    q
}

/// X = √n · Q · M where Q holds the frame vectors as columns; `m = None`
/// means the identity.
fn from_frame(n: usize, q: &[Vec<f64>], m: Option<&Matrix>) -> DesignMatrix {
    let k = q.len();
    let p = m.map_or(k, |m| m.cols());
    let sn = sqrt(n as f64);
    let mut data = vec![0.0; n * p];
    for j in 0..p {
        let col = &mut data[j * n..(j + 1) * n];
        for (a, qa) in q.iter().enumerate() {
            let w = match m {
                Some(m) => m.get(a, j),
                None => {
                    if a == j {
                        1.0
                    } else {
                        0.0
                    }
                }
            };
            if w == 0.0 {
                continue;
            }
            col.iter_mut().zip(qa).for_each(|(c, x)| *c += sn * w * x);
        }
    }
    clamp_columns(n, p, data)
}

/// Columns that exceed unit norm by round-off only are pulled back to 1.
fn clamp_columns(n: usize, p: usize, mut data: Vec<f64>) -> DesignMatrix {
    for j in 0..p {
        let col = &mut data[j * n..(j + 1) * n];
        let sq = dot(col, col) / n as f64;
        if sq > 1.0 {
            let s = sqrt(sq);
            col.iter_mut().for_each(|x| *x /= s);
        }
    }
    DesignMatrix::new_unchecked(n, p, data)
}

fn sym_sqrt(sigma: &Matrix) -> Result<Matrix> {
    let eig = linalg::sym_eigen(sigma)?;
    let p = sigma.rows();
    let mut r = Matrix::zeros(p, p);
    for i in 0..p {
        for j in 0..p {
            let mut s = 0.0;
            for k in 0..p {
                s += eig.vectors.get(i, k) * sqrt(eig.values[k].max(0.0)) * eig.vectors.get(j, k);
            }
            r.set(i, j, s);
        }
    }
    Ok(r)
}

fn from_target_gram(n: usize, sigma: &Matrix, rng: &mut ChaCha8Rng) -> Result<DesignMatrix> {
    let p = sigma.rows();
    let root = sym_sqrt(sigma)?;
    if p <= n {
        let q = orthonormal_frame(n, p, rng);
        return Ok(from_frame(n, &q, Some(&root)));
    }
    let mut data = vec![0.0; n * p];
    for i in 0..n {
        let z = gaussian_vec(p, rng);
        for j in 0..p {
            data[j * n + i] = dot(root.row(j), &z);
        }
    }
    DesignMatrix::new_unchecked(n, p, data).normalize()
}

fn duplicated_blocks(n: usize, p: usize, blocks: usize, jitter: f64, rng: &mut ChaCha8Rng) -> Result<DesignMatrix> {
    let block_of = |j: usize| j * blocks / p;
    let scale = sqrt(1.0 + jitter * jitter);
    let sn = sqrt(n as f64);
    let mut data = vec![0.0; n * p];
    if blocks + p <= n {
        let q = orthonormal_frame(n, blocks + p, rng);
        for j in 0..p {
            let base = &q[block_of(j)];
            let noise = &q[blocks + j];
            for i in 0..n {
                data[j * n + i] = sn * (base[i] + jitter * noise[i]) / scale;
            }
        }
        return Ok(clamp_columns(n, p, data));
    }
    let bases: Vec<Vec<f64>> = (0..blocks).map(|_| gaussian_vec(n, rng)).collect();
    for j in 0..p {
        let noise = gaussian_vec(n, rng);
        let base = &bases[block_of(j)];
        for i in 0..n {
            data[j * n + i] = base[i] + jitter * noise[i];
        }
    }
    DesignMatrix::new_unchecked(n, p, data).normalize()
}

fn spiked_decay(n: usize, p: usize, m: f64, c: f64, rng: &mut ChaCha8Rng) -> Result<DesignMatrix> {
    let k = p.min(n);
    let omega: Vec<f64> = (1..=k).map(|j| c / powf(j as f64, m)).collect();
    // Haar-distributed eigenbasis E (p×p); only its first k columns are used.
    let e_cols = orthonormal_frame(p, p, rng);
    // M = Ω_k E_kᵀ (k×p), so X = √n Q M has Gram E_k Ω_k² E_kᵀ.
    let mut mmat = Matrix::zeros(k, p);
    for a in 0..k {
        for j in 0..p {
            mmat.set(a, j, omega[a] * e_cols[a][j]);
        }
    }
    let q = orthonormal_frame(n, k, rng);
    let sn = sqrt(n as f64);
    let mut data = vec![0.0; n * p];
    for j in 0..p {
        let col = &mut data[j * n..(j + 1) * n];
        for (a, qa) in q.iter().enumerate() {
            let w = mmat.get(a, j);
            col.iter_mut().zip(qa).for_each(|(x, y)| *x += sn * w * y);
        }
    }
    let max_sq = (0..p)
        .map(|j| {
            let col = &data[j * n..(j + 1) * n];
            dot(col, col) / n as f64
        })
        .fold(0.0, f64::max);
    if max_sq > 1.0 {
        let s = sqrt(max_sq);
        data.iter_mut().for_each(|x| *x /= s);
    }
    Ok(clamp_columns(n, p, data))
}
