//! Small dense linear algebra: symmetric eigendecomposition, Cholesky,
//! pivoted Gaussian elimination and least squares.
//!
//! Matrices are row-major `Vec<f64>` wrapped in [`Matrix`]. Sizes are desk
//! scale (p up to a few hundred), so nothing here is blocked or vectorised.

use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{abs, hypot, sqrt};

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension { expected: rows * cols, got: data.len() });
        }
        Ok(Matrix { rows, cols, data })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension { expected: self.cols, got: other.rows });
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, o) in dst.iter_mut().zip(orow) {
                    *d += a * o;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    /// Principal submatrix on `idx` (rows and columns).
    pub fn principal(&self, idx: &[usize]) -> Matrix {
        let k = idx.len();
        let mut m = Matrix::zeros(k, k);
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                m.set(a, b, self.get(i, j));
            }
        }
        m
    }

    pub fn frobenius(&self) -> f64 {
        sqrt(self.data.iter().map(|x| x * x).sum())
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| abs(a - b))
            .fold(0.0, f64::max)
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm1(v: &[f64]) -> f64 {
    v.iter().map(|x| abs(*x)).sum()
}

#[inline]
pub fn norm2(v: &[f64]) -> f64 {
    sqrt(dot(v, v))
}

/// Eigenvalues in nonincreasing order with matching eigenvector columns.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

/// Up to this size the cyclic Jacobi method is used; above it, Householder
/// tridiagonalisation followed by implicit QL.
pub const JACOBI_LIMIT: usize = 64;

/// Symmetric eigendecomposition. The input is symmetrised first.
///
/// Eigenvalues are sorted nonincreasing; ties keep the order produced by
/// the iteration (a stable sort), which is itself deterministic.
pub fn sym_eigen(a: &Matrix) -> Result<SymEigen> {
    if a.rows != a.cols {
        return Err(Error::Dimension { expected: a.rows, got: a.cols });
    }
    let n = a.rows;
    let mut s = a.clone();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (a.get(i, j) + a.get(j, i));
            s.set(i, j, v);
            s.set(j, i, v);
        }
    }
    let (vals, vecs) = if n <= JACOBI_LIMIT { jacobi(s)? } else { tridiagonal_ql(s)? };
    Ok(sort_desc(vals, vecs))
}

/// Forces one particular method; used to cross-check the two paths.
pub fn sym_eigen_with(a: &Matrix, use_jacobi: bool) -> Result<SymEigen> {
    let (vals, vecs) = if use_jacobi { jacobi(a.clone())? } else { tridiagonal_ql(a.clone())? };
    Ok(sort_desc(vals, vecs))
}

fn sort_desc(vals: Vec<f64>, vecs: Matrix) -> SymEigen {
    let n = vals.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| vals[j].total_cmp(&vals[i]));
    let mut values = Vec::with_capacity(n);
    let mut vectors = Matrix::zeros(n, n);
    for (new, &old) in order.iter().enumerate() {
        values.push(vals[old]);
        for r in 0..n {
            vectors.set(r, new, vecs.get(r, old));
        }
    }
    SymEigen { values, vectors }
}

const JACOBI_MAX_SWEEPS: usize = 100;

fn jacobi(mut a: Matrix) -> Result<(Vec<f64>, Matrix)> {
    let n = a.rows;
    let mut v = Matrix::identity(n);
    for sweep in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += abs(a.get(p, q));
            }
        }
        if off == 0.0 {
            let vals = (0..n).map(|i| a.get(i, i)).collect();
            return Ok((vals, v));
        }
        let thresh = if sweep < 3 { 0.2 * off / (n * n) as f64 } else { 0.0 };
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                let app = a.get(p, p);
                let aqq = a.get(q, q);
                let g = 100.0 * abs(apq);
                if sweep > 3 && abs(app) + g == abs(app) && abs(aqq) + g == abs(aqq) {
                    a.set(p, q, 0.0);
                    a.set(q, p, 0.0);
                    continue;
                }
                if abs(apq) <= thresh || apq == 0.0 {
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = if abs(theta) > 1e150 {
                    0.5 / theta
                } else {
                    let t = 1.0 / (abs(theta) + sqrt(theta * theta + 1.0));
                    if theta < 0.0 {
                        -t
                    } else {
                        t
                    }
                };
                let c = 1.0 / sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, c * akp - s * akq);
                    a.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, c * apk - s * aqk);
                    a.set(q, k, s * apk + c * aqk);
                }
                a.set(p, q, 0.0);
                a.set(q, p, 0.0);
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }
    Err(Error::NoConvergence { what: "Jacobi eigensolver", iterations: JACOBI_MAX_SWEEPS })
}

/// Householder reduction to tridiagonal form followed by the implicit QL
/// iteration (the classic tred2/tql2 pair).
fn tridiagonal_ql(a: Matrix) -> Result<(Vec<f64>, Matrix)> {
    let n = a.rows;
    if n == 0 {
        return Ok((Vec::new(), Matrix::zeros(0, 0)));
    }
    let mut v: Vec<Vec<f64>> = (0..n).map(|i| a.row(i).to_vec()).collect();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];

    for j in 0..n {
        d[j] = v[n - 1][j];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for dk in d.iter().take(i) {
            scale += abs(*dk);
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[i - 1][j];
                v[i][j] = 0.0;
                v[j][i] = 0.0;
            }
        } else {
            for dk in d.iter_mut().take(i) {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = sqrt(h);
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[j][i] = f;
                g = e[j] + v[j][j] * f;
                for k in (j + 1)..i {
                    g += v[k][j] * d[k];
                    e[k] += v[k][j] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[k][j] -= f * e[k] + g * d[k];
                }
                d[j] = v[i - 1][j];
                v[i][j] = 0.0;
            }
        }
        d[i] = h;
    }
    for i in 0..(n - 1) {
        v[n - 1][i] = v[i][i];
        v[i][i] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[k][i + 1] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[k][i + 1] * v[k][j];
                }
                for k in 0..=i {
                    v[k][j] -= g * d[k];
                }
            }
        }
        for row in v.iter_mut().take(i + 1) {
            row[i + 1] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[n - 1][j];
        v[n - 1][j] = 0.0;
    }
    v[n - 1][n - 1] = 1.0;
    e[0] = 0.0;

    // tql2
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    let eps = f64::EPSILON;
    let max_iter = 30 * n.max(1);
    for l in 0..n {
        tst1 = tst1.max(abs(d[l]) + abs(e[l]));
        let mut m = l;
        while m < n {
            if abs(e[m]) <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > max_iter {
                    return Err(Error::NoConvergence { what: "QL eigensolver", iterations: iter });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = hypot(p, 1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;
                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for row in v.iter_mut() {
                        let h = row[i + 1];
                        row[i + 1] = s * row[i] + c * h;
                        row[i] = c * row[i] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if abs(e[l]) <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    let mut out = Matrix::zeros(n, n);
    for (i, row) in v.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            out.set(i, j, *x);
        }
    }
    Ok((d, out))
}

/// Lower Cholesky factor of a symmetric positive definite matrix; `None`
/// when a pivot falls below `tol` times the largest diagonal entry.
pub fn cholesky(a: &Matrix, tol: f64) -> Option<Matrix> {
    let n = a.rows;
    let scale = (0..n).map(|i| abs(a.get(i, i))).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut d = a.get(j, j);
        for k in 0..j {
            d -= l.get(j, k) * l.get(j, k);
        }
        if d <= tol * scale {
            return None;
        }
        let djj = sqrt(d);
        l.set(j, j, djj);
        for i in (j + 1)..n {
            let mut s = a.get(i, j);
            for k in 0..j {
                s -= l.get(i, k) * l.get(j, k);
            }
            l.set(i, j, s / djj);
        }
    }
    Some(l)
}

/// Solves `L Lᵀ x = b` given the Cholesky factor `L`.
pub fn cholesky_solve(l: &Matrix, b: &[f64]) -> Vec<f64> {
    let n = l.rows;
    let mut y = b.to_vec();
    for i in 0..n {
        let mut s = y[i];
        for k in 0..i {
            s -= l.get(i, k) * y[k];
        }
        y[i] = s / l.get(i, i);
    }
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in (i + 1)..n {
            s -= l.get(k, i) * y[k];
        }
        y[i] = s / l.get(i, i);
    }
    y
}

/// Gaussian elimination with partial pivoting. Returns `None` for a
/// numerically singular system.
pub fn solve(a: &Matrix, b: &[f64]) -> Option<Vec<f64>> {
    let n = a.rows;
    let mut m: Vec<Vec<f64>> = (0..n).map(|i| a.row(i).to_vec()).collect();
    let mut rhs = b.to_vec();
    let scale = a.as_slice().iter().map(|x| abs(*x)).fold(0.0, f64::max);
    if scale == 0.0 {
        return if n == 0 { Some(Vec::new()) } else { None };
    }
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| abs(m[i][col]).total_cmp(&abs(m[j][col])))?;
        if abs(m[piv][col]) <= 1e-13 * scale {
            return None;
        }
        m.swap(col, piv);
        rhs.swap(col, piv);
        for r in (col + 1)..n {
            let factor = m[r][col] / m[col][col];
            if factor == 0.0 {
                continue;
            }
            for c in col..n {
                m[r][c] -= factor * m[col][c];
            }
            rhs[r] -= factor * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = rhs[i];
        for k in (i + 1)..n {
            s -= m[i][k] * x[k];
        }
        x[i] = s / m[i][i];
    }
    Some(x)
}

/// Minimum-norm solution of `A x = b` for symmetric positive semidefinite
/// `A` through its eigendecomposition, discarding eigenvalues below
/// `rel_tol · λ_max`.
pub fn psd_pinv_solve(a: &Matrix, b: &[f64], rel_tol: f64) -> Result<Vec<f64>> {
    let eig = sym_eigen(a)?;
    let n = a.rows;
    let top = eig.values.first().copied().unwrap_or(0.0).max(0.0);
    let mut x = vec![0.0; n];
    for k in 0..n {
        let lam = eig.values[k];
        if lam <= rel_tol * top || lam <= 0.0 {
            continue;
        }
        let uk = eig.vectors.column(k);
        let coef = dot(&uk, b) / lam;
        for (xi, ui) in x.iter_mut().zip(&uk) {
            *xi += coef * ui;
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reconstruct(e: &SymEigen) -> Matrix {
        let n = e.values.len();
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for k in 0..n {
                    s += e.vectors.get(i, k) * e.values[k] * e.vectors.get(j, k);
                }
                out.set(i, j, s);
            }
        }
        out
    }

    fn test_matrix(n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let v = 1.0 / (1.0 + (i as f64 - j as f64).abs()) + if i == j { i as f64 * 0.1 } else { 0.0 };
                m.set(i, j, v);
            }
        }
        m
    }

    #[test]
    fn two_by_two_closed_form() {
        let r = 0.3;
        let m = Matrix::from_row_major(2, 2, vec![1.0, r, r, 1.0]).unwrap();
        for jac in [true, false] {
            let e = sym_eigen_with(&m, jac).unwrap();
            assert!((e.values[0] - 1.3).abs() < 1e-14);
            assert!((e.values[1] - 0.7).abs() < 1e-14);
        }
    }

    #[test]
    fn jacobi_and_ql_agree_and_reconstruct() {
        for n in [1, 3, 7, 20] {
            let m = test_matrix(n);
            let a = sym_eigen_with(&m, true).unwrap();
            let b = sym_eigen_with(&m, false).unwrap();
            for k in 0..n {
                assert!((a.values[k] - b.values[k]).abs() < 1e-11, "n={n} k={k}");
            }
            assert!(reconstruct(&a).max_abs_diff(&m) < 1e-11);
            assert!(reconstruct(&b).max_abs_diff(&m) < 1e-11);
            let vtv = a.vectors.transpose().matmul(&a.vectors).unwrap();
            assert!(vtv.max_abs_diff(&Matrix::identity(n)) < 1e-12);
        }
    }

    #[test]
    fn large_path_uses_ql() {
        let m = test_matrix(80);
        let e = sym_eigen(&m).unwrap();
        assert!(reconstruct(&e).max_abs_diff(&m) < 1e-10);
        assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn cholesky_and_gauss_agree() {
        let m = test_matrix(5);
        let b = [1.0, -2.0, 0.5, 3.0, 0.0];
        let l = cholesky(&m, 1e-14).unwrap();
        let x1 = cholesky_solve(&l, &b);
        let x2 = solve(&m, &b).unwrap();
        for (a, c) in x1.iter().zip(&x2) {
            assert!((a - c).abs() < 1e-12);
        }
    }

    #[test]
    fn pinv_gives_min_norm_solution() {
        let m = Matrix::from_row_major(2, 2, vec![1.0, 1.0, 1.0, 1.0]).unwrap();
        let x = psd_pinv_solve(&m, &[2.0, 2.0], 1e-12).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 1.0).abs() < 1e-12);
        assert!(cholesky(&m, 1e-12).is_none());
    }
}
