//! Entropy bounds for {f_β : ‖β‖₁ = 1} and the constants (K₀, B, λ₀) of the
//! concentration inequality they feed.

use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::covering::CoveringProfile;
use crate::design::SpectralProfile;
use crate::error::{Error, Result};
use crate::num::{exp, ln, powf, sqrt};

/// Additive slope of the envelope floor.
pub const ENVELOPE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyBoundParams {
    pub alpha: f64,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "K")]
    pub k: f64,
    pub sigma0: f64,
    pub t: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyConstants {
    #[serde(rename = "K0")]
    pub k0: f64,
    #[serde(rename = "B")]
    pub b: f64,
    pub lambda0: f64,
}

/// σ₀² making K²(E exp(ε²/K²) − 1) ≤ σ₀² tight for ε ~ N(0, σ²).
pub fn subgaussian_sigma0_gaussian(sigma: f64, k: f64) -> Result<f64> {
    if !(sigma >= 0.0 && k > 0.0) {
        return Err(Error::Parameter(format!("need sigma >= 0 and K > 0, got sigma = {sigma}, K = {k}")));
    }
    let ratio = 2.0 * sigma * sigma / (k * k);
    if ratio >= 1.0 {
        return Err(Error::Domain(format!("E exp(eps^2/K^2) diverges for K^2 = {} <= 2 sigma^2 = {}", k * k, 2.0 * sigma * sigma)));
    }
    Ok(k * k * (1.0 / sqrt(1.0 - ratio) - 1.0))
}

/// K₀ = 96·√(K² + σ₀²).
pub fn k0(k: f64, sigma0: f64) -> f64 {
    96.0 * sqrt(k * k + sigma0 * sigma0)
}

pub fn derive_constants(params: &EntropyBoundParams) -> Result<EntropyConstants> {
    let EntropyBoundParams { alpha, a, k, sigma0, t, n } = *params;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    if !(a > 0.0 && k > 0.0 && sigma0 > 0.0 && t > 0.0 && n > 0) || !(a.is_finite() && k.is_finite() && sigma0.is_finite() && t.is_finite()) {
        return Err(Error::Parameter("A, K, sigma0, t and n must be positive and finite".into()));
    }
    let k0 = k0(k, sigma0);
    let gap = powf(2.0, 1.0 - alpha) - 1.0;
    let b = exp(powf(a, 2.0 * alpha) * alpha / (2.0 * gap * gap)) - 1.0;
    let bracket = powf(a, alpha) / gap + t;
    let lambda0 = 4.0 * k0 / sqrt(n as f64) * bracket;
    Ok(EntropyConstants { k0, b, lambda0 })
}

/// Strictly decreasing V on {0, …, p} with V(j) ≥ ω_{j+1}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub values: Vec<f64>,
}

impl Envelope {
    /// V⁻¹(δ) = min{j : V(j) ≤ δ}.
    pub fn inverse(&self, delta: f64) -> usize {
        self.values.iter().position(|&v| v <= delta).unwrap_or(self.values.len() - 1)
    }
}

/// V(j) = ω_{j+1} + ε(p − j) for j < p, V(p) = 0.
pub fn envelope_v(spectral: &SpectralProfile) -> Envelope {
    let om = spectral.omegas();
    let p = om.len();
    let mut values = Vec::with_capacity(p + 1);
    for j in 0..p {
        // ω is sorted, so max_{k ≥ j+1} ω_k = ω_{j+1}
        values.push(om[j] + ENVELOPE_EPS * (p - j) as f64);
    }
    values.push(0.0);
    Envelope { values }
}

/// V⁻¹(δ)·log(3/δ), bounding the entropy at radius 2δ.
pub fn entropy_from_eigenvalues(spectral: &SpectralProfile, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::Parameter(format!("delta must be positive, got {delta}")));
    }
    let dims = envelope_v(spectral).inverse(delta);
    Ok(dims as f64 * ln(3.0 / delta).max(0.0))
}

/// min over grid u ∈ (0,1) of 6(N(u) + 6u²/δ²)·log(2((8+δ)/δ)N(δ)).
///
/// N(δ) is read at the largest grid radius not exceeding δ, or taken as the
/// size of the point set when the grid has no such radius.
pub fn entropy_from_covering(profile: &CoveringProfile, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::Parameter(format!("delta must be positive, got {delta}")));
    }
    let inner: Vec<usize> = (0..profile.radii.len()).filter(|&i| profile.radii[i] > 0.0 && profile.radii[i] < 1.0).collect();
    if inner.is_empty() {
        return Err(Error::Input("covering profile has no radius in (0, 1)".into()));
    }
    let n_delta = (0..profile.radii.len())
        .filter(|&i| profile.radii[i] <= delta)
        .max_by(|&a, &b| profile.radii[a].total_cmp(&profile.radii[b]))
        .map(|i| profile.covering_at(i))
        .unwrap_or(profile.points) as f64;
    let log_term = ln(2.0 * (8.0 + delta) / delta * n_delta);
    let best = inner
        .iter()
        .map(|&i| {
            let u = profile.radii[i];
            6.0 * (profile.covering_at(i) as f64 + 6.0 * u * u / (delta * delta)) * log_term
        })
        .fold(f64::INFINITY, f64::min);
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "route", rename_all = "snake_case")]
pub enum PolynomialSource {
    /// ω_j ≤ C/j^m.
    Eigen { m: f64, c: f64 },
    /// N(u) ≤ (C/u)^W.
    Cover { w: f64, c: f64 },
}

/// (α, A) for polynomial eigenvalue decay or polynomial covering numbers;
/// `constant` is the unspecified C_m or C_W of the bound.
pub fn polynomial_alpha_a(source: PolynomialSource, n: f64, constant: f64) -> Result<(f64, f64)> {
    if !(n > 1.0 && constant > 0.0) {
        return Err(Error::Parameter(format!("need n > 1 and constant > 0, got n = {n}, constant = {constant}")));
    }
    let alpha = match source {
        PolynomialSource::Eigen { m, .. } => {
            if !(m > 0.5) {
                return Err(Error::Domain(format!("eigenvalue route needs m > 1/2, got {m}")));
            }
            1.0 / (2.0 * m)
        }
        PolynomialSource::Cover { w, .. } => {
            if !(w > 0.0) {
                return Err(Error::Domain(format!("cover route needs W > 0, got {w}")));
            }
            w / (2.0 + w)
        }
    };
    let a = powf(constant * constant * ln(n), 1.0 / (2.0 * alpha));
    Ok((alpha, a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covering::Decorrelation;
    use crate::num::{abs, simpson};
    use alloc::vec;

    fn gaussian_mgf_sq(sigma: f64, k: f64) -> f64 {
        let dens = |x: f64| exp(-x * x / (2.0 * sigma * sigma)) / (sigma * sqrt(2.0 * core::f64::consts::PI));
        simpson(|x| dens(x) * exp(x * x / (k * k)), -60.0 * sigma, 60.0 * sigma, 200_000)
    }

    #[test]
    fn sigma0_examples() {
        let s = subgaussian_sigma0_gaussian(1.0, 2.0).unwrap();
        assert!(abs(s - 4.0 * (sqrt(2.0) - 1.0)) < 1e-12);
        assert!(abs(s - 1.65685) < 1e-5);
        assert!(subgaussian_sigma0_gaussian(1e-8, 1.0).unwrap() < 1e-15);
        let s = subgaussian_sigma0_gaussian(1.0, 10.0).unwrap();
        let quad = 100.0 * (gaussian_mgf_sq(1.0, 10.0) - 1.0);
        assert!(abs(s - quad) < 1e-6, "{s} vs {quad}");
        assert!(subgaussian_sigma0_gaussian(1.0, 1.0).is_err());
    }

    #[test]
    fn constants_examples() {
        let s0 = sqrt(4.0 * (sqrt(2.0) - 1.0));
        let base = EntropyBoundParams { alpha: 0.5, a: 1.0, k: 2.0, sigma0: s0, t: 1.0, n: 100 };
        let c = derive_constants(&base).unwrap();
        let b_ref = exp(0.5 / (2.0 * (sqrt(2.0) - 1.0) * (sqrt(2.0) - 1.0))) - 1.0;
        assert!(abs(c.b - b_ref) < 1e-12);
        assert!(abs(c.b - 3.2935) < 1e-4);
        assert!(abs(c.k0 - 192.0 * powf(2.0, 0.25)) < 1e-9);
        assert!(abs(c.k0 - 228.33) < 0.01);
        let c2 = derive_constants(&EntropyBoundParams { t: 2.0, ..base }).unwrap();
        assert!(abs(c2.lambda0 - c.lambda0 - 4.0 * c.k0 / 10.0) < 1e-9);
        let c4 = derive_constants(&EntropyBoundParams { n: 400, ..base }).unwrap();
        assert_eq!(c4.lambda0, c.lambda0 / 2.0);
        assert!(derive_constants(&EntropyBoundParams { alpha: 1.0, ..base }).is_err());
        assert!(derive_constants(&EntropyBoundParams { alpha: 0.0, ..base }).is_err());
    }

    #[test]
    fn envelope_examples() {
        let sp = SpectralProfile::from_eigenvalues(vec![4.0, 1.0, 0.25]);
        let v = envelope_v(&sp);
        assert_eq!(v.values.len(), 4);
        assert!(abs(v.values[0] - 2.0 - 3e-12) < 1e-15);
        assert_eq!(v.values[3], 0.0);
        let flat = envelope_v(&SpectralProfile::from_eigenvalues(vec![1.0; 5]));
        for w in flat.values.windows(2) {
            assert!(w[1] < w[0]);
        }
        assert!(flat.values[..5].iter().all(|&x| x >= 1.0));
    }

    #[test]
    fn eigen_bound_examples() {
        let rank1 = SpectralProfile::from_eigenvalues(vec![1.0, 0.0, 0.0]);
        for d in [0.01, 0.3, 0.9] {
            assert!(entropy_from_eigenvalues(&rank1, d).unwrap() <= ln(3.0 / d) + 1e-12);
        }
        assert_eq!(entropy_from_eigenvalues(&rank1, 3.0).unwrap(), 0.0);
        assert_eq!(entropy_from_eigenvalues(&rank1, 5.0).unwrap(), 0.0);
    }

    fn flat_profile() -> CoveringProfile {
        let radii = crate::covering::default_radii();
        let mut radii = radii;
        radii.sort_by(f64::total_cmp);
        let ones = vec![1; radii.len()];
        CoveringProfile {
            radii,
            packing_sizes: ones.clone(),
            covering_upper: ones,
            covering_exact: None,
            decorrelation: Vec::<Decorrelation>::new(),
            include_signs: false,
            points: 3,
        }
    }

    #[test]
    fn cover_bound_examples() {
        let prof = flat_profile();
        let got = entropy_from_covering(&prof, 1.0).unwrap();
        let u = powf(2.0, -5.0);
        assert!(abs(got - 6.0 * (1.0 + 6.0 * u * u) * ln(18.0)) < 1e-12);
        assert!(abs(got - 17.34) < 0.2);
        let mut prev = f64::INFINITY;
        for d in [0.05, 0.1, 0.2, 0.4, 0.8, 1.6, 3.2] {
            let b = entropy_from_covering(&prof, d).unwrap();
            assert!(b.is_finite() && b >= 0.0 && b <= prev);
            prev = b;
        }
        let mut empty = prof.clone();
        empty.radii = vec![1.5];
        assert!(entropy_from_covering(&empty, 1.0).is_err());
    }

    #[test]
    fn polynomial_examples() {
        let (a, big_a) = polynomial_alpha_a(PolynomialSource::Eigen { m: 1.0, c: 1.0 }, core::f64::consts::E, 1.0).unwrap();
        assert!(abs(a - 0.5) < 1e-15 && abs(big_a - 1.0) < 1e-12);
        let (a, _) = polynomial_alpha_a(PolynomialSource::Cover { w: 2.0, c: 1.0 }, 100.0, 1.0).unwrap();
        assert_eq!(a, 0.5);
        let (a, _) = polynomial_alpha_a(PolynomialSource::Cover { w: 1e9, c: 1.0 }, 100.0, 1.0).unwrap();
        assert!(1.0 - a < 1e-8);
        assert!(polynomial_alpha_a(PolynomialSource::Eigen { m: 0.5, c: 1.0 }, 100.0, 1.0).is_err());
    }
}
