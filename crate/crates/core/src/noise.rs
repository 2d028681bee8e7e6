//! Noise models with a sub-Gaussian certificate K²(E exp(ε²/K²) − 1) ≤ σ₀².

use alloc::format;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::entropy::subgaussian_sigma0_gaussian;
use crate::error::{Error, Result};
use crate::num::{exp, simpson, sqrt};

/// Tolerance of the certificate check done at construction.
pub const CERTIFICATE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseKind {
    Gaussian { sigma: f64 },
    /// Uniform on [−range, range].
    BoundedUniform { range: f64 },
    /// ±scale with equal probability.
    Rademacher { scale: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    #[serde(flatten)]
    pub kind: NoiseKind,
    #[serde(rename = "K")]
    pub k: f64,
    pub sigma0: f64,
}

impl NoiseModel {
    /// Gaussian noise certified with K = 2σ (K = 1 for σ = 0).
    pub fn gaussian(sigma: f64) -> Result<Self> {
        let k = if sigma > 0.0 { 2.0 * sigma } else { 1.0 };
        Self::gaussian_with_k(sigma, k)
    }

    pub fn gaussian_with_k(sigma: f64, k: f64) -> Result<Self> {
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::Parameter(format!("sigma must be finite and nonnegative, got {sigma}")));
        }
        let s2 = subgaussian_sigma0_gaussian(sigma, k)?;
        Self::checked(NoiseKind::Gaussian { sigma }, k, sqrt(s2))
    }

    /// |ε| ≤ range, certified with K = range and σ₀² = K²(e − 1).
    pub fn bounded_uniform(range: f64) -> Result<Self> {
        if !(range > 0.0 && range.is_finite()) {
            return Err(Error::Parameter(format!("range must be positive, got {range}")));
        }
        Self::checked(NoiseKind::BoundedUniform { range }, range, range * sqrt(core::f64::consts::E - 1.0))
    }

    pub fn rademacher(scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::Parameter(format!("scale must be positive, got {scale}")));
        }
        Self::checked(NoiseKind::Rademacher { scale }, scale, scale * sqrt(core::f64::consts::E - 1.0))
    }

    /// Rebuilds the model from its kind, with the default certificate.
    pub fn from_kind(kind: NoiseKind) -> Result<Self> {
        match kind {
            NoiseKind::Gaussian { sigma } => Self::gaussian(sigma),
            NoiseKind::BoundedUniform { range } => Self::bounded_uniform(range),
            NoiseKind::Rademacher { scale } => Self::rademacher(scale),
        }
    }

    fn checked(kind: NoiseKind, k: f64, sigma0: f64) -> Result<Self> {
        let model = NoiseModel { kind, k, sigma0 };
        let lhs = model.certificate_lhs();
        if lhs > sigma0 * sigma0 + CERTIFICATE_TOL {
            return Err(Error::Domain(format!("sub-Gaussian certificate fails: {lhs} > {}", sigma0 * sigma0)));
        }
        Ok(model)
    }

    /// K²(E exp(ε²/K²) − 1), by quadrature or exact sums.
    pub fn certificate_lhs(&self) -> f64 {
        let k2 = self.k * self.k;
        let mgf = match self.kind {
            NoiseKind::Gaussian { sigma } if sigma == 0.0 => 1.0,
            NoiseKind::Gaussian { sigma } => {
                // substitute x = σz; the integrand decays like exp(−z²(1/2 − σ²/K²))
                let rate = 0.5 - sigma * sigma / k2;
                let half_width = sqrt(80.0 / rate);
                let dens = |z: f64| exp(-z * z * rate) / sqrt(2.0 * core::f64::consts::PI);
                simpson(dens, -half_width, half_width, 20_000)
            }
            NoiseKind::BoundedUniform { range } => simpson(|x| exp(x * x / k2), -range, range, 20_000) / (2.0 * range),
            NoiseKind::Rademacher { scale } => exp(scale * scale / k2),
        };
        k2 * (mgf - 1.0)
    }

    /// n independent draws; the stream depends only on `seed`.
    pub fn draw(&self, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        match self.kind {
            NoiseKind::Gaussian { sigma } => (0..n).map(|_| sigma * rng.sample::<f64, _>(StandardNormal)).collect(),
            NoiseKind::BoundedUniform { range } => (0..n).map(|_| range * (2.0 * rng.random::<f64>() - 1.0)).collect(),
            NoiseKind::Rademacher { scale } => (0..n).map(|_| if rng.random::<bool>() { scale } else { -scale }).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::abs;

    #[test]
    fn certificates_hold() {
        let g = NoiseModel::gaussian(1.0).unwrap();
        assert_eq!(g.k, 2.0);
        assert!(abs(g.sigma0 * g.sigma0 - 4.0 * (sqrt(2.0) - 1.0)) < 1e-12);
        assert!(abs(g.certificate_lhs() - g.sigma0 * g.sigma0) < 1e-8);
        let u = NoiseModel::bounded_uniform(0.5).unwrap();
        assert!(u.certificate_lhs() < u.sigma0 * u.sigma0);
        let r = NoiseModel::rademacher(2.0).unwrap();
        assert!(abs(r.certificate_lhs() - r.sigma0 * r.sigma0) < 1e-9);
        assert_eq!(NoiseModel::gaussian(0.0).unwrap().sigma0, 0.0);
        assert!(NoiseModel::gaussian_with_k(1.0, 1.0).is_err());
    }

    #[test]
    fn draws_are_deterministic() {
        let g = NoiseModel::gaussian(1.0).unwrap();
        assert_eq!(g.draw(50, 9), g.draw(50, 9));
        assert_ne!(g.draw(50, 9), g.draw(50, 10));
        let r = NoiseModel::rademacher(1.0).unwrap().draw(200, 3);
        assert!(r.iter().all(|&x| x == 1.0 || x == -1.0));
        let u = NoiseModel::bounded_uniform(0.3).unwrap().draw(500, 3);
        assert!(u.iter().all(|&x| abs(x) <= 0.3));
    }

    #[test]
    fn gaussian_variance() {
        let x = NoiseModel::gaussian(1.0).unwrap().draw(100_000, 1);
        let mean = x.iter().sum::<f64>() / x.len() as f64;
        let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (x.len() - 1) as f64;
        assert!(abs(var - 1.0) < 0.02, "{var}");
    }
}
