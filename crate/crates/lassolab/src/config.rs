//! Experiment configuration shared by `verify` and `probcheck`.

use std::path::{Path, PathBuf};

use lassolab_core::entropy::{polynomial_alpha_a, PolynomialSource};
use lassolab_core::geometry::GeometryOptions;
use lassolab_core::harness::{Lambda0Source, ProbSpec, SupSearch, VerifySpec};
use lassolab_core::{generate, DesignFamily, DesignMatrix, EntropyBoundParams, LambdaRule, LassoOptions, NoiseKind, NoiseModel, NormPolicy};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::io;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum DesignSource {
    /// Relative paths resolve against the config file's directory.
    Csv {
        path: PathBuf,
        #[serde(default)]
        rescale: bool,
    },
    Generate { family: DesignFamily, n: usize, p: usize, seed: u64 },
}

impl DesignSource {
    pub fn load(&self, base: &Path) -> Result<DesignMatrix> {
        match self {
            DesignSource::Csv { path, rescale } => {
                let policy = if *rescale { NormPolicy::Rescale } else { NormPolicy::Reject };
                io::read_design(&base.join(path), policy)
            }
            DesignSource::Generate { family, n, p, seed } => Ok(generate(*family, *n, *p, *seed)?),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Lambda0Choice {
    Value { value: f64 },
    /// From the entropy constants.
    Entropy,
    /// Per-draw max_j 4|εᵀψ_j|/n (α = 1 only).
    Sup,
    /// Empirical quantile of the sup statistic on independent draws.
    Calibrated { quantile: f64, draws: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "route", rename_all = "snake_case")]
pub enum EntropyRoute {
    /// ω_j ≤ C/j^m.
    Eigen { m: f64 },
    /// N(u) ≤ (C/u)^W.
    Cover {
        #[serde(rename = "W")]
        w: f64,
    },
    Explicit {
        alpha: f64,
        #[serde(rename = "A")]
        a: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyInputs {
    #[serde(flatten)]
    pub route: EntropyRoute,
    /// C_m or C_W.
    pub constant: f64,
    /// Overrides the noise model's K (Gaussian noise only).
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    pub t: f64,
}

impl Default for EntropyInputs {
    fn default() -> Self {
        EntropyInputs { route: EntropyRoute::Eigen { m: 1.0 }, constant: 1.0, k: None, t: 2.0 }
    }
}

impl EntropyInputs {
    /// (α, A) of the route for sample size n.
    pub fn alpha_a(&self, n: usize) -> Result<(f64, f64)> {
        Ok(match self.route {
            EntropyRoute::Eigen { m } => polynomial_alpha_a(PolynomialSource::Eigen { m, c: 1.0 }, n as f64, self.constant)?,
            EntropyRoute::Cover { w } => polynomial_alpha_a(PolynomialSource::Cover { w, c: 1.0 }, n as f64, self.constant)?,
            EntropyRoute::Explicit { alpha, a } => (alpha, a),
        })
    }

    /// Noise certificate, honouring the K override.
    pub fn certified_noise(&self, kind: NoiseKind) -> Result<NoiseModel> {
        match (self.k, kind) {
            (None, kind) => Ok(NoiseModel::from_kind(kind)?),
            (Some(k), NoiseKind::Gaussian { sigma }) => Ok(NoiseModel::gaussian_with_k(sigma, k)?),
            (Some(_), _) => Err(CliError::Usage("a K override is only supported for gaussian noise".into())),
        }
    }

    pub fn params(&self, n: usize, noise: &NoiseModel) -> Result<EntropyBoundParams> {
        let (alpha, a) = self.alpha_a(n)?;
        Ok(EntropyBoundParams { alpha, a, k: noise.k, sigma0: noise.sigma0, t: self.t, n })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub design: DesignSource,
    /// f⁰ = Xβ⁰.
    pub beta0: Vec<f64>,
    pub noise: NoiseKind,
    pub alpha: f64,
    /// classic, slow, tradeoff or fixed:<value>.
    pub lambda_rule: String,
    pub c: f64,
    /// 1-based.
    #[serde(rename = "S")]
    pub s: Vec<usize>,
    pub lambda0: Lambda0Choice,
    #[serde(default)]
    pub entropy: EntropyInputs,
    pub draws: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|source| CliError::Json { context: "reading experiment config".into(), source })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config always serialises")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
        Self::from_json(&text)
    }

    pub fn support(&self) -> Result<Vec<usize>> {
        self.s
            .iter()
            .map(|&j| j.checked_sub(1).ok_or_else(|| CliError::Usage("indices in S are 1-based".into())))
            .collect()
    }

    pub fn rule(&self) -> Result<LambdaRule> {
        parse_rule(&self.lambda_rule, self.c)
    }

    pub fn noise_model(&self) -> Result<NoiseModel> {
        self.entropy.certified_noise(self.noise)
    }

    pub fn verify_spec(&self, design: &DesignMatrix, noise: &NoiseModel) -> Result<VerifySpec> {
        let lambda0 = match self.lambda0 {
            Lambda0Choice::Value { value } => Lambda0Source::Given { value },
            Lambda0Choice::Entropy => Lambda0Source::Entropy { params: self.entropy.params(design.n(), noise)? },
            Lambda0Choice::Sup => Lambda0Source::PerDrawSup,
            Lambda0Choice::Calibrated { quantile, draws } => Lambda0Source::Calibrated { quantile, draws },
        };
        Ok(VerifySpec {
            s: self.support()?,
            alpha: self.alpha,
            lambda0,
            rule: self.rule()?,
            draws: self.draws,
            master_seed: self.seed,
            sup_search: SupSearch::default(),
            lasso: LassoOptions::default(),
            geometry: GeometryOptions::default(),
        })
    }

    pub fn prob_spec(&self, design: &DesignMatrix, noise: &NoiseModel) -> Result<ProbSpec> {
        let (entropy, lambda0, quantile) = match self.lambda0 {
            Lambda0Choice::Entropy => (Some(self.entropy.params(design.n(), noise)?), None, 0.95),
            Lambda0Choice::Value { value } => (None, Some(value), 0.95),
            Lambda0Choice::Calibrated { quantile, .. } => (None, None, quantile),
            Lambda0Choice::Sup => (None, None, 0.95),
        };
        Ok(ProbSpec { alpha: self.alpha, entropy, lambda0, draws: self.draws, master_seed: self.seed, quantile, sup_search: SupSearch::default() })
    }
}

/// classic | slow | tradeoff | fixed:<value>.
pub fn parse_rule(text: &str, c: f64) -> Result<LambdaRule> {
    match text.trim() {
        "classic" => Ok(LambdaRule::Classic { c }),
        "slow" => Ok(LambdaRule::Slow { c }),
        "tradeoff" => Ok(LambdaRule::Tradeoff { c }),
        other => match other.strip_prefix("fixed:") {
            Some(v) => v.trim().parse::<f64>().map(|value| LambdaRule::Fixed { value }).map_err(|e| CliError::Usage(format!("bad fixed lambda {v:?}: {e}"))),
            None => Err(CliError::Usage(format!("unknown lambda rule {other:?}; expected classic, slow, tradeoff or fixed:<value>"))),
        },
    }
}
