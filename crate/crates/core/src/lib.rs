//! Design geometry, entropy bounds and oracle inequalities for the Lasso.
//!
//! Everything here is `no_std` with `alloc`; file formats, the command line
//! and parallel Monte Carlo live in the `lassolab` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod covering;
pub mod design;
pub mod entropy;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod lasso;
pub mod linalg;
pub mod noise;
pub mod num;
pub mod oracle;
pub mod projection;

pub use covering::{CoveringProfile, ProfileOptions};
pub use design::{generate, CoefficientVector, DesignFamily, DesignMatrix, NormPolicy, SpectralProfile};
pub use entropy::{EntropyBoundParams, EntropyConstants};
pub use error::{Error, Result};
pub use geometry::{GeometryOptions, GeometryReport, SupportPartition};
pub use harness::{McReport, ProbReport, VerifySpec};
pub use lasso::{LassoFit, LassoOptions};
pub use noise::{NoiseKind, NoiseModel};
pub use oracle::{LambdaRule, OracleReport, SupportAnalysis};
