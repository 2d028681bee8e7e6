//! Parallel Monte Carlo. Draws are mapped in index order on a dedicated
//! pool, so reports do not depend on the thread count.

use lassolab_core::harness::{self, Lambda0Source, McReport, ProbReport, ProbSpec, VerifySetup, VerifySpec};
use lassolab_core::{DesignMatrix, NoiseModel};
use log::{debug, info};
use rayon::prelude::*;

use crate::error::Result;

pub fn pool(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        b = b.num_threads(t.max(1));
    }
    Ok(b.build()?)
}

pub fn verify(design: &DesignMatrix, f0: &[f64], noise: NoiseModel, spec: VerifySpec, threads: Option<usize>) -> Result<McReport> {
    let pool = pool(threads)?;
    // warm the Gram cache before the workers share the design
    design.gram();
    pool.install(|| {
        let calibrated = match spec.lambda0 {
            Lambda0Source::Calibrated { quantile, draws } => {
                let stats = (0..draws)
                    .into_par_iter()
                    .map(|i| harness::calibration_draw(design, &noise, spec.alpha, &spec.sup_search, spec.master_seed, i))
                    .collect::<lassolab_core::Result<Vec<_>>>()?;
                let q = harness::empirical_quantile(&stats, quantile)?;
                info!("calibrated lambda0 = {q} from {draws} draws");
                Some(q)
            }
            _ => None,
        };
        let setup = VerifySetup::new(design, f0, noise, spec, calibrated)?;
        debug!("lambda = {:?}, lambda0 = {:?}", setup.lambda, setup.lambda0);
        let records = (0..setup.spec.draws).into_par_iter().map(|i| setup.run_draw(i)).collect::<lassolab_core::Result<Vec<_>>>()?;
        Ok(setup.report(records))
    })
}

pub fn probcheck(design: &DesignMatrix, noise: &NoiseModel, spec: &ProbSpec, threads: Option<usize>) -> Result<ProbReport> {
    let pool = pool(threads)?;
    design.gram();
    pool.install(|| {
        let main = (0..spec.draws).into_par_iter().map(|i| harness::probability_draw(design, noise, spec, i)).collect::<lassolab_core::Result<Vec<_>>>()?;
        let cal = (0..spec.draws)
            .into_par_iter()
            .map(|i| harness::calibration_draw(design, noise, spec.alpha, &spec.sup_search, spec.master_seed, i))
            .collect::<lassolab_core::Result<Vec<_>>>()?;
        Ok(harness::probability_report(spec, &main, &cal)?)
    })
}
