//! Command-line front end.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use lassolab_core::covering::{covering_profile, ProfileOptions};
use lassolab_core::entropy::{derive_constants, entropy_from_covering, entropy_from_eigenvalues};
use lassolab_core::geometry::{geometry_report, GeometryOptions};
use lassolab_core::harness::McReport;
use lassolab_core::oracle::{self, report_for, search_analyses, SupportAnalysis};
use lassolab_core::{generate, lasso, DesignFamily, DesignMatrix, EntropyBoundParams, LassoOptions, NoiseKind, NoiseModel, NormPolicy};
use log::info;
use serde_json::{json, Value};

use crate::config::{parse_rule, DesignSource, EntropyInputs, EntropyRoute, ExperimentConfig, Lambda0Choice};
use crate::error::{CliError, Result};
use crate::{driver, io};

/// Exit code of `verify` when some certified draw violates the inequality.
pub const EXIT_VIOLATION: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "lassolab", version, about = "Compatibility constants, entropy bounds and Lasso oracle-inequality checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic design and write it as CSV.
    Gen(GenArgs),
    /// Compatibility constant, l1/l2 eigenvalues and restricted eigenvalue of S.
    Diag(DiagArgs),
    /// Packing, covering and decorrelation numbers of the columns.
    Cover(CoverArgs),
    /// Entropy bounds and the constants K0, B, lambda0.
    Entropy(EntropyArgs),
    /// Fit the Lasso at one lambda.
    Lasso(LassoArgs),
    /// Right-hand side of the oracle inequality for a lambda rule.
    Oracle(OracleArgs),
    /// Monte Carlo verification of the oracle inequality.
    Verify(ExperimentArgs),
    /// Empirical failure frequency of the noise event.
    Probcheck(ExperimentArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Kind {
    Orthonormal,
    Equicorrelated,
    Ar1,
    DuplicatedBlocks,
    SpikedDecay,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    p: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Correlation for equicorrelated and ar1.
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    blocks: Option<usize>,
    #[arg(long)]
    jitter: Option<f64>,
    /// Decay exponent for spiked-decay.
    #[arg(long)]
    m: Option<f64>,
    /// Decay constant for spiked-decay.
    #[arg(long = "decay-c")]
    decay_c: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DesignArgs {
    /// Design CSV (no header, n rows, p columns).
    #[arg(long)]
    design: PathBuf,
    /// Rescale columns with norm above one instead of rejecting them.
    #[arg(long)]
    rescale: bool,
}

impl DesignArgs {
    fn load(&self) -> Result<DesignMatrix> {
        io::read_design(&self.design, if self.rescale { NormPolicy::Rescale } else { NormPolicy::Reject })
    }
}

#[derive(Debug, Args)]
pub struct DiagArgs {
    #[command(flatten)]
    design: DesignArgs,
    /// Comma-separated 1-based indices.
    #[arg(long = "S")]
    s: String,
    #[arg(long = "L", default_value_t = 6.0)]
    l: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CoverArgs {
    #[command(flatten)]
    design: DesignArgs,
    /// Use {ψ_j} instead of {±ψ_j}.
    #[arg(long)]
    no_signs: bool,
    /// Comma-separated radii (default 2^{-k/2}, k = 0..10).
    #[arg(long)]
    radii: Option<String>,
    /// Comma-separated correlation levels for decorrelation numbers.
    #[arg(long, default_value = "0.25,0.5,0.75,0.9")]
    rho: String,
    #[arg(long, default_value_t = 12)]
    exact_max_points: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Plot-ready CSV: radius,packing,covering_upper,covering_exact.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Route {
    Eigen,
    Cover,
}

#[derive(Debug, Args)]
pub struct EntropyArgs {
    #[command(flatten)]
    design: DesignArgs,
    /// Explicit α in (0,1); requires --A.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long = "A")]
    a: Option<f64>,
    #[arg(long, value_enum, default_value = "eigen")]
    route: Route,
    #[arg(long, default_value_t = 1.0)]
    m: f64,
    #[arg(long = "W", default_value_t = 2.0)]
    w: f64,
    /// C_m or C_W.
    #[arg(long, default_value_t = 1.0)]
    constant: f64,
    /// Standard deviation of Gaussian noise.
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    #[arg(long = "K")]
    k: Option<f64>,
    #[arg(long, default_value_t = 2.0)]
    t: f64,
    #[arg(long, default_value = "0.1,0.25,0.5")]
    deltas: String,
    #[arg(long)]
    no_signs: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Plot-ready CSV: delta,eigen_bound,cover_bound.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LassoArgs {
    #[command(flatten)]
    design: DesignArgs,
    #[arg(long)]
    lambda: f64,
    /// Response vector file.
    #[arg(long, conflicts_with = "beta0")]
    response: Option<PathBuf>,
    /// Simulate y = Xβ⁰ + ε from comma-separated coefficients.
    #[arg(long)]
    beta0: Option<String>,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    design: DesignArgs,
    /// Comma-separated coefficients of f⁰ = Xβ⁰.
    #[arg(long)]
    beta0: String,
    #[arg(long = "S")]
    s: String,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long)]
    lambda0: f64,
    #[arg(long = "lambda-rule", default_value = "classic")]
    lambda_rule: String,
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    /// Also search the nested prefixes of S over the default lambda grid.
    #[arg(long)]
    search: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// JSON experiment config; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    design: Option<PathBuf>,
    #[arg(long)]
    beta0: Option<String>,
    #[arg(long = "S")]
    s: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    /// A number, or one of: entropy, sup, calibrated.
    #[arg(long)]
    lambda0: Option<String>,
    #[arg(long = "lambda-rule")]
    lambda_rule: Option<String>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    draws: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Plot-ready per-draw CSV (verify only).
    #[arg(long)]
    csv: Option<PathBuf>,
}

/// Parses `argv` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    init_logging();
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn init_logging() {
    let level = match std::env::var("LASSOLAB_LOG").as_deref() {
        Ok("quiet") => log::LevelFilter::Off,
        Ok("debug") => log::LevelFilter::Debug,
        Ok("info") => log::LevelFilter::Info,
        _ => log::LevelFilter::Warn,
    };
    let _ = env_logger::Builder::new().filter_level(level).target(env_logger::Target::Stderr).try_init();
}

pub fn execute(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Gen(a) => gen(a),
        Command::Diag(a) => diag(a),
        Command::Cover(a) => cover(a),
        Command::Entropy(a) => entropy(a),
        Command::Lasso(a) => lasso_cmd(a),
        Command::Oracle(a) => oracle_cmd(a),
        Command::Verify(a) => verify(a),
        Command::Probcheck(a) => probcheck(a),
    }
}

/// Writes the document and prints a one-line summary (to stderr when the
/// document itself goes to stdout).
fn finish(out: Option<&Path>, bytes: &[u8], summary: &str) -> Result<()> {
    io::emit(out, bytes)?;
    if out.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(())
}

fn require<T>(v: Option<T>, flag: &str, kind: &str) -> Result<T> {
    v.ok_or_else(|| CliError::Usage(format!("--{flag} is required for --kind {kind}")))
}

fn gen(a: GenArgs) -> Result<i32> {
    let family = match a.kind {
        Kind::Orthonormal => DesignFamily::Orthonormal,
        Kind::Equicorrelated => DesignFamily::Equicorrelated { r: require(a.r, "r", "equicorrelated")? },
        Kind::Ar1 => DesignFamily::Ar1 { r: require(a.r, "r", "ar1")? },
        Kind::DuplicatedBlocks => DesignFamily::DuplicatedBlocks {
            blocks: require(a.blocks, "blocks", "duplicated-blocks")?,
            jitter: a.jitter.unwrap_or(0.0),
        },
        Kind::SpikedDecay => DesignFamily::SpikedDecay { m: require(a.m, "m", "spiked-decay")?, c: a.decay_c.unwrap_or(1.0) },
    };
    let d = generate(family, a.n, a.p, a.seed)?;
    let target = a.out.as_ref().map_or("stdout".into(), |p| p.display().to_string());
    finish(a.out.as_deref(), &io::design_csv(&d), &format!("gen: {}x{} design written to {target}", a.n, a.p))?;
    Ok(0)
}

fn one_based(s: &[usize]) -> Vec<usize> {
    s.iter().map(|j| j + 1).collect()
}

fn diag(a: DiagArgs) -> Result<i32> {
    let d = a.design.load()?;
    let s = io::parse_support(&a.s)?;
    let rep = geometry_report(&d, &s, a.l, &GeometryOptions::default())?;
    let mut v = io::with_schema(&rep)?;
    v["S"] = json!(one_based(&rep.s));
    let summary = format!(
        "diag: phi2={:.6} lambda1_min2={:.6} lambda_min2={:.6} phi2_re<={:.6}",
        rep.phi2, rep.lambda1_min2, rep.lambda_min2, rep.phi2_re
    );
    finish(a.out.as_deref(), &io::json_bytes(&v), &summary)?;
    Ok(0)
}

fn profile_options(no_signs: bool, radii: Option<&str>, rho: &str, exact_max_points: usize) -> Result<ProfileOptions> {
    let mut opts = ProfileOptions { include_signs: !no_signs, exact_max_points, rhos: io::parse_f64_list(rho)?, ..ProfileOptions::default() };
    if let Some(r) = radii {
        opts.radii = io::parse_f64_list(r)?;
    }
    Ok(opts)
}

fn cover(a: CoverArgs) -> Result<i32> {
    let d = a.design.load()?;
    let opts = profile_options(a.no_signs, a.radii.as_deref(), &a.rho, a.exact_max_points)?;
    let prof = covering_profile(&d, &opts)?;
    let decor: serde_json::Map<String, Value> = prof.decorrelation.iter().map(|m| (m.rho.to_string(), json!(m.size))).collect();
    let exact_flags: serde_json::Map<String, Value> = prof.decorrelation.iter().map(|m| (m.rho.to_string(), json!(m.exact))).collect();
    let v = json!({
        "schema": io::SCHEMA,
        "radii": prof.radii,
        "packing": prof.packing_sizes,
        "covering_upper": prof.covering_upper,
        "covering_exact": prof.covering_exact,
        "decorrelation": decor,
        "decorrelation_exact": exact_flags,
        "include_signs": prof.include_signs,
        "points": prof.points,
    });
    if let Some(path) = &a.csv {
        let rows: Vec<Vec<String>> = (0..prof.radii.len())
            .map(|i| {
                vec![
                    prof.radii[i].to_string(),
                    prof.packing_sizes[i].to_string(),
                    prof.covering_upper[i].to_string(),
                    prof.covering_exact.as_ref().map_or(String::new(), |e| e[i].to_string()),
                ]
            })
            .collect();
        io::write_bytes(path, &io::table_csv(&["radius", "packing", "covering_upper", "covering_exact"], &rows))?;
    }
    let summary = format!("cover: {} points, {} radii", prof.points, prof.radii.len());
    finish(a.out.as_deref(), &io::json_bytes(&v), &summary)?;
    Ok(0)
}

fn entropy(a: EntropyArgs) -> Result<i32> {
    let d = a.design.load()?;
    let route = match (a.alpha, a.a) {
        (Some(alpha), Some(big_a)) => EntropyRoute::Explicit { alpha, a: big_a },
        (None, None) => match a.route {
            Route::Eigen => EntropyRoute::Eigen { m: a.m },
            Route::Cover => EntropyRoute::Cover { w: a.w },
        },
        _ => return Err(CliError::Usage("--alpha and --A must be given together".into())),
    };
    let inputs = EntropyInputs { route, constant: a.constant, k: a.k, t: a.t };
    let noise = inputs.certified_noise(NoiseKind::Gaussian { sigma: a.sigma })?;
    let params: EntropyBoundParams = inputs.params(d.n(), &noise)?;
    let consts = derive_constants(&params)?;
    let prof = covering_profile(&d, &ProfileOptions { include_signs: !a.no_signs, ..ProfileOptions::default() })?;
    let spectral = d.spectral()?;
    let mut bounds = Vec::new();
    let mut rows = Vec::new();
    for delta in io::parse_f64_list(&a.deltas)? {
        let eb = entropy_from_eigenvalues(spectral, delta)?;
        let cb = entropy_from_covering(&prof, delta)?;
        bounds.push(json!({"delta": delta, "eigen_bound": eb, "cover_bound": cb, "below_resolution": delta < 1.0 / d.n() as f64}));
        rows.push(vec![delta.to_string(), eb.to_string(), cb.to_string()]);
    }
    let v = json!({
        "schema": io::SCHEMA,
        "alpha": params.alpha,
        "A": params.a,
        "K": params.k,
        "sigma0": params.sigma0,
        "t": params.t,
        "n": params.n,
        "constant": a.constant,
        "K0": consts.k0,
        "B": consts.b,
        "lambda0": consts.lambda0,
        "bounds": bounds,
    });
    if let Some(path) = &a.csv {
        io::write_bytes(path, &io::table_csv(&["delta", "eigen_bound", "cover_bound"], &rows))?;
    }
    let summary = format!("entropy: alpha={} A={:.6} K0={:.4} B={:.6} lambda0={:.6}", params.alpha, params.a, consts.k0, consts.b, consts.lambda0);
    finish(a.out.as_deref(), &io::json_bytes(&v), &summary)?;
    Ok(0)
}

fn parse_beta0(text: &str, p: usize) -> Result<Vec<f64>> {
    let b = io::parse_f64_list(text)?;
    if b.len() != p {
        return Err(CliError::Usage(format!("beta0 has {} entries but the design has p = {p}", b.len())));
    }
    Ok(b)
}

fn lasso_cmd(a: LassoArgs) -> Result<i32> {
    let d = a.design.load()?;
    let y = match (&a.response, &a.beta0) {
        (Some(path), None) => io::read_vector(path)?,
        (None, Some(b)) => {
            let f0 = d.predict(&parse_beta0(b, d.p())?)?;
            let eps = NoiseModel::gaussian(a.sigma)?.draw(d.n(), a.seed);
            f0.iter().zip(&eps).map(|(x, e)| x + e).collect()
        }
        _ => return Err(CliError::Usage("give exactly one of --response or --beta0".into())),
    };
    let fit = lasso::fit(&d, &y, a.lambda, &LassoOptions::default())?;
    let v = io::with_schema(&fit)?;
    let summary = format!(
        "lasso: lambda={} nonzeros={} objective={:.8} kkt={:.2e} converged={}",
        a.lambda,
        fit.beta_hat.support().len(),
        fit.objective,
        fit.kkt_residual,
        fit.converged
    );
    finish(a.out.as_deref(), &io::json_bytes(&v), &summary)?;
    Ok(0)
}

fn partition_json(p: &lassolab_core::SupportPartition) -> Value {
    json!({"S": one_based(&p.s), "S1": one_based(&p.s1), "S2": one_based(&p.s2)})
}

fn report_json(r: &lassolab_core::OracleReport) -> Result<Value> {
    let mut v = serde_json::to_value(r).map_err(|source| CliError::Json { context: "serialising report".into(), source })?;
    v["partition"] = partition_json(&r.partition);
    Ok(v)
}

fn oracle_cmd(a: OracleArgs) -> Result<i32> {
    let d = a.design.load()?;
    let beta0 = parse_beta0(&a.beta0, d.p())?;
    let f0 = d.predict(&beta0)?;
    let s = io::parse_support(&a.s)?;
    let opts = GeometryOptions::default();
    let analysis = SupportAnalysis::new(&d, &f0, &s, &opts)?;
    let rule = parse_rule(&a.lambda_rule, a.c)?;
    let (lambda, rule_mask) = rule.resolve(&analysis, a.lambda0, a.alpha)?;
    let (best_mask, _) = analysis.min_rhs(lambda, a.lambda0, a.alpha);
    let best = report_for(&analysis, best_mask, lambda, a.lambda0, a.alpha, &rule.tag());
    let targeted = report_for(&analysis, rule_mask, lambda, a.lambda0, a.alpha, &rule.tag());
    let mut v = io::with_schema(&best)?;
    v["partition"] = partition_json(&best.partition);
    v["rule_partition_report"] = report_json(&targeted)?;
    v["approx_error"] = json!(analysis.projection.approx_error);
    if a.search {
        // candidates: prefixes of S ordered by decreasing |b^S_j|
        let mut order = analysis.s.clone();
        let b = &analysis.projection.b_s.0;
        order.sort_by(|x, y| b[*y].abs().total_cmp(&b[*x].abs()).then(x.cmp(y)));
        let cands = (1..=order.len()).map(|k| order[..k].to_vec()).collect::<Vec<_>>();
        let analyses = cands.iter().map(|c| SupportAnalysis::new(&d, &f0, c, &opts)).collect::<lassolab_core::Result<Vec<_>>>()?;
        let dual = lasso::lambda_max(&d, &f0)? / 2.0;
        let grid = oracle::default_lambda_grid(a.lambda0, dual);
        let found = search_analyses(&analyses, a.lambda0, a.alpha, &grid)?;
        v["search"] = json!({
            "S_star": one_based(&found.s_star),
            "lambda_star": found.lambda_star,
            "objective": found.objective,
            "report": report_json(&found.report)?,
        });
    }
    let summary = format!(
        "oracle: rule={} lambda={:.6} rhs_total={:.6} (S1 = {:?})",
        rule.tag(),
        lambda,
        best.rhs_total,
        one_based(&best.partition.s1)
    );
    finish(a.out.as_deref(), &io::json_bytes(&v), &summary)?;
    Ok(0)
}

/// Config from file (relative design paths resolve against its directory)
/// with command-line overrides applied.
fn experiment(a: &ExperimentArgs) -> Result<(ExperimentConfig, PathBuf)> {
    let (mut cfg, base) = match &a.config {
        Some(path) => (ExperimentConfig::load(path)?, path.parent().map(Path::to_path_buf).unwrap_or_default()),
        None => {
            let design = a.design.clone().ok_or_else(|| CliError::Usage("give --config or --design".into()))?;
            let cfg = ExperimentConfig {
                design: DesignSource::Csv { path: design, rescale: false },
                beta0: Vec::new(),
                noise: NoiseKind::Gaussian { sigma: 1.0 },
                alpha: 1.0,
                lambda_rule: "classic".into(),
                c: 2.0,
                s: Vec::new(),
                lambda0: Lambda0Choice::Sup,
                entropy: EntropyInputs::default(),
                draws: 1000,
                seed: 0,
                out: None,
            };
            (cfg, PathBuf::new())
        }
    };
    if a.config.is_some() {
        if let Some(p) = &a.design {
            cfg.design = DesignSource::Csv { path: std::env::current_dir().map(|c| c.join(p)).unwrap_or_else(|_| p.clone()), rescale: false };
        }
    }
    if let Some(s) = &a.s {
        cfg.s = io::parse_support(s)?.iter().map(|j| j + 1).collect();
    }
    if let Some(b) = &a.beta0 {
        cfg.beta0 = io::parse_f64_list(b)?;
    }
    if let Some(x) = a.alpha {
        cfg.alpha = x;
    }
    if let Some(l) = &a.lambda0 {
        cfg.lambda0 = match l.as_str() {
            "entropy" => Lambda0Choice::Entropy,
            "sup" => Lambda0Choice::Sup,
            "calibrated" => Lambda0Choice::Calibrated { quantile: 0.95, draws: cfg.draws },
            v => Lambda0Choice::Value { value: v.parse().map_err(|e| CliError::Usage(format!("bad --lambda0 {v:?}: {e}")))? },
        };
    }
    if let Some(r) = &a.lambda_rule {
        cfg.lambda_rule = r.clone();
    }
    if let Some(c) = a.c {
        cfg.c = c;
    }
    if let Some(sigma) = a.sigma {
        cfg.noise = NoiseKind::Gaussian { sigma };
    }
    if let Some(t) = a.t {
        cfg.entropy.t = t;
    }
    if let Some(d) = a.draws {
        cfg.draws = d;
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if let Some(o) = &a.out {
        cfg.out = Some(o.clone());
    }
    Ok((cfg, base))
}

/// The config as embedded in reports. The output path is dropped so that the
/// report bytes do not depend on where they are written.
fn config_json(cfg: &ExperimentConfig) -> Result<Value> {
    let cfg = ExperimentConfig { out: None, ..cfg.clone() };
    serde_json::to_value(&cfg).map_err(|source| CliError::Json { context: "serialising config".into(), source })
}

/// Per-draw CSV: index,lambda,lambda0,lhs,rhs,ratio,certified,converged,violation,talpha_global_estimate.
pub fn verify_csv(rep: &McReport) -> Vec<u8> {
    let rows: Vec<Vec<String>> = rep
        .records
        .iter()
        .map(|r| {
            vec![
                r.index.to_string(),
                r.lambda.to_string(),
                r.lambda0.to_string(),
                r.lhs.to_string(),
                r.rhs.to_string(),
                (r.lhs / r.rhs).to_string(),
                r.talpha_pointwise_ok.to_string(),
                r.converged.to_string(),
                r.violation.to_string(),
                r.talpha_global_estimate.to_string(),
            ]
        })
        .collect();
    io::table_csv(
        &["index", "lambda", "lambda0", "lhs", "rhs", "ratio", "certified", "converged", "violation", "talpha_global_estimate"],
        &rows,
    )
}

fn verify(a: ExperimentArgs) -> Result<i32> {
    let (cfg, base) = experiment(&a)?;
    let d = cfg.design.load(&base)?;
    if cfg.beta0.len() != d.p() {
        return Err(CliError::Usage(format!("beta0 has {} entries but the design has p = {}", cfg.beta0.len(), d.p())));
    }
    let f0 = d.predict(&cfg.beta0)?;
    let noise = cfg.noise_model()?;
    let spec = cfg.verify_spec(&d, &noise)?;
    info!("verify: {} draws, alpha = {}, rule = {}", cfg.draws, cfg.alpha, cfg.lambda_rule);
    let rep = driver::verify(&d, &f0, noise, spec, a.threads)?;
    let mut v = io::with_schema(&rep)?;
    v["config"] = config_json(&cfg)?;
    if let Some(path) = &a.csv {
        io::write_bytes(path, &verify_csv(&rep))?;
    }
    let ag = &rep.aggregates;
    let summary = format!(
        "verify: draws={} certified={} nonconverged={} violations_given_certificate={} max_lhs_over_rhs={:.6}",
        rep.draws, ag.certified_draws, ag.nonconverged_draws, ag.violations_given_certificate, ag.max_lhs_over_rhs
    );
    finish(cfg.out.as_deref(), &io::json_bytes(&v), &summary)?;
    Ok(if ag.violations_given_certificate == 0 { 0 } else { EXIT_VIOLATION })
}

fn probcheck(a: ExperimentArgs) -> Result<i32> {
    let (cfg, base) = experiment(&a)?;
    let d = cfg.design.load(&base)?;
    let noise = cfg.noise_model()?;
    let spec = cfg.prob_spec(&d, &noise)?;
    let rep = driver::probcheck(&d, &noise, &spec, a.threads)?;
    let mut v = io::with_schema(&rep)?;
    v["config"] = config_json(&cfg)?;
    let summary = format!(
        "probcheck: draws={} failure_frequency={:?} bound={:?} calibrated_lambda0={:.6} calibrated_failure_frequency={:.4}",
        rep.draws, rep.failure_frequency, rep.bound_exp_minus_t2_times_1_plus_2_over_b, rep.calibrated_lambda0, rep.calibrated_failure_frequency
    );
    finish(cfg.out.as_deref(), &io::json_bytes(&v), &summary)?;
    Ok(0)
}
