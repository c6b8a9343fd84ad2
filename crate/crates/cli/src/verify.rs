use std::path::PathBuf;

use clap::Args;
use serde::{Deserialize, Serialize};

use fracvar::catalog;
use fracvar::examples::{ExampleFixture, ExampleId};
use fracvar::noether::{
    noether_decomposition, noether_quantity, verify_fractional_conserved_with, Decomposition, Orientation, Pair,
};
use fracvar::varproblem::FracProblem;
use fracvar::{FracOrder, SampledSignal, Scheme, VectorPath};

use crate::config::{read_csv, require, resolve, Outputs};
use crate::error::{config, numerical, CliError, CliResult};

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    /// Manifest JSON with any of the settings below.
    #[arg(long, alias = "manifest")]
    #[serde(skip)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    lagrangian: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    scheme: Option<String>,
    /// Path CSV (`t,q1,...`).
    #[arg(long)]
    path: Option<PathBuf>,
    /// Built-in generator name.
    #[arg(long)]
    generator: Option<String>,
    /// Constant multiplying the generator.
    #[arg(long, allow_hyphen_values = true)]
    generator_scale: Option<f64>,
    /// canonical, candidate (worked examples only) or explicit.
    #[arg(long)]
    decomposition: Option<String>,
    /// Signal CSV holding the columns named by explicit pairs.
    #[arg(long)]
    signals: Option<PathBuf>,
    /// Column of the signal CSV holding the target quantity.
    #[arg(long)]
    target: Option<String>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    trim: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairSpec {
    #[serde(default)]
    pub label: Option<String>,
    pub c1: String,
    pub c2: String,
    pub gamma: f64,
    #[serde(default = "forward")]
    pub orientation: Orientation,
}

fn forward() -> Orientation {
    Orientation::Forward
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub out: PathBuf,
    pub lagrangian: Option<String>,
    pub alpha: f64,
    pub beta: f64,
    pub scheme: String,
    pub path: Option<PathBuf>,
    pub generator: Option<String>,
    pub generator_scale: f64,
    pub decomposition: String,
    pub pairs: Vec<PairSpec>,
    pub signals: Option<PathBuf>,
    pub target: Option<String>,
    pub tol: f64,
    pub trim: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            out: PathBuf::from("out"),
            lagrangian: None,
            alpha: 1.0,
            beta: 1.0,
            scheme: "gl".into(),
            path: None,
            generator: None,
            generator_scale: 1.0,
            decomposition: "canonical".into(),
            pairs: Vec::new(),
            signals: None,
            target: None,
            tol: 5e-2,
            trim: 0.1,
        }
    }
}

fn explicit(cfg: &VerifyConfig, quantity: &SampledSignal) -> CliResult<(Decomposition, SampledSignal)> {
    if cfg.pairs.is_empty() {
        return Err(config("an explicit decomposition needs a non-empty `pairs` list"));
    }
    let file = require(&cfg.signals, "signals")?;
    let (grid, names, signals) = read_csv(&file)?;
    grid.ensure_same(quantity.grid()).map_err(config)?;
    let column = |name: &str| -> CliResult<SampledSignal> {
        names
            .iter()
            .position(|n| n == name)
            .map(|i| signals[i].clone())
            .ok_or_else(|| config(format!("{} has no column `{name}`", file.display())))
    };
    let mut pairs = Vec::with_capacity(cfg.pairs.len());
    for (i, spec) in cfg.pairs.iter().enumerate() {
        let gamma = FracOrder::new(spec.gamma).map_err(config)?;
        let label = spec.label.clone().unwrap_or_else(|| format!("pair{}", i + 1));
        pairs.push(Pair::new(label, column(&spec.c1)?, column(&spec.c2)?, gamma, spec.orientation));
    }
    let target = match &cfg.target {
        Some(name) => column(name)?,
        None => quantity.clone(),
    };
    Ok((Decomposition::new(pairs), target))
}

pub fn run(args: &VerifyArgs) -> CliResult<()> {
    let cfg: VerifyConfig = resolve(args.config.as_deref(), &["path", "signals", "out"], args)?;
    let name = require(&cfg.lagrangian, "lagrangian")?;
    let gen_name = require(&cfg.generator, "generator")?;
    let path_file = require(&cfg.path, "path")?;
    let scheme: Scheme = cfg.scheme.parse().map_err(config)?;
    if !(cfg.tol >= 0.0) {
        return Err(config(format!("tol must be non-negative, got {}", cfg.tol)));
    }
    if !(0.0..0.5).contains(&cfg.trim) {
        return Err(config(format!("trim must lie in [0, 0.5), got {}", cfg.trim)));
    }

    let lag = catalog::lagrangian(&name).map_err(config)?;
    let (_, _, comps) = read_csv(&path_file)?;
    let path = VectorPath::new(comps).map_err(config)?;
    if path.dim() != lag.n() {
        return Err(config(format!(
            "{} has {} signal columns, lagrangian `{name}` needs {}",
            path_file.display(),
            path.dim(),
            lag.n()
        )));
    }
    let gen = catalog::generator(&gen_name, lag.n())
        .map_err(config)?
        .scaled(cfg.generator_scale);
    let prob = FracProblem::with_path_boundary(lag.clone(), cfg.alpha, cfg.beta, &path)
        .and_then(|p| p.with_scheme(scheme))
        .map_err(config)?;
    let quantity = noether_quantity(&prob, &path, &gen).map_err(numerical)?;

    let (dec, target) = match cfg.decomposition.as_str() {
        "canonical" => (noether_decomposition(&prob, &path, &gen).map_err(numerical)?, quantity.clone()),
        "candidate" => {
            let (id, order) = match name.as_str() {
                "example1" => (ExampleId::One, cfg.alpha),
                "example2" => (ExampleId::Two, cfg.beta),
                other => return Err(config(format!("no candidate decomposition for lagrangian `{other}`"))),
            };
            let mut fixture = ExampleFixture::new(id, order).map_err(config)?;
            fixture.generator = gen.clone();
            (fixture.candidate_decomposition(&path).map_err(numerical)?, quantity.clone())
        }
        "explicit" => explicit(&cfg, &quantity)?,
        other => {
            return Err(config(format!(
                "unknown decomposition `{other}`; expected canonical, candidate or explicit"
            )))
        }
    };
    let report = verify_fractional_conserved_with(&dec, &target, cfg.tol, cfg.trim, scheme).map_err(config)?;

    let out = Outputs::create(&cfg.out)?;
    out.json("config.json", &cfg)?;
    out.json("report.json", &report)?;
    let defects = dec
        .pairs
        .iter()
        .map(|p| p.defect_signal(scheme))
        .collect::<Result<Vec<_>, _>>()
        .map_err(numerical)?;
    let mut columns: Vec<(&str, &SampledSignal)> = vec![("quantity", &target)];
    columns.extend(dec.pairs.iter().map(|p| p.label.as_str()).zip(defects.iter()));
    out.signals("defects.csv", &columns)?;

    for p in &report.pairs {
        println!("{:<40} window defect {:e}", p.label, p.defect_window);
    }
    for u in &report.unverified {
        println!("{u:<40} unverified");
    }
    println!("reconstruction error {:e}", report.reconstruction_error);
    if report.pass {
        println!("PASS (tolerance {})", cfg.tol);
        Ok(())
    } else {
        Err(CliError::Verification(format!(
            "conservation check failed: largest window defect {:e}, reconstruction error {:e}, tolerance {}",
            report.max_defect(),
            report.reconstruction_error,
            cfg.tol
        )))
    }
}
