use std::path::PathBuf;

use clap::Args;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use fracvar::catalog::{self, Profile};
use fracvar::examples::{example1_family, example2_extremal, example2_seed, EXAMPLE1_UPSILON};
use fracvar::varproblem::{evaluate_functional, solve_extremal, FracProblem, SolverConfig};
use fracvar::{Error, Grid, SampledSignal, Scheme, VectorPath};

use crate::config::{read_csv, require, resolve, Outputs};
use crate::error::{config, numerical, CliError, CliResult};

#[derive(Debug, Args, Serialize)]
pub struct SolveArgs {
    /// Problem JSON with any of the settings below.
    #[arg(long, alias = "problem")]
    #[serde(skip)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Built-in Lagrangian: free_particle, harmonic, linear, example1, example2.
    #[arg(long)]
    lagrangian: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    b: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    scheme: Option<String>,
    /// Boundary values at a, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    qa: Option<Vec<f64>>,
    /// Boundary values at b, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    qb: Option<Vec<f64>>,
    /// Initial path: linear, fixture, csv, or comma-separated profiles.
    #[arg(long)]
    start: Option<String>,
    /// Path CSV used when start = csv.
    #[arg(long)]
    start_csv: Option<PathBuf>,
    /// Amplitude of uniform noise added to interior start values.
    #[arg(long)]
    noise: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Residual sup-norm target (default 1e-8·N).
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    damping: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveConfig {
    pub out: PathBuf,
    pub lagrangian: Option<String>,
    pub alpha: f64,
    pub beta: f64,
    pub a: f64,
    pub b: f64,
    pub n: usize,
    pub scheme: String,
    pub qa: Option<Vec<f64>>,
    pub qb: Option<Vec<f64>>,
    pub start: String,
    pub start_csv: Option<PathBuf>,
    pub noise: f64,
    pub seed: u64,
    pub tol: Option<f64>,
    pub max_iter: usize,
    pub damping: f64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        let solver = SolverConfig::default();
        SolveConfig {
            out: PathBuf::from("out"),
            lagrangian: None,
            alpha: 1.0,
            beta: 1.0,
            a: 0.0,
            b: 1.0,
            n: 256,
            scheme: "gl".into(),
            qa: None,
            qb: None,
            start: "linear".into(),
            start_csv: None,
            noise: 0.0,
            seed: 0,
            tol: solver.tol,
            max_iter: solver.max_iter,
            damping: solver.damping,
        }
    }
}

#[derive(Serialize)]
struct Summary {
    iterations: usize,
    residual_norm: f64,
    tol: f64,
    functional: f64,
}

fn boundary(values: &Option<Vec<f64>>, dim: usize, key: &str) -> CliResult<Option<Vec<f64>>> {
    match values {
        Some(v) if v.len() != dim => Err(config(format!("`{key}` needs {dim} values, got {}", v.len()))),
        other => Ok(other.clone()),
    }
}

fn initial_path(cfg: &mut SolveConfig, name: &str, dim: usize) -> CliResult<VectorPath> {
    match cfg.start.as_str() {
        "linear" => {
            let g = Grid::new(cfg.a, cfg.b, cfg.n).map_err(config)?;
            let (qa, qb) = match (&cfg.qa, &cfg.qb) {
                (Some(qa), Some(qb)) => (qa.clone(), qb.clone()),
                _ => return Err(config("a linear start needs both `qa` and `qb`")),
            };
            if qa.iter().chain(&qb).any(|v| !v.is_finite()) {
                return Err(config("a linear start needs finite boundary values"));
            }
            let (a, h) = (cfg.a, cfg.b - cfg.a);
            let comps = (0..dim)
                .map(|i| {
                    let (l, r) = (qa[i], qb[i]);
                    SampledSignal::sample(&g, move |t| l + (r - l) * (t - a) / h)
                })
                .collect();
            VectorPath::new(comps).map_err(config)
        }
        "fixture" => {
            let g = Grid::new(cfg.a, cfg.b, cfg.n).map_err(config)?;
            match name {
                "example1" => {
                    let profile = Profile::Pow(EXAMPLE1_UPSILON).sample(&g);
                    example1_family(&profile, cfg.alpha).map_err(numerical)
                }
                "example2" => {
                    let seed = SampledSignal::sample(&g, example2_seed);
                    Ok(example2_extremal(&seed, cfg.beta).map_err(numerical)?.path)
                }
                other => Err(config(format!("no fixture start for lagrangian `{other}`"))),
            }
        }
        "csv" => {
            let path = require(&cfg.start_csv, "start_csv")?;
            let (g, _, comps) = read_csv(&path)?;
            if comps.len() != dim {
                return Err(config(format!(
                    "{} has {} signal columns, the lagrangian needs {dim}",
                    path.display(),
                    comps.len()
                )));
            }
            cfg.a = g.a();
            cfg.b = g.b();
            cfg.n = g.n();
            VectorPath::new(comps).map_err(config)
        }
        list => {
            let g = Grid::new(cfg.a, cfg.b, cfg.n).map_err(config)?;
            let profiles: Vec<Profile> = list.split(',').map(|s| s.trim().parse()).collect::<Result<_, _>>().map_err(config)?;
            if profiles.len() != dim {
                return Err(config(format!("start lists {} profiles, the lagrangian needs {dim}", profiles.len())));
            }
            VectorPath::new(profiles.iter().map(|p| p.sample(&g)).collect()).map_err(config)
        }
    }
}

/// Pins the boundary nodes to `qa`/`qb` and perturbs the interior.
fn prepare_start(path: VectorPath, qa: &[f64], qb: &[f64], noise: f64, seed: u64) -> CliResult<VectorPath> {
    let g = *path.grid();
    let n = g.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let comps = path
        .into_components()
        .into_iter()
        .enumerate()
        .map(|(i, c)| {
            let mut v = c.values().to_vec();
            v[0] = qa[i];
            v[n] = qb[i];
            if noise > 0.0 {
                for x in v.iter_mut().take(n).skip(1) {
                    *x += noise * rng.random_range(-1.0..1.0);
                }
            }
            SampledSignal::from_values(&g, v)
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(numerical)?;
    VectorPath::new(comps).map_err(numerical)
}

fn named(prefix: &str, dim: usize) -> Vec<String> {
    (1..=dim).map(|i| format!("{prefix}{i}")).collect()
}

pub fn run(args: &SolveArgs) -> CliResult<()> {
    let mut cfg: SolveConfig = resolve(args.config.as_deref(), &["start_csv", "out"], args)?;
    let name = require(&cfg.lagrangian, "lagrangian")?;
    let lag = catalog::lagrangian(&name).map_err(config)?;
    let dim = lag.n();
    let scheme: Scheme = cfg.scheme.parse().map_err(config)?;
    let solver = SolverConfig {
        tol: cfg.tol,
        max_iter: cfg.max_iter,
        damping: cfg.damping,
    };
    solver.validate().map_err(config)?;
    if !(cfg.noise >= 0.0) {
        return Err(config(format!("noise must be non-negative, got {}", cfg.noise)));
    }
    let qa = boundary(&cfg.qa, dim, "qa")?;
    let qb = boundary(&cfg.qb, dim, "qb")?;

    let start = initial_path(&mut cfg, &name, dim)?;
    let n = start.grid().n();
    let qa = qa.unwrap_or_else(|| start.components().iter().map(|c| c.values()[0]).collect());
    let qb = qb.unwrap_or_else(|| start.components().iter().map(|c| c.values()[n]).collect());
    let start = prepare_start(start, &qa, &qb, cfg.noise, cfg.seed)?;
    let prob = FracProblem::new(lag, cfg.alpha, cfg.beta, *start.grid(), qa, qb)
        .and_then(|p| p.with_scheme(scheme))
        .map_err(config)?;

    let out = Outputs::create(&cfg.out)?;
    out.json("config.json", &cfg)?;
    let trace_rows = |trace: &[fracvar::varproblem::TraceEntry]| -> Vec<Vec<f64>> {
        trace
            .iter()
            .map(|e| vec![e.iteration as f64, e.residual_norm, e.damping])
            .collect()
    };
    let trace_header = ["iteration", "residual_norm", "damping"];

    let sol = match solve_extremal(&prob, &start, &solver) {
        Ok(sol) => sol,
        Err(Error::NonConvergence {
            iterations,
            residual,
            trace,
        }) => {
            out.table("trace.csv", &trace_header, &trace_rows(&trace))?;
            return Err(CliError::Numerical(format!(
                "solver did not converge after {iterations} iterations (residual sup-norm {residual}); trace kept in {}",
                out.file("trace.csv").display()
            )));
        }
        Err(e) => return Err(numerical(e)),
    };
    out.table("trace.csv", &trace_header, &trace_rows(&sol.trace))?;

    let q_names = named("q", dim);
    let cols: Vec<(&str, &SampledSignal)> = q_names.iter().map(String::as_str).zip(sol.path.components()).collect();
    out.signals("extremal.csv", &cols)?;
    let residual = fracvar::varproblem::el_residual(&prob, &sol.path).map_err(numerical)?;
    let r_names = named("r", dim);
    let cols: Vec<(&str, &SampledSignal)> = r_names.iter().map(String::as_str).zip(residual.components()).collect();
    out.signals("residual.csv", &cols)?;
    let summary = Summary {
        iterations: sol.iterations,
        residual_norm: sol.residual_norm,
        tol: solver.resolved_tol(n),
        functional: evaluate_functional(&prob, &sol.path).unwrap_or(f64::NAN),
    };
    out.json("summary.json", &summary)?;
    println!(
        "converged in {} iterations, residual sup-norm {:e} -> {}",
        sol.iterations,
        sol.residual_norm,
        out.file("extremal.csv").display()
    );
    Ok(())
}
