use std::path::PathBuf;

use clap::Args;
use serde::{Deserialize, Serialize};

use fracvar::catalog::Profile;
use fracvar::examples::{
    convergence_table, example1_family, example2_extremal, example2_seed, ExampleFixture, ExampleId,
    EXAMPLE1_UPSILON,
};
use fracvar::noether::classical_conservation_defect;
use fracvar::varproblem::el_residual;
use fracvar::{Grid, SampledSignal};

use crate::config::{require, resolve, Outputs};
use crate::error::{config, numerical, CliResult};

#[derive(Debug, Args, Serialize)]
pub struct ExampleArgs {
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worked example: 1 or 2.
    #[arg(long)]
    id: Option<u32>,
    /// Order α (example 1) or β (example 2).
    #[arg(long)]
    order: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    trim: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    /// Profile for q₁ = q₂ (example 1) or seed for q₁ (example 2).
    #[arg(long)]
    profile: Option<String>,
    /// Grid sizes of the convergence table, comma separated.
    #[arg(long, value_delimiter = ',')]
    ns: Option<Vec<usize>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExampleConfig {
    pub out: PathBuf,
    pub id: Option<u32>,
    pub order: f64,
    pub n: usize,
    pub trim: f64,
    pub tol: f64,
    pub profile: Option<String>,
    pub ns: Vec<usize>,
}

impl Default for ExampleConfig {
    fn default() -> Self {
        ExampleConfig {
            out: PathBuf::from("out"),
            id: None,
            order: 0.5,
            n: 1024,
            trim: 0.1,
            tol: 5e-2,
            profile: None,
            ns: vec![256, 512, 1024, 2048],
        }
    }
}

#[derive(Serialize)]
struct Summary {
    id: u32,
    order: f64,
    n: usize,
    /// Max-abs Euler–Lagrange residual on the trim window.
    el_residual: f64,
    /// Finite-difference defect of the stated classical quantity (order 1).
    classical_defect: Option<f64>,
    /// Example 2 only: misfit of q₁ against the seed.
    fit_error: Option<f64>,
    pass: bool,
}

pub fn run(args: &ExampleArgs) -> CliResult<()> {
    let cfg: ExampleConfig = resolve(args.config.as_deref(), &["out"], args)?;
    let number = require(&cfg.id, "id")?;
    let id = ExampleId::from_number(number).map_err(config)?;
    let fixture = ExampleFixture::new(id, cfg.order).map_err(config)?;
    if !(0.0..0.5).contains(&cfg.trim) {
        return Err(config(format!("trim must lie in [0, 0.5), got {}", cfg.trim)));
    }
    let profile: Option<Profile> = cfg.profile.as_deref().map(str::parse).transpose().map_err(config)?;
    let g = Grid::new(0.0, 1.0, cfg.n).map_err(config)?;

    let (path, fit_error) = match id {
        ExampleId::One => {
            let p = profile.unwrap_or(Profile::Pow(EXAMPLE1_UPSILON)).sample(&g);
            (example1_family(&p, cfg.order).map_err(numerical)?, None)
        }
        ExampleId::Two => {
            let seed = match profile {
                Some(p) => p.sample(&g),
                None => SampledSignal::sample(&g, example2_seed),
            };
            let ext = example2_extremal(&seed, cfg.order).map_err(numerical)?;
            (ext.path, Some(ext.fit_error))
        }
    };
    let prob = fixture.problem(&path).map_err(numerical)?;
    let (lo, hi) = g.window(cfg.trim, cfg.trim);
    let residual = el_residual(&prob, &path).map_err(numerical)?;
    let el = residual.max_abs_in(lo, hi).unwrap_or(f64::NAN);
    let quantity = fixture.expected_quantity(&path).map_err(numerical)?;
    let classical = if cfg.order == 1.0 {
        Some(fixture.classical_quantity(&path).map_err(numerical)?)
    } else {
        None
    };
    let report = fixture.verify(&path, cfg.tol, cfg.trim).map_err(numerical)?;
    let table = convergence_table(id, cfg.order, &cfg.ns, cfg.trim).map_err(numerical)?;

    let out = Outputs::create(&cfg.out)?;
    out.json("config.json", &cfg)?;
    let names: Vec<String> = (1..=path.dim()).map(|i| format!("q{i}")).collect();
    let cols: Vec<(&str, &SampledSignal)> = names.iter().map(String::as_str).zip(path.components()).collect();
    out.signals("extremal.csv", &cols)?;
    let mut cols = vec![("quantity", &quantity)];
    if let Some(c) = &classical {
        cols.push(("classical", c));
    }
    out.signals("quantity.csv", &cols)?;
    out.json("report.json", &report)?;
    let rows: Vec<Vec<f64>> = table
        .iter()
        .map(|r| vec![r.n as f64, r.el_residual, r.conservation_defect])
        .collect();
    out.table("convergence.csv", &["n", "el_residual", "conservation_defect"], &rows)?;
    let summary = Summary {
        id: number,
        order: cfg.order,
        n: cfg.n,
        el_residual: el,
        classical_defect: classical.as_ref().map(classical_conservation_defect),
        fit_error,
        pass: report.pass,
    };
    out.json("summary.json", &summary)?;

    println!("example {number} at order {}, N = {}", cfg.order, cfg.n);
    println!("  residual on window   {el:e}");
    if let Some(d) = summary.classical_defect {
        println!("  classical defect     {d:e}");
    }
    println!("  largest pair defect  {:e}", report.max_defect());
    println!("{:>8} {:>14} {:>20}", "n", "el_residual", "conservation_defect");
    for r in &table {
        println!("{:>8} {:>14.6e} {:>20.6e}", r.n, r.el_residual, r.conservation_defect);
    }
    Ok(())
}
