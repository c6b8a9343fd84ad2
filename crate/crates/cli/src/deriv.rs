use std::path::PathBuf;

use clap::Args;
use serde::{Deserialize, Serialize};

use fracvar::catalog::Profile;
use fracvar::fracdiff::power_rule_exact;
use fracvar::{FracOperator, FracOrder, Grid, SampledSignal, Scheme, Side};

use crate::config::{read_csv, require, resolve, Outputs};
use crate::error::{config, numerical, CliResult};

#[derive(Debug, Args, Serialize)]
pub struct DerivArgs {
    /// JSON file with any of the settings below.
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
    /// Output directory (default: $FRACVAR_OUT_DIR, else ./out).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Built-in profile: pow:u, rpow:u, sin, rsin, cos or const:c.
    #[arg(long)]
    profile: Option<String>,
    /// Signal CSV (`t,v1,...`) instead of a profile.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Column of the input CSV to differentiate (default: the first).
    #[arg(long)]
    column: Option<String>,
    /// Order; negative values give fractional integrals.
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    /// left or right.
    #[arg(long)]
    side: Option<String>,
    /// gl or l1.
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    b: Option<f64>,
    /// Number of grid intervals.
    #[arg(long)]
    n: Option<usize>,
    /// Error table against the power rule, `power:p,u`.
    #[arg(long)]
    oracle: Option<String>,
    /// Fraction of the interval excluded at each end of the oracle window.
    #[arg(long)]
    trim: Option<f64>,
    /// Also write the operator matrix to operator.csv.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    dump_operator: Option<bool>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DerivConfig {
    pub out: PathBuf,
    pub profile: Option<String>,
    pub input: Option<PathBuf>,
    pub column: Option<String>,
    pub alpha: Option<f64>,
    pub side: String,
    pub scheme: String,
    pub a: f64,
    pub b: f64,
    pub n: usize,
    pub oracle: Option<String>,
    pub trim: f64,
    pub dump_operator: bool,
}

impl Default for DerivConfig {
    fn default() -> Self {
        DerivConfig {
            out: PathBuf::from("out"),
            profile: None,
            input: None,
            column: None,
            alpha: None,
            side: "left".into(),
            scheme: "gl".into(),
            a: 0.0,
            b: 1.0,
            n: 1024,
            oracle: None,
            trim: 0.1,
            dump_operator: false,
        }
    }
}

fn parse_oracle(spec: &str) -> CliResult<(f64, f64)> {
    let bad = || config(format!("oracle must look like `power:p,u`, got `{spec}`"));
    let rest = spec.strip_prefix("power:").ok_or_else(bad)?;
    let (p, u) = rest.split_once(',').ok_or_else(bad)?;
    let p: f64 = p.trim().parse().map_err(|_| bad())?;
    let u: f64 = u.trim().parse().map_err(|_| bad())?;
    if !(p > 0.0) || !(u > -1.0) {
        return Err(config(format!("oracle needs p > 0 and u > -1, got p = {p}, u = {u}")));
    }
    Ok((p, u))
}

/// Rows `(N, max relative error on the trim window, order vs previous N)`
/// for grids `n/8, n/4, n/2, n`.
fn oracle_table(p: f64, u: f64, scheme: Scheme, a: f64, b: f64, n: usize, trim: f64) -> CliResult<Vec<Vec<f64>>> {
    let order = FracOrder::new(p).map_err(config)?;
    let mut ns: Vec<usize> = [n / 8, n / 4, n / 2, n].into_iter().filter(|&m| m >= 4).collect();
    ns.dedup();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for m in ns {
        let g = Grid::new(a, b, m).map_err(config)?;
        let f = SampledSignal::sample(&g, |t| (t - a).powf(u));
        let d = FracOperator::build(order, Side::Left, scheme, &g)
            .map_err(config)?
            .apply(&f)
            .map_err(numerical)?;
        let (lo, hi) = g.window(trim, trim);
        let mut err: f64 = 0.0;
        for k in lo.max(1)..=hi {
            let exact = power_rule_exact(p, u, a, g.node(k)).map_err(numerical)?;
            if exact != 0.0 && d.is_valid(k) {
                err = err.max(((d.values()[k] - exact) / exact).abs());
            }
        }
        let rate = match rows.last() {
            Some(prev) => (prev[1] / err).ln() / (m as f64 / prev[0]).ln(),
            None => f64::NAN,
        };
        rows.push(vec![m as f64, err, rate]);
    }
    Ok(rows)
}

pub fn run(args: &DerivArgs) -> CliResult<()> {
    let cfg: DerivConfig = resolve(args.config.as_deref(), &["input", "out"], args)?;
    let alpha = require(&cfg.alpha, "alpha")?;
    let side: Side = cfg.side.parse().map_err(config)?;
    let scheme: Scheme = cfg.scheme.parse().map_err(config)?;
    let order = FracOrder::new(alpha).map_err(config)?;
    if !(0.0..0.5).contains(&cfg.trim) {
        return Err(config(format!("trim must lie in [0, 0.5), got {}", cfg.trim)));
    }
    let oracle = cfg.oracle.as_deref().map(parse_oracle).transpose()?;
    if oracle.is_some() && side != Side::Left {
        return Err(config("the power-rule oracle applies to left operators only"));
    }

    let (signal, profile) = match (&cfg.profile, &cfg.input) {
        (Some(p), None) => {
            let profile: Profile = p.parse().map_err(config)?;
            let g = Grid::new(cfg.a, cfg.b, cfg.n).map_err(config)?;
            (profile.sample(&g), Some(profile))
        }
        (None, Some(path)) => {
            let (_, names, signals) = read_csv(path)?;
            let idx = match &cfg.column {
                None => 0,
                Some(c) => names
                    .iter()
                    .position(|n| n == c)
                    .ok_or_else(|| config(format!("{} has no column `{c}`", path.display())))?,
            };
            (signals[idx].clone(), None)
        }
        (Some(_), Some(_)) => return Err(config("give either a profile or an input file, not both")),
        (None, None) => return Err(config("missing signal: give --profile or --input")),
    };
    let grid = *signal.grid();
    let op = FracOperator::build(order, side, scheme, &grid).map_err(config)?;
    let d = op.apply(&signal).map_err(numerical)?;

    let out = Outputs::create(&cfg.out)?;
    out.json("config.json", &cfg)?;
    let exact = match (profile, side) {
        (Some(p), Side::Left) if p.exact_left_derivative(alpha, grid.a(), grid.b()).is_some() => {
            let values = grid
                .nodes()
                .map(|t| {
                    if t > grid.a() {
                        p.exact_left_derivative(alpha, grid.a(), t).unwrap_or(f64::NAN)
                    } else {
                        f64::NAN
                    }
                })
                .collect();
            Some(SampledSignal::from_values(&grid, values).map_err(numerical)?)
        }
        _ => None,
    };
    let mut columns = vec![("f", &signal), ("derivative", &d)];
    if let Some(e) = &exact {
        columns.push(("exact", e));
    }
    out.signals("derivative.csv", &columns)?;
    if cfg.dump_operator {
        let mut buf = Vec::new();
        op.write_csv(&mut buf).map_err(config)?;
        out.text("operator.csv", &String::from_utf8(buf).expect("csv output is UTF-8"))?;
    }
    println!(
        "order {alpha} {} derivative on {} nodes ({} valid) -> {}",
        cfg.side,
        grid.len(),
        d.valid_count(),
        out.file("derivative.csv").display()
    );
    if let Some((p, u)) = oracle {
        let rows = oracle_table(p, u, scheme, grid.a(), grid.b(), grid.n(), cfg.trim)?;
        out.table("oracle.csv", &["n", "max_rel_err", "order"], &rows)?;
        println!("{:>8} {:>14} {:>8}", "n", "max_rel_err", "order");
        for r in &rows {
            println!("{:>8} {:>14.6e} {:>8.3}", r[0], r[1], r[2]);
        }
    }
    Ok(())
}
