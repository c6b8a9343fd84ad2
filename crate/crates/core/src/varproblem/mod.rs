//! Fractional variational problems: the functional, its Euler–Lagrange
//! residual and a collocation solver for extremals.

mod lagrangian;
mod solver;

pub use lagrangian::{ClassicalLagrangian, Lagrangian, PartialFn, Partials};
pub use solver::{solve_extremal, Solution, SolverConfig, TraceEntry};

use crate::error::{domain, Result};
use crate::fracdiff::{FracOperator, FracOrder, Scheme, Side};
use crate::grid::{integrate, Grid, Quadrature, SampledSignal, VectorPath};

/// Tolerance on boundary values of candidate paths.
const BOUNDARY_TOL: f64 = 1e-12;

/// A fractional variational problem with fixed endpoints.
///
/// A `NaN` boundary entry leaves that endpoint unconstrained; it is used for
/// components whose extremals are singular at the endpoint.
#[derive(Clone)]
pub struct FracProblem {
    lagrangian: Lagrangian,
    alpha: FracOrder,
    beta: FracOrder,
    grid: Grid,
    qa: Vec<f64>,
    qb: Vec<f64>,
    scheme: Scheme,
}

/// Path values together with both one-sided derivatives of every component.
#[derive(Debug, Clone)]
pub struct Derivatives {
    pub left: Vec<SampledSignal>,
    pub right: Vec<SampledSignal>,
}

/// The three partial derivatives of `L` sampled along a path, one signal per
/// component each.
#[derive(Debug, Clone)]
pub struct PartialSignals {
    pub dq: Vec<SampledSignal>,
    pub ddl: Vec<SampledSignal>,
    pub ddr: Vec<SampledSignal>,
}

impl FracProblem {
    pub fn new(
        lagrangian: Lagrangian,
        alpha: f64,
        beta: f64,
        grid: Grid,
        qa: Vec<f64>,
        qb: Vec<f64>,
    ) -> Result<Self> {
        let alpha = FracOrder::variational(alpha)?;
        let beta = FracOrder::variational(beta)?;
        let n = lagrangian.n();
        if qa.len() != n || qb.len() != n {
            return domain(format!(
                "boundary vectors must have {n} entries, got {} and {}",
                qa.len(),
                qb.len()
            ));
        }
        if qa.iter().chain(&qb).any(|v| v.is_infinite()) {
            return domain("boundary values must be finite or NaN (free)");
        }
        Ok(FracProblem {
            lagrangian,
            alpha,
            beta,
            grid,
            qa,
            qb,
            scheme: Scheme::Gl,
        })
    }

    /// Problem whose boundary values are read off an existing path; masked
    /// endpoint values become free.
    pub fn with_path_boundary(
        lagrangian: Lagrangian,
        alpha: f64,
        beta: f64,
        path: &VectorPath,
    ) -> Result<Self> {
        let n = path.grid().n();
        let qa = path.components().iter().map(|c| c.values()[0]).collect();
        let qb = path.components().iter().map(|c| c.values()[n]).collect();
        Self::new(lagrangian, alpha, beta, *path.grid(), qa, qb)
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Result<Self> {
        if scheme == Scheme::L1 && (self.alpha.value() >= 1.0 || self.beta.value() >= 1.0) {
            return domain("the L1 scheme needs both orders below 1");
        }
        self.scheme = scheme;
        Ok(self)
    }

    pub fn lagrangian(&self) -> &Lagrangian {
        &self.lagrangian
    }

    pub fn alpha(&self) -> FracOrder {
        self.alpha
    }

    pub fn beta(&self) -> FracOrder {
        self.beta
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn boundary(&self) -> (&[f64], &[f64]) {
        (&self.qa, &self.qb)
    }

    pub fn operator(&self, order: FracOrder, side: Side) -> Result<FracOperator> {
        FracOperator::build(order, side, self.scheme, &self.grid)
    }

    fn check_path(&self, q: &VectorPath) -> Result<()> {
        self.grid.ensure_same(q.grid())?;
        if q.dim() != self.lagrangian.n() {
            return domain(format!(
                "path has {} components, lagrangian expects {}",
                q.dim(),
                self.lagrangian.n()
            ));
        }
        Ok(())
    }

    fn check_boundary(&self, q: &VectorPath) -> Result<()> {
        let n = self.grid.n();
        for (c, comp) in q.components().iter().enumerate() {
            for (k, want) in [(0, self.qa[c]), (n, self.qb[c])] {
                if want.is_nan() {
                    continue;
                }
                let got = comp.values()[k];
                if !((got - want).abs() <= BOUNDARY_TOL) {
                    return domain(format!(
                        "component {c} has value {got} at node {k}, boundary requires {want}"
                    ));
                }
            }
        }
        Ok(())
    }

    /// Left derivative of order α and right derivative of order β of every
    /// component; masked inputs propagate as masked outputs.
    pub fn derivatives(&self, q: &VectorPath) -> Result<Derivatives> {
        self.check_path(q)?;
        let left = self.operator(self.alpha, Side::Left)?;
        let right = self.operator(self.beta, Side::Right)?;
        let mut dl = Vec::with_capacity(q.dim());
        let mut dr = Vec::with_capacity(q.dim());
        for comp in q.components() {
            dl.push(left.apply_masked(comp)?);
            dr.push(right.apply_masked(comp)?);
        }
        Ok(Derivatives {
            left: dl,
            right: dr,
        })
    }

    /// Samples the Lagrangian along the path; nodes where it is undefined
    /// are masked.
    pub fn lagrangian_signal(&self, q: &VectorPath, d: &Derivatives) -> Result<SampledSignal> {
        let values = (0..self.grid.len())
            .map(|k| {
                let (qk, dl, dr) = state_at(q, d, k);
                self.lagrangian.eval(self.grid.node(k), &qk, &dl, &dr)
            })
            .collect();
        SampledSignal::from_values(&self.grid, values)
    }

    pub fn partial_signals(&self, q: &VectorPath, d: &Derivatives) -> Result<PartialSignals> {
        let n = self.lagrangian.n();
        let len = self.grid.len();
        let mut dq = vec![vec![0.0; len]; n];
        let mut ddl = vec![vec![0.0; len]; n];
        let mut ddr = vec![vec![0.0; len]; n];
        for k in 0..len {
            let (qk, dl, dr) = state_at(q, d, k);
            let p = self.lagrangian.partials(self.grid.node(k), &qk, &dl, &dr)?;
            for c in 0..n {
                dq[c][k] = p.dq[c];
                ddl[c][k] = p.ddl[c];
                ddr[c][k] = p.ddr[c];
            }
        }
        let to_signals = |rows: Vec<Vec<f64>>| -> Result<Vec<SampledSignal>> {
            rows.into_iter()
                .map(|v| SampledSignal::from_values(&self.grid, v))
                .collect()
        };
        Ok(PartialSignals {
            dq: to_signals(dq)?,
            ddl: to_signals(ddl)?,
            ddr: to_signals(ddr)?,
        })
    }
}

fn state_at(q: &VectorPath, d: &Derivatives, k: usize) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let qk = q.state(k);
    let dl = d.left.iter().map(|s| s.values()[k]).collect();
    let dr = d.right.iter().map(|s| s.values()[k]).collect();
    (qk, dl, dr)
}

/// `∫_a^b L(t, q, D_left^α q, D_right^β q) dt` by the trapezoid rule over
/// the nodes where the integrand is defined.
pub fn evaluate_functional(prob: &FracProblem, q: &VectorPath) -> Result<f64> {
    Ok(evaluate_functional_detailed(prob, q)?.value)
}

/// As [`evaluate_functional`], also reporting how much of `[a, b]` was cut
/// off because the integrand is undefined at endpoint nodes.
pub fn evaluate_functional_detailed(prob: &FracProblem, q: &VectorPath) -> Result<Quadrature> {
    prob.check_path(q)?;
    prob.check_boundary(q)?;
    let d = prob.derivatives(q)?;
    let l = prob.lagrangian_signal(q, &d)?;
    integrate(&l)
}

/// Fractional Euler–Lagrange residual
/// `∂₂L + D_right^α ∂₃L + D_left^β ∂₄L`, valid on interior nodes only.
pub fn el_residual(prob: &FracProblem, q: &VectorPath) -> Result<VectorPath> {
    prob.check_path(q)?;
    let d = prob.derivatives(q)?;
    let p = prob.partial_signals(q, &d)?;
    let right = prob.operator(prob.alpha, Side::Right)?;
    let left = prob.operator(prob.beta, Side::Left)?;
    let n = prob.grid.n();
    let mut comps = Vec::with_capacity(q.dim());
    for c in 0..q.dim() {
        let r3 = right.apply_masked(&p.ddl[c])?;
        let l4 = left.apply_masked(&p.ddr[c])?;
        let mut values: Vec<f64> = (0..=n)
            .map(|k| p.dq[c].values()[k] + r3.values()[k] + l4.values()[k])
            .collect();
        values[0] = f64::NAN;
        values[n] = f64::NAN;
        comps.push(SampledSignal::from_values(&prob.grid, values)?);
    }
    VectorPath::new(comps)
}
