use serde::{Deserialize, Serialize};

use super::{el_residual, FracProblem};
use crate::error::{domain, Error, Result};
use crate::grid::{SampledSignal, VectorPath};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Residual sup-norm target; `None` means `1e-8 * N`.
    pub tol: Option<f64>,
    pub max_iter: usize,
    /// Initial Levenberg parameter.
    pub damping: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol: None,
            max_iter: 100,
            damping: 1e-3,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(tol) = self.tol {
            if !(tol > 0.0 && tol.is_finite()) {
                return domain(format!("tolerance must be positive, got {tol}"));
            }
        }
        if self.max_iter == 0 {
            return domain("max_iter must be at least 1");
        }
        if !(self.damping >= 0.0 && self.damping.is_finite()) {
            return domain(format!("damping must be non-negative, got {}", self.damping));
        }
        Ok(())
    }

    pub fn resolved_tol(&self, n: usize) -> f64 {
        self.tol.unwrap_or(1e-8 * n as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub iteration: usize,
    pub residual_norm: f64,
    pub damping: f64,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub path: VectorPath,
    pub trace: Vec<TraceEntry>,
    pub residual_norm: f64,
    pub iterations: usize,
}

const MAX_DAMPING: f64 = 1e12;

/// Residual map on the interior unknowns, indexed node-major.
struct Collocation<'a> {
    prob: &'a FracProblem,
    template: Vec<Vec<f64>>,
    dim: usize,
    n: usize,
}

impl Collocation<'_> {
    fn unknowns(&self) -> usize {
        (self.n - 1) * self.dim
    }

    fn path(&self, x: &[f64]) -> Result<VectorPath> {
        let grid = self.prob.grid();
        let mut comps = Vec::with_capacity(self.dim);
        for c in 0..self.dim {
            let mut v = self.template[c].clone();
            for k in 1..self.n {
                v[k] = x[(k - 1) * self.dim + c];
            }
            comps.push(SampledSignal::from_values(grid, v)?);
        }
        VectorPath::new(comps)
    }

    fn residual(&self, x: &[f64]) -> Result<Vec<f64>> {
        let r = el_residual(self.prob, &self.path(x)?)?;
        let mut out = vec![0.0; self.unknowns()];
        for k in 1..self.n {
            for c in 0..self.dim {
                let v = r.component(c).values()[k];
                if !v.is_finite() {
                    return domain(format!(
                        "residual of component {c} is undefined at interior node {k}"
                    ));
                }
                out[(k - 1) * self.dim + c] = v;
            }
        }
        Ok(out)
    }
}

/// Band matrix storing entries with `|i - j| <= bw`.
struct Band {
    m: usize,
    bw: usize,
    data: Vec<f64>,
}

impl Band {
    fn new(m: usize, bw: usize) -> Self {
        Band {
            m,
            bw,
            data: vec![0.0; m * (2 * bw + 1)],
        }
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        i * (2 * self.bw + 1) + (j + self.bw - i)
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> f64 {
        if i.abs_diff(j) > self.bw {
            0.0
        } else {
            self.data[self.idx(i, j)]
        }
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, v: f64) {
        let id = self.idx(i, j);
        self.data[id] = v;
    }

    fn cols(&self, i: usize) -> std::ops::Range<usize> {
        i.saturating_sub(self.bw)..(i + self.bw + 1).min(self.m)
    }
}

/// Lower band of a symmetric positive definite matrix, factored in place.
struct SymBand {
    m: usize,
    bw: usize,
    /// `data[i][d]` holds entry `(i, i - d)`.
    data: Vec<f64>,
}

impl SymBand {
    fn at(&self, i: usize, d: usize) -> f64 {
        self.data[i * (self.bw + 1) + d]
    }

    fn normal_equations(j: &Band) -> Self {
        let m = j.m;
        let bw = (2 * j.bw).min(m.saturating_sub(1));
        let mut data = vec![0.0; m * (bw + 1)];
        for i in 0..m {
            for d in 0..=bw.min(i) {
                let c = i - d;
                let lo = i.saturating_sub(j.bw);
                let hi = (c + j.bw + 1).min(m);
                let mut s = 0.0;
                for r in lo..hi {
                    s += j.get(r, i) * j.get(r, c);
                }
                data[i * (bw + 1) + d] = s;
            }
        }
        SymBand { m, bw, data }
    }

    fn damped(&self, lambda: f64, floor: f64) -> Self {
        let mut out = SymBand {
            m: self.m,
            bw: self.bw,
            data: self.data.clone(),
        };
        for i in 0..self.m {
            out.data[i * (self.bw + 1)] += lambda * self.at(i, 0) + floor;
        }
        out
    }

    /// Cholesky factorization; `false` when the matrix is not positive definite.
    fn factor(&mut self) -> bool {
        let w = self.bw + 1;
        for i in 0..self.m {
            for d in (0..=self.bw.min(i)).rev() {
                let c = i - d;
                let mut s = self.data[i * w + d];
                let lo = i.saturating_sub(self.bw).max(c.saturating_sub(self.bw));
                for k in lo..c {
                    s -= self.data[i * w + (i - k)] * self.data[c * w + (c - k)];
                }
                if d == 0 {
                    if !(s > 0.0) || !s.is_finite() {
                        return false;
                    }
                    self.data[i * w] = s.sqrt();
                } else {
                    self.data[i * w + d] = s / self.data[c * w];
                }
            }
        }
        true
    }

    fn solve(&self, rhs: &mut [f64]) {
        let w = self.bw + 1;
        for i in 0..self.m {
            let mut s = rhs[i];
            for k in i.saturating_sub(self.bw)..i {
                s -= self.data[i * w + (i - k)] * rhs[k];
            }
            rhs[i] = s / self.data[i * w];
        }
        for i in (0..self.m).rev() {
            let mut s = rhs[i];
            for k in (i + 1)..(i + self.bw + 1).min(self.m) {
                s -= self.data[k * w + (k - i)] * rhs[k];
            }
            rhs[i] = s / self.data[i * w];
        }
    }
}

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn sum_sq(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

/// Forward-difference Jacobian. Node `k'` only influences residual rows at
/// nodes within `reach` of it, so nodes `2 * reach + 1` apart are perturbed
/// together.
fn jacobian(col: &Collocation, x: &[f64], f0: &[f64], reach: usize) -> Result<Band> {
    let dim = col.dim;
    let nodes = col.n - 1;
    let m = col.unknowns();
    let bw = ((reach + 1) * dim).min(m - 1);
    let mut jac = Band::new(m, bw);
    let stride = (2 * reach + 1).min(nodes);
    let mut xp = x.to_vec();
    for offset in 0..stride {
        for c in 0..dim {
            let group: Vec<usize> = (offset..nodes).step_by(stride).collect();
            let mut steps = Vec::with_capacity(group.len());
            for &node in &group {
                let j = node * dim + c;
                let step = 1e-7 * (1.0 + x[j].abs());
                xp[j] = x[j] + step;
                steps.push(step);
            }
            let f1 = col.residual(&xp)?;
            for (&node, &step) in group.iter().zip(&steps) {
                let j = node * dim + c;
                xp[j] = x[j];
                let lo = node.saturating_sub(reach);
                let hi = (node + reach + 1).min(nodes);
                for rn in lo..hi {
                    for rc in 0..dim {
                        let i = rn * dim + rc;
                        if i.abs_diff(j) <= bw {
                            jac.set(i, j, (f1[i] - f0[i]) / step);
                        }
                    }
                }
            }
        }
    }
    Ok(jac)
}

/// Damped Gauss–Newton on the interior Euler–Lagrange residuals. Boundary
/// node values of `q0` are copied unchanged.
pub fn solve_extremal(prob: &FracProblem, q0: &VectorPath, cfg: &SolverConfig) -> Result<Solution> {
    cfg.validate()?;
    prob.check_path(q0)?;
    prob.check_boundary(q0)?;
    let n = prob.grid().n();
    let dim = q0.dim();
    let col = Collocation {
        prob,
        template: q0.components().iter().map(|c| c.values().to_vec()).collect(),
        dim,
        n,
    };
    let tol = cfg.resolved_tol(n);
    let mut x = vec![0.0; col.unknowns()];
    for k in 1..n {
        for c in 0..dim {
            let v = q0.component(c).values()[k];
            if !v.is_finite() {
                return domain(format!("initial path is masked at interior node {k}"));
            }
            x[(k - 1) * dim + c] = v;
        }
    }

    let reach = {
        let r = |o| prob.operator(o, crate::fracdiff::Side::Left).map(|op| op.reach());
        let inner = r(prob.alpha())?.max(r(prob.beta())?);
        2 * inner
    };

    let mut f = col.residual(&x)?;
    let mut norm = sup_norm(&f);
    let mut lambda = cfg.damping;
    let mut trace = vec![TraceEntry {
        iteration: 0,
        residual_norm: norm,
        damping: lambda,
    }];
    let mut iterations = 0;
    while norm > tol {
        if iterations == cfg.max_iter {
            return Err(Error::NonConvergence {
                iterations,
                residual: norm,
                trace,
            });
        }
        iterations += 1;
        let jac = jacobian(&col, &x, &f, reach)?;
        let normal = SymBand::normal_equations(&jac);
        let max_diag = (0..normal.m).fold(0.0f64, |m, i| m.max(normal.at(i, 0)));
        let floor = 1e-14 * max_diag.max(1e-300);
        let mut grad = vec![0.0; col.unknowns()];
        for (j, g) in grad.iter_mut().enumerate() {
            let mut s = 0.0;
            for i in jac.cols(j) {
                s -= jac.get(i, j) * f[i];
            }
            *g = s;
        }
        let ss = sum_sq(&f);
        loop {
            let mut sys = normal.damped(lambda, floor);
            if !sys.factor() {
                lambda = if lambda == 0.0 { 1e-12 } else { lambda * 10.0 };
                if lambda > MAX_DAMPING {
                    return Err(Error::Singular { damping: lambda });
                }
                continue;
            }
            let mut step = grad.clone();
            sys.solve(&mut step);
            let xn: Vec<f64> = x.iter().zip(&step).map(|(a, b)| a + b).collect();
            let accepted = match col.residual(&xn) {
                Ok(fnew) if sum_sq(&fnew) < ss => Some((xn, fnew)),
                _ => None,
            };
            if let Some((xn, fnew)) = accepted {
                x = xn;
                f = fnew;
                norm = sup_norm(&f);
                lambda /= 10.0;
                break;
            }
            lambda = if lambda == 0.0 { 1e-12 } else { lambda * 10.0 };
            if lambda > MAX_DAMPING {
                return Err(Error::NonConvergence {
                    iterations,
                    residual: norm,
                    trace,
                });
            }
        }
        trace.push(TraceEntry {
            iteration: iterations,
            residual_norm: norm,
            damping: lambda,
        });
    }
    Ok(Solution {
        path: col.path(&x)?,
        trace,
        residual_norm: norm,
        iterations,
    })
}
