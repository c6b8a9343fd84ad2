//! The two worked fractional examples and the classical energy check, with
//! hand-derived extremal families used as oracles.
//!
//! Example 1 (n = 3, left derivatives only):
//! `L = (D_l q₁) q₂ - (D_l q₂) q₁ - (q₁ - q₂) q₃`, generator
//! `(τ, ξ) = (-t, 0, 0, q₃)`. Its Euler–Lagrange equations reduce to
//! `q₁ = q₂` and `q₃ = D_right^α q - D_left^α q`.
//!
//! Example 2 (n = 4, right derivatives only):
//! `L = -((D_r q₁) q₂ + (D_r q₃) q₄ - q₄²/2 + q₂ q₃)`, generator
//! `(τ, ξ) = (2t/3, q₁, -q₂, q₃/3, -q₄/3)`. Its Euler–Lagrange equations are
//! `D_left^β q₂ = 0`, `q₃ = -D_right^β q₁`, `q₄ = D_right^β q₃`,
//! `D_left^β q₄ = -q₂`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::fracdiff::{power_rule_exact, right_power_derivative, FracOperator, FracOrder, Scheme, Side};
use crate::grid::{Grid, SampledSignal, VectorPath};
use crate::noether::{
    classical_conservation_defect, time_change_bracket, verify_fractional_conserved_with,
    velocity, ConservationReport, Decomposition, Generator, Orientation, Pair,
};
use crate::varproblem::{el_residual, ClassicalLagrangian, FracProblem, Lagrangian};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ExampleId {
    One,
    Two,
}

impl ExampleId {
    pub fn from_number(id: u32) -> Result<Self> {
        match id {
            1 => Ok(ExampleId::One),
            2 => Ok(ExampleId::Two),
            other => domain(format!("unknown example id {other}; expected 1 or 2")),
        }
    }
}

/// One of the two worked examples at a given order, with `c = 1`.
#[derive(Debug, Clone)]
pub struct ExampleFixture {
    pub id: ExampleId,
    pub order: FracOrder,
    pub lagrangian: Lagrangian,
    pub generator: Generator,
}

pub fn example1_lagrangian() -> Result<Lagrangian> {
    Lagrangian::new(3, |_, q, dl, _| dl[0] * q[1] - dl[1] * q[0] - (q[0] - q[1]) * q[2])?
        .with_partials(
            Arc::new(|_, q, dl, _| vec![-dl[1] - q[2], dl[0] + q[2], -(q[0] - q[1])]),
            Arc::new(|_, q, _, _| vec![q[1], -q[0], 0.0]),
            Arc::new(|_, _, _, _| vec![0.0; 3]),
        )
}

pub fn example2_lagrangian() -> Result<Lagrangian> {
    Lagrangian::new(4, |_, q, _, dr| {
        -(dr[0] * q[1] + dr[2] * q[3] - 0.5 * q[3] * q[3] + q[1] * q[2])
    })?
    .with_partials(
        Arc::new(|_, q, _, dr| vec![0.0, -(dr[0] + q[2]), -q[1], -(dr[2] - q[3])]),
        Arc::new(|_, _, _, _| vec![0.0; 4]),
        Arc::new(|_, q, _, _| vec![-q[1], 0.0, -q[3], 0.0]),
    )
}

pub fn example1_generator() -> Result<Generator> {
    Generator::new(3, |t, _| -t, |_, q| vec![0.0, 0.0, q[2]])
}

pub fn example2_generator() -> Result<Generator> {
    Generator::new(
        4,
        |t, _| 2.0 * t / 3.0,
        |_, q| vec![q[0], -q[1], q[2] / 3.0, -q[3] / 3.0],
    )
}

impl ExampleFixture {
    pub fn example1(alpha: f64) -> Result<Self> {
        Ok(ExampleFixture {
            id: ExampleId::One,
            order: FracOrder::variational(alpha)?,
            lagrangian: example1_lagrangian()?,
            generator: example1_generator()?,
        })
    }

    pub fn example2(beta: f64) -> Result<Self> {
        Ok(ExampleFixture {
            id: ExampleId::Two,
            order: FracOrder::variational(beta)?,
            lagrangian: example2_lagrangian()?,
            generator: example2_generator()?,
        })
    }

    pub fn new(id: ExampleId, order: f64) -> Result<Self> {
        match id {
            ExampleId::One => Self::example1(order),
            ExampleId::Two => Self::example2(order),
        }
    }

    /// The unused order slot is set equal to the example's order.
    pub fn problem(&self, path: &VectorPath) -> Result<FracProblem> {
        let o = self.order.value();
        FracProblem::with_path_boundary(self.lagrangian.clone(), o, o, path)
    }

    /// The closed-form Noether quantity for this generator, evaluated with
    /// the discrete derivatives of the path.
    pub fn expected_quantity(&self, path: &VectorPath) -> Result<SampledSignal> {
        match self.id {
            // generator (-t, 0, 0, q₃) yields minus the printed bracket
            ExampleId::One => Ok(self.printed_quantity(path)?.scale(-1.0)),
            ExampleId::Two => self.printed_quantity(path),
        }
    }

    /// The quantity exactly as printed for the example:
    /// Example 1: `[(1-α)((D_l q₁) q₂ - (D_l q₂) q₁) - (q₁ - q₂) q₃] t`;
    /// Example 2: `[(β-1)((D_r q₁) q₂ + (D_r q₃) q₄) + (q₄² - 2 q₂ q₃)/2] 2t/3
    /// + q₁ q₂ + q₃ q₄ / 3`.
    pub fn printed_quantity(&self, path: &VectorPath) -> Result<SampledSignal> {
        let prob = self.problem(path)?;
        let d = prob.derivatives(path)?;
        let g = path.grid();
        let o = self.order.value();
        let values = (0..g.len())
            .map(|k| {
                let t = g.node(k);
                let q = path.state(k);
                match self.id {
                    ExampleId::One => {
                        let dl1 = d.left[0].values()[k];
                        let dl2 = d.left[1].values()[k];
                        ((1.0 - o) * (dl1 * q[1] - dl2 * q[0]) - (q[0] - q[1]) * q[2]) * t
                    }
                    ExampleId::Two => {
                        let dr1 = d.right[0].values()[k];
                        let dr3 = d.right[2].values()[k];
                        ((o - 1.0) * (dr1 * q[1] + dr3 * q[3])
                            + 0.5 * (q[3] * q[3] - 2.0 * q[1] * q[2]))
                            * (2.0 * t / 3.0)
                            + q[0] * q[1]
                            + q[2] * q[3] / 3.0
                    }
                }
            })
            .collect();
        SampledSignal::from_values(g, values)
    }

    /// The stated classical (order 1) quantity, a function of `(t, q)`:
    /// Example 1: `(q₁ - q₂) q₃ t`; Example 2: `q₁q₂ + q₃q₄/3 + (q₄² - 2q₂q₃) t/3`.
    pub fn classical_quantity(&self, path: &VectorPath) -> Result<SampledSignal> {
        let g = path.grid();
        let values = (0..g.len())
            .map(|k| classical_quantity_at(self.id, g.node(k), &path.state(k)))
            .collect();
        SampledSignal::from_values(g, values)
    }

    /// Canonical pairs of the `ξ` part plus the time-change pair
    /// `(L - α ∂₃L·d_l - β ∂₄L·d_r, τ)` at the example's order. The bracket
    /// inherits a `(b-t)^-order` singularity from the right derivatives and
    /// is regularized there.
    pub fn candidate_decomposition(&self, path: &VectorPath) -> Result<Decomposition> {
        let prob = self.problem(path)?;
        let mut dec = crate::noether::noether_decomposition(&prob, path, &self.generator)?;
        dec.opaque.clear();
        let bracket = fill_singular_endpoints(time_change_bracket(&prob, path)?, -self.order.value())?;
        let tau = self.generator.sample_tau(path)?;
        dec.pairs.push(Pair::new(
            "(L - a d3L.dl - b d4L.dr, tau)",
            bracket,
            tau,
            self.order,
            Orientation::Forward,
        ));
        Ok(dec)
    }

    pub fn verify(&self, path: &VectorPath, tol: f64, trim: f64) -> Result<ConservationReport> {
        let dec = self.candidate_decomposition(path)?;
        let target = self.expected_quantity(path)?;
        verify_fractional_conserved_with(&dec, &target, tol, trim, Scheme::Gl)
    }
}

pub fn classical_quantity_at(id: ExampleId, t: f64, q: &[f64]) -> f64 {
    match id {
        ExampleId::One => (q[0] - q[1]) * q[2] * t,
        ExampleId::Two => {
            q[0] * q[1] + q[2] * q[3] / 3.0 + (q[3] * q[3] - 2.0 * q[1] * q[2]) * t / 3.0
        }
    }
}

/// Discrete Example 1 extremal `(q, q, D_right^α q - D_left^α q)`. The
/// third component is masked wherever either derivative is.
pub fn example1_family(profile: &SampledSignal, alpha: f64) -> Result<VectorPath> {
    let order = FracOrder::variational(alpha)?;
    let g = profile.grid();
    let left = FracOperator::build(order, Side::Left, Scheme::Gl, g)?.apply_masked(profile)?;
    let right = FracOperator::build(order, Side::Right, Scheme::Gl, g)?.apply_masked(profile)?;
    let q3 = fill_singular_endpoints(right.sub(&left)?, -alpha)?;
    VectorPath::new(vec![profile.clone(), profile.clone(), q3])
}

/// Replaces masked endpoint values of a signal behaving like
/// `(t-a)^exponent` or `(b-t)^exponent` by their zeta-regularized surrogate.
/// Orders of 1 leave the signal unchanged: nothing is singular there, the
/// endpoint is only outside the stencil.
fn fill_singular_endpoints(mut s: SampledSignal, exponent: f64) -> Result<SampledSignal> {
    if !(exponent > -1.0 && exponent < 0.0) {
        return Ok(s);
    }
    let n = s.grid().n();
    if !s.is_valid(0) && s.is_valid(1) {
        s = s.regularize_left_endpoint(exponent)?;
    }
    if !s.is_valid(n) && s.is_valid(n - 1) {
        s = s.regularize_right_endpoint(exponent)?;
    }
    Ok(s)
}

/// Example 1 extremal for the profile `(t-a)^υ` with the third component
/// built from the exact one-sided derivatives.
pub fn example1_reference_family(grid: &Grid, upsilon: f64, alpha: f64) -> Result<VectorPath> {
    FracOrder::variational(alpha)?;
    let (a, b) = (grid.a(), grid.b());
    let q = SampledSignal::sample(grid, |t| (t - a).powf(upsilon));
    let mut q3 = Vec::with_capacity(grid.len());
    for t in grid.nodes() {
        let right = right_power_derivative(alpha, upsilon, a, b, t)?;
        let left = if t > a {
            power_rule_exact(alpha, upsilon, a, t)?
        } else if upsilon > alpha {
            0.0
        } else {
            f64::NAN
        };
        q3.push(right - left);
    }
    let q3 = fill_singular_endpoints(SampledSignal::from_values(grid, q3)?, -alpha)?;
    VectorPath::new(vec![q.clone(), q, q3])
}

/// Discrete Example 2 extremal fitted to a seed profile for `q₁`.
#[derive(Debug, Clone)]
pub struct Example2Extremal {
    pub path: VectorPath,
    /// Free parameters `(q₂(a), q₄(a), q₃(b), q₁(b))`.
    pub params: [f64; 4],
    pub rank: usize,
    /// Max-abs misfit between `q₁` and the seed.
    pub fit_error: f64,
}

/// Solves the four stationarity relations of Example 2 as a triangular
/// linear system. The solution space is spanned by four endpoint values;
/// they are chosen by minimum-norm least squares so that `q₁` matches the
/// seed.
pub fn example2_extremal(seed: &SampledSignal, beta: f64) -> Result<Example2Extremal> {
    let order = FracOrder::variational(beta)?;
    let g = seed.grid();
    let left = FracOperator::build(order, Side::Left, Scheme::Gl, g)?;
    let right = FracOperator::build(order, Side::Right, Scheme::Gl, g)?;
    let basis: Vec<[Vec<f64>; 4]> = (0..4)
        .map(|i| {
            let mut p = [0.0; 4];
            p[i] = 1.0;
            example2_response(&left, &right, p)
        })
        .collect();
    let rows: Vec<usize> = (0..g.len()).filter(|&k| seed.is_valid(k)).collect();
    let m = DMatrix::from_fn(rows.len(), 4, |r, c| basis[c][0][rows[r]]);
    let rhs = DVector::from_iterator(rows.len(), rows.iter().map(|&k| seed.values()[k]));
    let svd = m.svd(true, true);
    let smax = svd.singular_values.max();
    let eps = smax * 1e-12 * rows.len() as f64;
    let rank = svd.rank(eps);
    let x = svd
        .solve(&rhs, eps)
        .map_err(|e| Error::RankDeficient(e.to_string()))?;
    let params = [x[0], x[1], x[2], x[3]];
    let comps = example2_response(&left, &right, params);
    let fit_error = rows
        .iter()
        .fold(0.0f64, |acc, &k| acc.max((comps[0][k] - seed.values()[k]).abs()));
    let path = VectorPath::new(
        comps
            .into_iter()
            .map(|v| SampledSignal::from_values(g, v))
            .collect::<Result<_>>()?,
    )?;
    Ok(Example2Extremal {
        path,
        params,
        rank,
        fit_error,
    })
}

fn example2_response(left: &FracOperator, right: &FracOperator, p: [f64; 4]) -> [Vec<f64>; 4] {
    let n = left.grid().n();
    let zeros = vec![0.0; n + 1];
    let q2 = forward_solve(left, &zeros, p[0]);
    let minus_q2: Vec<f64> = q2.iter().map(|v| -v).collect();
    let q4 = forward_solve(left, &minus_q2, p[1]);
    let q3 = backward_solve(right, &q4, p[2]);
    let minus_q3: Vec<f64> = q3.iter().map(|v| -v).collect();
    let q1 = backward_solve(right, &minus_q3, p[3]);
    [q1, q2, q3, q4]
}

/// Solves rows `1..=N` of a left operator for `x` given `x[0]`.
fn forward_solve(op: &FracOperator, rhs: &[f64], x0: f64) -> Vec<f64> {
    let n = op.grid().n();
    let mut x = vec![0.0; n + 1];
    x[0] = x0;
    for k in 1..=n {
        let mut s = rhs[k];
        for m in 0..k {
            s -= op.entry(k, m) * x[m];
        }
        x[k] = s / op.entry(k, k);
    }
    x
}

/// Solves rows `0..N` of a right operator for `x` given `x[N]`.
fn backward_solve(op: &FracOperator, rhs: &[f64], xn: f64) -> Vec<f64> {
    let n = op.grid().n();
    let mut x = vec![0.0; n + 1];
    x[n] = xn;
    for k in (0..n).rev() {
        let mut s = rhs[k];
        for m in (k + 1)..=n {
            s -= op.entry(k, m) * x[m];
        }
        x[k] = s / op.entry(k, k);
    }
    x
}

/// Energy `-ℒ + ∂ℒ/∂v · v` with finite-difference velocities.
pub fn euler_energy(lag: &ClassicalLagrangian, q: &VectorPath) -> Result<SampledSignal> {
    if lag.n() != q.dim() {
        return domain(format!(
            "lagrangian has dimension {}, path has {}",
            lag.n(),
            q.dim()
        ));
    }
    let vel: Vec<SampledSignal> = q.components().iter().map(velocity).collect::<Result<_>>()?;
    let g = q.grid();
    let values = (0..g.len())
        .map(|k| {
            let t = g.node(k);
            let qk = q.state(k);
            let v: Vec<f64> = vel.iter().map(|s| s.values()[k]).collect();
            let p = lag.dv(t, &qk, &v);
            let mut e = -lag.eval(t, &qk, &v);
            for i in 0..v.len() {
                e += p[i] * v[i];
            }
            e
        })
        .collect();
    SampledSignal::from_values(g, values)
}

/// One row of an example's convergence table.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    /// Max-abs Euler–Lagrange residual on the trim window.
    pub el_residual: f64,
    /// Max-abs conservation defect on the trim window.
    pub conservation_defect: f64,
}

/// Default profile exponent for Example 1 families.
pub const EXAMPLE1_UPSILON: f64 = 0.8;

/// Seed for `q₁` in Example 2: the classical extremal with `q₂ ≡ 1`.
pub fn example2_seed(t: f64) -> f64 {
    1.0 + t + t * t / 2.0 + t * t * t / 6.0
}

/// Convergence of an example's defects on `[a, b] = [0, 1]` with trim
/// window `trim`.
///
/// Example 1: residual of the exact-operator extremal family under the
/// discrete operators, and the largest candidate pair defect on the
/// discrete family. Example 2: residual and aggregate defect on the fitted
/// discrete extremal; at order 1 the defect is the finite-difference
/// derivative of the classical quantity instead.
pub fn convergence_table(id: ExampleId, order: f64, ns: &[usize], trim: f64) -> Result<Vec<ConvergenceRow>> {
    let fixture = ExampleFixture::new(id, order)?;
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let g = Grid::new(0.0, 1.0, n)?;
        let (lo, hi) = g.window(trim, trim);
        let window_max = |s: &SampledSignal| s.max_abs_in(lo, hi).unwrap_or(0.0);
        let row = match id {
            ExampleId::One => {
                let reference = example1_reference_family(&g, EXAMPLE1_UPSILON, order)?;
                let prob = fixture.problem(&reference)?;
                let r = el_residual(&prob, &reference)?;
                let el = r.components().iter().map(window_max).fold(0.0, f64::max);
                let profile = SampledSignal::sample(&g, |t| t.powf(EXAMPLE1_UPSILON));
                let family = example1_family(&profile, order)?;
                let report = fixture.verify(&family, f64::INFINITY, trim)?;
                let quantity = window_max(&fixture.expected_quantity(&family)?);
                ConvergenceRow {
                    n,
                    el_residual: el,
                    conservation_defect: report.max_defect().max(quantity),
                }
            }
            ExampleId::Two => {
                let seed = SampledSignal::sample(&g, example2_seed);
                let ext = example2_extremal(&seed, order)?;
                let prob = fixture.problem(&ext.path)?;
                let r = el_residual(&prob, &ext.path)?;
                let el = r.components().iter().map(window_max).fold(0.0, f64::max);
                let defect = if order == 1.0 {
                    classical_conservation_defect(&fixture.classical_quantity(&ext.path)?)
                } else {
                    fixture.verify(&ext.path, f64::INFINITY, trim)?.aggregate_defect
                };
                ConvergenceRow {
                    n,
                    el_residual: el,
                    conservation_defect: defect,
                }
            }
        };
        rows.push(row);
    }
    Ok(rows)
}
