//! Conservation machinery: the bilinear operator `𝒟ᵞ(f, g)`, the invariance
//! condition, fractional and classical Noether quantities, and verification
//! of fractional conservation through pair decompositions.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{domain, Result};
use crate::fracdiff::{FracOperator, FracOrder, Scheme, Side};
use crate::grid::{Grid, SampledSignal, VectorPath};
use crate::varproblem::{ClassicalLagrangian, FracProblem, Lagrangian};

type TauFn = Arc<dyn Fn(f64, &[f64]) -> f64 + Send + Sync>;
type XiFn = Arc<dyn Fn(f64, &[f64]) -> Vec<f64> + Send + Sync>;

/// Infinitesimal generator `(τ(t, q), ξ(t, q))` of a transformation group.
#[derive(Clone)]
pub struct Generator {
    n: usize,
    tau: TauFn,
    xi: XiFn,
    /// Per component: exponent `ν` of a `(t-a)^ν` singularity of `ξ` at `a`.
    left_singular: Vec<Option<f64>>,
}

impl fmt::Debug for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Generator")
            .field("n", &self.n)
            .field("left_singular", &self.left_singular)
            .finish()
    }
}

impl Generator {
    pub fn new(
        n: usize,
        tau: impl Fn(f64, &[f64]) -> f64 + Send + Sync + 'static,
        xi: impl Fn(f64, &[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Result<Self> {
        if n == 0 {
            return domain("generator dimension must be at least 1");
        }
        Ok(Generator {
            n,
            tau: Arc::new(tau),
            xi: Arc::new(xi),
            left_singular: vec![None; n],
        })
    }

    /// Generator without time change.
    pub fn spatial(
        n: usize,
        xi: impl Fn(f64, &[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Result<Self> {
        Self::new(n, |_, _| 0.0, xi)
    }

    /// Declares that component `i` of `ξ` behaves like `c (t-a)^exponent`
    /// near `a`, with `-1 < exponent < 0`; the sampled value at `a` is then
    /// replaced by its zeta-regularized surrogate.
    pub fn with_left_singularity(mut self, i: usize, exponent: f64) -> Result<Self> {
        if i >= self.n {
            return domain(format!("component {i} out of range for dimension {}", self.n));
        }
        if !(exponent > -1.0 && exponent < 0.0) {
            return domain(format!("singularity exponent must lie in (-1, 0), got {exponent}"));
        }
        self.left_singular[i] = Some(exponent);
        Ok(self)
    }

    /// The same generator multiplied by the constant `c`.
    pub fn scaled(&self, c: f64) -> Self {
        let (tau, xi) = (self.tau.clone(), self.xi.clone());
        Generator {
            n: self.n,
            tau: Arc::new(move |t, q| c * tau(t, q)),
            xi: Arc::new(move |t, q| xi(t, q).into_iter().map(|v| c * v).collect()),
            left_singular: self.left_singular.clone(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn tau(&self, t: f64, q: &[f64]) -> f64 {
        (self.tau)(t, q)
    }

    pub fn xi(&self, t: f64, q: &[f64]) -> Vec<f64> {
        (self.xi)(t, q)
    }

    /// `τ` along a path.
    pub fn sample_tau(&self, q: &VectorPath) -> Result<SampledSignal> {
        let g = q.grid();
        let values = (0..g.len()).map(|k| self.tau(g.node(k), &q.state(k))).collect();
        SampledSignal::from_values(g, values)
    }

    /// `ξ` along a path, one signal per component.
    pub fn sample_xi(&self, q: &VectorPath) -> Result<Vec<SampledSignal>> {
        self.check_dim(q)?;
        let g = q.grid();
        let mut rows = vec![Vec::with_capacity(g.len()); self.n];
        for k in 0..g.len() {
            let xi = self.xi(g.node(k), &q.state(k));
            if xi.len() != self.n {
                return domain(format!("xi returned {} entries, expected {}", xi.len(), self.n));
            }
            for (row, v) in rows.iter_mut().zip(xi) {
                row.push(v);
            }
        }
        rows.into_iter()
            .zip(&self.left_singular)
            .map(|(row, sing)| {
                let s = SampledSignal::from_values(g, row)?;
                match sing {
                    Some(nu) => s.regularize_left_endpoint(*nu),
                    None => Ok(s),
                }
            })
            .collect()
    }

    fn check_dim(&self, q: &VectorPath) -> Result<()> {
        if q.dim() != self.n {
            return domain(format!(
                "generator has dimension {}, path has {}",
                self.n,
                q.dim()
            ));
        }
        Ok(())
    }

    fn ensure_no_time_change(&self, q: &VectorPath) -> Result<()> {
        let tau = self.sample_tau(q)?;
        if tau.values().iter().any(|&v| v.is_finite() && v != 0.0) {
            return domain(
                "generator changes time (tau is not identically zero); \
                 use noether_quantity and verify_fractional_conserved instead",
            );
        }
        Ok(())
    }
}

/// Which argument order a pair is evaluated in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// `𝒟ᵞ(c1, c2)`
    Forward,
    /// `𝒟ᵞ(c2, c1)`
    Reversed,
}

impl Orientation {
    pub fn flipped(self) -> Self {
        match self {
            Orientation::Forward => Orientation::Reversed,
            Orientation::Reversed => Orientation::Forward,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Pair {
    pub label: String,
    pub c1: SampledSignal,
    pub c2: SampledSignal,
    pub gamma: FracOrder,
    pub orientation: Orientation,
}

impl Pair {
    pub fn new(
        label: impl Into<String>,
        c1: SampledSignal,
        c2: SampledSignal,
        gamma: FracOrder,
        orientation: Orientation,
    ) -> Self {
        Pair {
            label: label.into(),
            c1,
            c2,
            gamma,
            orientation,
        }
    }

    /// Same pair with the factors exchanged and the orientation flipped.
    pub fn swapped(&self) -> Self {
        Pair {
            label: self.label.clone(),
            c1: self.c2.clone(),
            c2: self.c1.clone(),
            gamma: self.gamma,
            orientation: self.orientation.flipped(),
        }
    }

    /// The oriented `𝒟ᵞ` signal of this pair.
    pub fn defect_signal(&self, scheme: Scheme) -> Result<SampledSignal> {
        let (f, g) = match self.orientation {
            Orientation::Forward => (&self.c1, &self.c2),
            Orientation::Reversed => (&self.c2, &self.c1),
        };
        d_gamma_with(f, g, self.gamma, scheme)
    }
}

/// A quantity written as `Σ c1·c2` plus terms whose conservation is not
/// checked (listed as unverified in reports).
#[derive(Debug, Clone, Default)]
pub struct Decomposition {
    pub pairs: Vec<Pair>,
    pub opaque: Vec<(String, SampledSignal)>,
}

impl Decomposition {
    pub fn new(pairs: Vec<Pair>) -> Self {
        Decomposition {
            pairs,
            opaque: Vec::new(),
        }
    }

    pub fn with_opaque(mut self, label: impl Into<String>, term: SampledSignal) -> Self {
        self.opaque.push((label.into(), term));
        self
    }

    /// `Σ c1·c2 + Σ opaque`.
    pub fn reconstruct(&self) -> Result<SampledSignal> {
        let grid = self.grid()?;
        let mut acc = SampledSignal::zeros(&grid);
        for p in &self.pairs {
            acc = acc.add(&p.c1.mul(&p.c2)?)?;
        }
        for (_, term) in &self.opaque {
            acc = acc.add(term)?;
        }
        Ok(acc)
    }

    fn grid(&self) -> Result<Grid> {
        match (self.pairs.first(), self.opaque.first()) {
            (Some(p), _) => Ok(*p.c1.grid()),
            (None, Some((_, s))) => Ok(*s.grid()),
            (None, None) => domain("decomposition has no terms"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PairReport {
    pub label: String,
    pub gamma: f64,
    pub orientation: Orientation,
    /// Max-abs of the oriented `𝒟ᵞ` over all valid interior nodes.
    pub defect_global: f64,
    /// Max-abs over valid nodes inside the trim window.
    pub defect_window: f64,
    /// Valid nodes inside the trim window; defects are `NaN` when zero.
    pub window_nodes: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConservationReport {
    pub pairs: Vec<PairReport>,
    /// Max-abs over the window of the sum of all oriented pair signals.
    pub aggregate_defect: f64,
    pub reconstruction_error: f64,
    pub unverified: Vec<String>,
    pub tolerance: f64,
    pub trim: f64,
    pub window: (f64, f64),
    pub pass: bool,
}

impl ConservationReport {
    /// Largest window defect; `NaN` if any pair is undefined on the window.
    pub fn max_defect(&self) -> f64 {
        self.pairs.iter().fold(0.0, |m, p| {
            if m.is_nan() || p.defect_window.is_nan() {
                f64::NAN
            } else {
                m.max(p.defect_window)
            }
        })
    }
}

/// `𝒟ᵞ(f, g) = -g · D_right^γ f + f · D_left^γ g` with Grünwald–Letnikov
/// operators.
pub fn d_gamma(f: &SampledSignal, g: &SampledSignal, gamma: FracOrder) -> Result<SampledSignal> {
    d_gamma_with(f, g, gamma, Scheme::Gl)
}

pub fn d_gamma_with(
    f: &SampledSignal,
    g: &SampledSignal,
    gamma: FracOrder,
    scheme: Scheme,
) -> Result<SampledSignal> {
    f.grid().ensure_same(g.grid())?;
    if !(gamma.value() > 0.0 && gamma.value() <= 1.0) {
        return domain(format!("gamma must lie in (0, 1], got {}", gamma.value()));
    }
    let grid = f.grid();
    let right = FracOperator::build(gamma, Side::Right, scheme, grid)?.apply_masked(f)?;
    let left = FracOperator::build(gamma, Side::Left, scheme, grid)?.apply_masked(g)?;
    let values = (0..grid.len())
        .map(|k| -g.values()[k] * right.values()[k] + f.values()[k] * left.values()[k])
        .collect();
    SampledSignal::from_values(grid, values)
}

/// Left side of the invariance condition
/// `∂₂L·ξ + ∂₃L·D_left^α ξ + ∂₄L·D_right^β ξ` along the path.
pub fn invariance_defect_signal(
    prob: &FracProblem,
    q: &VectorPath,
    gen: &Generator,
) -> Result<SampledSignal> {
    gen.ensure_no_time_change(q)?;
    let d = prob.derivatives(q)?;
    let p = prob.partial_signals(q, &d)?;
    let xi = gen.sample_xi(q)?;
    let left = prob.operator(prob.alpha(), Side::Left)?;
    let right = prob.operator(prob.beta(), Side::Right)?;
    let grid = prob.grid();
    let mut acc = vec![0.0; grid.len()];
    for c in 0..gen.n() {
        let dl = left.apply_masked(&xi[c])?;
        let dr = right.apply_masked(&xi[c])?;
        for (k, a) in acc.iter_mut().enumerate() {
            *a += p.dq[c].values()[k] * xi[c].values()[k]
                + p.ddl[c].values()[k] * dl.values()[k]
                + p.ddr[c].values()[k] * dr.values()[k];
        }
    }
    let n = grid.n();
    acc[0] = f64::NAN;
    acc[n] = f64::NAN;
    SampledSignal::from_values(grid, acc)
}

/// Max-abs of [`invariance_defect_signal`] over valid interior nodes.
pub fn invariance_defect(prob: &FracProblem, q: &VectorPath, gen: &Generator) -> Result<f64> {
    let s = invariance_defect_signal(prob, q, gen)?;
    Ok(s.max_abs().unwrap_or(0.0))
}

/// Pointwise Noether density
/// `(∂₃L - ∂₄L)·ξ + (L - α ∂₃L·d_l - β ∂₄L·d_r) τ`.
#[allow(clippy::too_many_arguments)]
pub fn noether_density(
    lag: &Lagrangian,
    alpha: f64,
    beta: f64,
    gen: &Generator,
    t: f64,
    q: &[f64],
    dl: &[f64],
    dr: &[f64],
) -> Result<f64> {
    let p = lag.partials(t, q, dl, dr)?;
    let xi = gen.xi(t, q);
    let tau = gen.tau(t, q);
    Ok(density_from_parts(lag, alpha, beta, &p, &xi, tau, t, q, dl, dr))
}

#[allow(clippy::too_many_arguments)]
fn density_from_parts(
    lag: &Lagrangian,
    alpha: f64,
    beta: f64,
    p: &crate::varproblem::Partials,
    xi: &[f64],
    tau: f64,
    t: f64,
    q: &[f64],
    dl: &[f64],
    dr: &[f64],
) -> f64 {
    let mut c = 0.0;
    for i in 0..xi.len() {
        c += (p.ddl[i] - p.ddr[i]) * xi[i];
    }
    if tau != 0.0 {
        let mut bracket = lag.eval(t, q, dl, dr);
        for i in 0..q.len() {
            if p.ddl[i] != 0.0 {
                bracket -= alpha * p.ddl[i] * dl[i];
            }
            if p.ddr[i] != 0.0 {
                bracket -= beta * p.ddr[i] * dr[i];
            }
        }
        c += bracket * tau;
    }
    c
}

/// Noether quantity for a generator without time change, together with the
/// canonical decomposition `Σ_i (∂₃L_i, ξ_i)_α + (ξ_i, -∂₄L_i)_β`.
pub fn noether_quantity_no_time(
    prob: &FracProblem,
    q: &VectorPath,
    gen: &Generator,
) -> Result<(SampledSignal, Decomposition)> {
    gen.ensure_no_time_change(q)?;
    let c = noether_quantity(prob, q, gen)?;
    let dec = canonical_pairs(prob, q, gen)?;
    Ok((c, dec))
}

fn canonical_pairs(prob: &FracProblem, q: &VectorPath, gen: &Generator) -> Result<Decomposition> {
    let d = prob.derivatives(q)?;
    let p = prob.partial_signals(q, &d)?;
    let xi = gen.sample_xi(q)?;
    let mut pairs = Vec::with_capacity(2 * gen.n());
    for c in 0..gen.n() {
        pairs.push(Pair::new(
            format!("(d3L_{c}, xi_{c})"),
            p.ddl[c].clone(),
            xi[c].clone(),
            prob.alpha(),
            Orientation::Forward,
        ));
        pairs.push(Pair::new(
            format!("(xi_{c}, -d4L_{c})"),
            xi[c].clone(),
            p.ddr[c].scale(-1.0),
            prob.beta(),
            Orientation::Forward,
        ));
    }
    Ok(Decomposition::new(pairs))
}

/// Canonical pairs for the `ξ` part plus the time-change term
/// `(L - α ∂₃L·d_l - β ∂₄L·d_r) τ`, which is left opaque (unverified).
pub fn noether_decomposition(
    prob: &FracProblem,
    q: &VectorPath,
    gen: &Generator,
) -> Result<Decomposition> {
    let dec = canonical_pairs(prob, q, gen)?;
    let tau = gen.sample_tau(q)?;
    if tau.values().iter().all(|&v| v == 0.0) {
        return Ok(dec);
    }
    let bracket = time_change_bracket(prob, q)?;
    Ok(dec.with_opaque("tau-term", bracket.mul(&tau)?))
}

/// `L - α ∂₃L·d_l - β ∂₄L·d_r` along a path.
pub fn time_change_bracket(prob: &FracProblem, q: &VectorPath) -> Result<SampledSignal> {
    let d = prob.derivatives(q)?;
    let grid = prob.grid();
    let lag = prob.lagrangian();
    let zero_xi = vec![0.0; q.dim()];
    let (alpha, beta) = (prob.alpha().value(), prob.beta().value());
    let mut values = Vec::with_capacity(grid.len());
    for k in 0..grid.len() {
        let t = grid.node(k);
        let qk = q.state(k);
        let dl: Vec<f64> = d.left.iter().map(|s| s.values()[k]).collect();
        let dr: Vec<f64> = d.right.iter().map(|s| s.values()[k]).collect();
        let p = lag.partials(t, &qk, &dl, &dr)?;
        values.push(density_from_parts(
            lag, alpha, beta, &p, &zero_xi, 1.0, t, &qk, &dl, &dr,
        ));
    }
    SampledSignal::from_values(grid, values)
}

/// The fractional Noether quantity along a path.
pub fn noether_quantity(prob: &FracProblem, q: &VectorPath, gen: &Generator) -> Result<SampledSignal> {
    prob.grid().ensure_same(q.grid())?;
    gen.check_dim(q)?;
    let d = prob.derivatives(q)?;
    let xi = gen.sample_xi(q)?;
    let tau = gen.sample_tau(q)?;
    let grid = prob.grid();
    let lag = prob.lagrangian();
    let (alpha, beta) = (prob.alpha().value(), prob.beta().value());
    let mut values = Vec::with_capacity(grid.len());
    for k in 0..grid.len() {
        let t = grid.node(k);
        let qk = q.state(k);
        let dl: Vec<f64> = d.left.iter().map(|s| s.values()[k]).collect();
        let dr: Vec<f64> = d.right.iter().map(|s| s.values()[k]).collect();
        let xik: Vec<f64> = xi.iter().map(|s| s.values()[k]).collect();
        let p = lag.partials(t, &qk, &dl, &dr)?;
        values.push(density_from_parts(
            lag,
            alpha,
            beta,
            &p,
            &xik,
            tau.values()[k],
            t,
            &qk,
            &dl,
            &dr,
        ));
    }
    SampledSignal::from_values(grid, values)
}

/// Default fraction of `[a, b]` excluded at each end when reporting
/// fractional defects.
pub const DEFAULT_TRIM: f64 = 0.1;

/// Checks every pair of a decomposition with the default trim window.
pub fn verify_fractional_conserved(
    dec: &Decomposition,
    target: &SampledSignal,
    tol: f64,
) -> Result<ConservationReport> {
    verify_fractional_conserved_with(dec, target, tol, DEFAULT_TRIM, Scheme::Gl)
}

pub fn verify_fractional_conserved_with(
    dec: &Decomposition,
    target: &SampledSignal,
    tol: f64,
    trim: f64,
    scheme: Scheme,
) -> Result<ConservationReport> {
    if dec.pairs.is_empty() {
        return domain("decomposition has no pairs to verify");
    }
    if !(tol >= 0.0) {
        return domain(format!("tolerance must be non-negative, got {tol}"));
    }
    if !(0.0..0.5).contains(&trim) {
        return domain(format!("trim must lie in [0, 0.5), got {trim}"));
    }
    let grid = *target.grid();
    let n = grid.n();
    let (lo, hi) = grid.window(trim, trim);
    let (lo, hi) = (lo.max(1), hi.min(n - 1));
    let mut pairs = Vec::with_capacity(dec.pairs.len());
    let mut aggregate = SampledSignal::zeros(&grid);
    for p in &dec.pairs {
        grid.ensure_same(p.c1.grid())?;
        let s = p.defect_signal(scheme)?;
        let window_nodes = (lo..=hi).filter(|&k| s.is_valid(k)).count();
        pairs.push(PairReport {
            label: p.label.clone(),
            gamma: p.gamma.value(),
            orientation: p.orientation,
            defect_global: s.max_abs_in(1, n - 1).unwrap_or(f64::NAN),
            defect_window: s.max_abs_in(lo, hi).unwrap_or(f64::NAN),
            window_nodes,
        });
        aggregate = aggregate.add(&s)?;
    }
    let recon = dec.reconstruct()?.sub(target)?;
    let reconstruction_error = recon.max_abs().unwrap_or(f64::NAN);
    let aggregate_defect = aggregate.max_abs_in(lo, hi).unwrap_or(f64::NAN);
    let pass = pairs.iter().all(|p| p.defect_window <= tol) && reconstruction_error <= tol;
    Ok(ConservationReport {
        pairs,
        aggregate_defect,
        reconstruction_error,
        unverified: dec.opaque.iter().map(|(l, _)| l.clone()).collect(),
        tolerance: tol,
        trim,
        window: (grid.node(lo), grid.node(hi)),
        pass,
    })
}

/// Max-abs of the central difference of `C` over interior nodes.
pub fn classical_conservation_defect(c: &SampledSignal) -> f64 {
    let n = c.grid().n();
    let h2 = 2.0 * c.grid().h();
    let v = c.values();
    (1..n)
        .map(|k| (v[k + 1] - v[k - 1]) / h2)
        .filter(|d| d.is_finite())
        .fold(0.0, |m, d| m.max(d.abs()))
}

/// Finite-difference velocity: central in the interior, second-order
/// one-sided at the endpoints.
pub fn velocity(s: &SampledSignal) -> Result<SampledSignal> {
    let g = s.grid();
    let n = g.n();
    let h = g.h();
    let v = s.values();
    let mut out = vec![0.0; n + 1];
    for k in 1..n {
        out[k] = (v[k + 1] - v[k - 1]) / (2.0 * h);
    }
    if n >= 2 {
        out[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
        out[n] = (3.0 * v[n] - 4.0 * v[n - 1] + v[n - 2]) / (2.0 * h);
    }
    SampledSignal::from_values(g, out)
}

/// Classical Noether density `∂ℒ/∂v·ξ + (ℒ - ∂ℒ/∂v·v) τ`.
pub fn classical_noether_density(
    lag: &ClassicalLagrangian,
    gen: &Generator,
    t: f64,
    q: &[f64],
    v: &[f64],
) -> f64 {
    let p = lag.dv(t, q, v);
    let xi = gen.xi(t, q);
    let tau = gen.tau(t, q);
    let mut c = 0.0;
    for i in 0..xi.len() {
        c += p[i] * xi[i];
    }
    if tau != 0.0 {
        let mut bracket = lag.eval(t, q, v);
        for i in 0..v.len() {
            bracket -= p[i] * v[i];
        }
        c += bracket * tau;
    }
    c
}

/// Classical Noether quantity along a path with finite-difference velocities.
pub fn classical_noether_quantity(
    lag: &ClassicalLagrangian,
    gen: &Generator,
    q: &VectorPath,
) -> Result<SampledSignal> {
    gen.check_dim(q)?;
    let vel: Vec<SampledSignal> = q.components().iter().map(velocity).collect::<Result<_>>()?;
    let g = q.grid();
    let values = (0..g.len())
        .map(|k| {
            let v: Vec<f64> = vel.iter().map(|s| s.values()[k]).collect();
            classical_noether_density(lag, gen, g.node(k), &q.state(k), &v)
        })
        .collect();
    SampledSignal::from_values(g, values)
}
