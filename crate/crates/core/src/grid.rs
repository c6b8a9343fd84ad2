//! Uniform grids, sampled signals and composite trapezoid quadrature.

use std::fmt;

use crate::error::{domain, Error, Result};

/// Uniform partition of `[a, b]` into `n` subintervals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    a: f64,
    b: f64,
    n: usize,
    h: f64,
}

impl Grid {
    pub fn new(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) {
            return domain(format!("grid endpoints must be finite, got [{a}, {b}]"));
        }
        if b <= a {
            return domain(format!("empty interval: b = {b} must exceed a = {a}"));
        }
        if n < 2 {
            return domain(format!("a grid needs at least 2 subintervals, got {n}"));
        }
        Ok(Grid {
            a,
            b,
            n,
            h: (b - a) / n as f64,
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Number of subintervals; there are `n + 1` nodes.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn len(&self) -> usize {
        self.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn node(&self, k: usize) -> f64 {
        debug_assert!(k <= self.n);
        if k == self.n {
            self.b
        } else {
            self.a + k as f64 * self.h
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.n).map(move |k| self.node(k))
    }

    /// Index range `lo..=hi` of the nodes inside `[a + f(b-a), b - g(b-a)]`.
    pub fn window(&self, left_trim: f64, right_trim: f64) -> (usize, usize) {
        let len = self.b - self.a;
        let lo_t = self.a + left_trim * len;
        let hi_t = self.b - right_trim * len;
        let eps = 1e-9 * self.h;
        let lo = (0..=self.n).find(|&k| self.node(k) >= lo_t - eps).unwrap_or(self.n);
        let hi = (0..=self.n)
            .rev()
            .find(|&k| self.node(k) <= hi_t + eps)
            .unwrap_or(0);
        (lo, hi)
    }

    /// Errors unless both grids are identical.
    pub fn ensure_same(&self, other: &Grid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch {
                left: self.to_string(),
                right: other.to_string(),
            })
        }
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}] / {}", self.a, self.b, self.n)
    }
}

/// Scalar values on the nodes of a grid. Masked nodes hold `NaN`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    grid: Grid,
    values: Vec<f64>,
    mask: Vec<bool>,
}

impl SampledSignal {
    /// Samples `f` at every node; non-finite results mark the node invalid.
    pub fn sample(grid: &Grid, f: impl Fn(f64) -> f64) -> Self {
        Self::from_values(grid, grid.nodes().map(f).collect())
            .expect("length matches by construction")
    }

    pub fn from_values(grid: &Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return domain(format!(
                "signal has {} values, grid {} has {} nodes",
                values.len(),
                grid,
                grid.len()
            ));
        }
        let mask: Vec<bool> = values.iter().map(|v| v.is_finite()).collect();
        let values = values
            .into_iter()
            .map(|v| if v.is_finite() { v } else { f64::NAN })
            .collect();
        Ok(SampledSignal {
            grid: *grid,
            values,
            mask,
        })
    }

    pub fn constant(grid: &Grid, c: f64) -> Self {
        Self::sample(grid, |_| c)
    }

    pub fn zeros(grid: &Grid) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_valid(&self, k: usize) -> bool {
        self.mask[k]
    }

    pub fn get(&self, k: usize) -> Option<f64> {
        self.mask[k].then_some(self.values[k])
    }

    pub fn valid_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    pub fn is_fully_valid(&self) -> bool {
        self.mask.iter().all(|&m| m)
    }

    /// Marks node `k` invalid.
    pub fn invalidate(&mut self, k: usize) {
        self.mask[k] = false;
        self.values[k] = f64::NAN;
    }

    /// Pointwise map over values; validity follows finiteness of the result.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        let values = self
            .values
            .iter()
            .zip(&self.mask)
            .map(|(&v, &m)| if m { f(v) } else { f64::NAN })
            .collect();
        Self::from_values(&self.grid, values).expect("same length")
    }

    /// Pointwise combination of two signals on the same grid.
    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        let values = (0..self.len())
            .map(|k| {
                if self.mask[k] && other.mask[k] {
                    f(self.values[k], other.values[k])
                } else {
                    f64::NAN
                }
            })
            .collect();
        Self::from_values(&self.grid, values)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |x, y| x + y)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |x, y| x - y)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |x, y| x * y)
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    /// Mirror image `t -> a + b - t`.
    pub fn reflect(&self) -> Self {
        let mut values = self.values.clone();
        let mut mask = self.mask.clone();
        values.reverse();
        mask.reverse();
        SampledSignal {
            grid: self.grid,
            values,
            mask,
        }
    }

    /// Restricts the mask to the intersection with `other`'s mask.
    pub fn restrict_to(&mut self, other: &[bool]) {
        for (k, &m) in other.iter().enumerate() {
            if !m {
                self.invalidate(k);
            }
        }
    }

    /// Max-abs over valid nodes with index in `lo..=hi`; `None` if none valid.
    pub fn max_abs_in(&self, lo: usize, hi: usize) -> Option<f64> {
        (lo..=hi.min(self.len() - 1))
            .filter(|&k| self.mask[k])
            .map(|k| self.values[k].abs())
            .reduce(f64::max)
    }

    pub fn max_abs(&self) -> Option<f64> {
        self.max_abs_in(0, self.len() - 1)
    }

    /// Replaces a masked left endpoint with the zeta-corrected value for a
    /// signal behaving like `c (t-a)^nu` near `a`, `-1 < nu < 0`.
    ///
    /// With `f(t_0) := -ζ(-ν) f(t_1)` the Grünwald–Letnikov sums lose their
    /// leading `h^{1+ν}` starting error, so left derivatives of such
    /// signals converge at first order away from `a`.
    pub fn regularize_left_endpoint(&self, exponent: f64) -> Result<Self> {
        if !(exponent > -1.0 && exponent < 0.0) {
            return domain(format!(
                "endpoint regularization needs an exponent in (-1, 0), got {exponent}"
            ));
        }
        let v1 = self.get(1).ok_or_else(|| {
            Error::Domain("node 1 must be valid to regularize the left endpoint".into())
        })?;
        let mut out = self.clone();
        out.values[0] = -crate::special::zeta_critical(-exponent) * v1;
        out.mask[0] = true;
        Ok(out)
    }

    /// Mirror of [`regularize_left_endpoint`](Self::regularize_left_endpoint) for `(b-t)^nu`.
    pub fn regularize_right_endpoint(&self, exponent: f64) -> Result<Self> {
        Ok(self.reflect().regularize_left_endpoint(exponent)?.reflect())
    }
}

/// Result of a (possibly truncated) trapezoid integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    /// Total width of the subintervals skipped because a node was masked.
    pub truncated: f64,
}

/// Composite trapezoid rule over every subinterval whose two nodes are valid.
pub fn integrate(s: &SampledSignal) -> Result<Quadrature> {
    if s.valid_count() < 2 {
        return domain("integration needs at least 2 valid nodes");
    }
    let g = s.grid();
    let h = g.h();
    let mut value = 0.0;
    let mut skipped = 0usize;
    for k in 0..g.n() {
        if s.mask[k] && s.mask[k + 1] {
            value += 0.5 * (s.values[k] + s.values[k + 1]);
        } else {
            skipped += 1;
        }
    }
    Ok(Quadrature {
        value: value * h,
        truncated: skipped as f64 * h,
    })
}

/// An `n`-component trajectory on a common grid.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorPath {
    grid: Grid,
    components: Vec<SampledSignal>,
}

impl VectorPath {
    pub fn new(components: Vec<SampledSignal>) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::Domain("a path needs at least one component".into()))?;
        let grid = *first.grid();
        for c in &components[1..] {
            grid.ensure_same(c.grid())?;
        }
        Ok(VectorPath { grid, components })
    }

    pub fn scalar(s: SampledSignal) -> Self {
        VectorPath {
            grid: *s.grid(),
            components: vec![s],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[SampledSignal] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &SampledSignal {
        &self.components[i]
    }

    pub fn into_components(self) -> Vec<SampledSignal> {
        self.components
    }

    /// State vector at node `k` (masked entries are `NaN`).
    pub fn state(&self, k: usize) -> Vec<f64> {
        self.components.iter().map(|c| c.values()[k]).collect()
    }

    pub fn is_valid(&self, k: usize) -> bool {
        self.components.iter().all(|c| c.is_valid(k))
    }

    /// Max-abs over all components and valid nodes in `lo..=hi`.
    pub fn max_abs_in(&self, lo: usize, hi: usize) -> Option<f64> {
        self.components
            .iter()
            .filter_map(|c| c.max_abs_in(lo, hi))
            .reduce(f64::max)
    }
}
