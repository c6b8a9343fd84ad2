//! Discrete left and right Riemann–Liouville derivatives and integrals.
//!
//! Every operator is a triangular matrix on the grid nodes. Both schemes
//! produce rows that are Toeplitz except for the coefficient on the reading
//! endpoint, so an operator stores one kernel indexed by the distance
//! `|k - m|` plus one endpoint coefficient per row. Right operators are the
//! exact mirror images of left ones.

use std::io::Write;

use crate::csvio::format_number;
use crate::error::{domain, Error, Result};
use crate::grid::{integrate, Grid, SampledSignal};
use crate::special::{gamma, rgamma};

/// Order of a fractional operator. Negative values denote fractional
/// integrals of order `|value|`; zero is the identity.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct FracOrder(f64);

impl FracOrder {
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() {
            return domain(format!("order must be finite, got {value}"));
        }
        Ok(FracOrder(value))
    }

    /// Orders admissible in a variational problem: `0 < value <= 1`.
    pub fn variational(value: f64) -> Result<Self> {
        if !(value > 0.0 && value <= 1.0) {
            return domain(format!("variational orders must lie in (0, 1], got {value}"));
        }
        Ok(FracOrder(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_integer(self) -> bool {
        self.0 == self.0.floor()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Reads the history `[a, t]`.
    Left,
    /// Reads the future `[t, b]`.
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    /// Grünwald–Letnikov convolution with fractional binomial weights.
    #[default]
    Gl,
    /// Product integration of the kernel against the piecewise-linear interpolant.
    L1,
}

/// Grünwald–Letnikov weights `w[j] = (-1)^j binom(alpha, j)`, `j = 0..=n`.
pub fn gl_weights(alpha: FracOrder, n: usize) -> Vec<f64> {
    let a = alpha.value();
    let mut w = Vec::with_capacity(n + 1);
    w.push(1.0);
    for j in 1..=n {
        let prev = w[j - 1];
        w.push(prev * (1.0 - (a + 1.0) / j as f64));
    }
    w
}

#[derive(Debug, Clone)]
pub struct FracOperator {
    grid: Grid,
    order: FracOrder,
    side: Side,
    scheme: Scheme,
    /// Coefficient by distance from the diagonal.
    kernel: Vec<f64>,
    /// Coefficient on the reading endpoint, by row distance to it.
    endpoint: Vec<f64>,
    /// Largest distance with a nonzero coefficient.
    reach: usize,
}

impl FracOperator {
    pub fn build(order: FracOrder, side: Side, scheme: Scheme, grid: &Grid) -> Result<Self> {
        let n = grid.n();
        let h = grid.h();
        let alpha = order.value();
        let (kernel, endpoint) = match scheme {
            Scheme::Gl => {
                let scale = h.powf(-alpha);
                let w: Vec<f64> = gl_weights(order, n).into_iter().map(|x| x * scale).collect();
                (w.clone(), w)
            }
            Scheme::L1 if alpha >= 1.0 => {
                return domain(format!(
                    "the L1 scheme only implements orders below 1, got {alpha}"
                ));
            }
            Scheme::L1 if alpha >= 0.0 => l1_derivative_rows(alpha, n, h),
            Scheme::L1 => l1_integral_rows(-alpha, n, h),
        };
        let reach = {
            let last_kernel = kernel.iter().rposition(|&c| c != 0.0).unwrap_or(0);
            let endpoint_beyond = endpoint
                .iter()
                .enumerate()
                .skip(last_kernel + 1)
                .any(|(_, &c)| c != 0.0);
            if endpoint_beyond {
                n
            } else {
                last_kernel
            }
        };
        Ok(FracOperator {
            grid: *grid,
            order,
            side,
            scheme,
            kernel,
            endpoint,
            reach,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn order(&self) -> FracOrder {
        self.order
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    /// Largest `|k - m|` with a nonzero entry.
    pub fn reach(&self) -> usize {
        self.reach
    }

    /// Coefficient of a row whose reading endpoint lies `row_dist` nodes
    /// away, on the node `d` nodes away from the diagonal.
    #[inline]
    fn coef(&self, row_dist: usize, d: usize) -> f64 {
        if d == row_dist {
            self.endpoint[row_dist]
        } else {
            self.kernel[d]
        }
    }

    /// Matrix entry `(k, m)`.
    pub fn entry(&self, k: usize, m: usize) -> f64 {
        let n = self.grid.n();
        match self.side {
            Side::Left if m <= k => self.coef(k, k - m),
            Side::Right if m >= k => self.coef(n - k, m - k),
            _ => 0.0,
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let len = self.grid.len();
        (0..len)
            .map(|k| (0..len).map(|m| self.entry(k, m)).collect())
            .collect()
    }

    /// Dumps the full matrix, one row per line.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        for row in self.to_dense() {
            let line: Vec<String> = row.into_iter().map(format_number).collect();
            writeln!(out, "{}", line.join(","))?;
        }
        Ok(())
    }

    /// Row sums taken in order of increasing distance, so a right operator
    /// on `f` is bit-identical to the reflected left operator on `f(a+b-t)`.
    fn row_value(&self, x: &[f64], k: usize) -> f64 {
        let n = self.grid.n();
        let row_dist = match self.side {
            Side::Left => k,
            Side::Right => n - k,
        };
        let at = |d: usize| match self.side {
            Side::Left => x[k - d],
            Side::Right => x[k + d],
        };
        let mut acc = 0.0;
        for d in 0..=row_dist.min(self.reach) {
            let c = self.coef(row_dist, d);
            if c != 0.0 {
                acc += c * at(d);
            }
        }
        if row_dist > self.reach {
            let c = self.endpoint[row_dist];
            if c != 0.0 {
                acc += c * at(row_dist);
            }
        }
        acc
    }

    /// Number of rows next to the reading endpoint that are masked
    /// regardless of the input.
    fn forced_mask(&self, endpoint_value: f64) -> usize {
        let p = self.order.value();
        if p >= 1.0 {
            p.ceil() as usize
        } else if p > 0.0 && endpoint_value != 0.0 {
            1
        } else {
            0
        }
    }

    pub fn apply(&self, s: &SampledSignal) -> Result<SampledSignal> {
        let result = self.apply_masked(s)?;
        if result.valid_count() == 0 && !s.is_fully_valid() {
            return domain(
                "operator reads a masked input node from every row; \
                 the signal must be valid on the side the operator reads from",
            );
        }
        Ok(result)
    }

    /// Like [`apply`](Self::apply), but masked input nodes only mask the
    /// rows that read them, even when that is every row.
    pub fn apply_masked(&self, s: &SampledSignal) -> Result<SampledSignal> {
        self.grid.ensure_same(s.grid())?;
        let n = self.grid.n();
        let x = s.values();
        let mut out: Vec<f64> = (0..=n).map(|k| self.row_value(x, k)).collect();
        let endpoint_value = match self.side {
            Side::Left => x[0],
            Side::Right => x[n],
        };
        let forced = self.forced_mask(endpoint_value).min(n + 1);
        for i in 0..forced {
            let k = match self.side {
                Side::Left => i,
                Side::Right => n - i,
            };
            out[k] = f64::NAN;
        }
        SampledSignal::from_values(&self.grid, out)
    }
}

/// L1 rows for `0 <= alpha < 1`: exact RL derivative of the interpolant.
fn l1_derivative_rows(alpha: f64, n: usize, h: f64) -> (Vec<f64>, Vec<f64>) {
    let c = h.powf(-alpha) / gamma(2.0 - alpha);
    let e = 1.0 - alpha;
    let b: Vec<f64> = (0..=n)
        .map(|j| ((j + 1) as f64).powf(e) - (j as f64).powf(e))
        .collect();
    let mut kernel = vec![0.0; n + 1];
    kernel[0] = c * b[0];
    for j in 1..=n {
        kernel[j] = c * (b[j] - b[j - 1]);
    }
    let sing = rgamma(1.0 - alpha);
    let mut endpoint = vec![0.0; n + 1];
    endpoint[0] = c;
    for (k, ep) in endpoint.iter_mut().enumerate().skip(1) {
        *ep = -c * b[k - 1] + (k as f64 * h).powf(-alpha) * sing;
    }
    (kernel, endpoint)
}

/// L1 rows for the integral of order `q > 0` (product trapezoid rule).
fn l1_integral_rows(q: f64, n: usize, h: f64) -> (Vec<f64>, Vec<f64>) {
    let c = h.powf(q) / gamma(q + 2.0);
    let p = q + 1.0;
    let pw = |i: f64| i.powf(p);
    let mut kernel = vec![0.0; n + 1];
    kernel[0] = c;
    for (i, kv) in kernel.iter_mut().enumerate().skip(1) {
        let fi = i as f64;
        *kv = c * (pw(fi + 1.0) - 2.0 * pw(fi) + pw(fi - 1.0));
    }
    let mut endpoint = vec![0.0; n + 1];
    for (k, ep) in endpoint.iter_mut().enumerate().skip(1) {
        let fk = k as f64;
        *ep = c * (pw(fk - 1.0) - (fk - 1.0 - q) * fk.powf(q));
    }
    (kernel, endpoint)
}

/// Closed-form left derivative of order `p` of `(t-a)^upsilon`:
/// `Γ(υ+1)/Γ(υ-p+1) (t-a)^(υ-p)`, with `1/Γ` taken as zero at its poles.
pub fn power_rule_exact(p: f64, upsilon: f64, a: f64, t: f64) -> Result<f64> {
    if upsilon <= -1.0 {
        return domain(format!("power rule needs upsilon > -1, got {upsilon}"));
    }
    if t <= a {
        return domain(format!("power rule needs t > a, got t = {t}, a = {a}"));
    }
    let coeff = gamma(upsilon + 1.0) * rgamma(upsilon - p + 1.0);
    if coeff == 0.0 {
        return Ok(0.0);
    }
    Ok(coeff * (t - a).powf(upsilon - p))
}

/// Right derivative of order `0 < p <= 1` of `(t-a)^upsilon` on `[a, b]`.
///
/// Expands `(t-a)^υ = L^υ (1-x)^υ` with `L = b-a`, `x = (b-t)/L`, and
/// differentiates term by term in `s = b-t`; at `t = a` the Gauss sum of
/// the hypergeometric series is used. Returns `NaN` at `t = b` for
/// `p < 1` and when the series diverges.
pub fn right_power_derivative(p: f64, upsilon: f64, a: f64, b: f64, t: f64) -> Result<f64> {
    if !(p > 0.0 && p <= 1.0) {
        return domain(format!("right power derivative needs 0 < p <= 1, got {p}"));
    }
    if upsilon <= -1.0 || t < a || t > b {
        return domain(format!("need upsilon > -1 and t in [a, b], got {upsilon}, {t}"));
    }
    if p == 1.0 {
        return Ok(-upsilon * (t - a).powf(upsilon - 1.0));
    }
    let len = b - a;
    let s = b - t;
    if s == 0.0 {
        return Ok(f64::NAN);
    }
    let x = s / len;
    let sum = if t == a {
        if upsilon > p {
            gamma(upsilon - p) * rgamma(1.0 - p + upsilon) * rgamma(-p)
        } else {
            f64::NAN
        }
    } else {
        let mut c = rgamma(1.0 - p);
        let mut xk = 1.0;
        let mut acc = c;
        let mut k = 0usize;
        loop {
            c *= (k as f64 - upsilon) / (k as f64 + 1.0 - p);
            xk *= x;
            k += 1;
            let term = c * xk;
            acc += term;
            if term == 0.0 || (term.abs() < 1e-18 * acc.abs() && k > 8) || k > 200_000_000 {
                break;
            }
        }
        acc
    };
    Ok(len.powf(upsilon) * s.powf(-p) * sum)
}

/// Relative defect of the discrete fractional integration-by-parts identity
/// `∫ (D_left^p f) g = ∫ f (D_right^p g)`, for `f(a) = 0` and `g(b) = 0`.
pub fn integration_by_parts_defect(
    f: &SampledSignal,
    g: &SampledSignal,
    p: FracOrder,
) -> Result<f64> {
    f.grid().ensure_same(g.grid())?;
    let grid = *f.grid();
    let n = grid.n();
    match (f.get(0), g.get(n)) {
        (Some(fa), Some(gb)) if fa.abs() <= 1e-12 && gb.abs() <= 1e-12 => {}
        _ => {
            return domain("integration by parts needs f(a) = 0 and g(b) = 0");
        }
    }
    let left = FracOperator::build(p, Side::Left, Scheme::Gl, &grid)?;
    let right = FracOperator::build(p, Side::Right, Scheme::Gl, &grid)?;
    let lhs = integrate(&left.apply(f)?.mul(g)?)?.value;
    let rhs = integrate(&f.mul(&right.apply(g)?)?)?.value;
    Ok((lhs - rhs).abs() / (1.0 + lhs.abs()))
}

/// Convenience: build and apply in one call.
pub fn derivative(
    s: &SampledSignal,
    order: f64,
    side: Side,
    scheme: Scheme,
) -> Result<SampledSignal> {
    FracOperator::build(FracOrder::new(order)?, side, scheme, s.grid())?.apply(s)
}

impl std::str::FromStr for Side {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "left" => Ok(Side::Left),
            "right" => Ok(Side::Right),
            other => Err(Error::Parse(format!("unknown side `{other}`"))),
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gl" => Ok(Scheme::Gl),
            "l1" => Ok(Scheme::L1),
            other => Err(Error::Parse(format!("unknown scheme `{other}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> Grid {
        Grid::new(0.0, 1.0, n).unwrap()
    }

    fn op(p: f64, side: Side, scheme: Scheme, g: &Grid) -> FracOperator {
        FracOperator::build(FracOrder::new(p).unwrap(), side, scheme, g).unwrap()
    }

    #[test]
    fn gl_weight_values() {
        let w = gl_weights(FracOrder::new(1.0).unwrap(), 5);
        assert_eq!(w, vec![1.0, -1.0, 0.0, 0.0, 0.0, 0.0]);
        let w = gl_weights(FracOrder::new(0.5).unwrap(), 3);
        assert_eq!(w, vec![1.0, -0.5, -0.125, -0.0625]);
    }

    #[test]
    fn gl_partial_sums_positive_and_decreasing() {
        let w = gl_weights(FracOrder::new(0.5).unwrap(), 10_000);
        let mut sum = 0.0;
        let mut prev = f64::INFINITY;
        for (j, wj) in w.iter().enumerate() {
            if j > 0 {
                assert!(*wj < 0.0);
            }
            sum += wj;
            assert!(sum > 0.0 && sum < prev);
            prev = sum;
        }
        // sum_{j<=N} w_j = binom(N - 1/2, N) ~ N^{-1/2}/Γ(1/2)
        assert!(sum < 0.006);
    }

    #[test]
    fn variational_order_range() {
        assert!(FracOrder::variational(0.0).is_err());
        assert!(FracOrder::variational(1.2).is_err());
        assert!(FracOrder::variational(1.0).is_ok());
    }

    #[test]
    fn l1_rejects_order_one() {
        let g = grid(8);
        let r = FracOperator::build(FracOrder::new(1.0).unwrap(), Side::Left, Scheme::L1, &g);
        assert!(matches!(r, Err(Error::Domain(_))));
    }

    #[test]
    fn triangular_structure() {
        let g = grid(12);
        for scheme in [Scheme::Gl, Scheme::L1] {
            for p in [0.3, 0.9, -0.5] {
                let l = op(p, Side::Left, scheme, &g).to_dense();
                let r = op(p, Side::Right, scheme, &g).to_dense();
                for k in 0..=12 {
                    for m in 0..=12 {
                        if m > k {
                            assert_eq!(l[k][m], 0.0);
                        }
                        if m < k {
                            assert_eq!(r[k][m], 0.0);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn order_one_is_first_difference() {
        let g = grid(1000);
        let f = SampledSignal::sample(&g, |t| t * t);
        let d = op(1.0, Side::Left, Scheme::Gl, &g).apply(&f).unwrap();
        assert!(!d.is_valid(0));
        for k in 1..1000 {
            assert!((d.values()[k] - 2.0 * g.node(k)).abs() < 5e-3);
        }
        assert_eq!(op(1.0, Side::Left, Scheme::Gl, &g).reach(), 1);
    }

    #[test]
    fn power_rule_values() {
        let v = power_rule_exact(0.5, 1.0, 0.0, 1.0).unwrap();
        assert!((v - 1.128_379_167_095_512_6).abs() < 1e-14);
        assert!((power_rule_exact(1.0, 2.0, 0.0, 3.0).unwrap() - 6.0).abs() < 1e-12);
        assert_eq!(power_rule_exact(0.5, -0.5, 0.0, 1.0).unwrap(), 0.0);
        assert!(power_rule_exact(0.5, -1.0, 0.0, 1.0).is_err());
        assert!(power_rule_exact(0.5, 1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn constant_has_nonzero_half_derivative() {
        let g = grid(4096);
        let one = SampledSignal::constant(&g, 1.0);
        let d = op(0.5, Side::Left, Scheme::Gl, &g).apply(&one).unwrap();
        assert!(!d.is_valid(0));
        let exact = 1.0 / std::f64::consts::PI.sqrt();
        assert!((d.values()[4096] - exact).abs() / exact < 1e-3);
    }

    #[test]
    fn half_derivative_of_identity() {
        let exact = 1.0 / gamma(1.5);
        let mut prev = f64::INFINITY;
        for n in [64, 256, 1024] {
            let g = grid(n);
            let f = SampledSignal::sample(&g, |t| t);
            let d = op(0.5, Side::Left, Scheme::Gl, &g).apply(&f).unwrap();
            let err = (d.values()[n] - exact).abs();
            assert!(err < prev);
            prev = err;
        }
        assert!(prev < 1e-3);
        // L1 reproduces linear functions exactly
        let g = grid(64);
        let f = SampledSignal::sample(&g, |t| t);
        let d = op(0.5, Side::Left, Scheme::L1, &g).apply(&f).unwrap();
        assert!((d.values()[64] - exact).abs() < 1e-13);
    }

    #[test]
    fn masked_reading_endpoint_is_rejected() {
        let g = grid(16);
        let s = SampledSignal::sample(&g, |t| t.powf(-0.5));
        let r = op(0.5, Side::Left, Scheme::Gl, &g).apply(&s);
        assert!(matches!(r, Err(Error::Domain(_))));
        // the right operator only loses row 0
        let d = op(0.5, Side::Right, Scheme::Gl, &g).apply(&s).unwrap();
        assert!(!d.is_valid(0));
        assert!(d.is_valid(1));
    }

    #[test]
    fn grid_mismatch_is_rejected() {
        let s = SampledSignal::constant(&grid(8), 1.0);
        let r = op(0.5, Side::Left, Scheme::Gl, &grid(16)).apply(&s);
        assert!(matches!(r, Err(Error::GridMismatch { .. })));
    }

    #[test]
    fn singular_endpoint_masking_rules() {
        let g = grid(32);
        let zero_at_a = SampledSignal::sample(&g, |t| t);
        let one_at_a = SampledSignal::sample(&g, |t| 1.0 + t);
        let l = op(0.5, Side::Left, Scheme::Gl, &g);
        assert!(l.apply(&zero_at_a).unwrap().is_fully_valid());
        let d = l.apply(&one_at_a).unwrap();
        assert!(!d.is_valid(0) && d.is_valid(1) && d.is_valid(32));
        // integrals never mask
        let i = op(-0.5, Side::Left, Scheme::Gl, &g);
        assert!(i.apply(&one_at_a).unwrap().is_fully_valid());
        // right side mirrors: (1 + t) is nonzero at b
        let r = op(0.5, Side::Right, Scheme::L1, &g);
        let d = r.apply(&one_at_a).unwrap();
        assert!(!d.is_valid(32) && d.is_valid(31));
    }

    #[test]
    fn l1_integral_exact_for_linear() {
        // I^q t = t^{1+q}/Γ(2+q)
        let g = grid(50);
        let f = SampledSignal::sample(&g, |t| t);
        for q in [0.3, 0.5, 0.8] {
            let d = op(-q, Side::Left, Scheme::L1, &g).apply(&f).unwrap();
            for k in 0..=50 {
                let t = g.node(k);
                let exact = t.powf(1.0 + q) / gamma(2.0 + q);
                assert!((d.values()[k] - exact).abs() < 1e-13, "q={q} k={k}");
            }
        }
    }

    #[test]
    fn right_power_series_against_closed_forms() {
        // υ = 1: (t - a) = L - s  =>  D^p = L s^{-p}/Γ(1-p) - s^{1-p}/Γ(2-p)
        let (a, b, p) = (0.0, 1.0, 0.5);
        for t in [0.0, 0.1, 0.5, 0.99] {
            let s: f64 = b - t;
            let exact = s.powf(-p) / gamma(1.0 - p) - s.powf(1.0 - p) / gamma(2.0 - p);
            let got = right_power_derivative(p, 1.0, a, b, t).unwrap();
            assert!((got - exact).abs() < 1e-12, "t={t}: {got} vs {exact}");
        }
        assert!(right_power_derivative(p, 1.0, a, b, 1.0).unwrap().is_nan());
    }

    #[test]
    fn right_power_series_against_operator() {
        // independent route: fine-grid GL right derivative
        let n = 8192;
        let g = grid(n);
        let f = SampledSignal::sample(&g, |t| t.powf(0.8));
        let d = op(0.5, Side::Right, Scheme::Gl, &g).apply(&f).unwrap();
        for k in [n / 10, n / 2, 9 * n / 10] {
            let t = g.node(k);
            let exact = right_power_derivative(0.5, 0.8, 0.0, 1.0, t).unwrap();
            assert!((d.values()[k] - exact).abs() < 2e-3 * exact.abs().max(1.0), "t={t}");
        }
        // Gauss sum at t = a against the terminating series just inside
        let at_a = right_power_derivative(0.5, 2.0, 0.0, 1.0, 0.0).unwrap();
        let near = right_power_derivative(0.5, 2.0, 0.0, 1.0, 1e-12).unwrap();
        assert!((at_a - near).abs() < 1e-9);
    }

    #[test]
    fn integration_by_parts() {
        let g = grid(1024);
        let f = SampledSignal::sample(&g, |t| t * (1.0 - t));
        let gs = SampledSignal::sample(&g, |t| 1.0 - t);
        let p = FracOrder::new(0.5).unwrap();
        assert!(integration_by_parts_defect(&f, &gs, p).unwrap() < 1e-2);

        let f = SampledSignal::sample(&g, |t| t);
        let p1 = FracOrder::new(1.0).unwrap();
        assert!(integration_by_parts_defect(&f, &gs, p1).unwrap() < 1e-3);

        let zero = SampledSignal::zeros(&g);
        assert_eq!(integration_by_parts_defect(&zero, &gs, p).unwrap(), 0.0);

        let bad = SampledSignal::sample(&g, |t| 1.0 + t);
        assert!(integration_by_parts_defect(&bad, &gs, p).is_err());
    }

    #[test]
    fn regularized_singular_signal_is_annihilated() {
        let n = 2048;
        let g = grid(n);
        let xi = SampledSignal::sample(&g, |t| t.powf(-0.5))
            .regularize_left_endpoint(-0.5)
            .unwrap();
        let d = op(0.5, Side::Left, Scheme::Gl, &g).apply(&xi).unwrap();
        let (lo, hi) = g.window(0.1, 0.0);
        assert!(d.max_abs_in(lo, hi).unwrap() < 5e-2);
    }

    #[test]
    fn operator_csv_dump() {
        let g = grid(2);
        let mut buf = Vec::new();
        op(1.0, Side::Left, Scheme::Gl, &g).write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "2,0,0\n-2,2,0\n0,-2,2\n");
    }
}
