use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{domain, Error, Result};

type EvalFn = Arc<dyn Fn(f64, &[f64], &[f64], &[f64]) -> f64 + Send + Sync>;

/// Analytic partial derivative with respect to one slot of `L`.
pub type PartialFn = Arc<dyn Fn(f64, &[f64], &[f64], &[f64]) -> Vec<f64> + Send + Sync>;

const SELF_CHECK_PROBES: usize = 10;
const SELF_CHECK_SEED: u64 = 0x5eed;
const SELF_CHECK_TOL: f64 = 1e-4;

#[derive(Clone)]
struct Analytic {
    dq: PartialFn,
    ddl: PartialFn,
    ddr: PartialFn,
}

/// `L(t, q, d_l, d_r)` with `q`, `d_l`, `d_r` in `R^n`.
#[derive(Clone)]
pub struct Lagrangian {
    n: usize,
    eval: EvalFn,
    analytic: Option<Analytic>,
    fd_step: f64,
    /// `unused[slot][i]`: `L` stays finite when that coordinate is `NaN`.
    unused: [Vec<bool>; 3],
}

/// Gradients of `L` with respect to `q`, `d_l` and `d_r`.
#[derive(Debug, Clone, PartialEq)]
pub struct Partials {
    pub dq: Vec<f64>,
    pub ddl: Vec<f64>,
    pub ddr: Vec<f64>,
}

impl fmt::Debug for Lagrangian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Lagrangian")
            .field("n", &self.n)
            .field("analytic", &self.analytic.is_some())
            .field("fd_step", &self.fd_step)
            .finish()
    }
}

impl Lagrangian {
    pub fn new(
        n: usize,
        eval: impl Fn(f64, &[f64], &[f64], &[f64]) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if n == 0 {
            return domain("state dimension must be at least 1");
        }
        let eval: EvalFn = Arc::new(eval);
        let unused = detect_unused(n, &eval);
        Ok(Lagrangian {
            n,
            eval,
            analytic: None,
            fd_step: 1e-6,
            unused,
        })
    }

    /// Whether `L` reads coordinate `index` of slot `slot` (0 = q, 1 = d_l,
    /// 2 = d_r), judged by whether a `NaN` there reaches the result.
    pub fn reads(&self, slot: usize, index: usize) -> bool {
        !self.unused[slot][index]
    }

    /// Attaches analytic partials, checked against central differences at
    /// a fixed set of pseudo-random probe points.
    pub fn with_partials(mut self, dq: PartialFn, ddl: PartialFn, ddr: PartialFn) -> Result<Self> {
        self.analytic = Some(Analytic { dq, ddl, ddr });
        self.self_check()?;
        Ok(self)
    }

    pub fn with_fd_step(mut self, step: f64) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return domain(format!("finite-difference step must be positive, got {step}"));
        }
        self.fd_step = step;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn fd_step(&self) -> f64 {
        self.fd_step
    }

    pub fn has_analytic_partials(&self) -> bool {
        self.analytic.is_some()
    }

    pub fn eval(&self, t: f64, q: &[f64], dl: &[f64], dr: &[f64]) -> f64 {
        (self.eval)(t, q, dl, dr)
    }

    pub fn partials(&self, t: f64, q: &[f64], dl: &[f64], dr: &[f64]) -> Result<Partials> {
        match &self.analytic {
            Some(a) => Ok(Partials {
                dq: (a.dq)(t, q, dl, dr),
                ddl: (a.ddl)(t, q, dl, dr),
                ddr: (a.ddr)(t, q, dl, dr),
            }),
            None => self.fd_partials(t, q, dl, dr),
        }
    }

    /// Central differences with step `fd_step * (1 + |x|)` per coordinate.
    /// Masked (`NaN`) inputs give `NaN` entries wherever `L` reads them.
    pub fn fd_partials(&self, t: f64, q: &[f64], dl: &[f64], dr: &[f64]) -> Result<Partials> {
        let mut slots = [q.to_vec(), dl.to_vec(), dr.to_vec()];
        for (s, slot) in slots.iter_mut().enumerate() {
            for (i, x) in slot.iter_mut().enumerate() {
                if self.unused[s][i] {
                    *x = 0.0;
                }
            }
        }
        let inputs_finite = slots.iter().flatten().all(|x| x.is_finite());
        let names = ["q", "d_l", "d_r"];
        let mut out: [Vec<f64>; 3] = Default::default();
        for s in 0..3 {
            let mut grad = Vec::with_capacity(self.n);
            for i in 0..self.n {
                if self.unused[s][i] {
                    grad.push(0.0);
                    continue;
                }
                let x = slots[s][i];
                let step = self.fd_step * (1.0 + x.abs());
                slots[s][i] = x + step;
                let up = (self.eval)(t, &slots[0], &slots[1], &slots[2]);
                slots[s][i] = x - step;
                let down = (self.eval)(t, &slots[0], &slots[1], &slots[2]);
                slots[s][i] = x;
                let g = (up - down) / (2.0 * step);
                if inputs_finite && !g.is_finite() {
                    return Err(Error::NonFinite {
                        slot: names[s],
                        index: i,
                        t,
                    });
                }
                grad.push(g);
            }
            out[s] = grad;
        }
        let [dq, ddl, ddr] = out;
        Ok(Partials { dq, ddl, ddr })
    }

    fn self_check(&self) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(SELF_CHECK_SEED);
        let names = ["q", "d_l", "d_r"];
        for _ in 0..SELF_CHECK_PROBES {
            let t: f64 = rng.random_range(0.0..1.0);
            let draw = |rng: &mut ChaCha8Rng| -> Vec<f64> {
                (0..self.n).map(|_| rng.random_range(-2.0..2.0)).collect()
            };
            let q = draw(&mut rng);
            let dl = draw(&mut rng);
            let dr = draw(&mut rng);
            if !self.eval(t, &q, &dl, &dr).is_finite() {
                continue;
            }
            let analytic = self.partials(t, &q, &dl, &dr)?;
            let numeric = self.fd_partials(t, &q, &dl, &dr)?;
            let pairs = [
                (&analytic.dq, &numeric.dq),
                (&analytic.ddl, &numeric.ddl),
                (&analytic.ddr, &numeric.ddr),
            ];
            for (s, (a, m)) in pairs.into_iter().enumerate() {
                if a.len() != self.n {
                    return domain(format!(
                        "analytic partial for {} returned {} entries, expected {}",
                        names[s],
                        a.len(),
                        self.n
                    ));
                }
                for i in 0..self.n {
                    let scale = 1.0f64.max(a[i].abs()).max(m[i].abs());
                    if !((a[i] - m[i]).abs() <= SELF_CHECK_TOL * scale) {
                        return Err(Error::PartialMismatch {
                            slot: names[s],
                            index: i,
                            analytic: a[i],
                            numeric: m[i],
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

fn detect_unused(n: usize, eval: &EvalFn) -> [Vec<bool>; 3] {
    const PROBE: f64 = 0.37;
    let base = vec![PROBE; n];
    if !eval(PROBE, &base, &base, &base).is_finite() {
        return [vec![false; n], vec![false; n], vec![false; n]];
    }
    let mut unused: [Vec<bool>; 3] = Default::default();
    for (s, flags) in unused.iter_mut().enumerate() {
        for i in 0..n {
            let mut slots = [base.clone(), base.clone(), base.clone()];
            slots[s][i] = f64::NAN;
            flags.push(eval(PROBE, &slots[0], &slots[1], &slots[2]).is_finite());
        }
    }
    unused
}

type ClassicalFn = Arc<dyn Fn(f64, &[f64], &[f64]) -> f64 + Send + Sync>;
type ClassicalPartialFn = Arc<dyn Fn(f64, &[f64], &[f64]) -> Vec<f64> + Send + Sync>;

/// Integer-order Lagrangian `ℒ(t, q, v)`.
#[derive(Clone)]
pub struct ClassicalLagrangian {
    n: usize,
    eval: ClassicalFn,
    dv: Option<ClassicalPartialFn>,
    fd_step: f64,
}

impl fmt::Debug for ClassicalLagrangian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ClassicalLagrangian")
            .field("n", &self.n)
            .field("analytic_dv", &self.dv.is_some())
            .finish()
    }
}

impl ClassicalLagrangian {
    pub fn new(
        n: usize,
        eval: impl Fn(f64, &[f64], &[f64]) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if n == 0 {
            return domain("state dimension must be at least 1");
        }
        Ok(ClassicalLagrangian {
            n,
            eval: Arc::new(eval),
            dv: None,
            fd_step: 1e-6,
        })
    }

    /// `ℒ(t, q, v) = L(t, q, v, -v)`, the classical Lagrangian a fractional
    /// one reduces to at `α = β = 1`.
    pub fn from_fractional(lag: &Lagrangian) -> Self {
        let inner = lag.clone();
        let mut out = ClassicalLagrangian::new(lag.n(), move |t, q, v| {
            let minus: Vec<f64> = v.iter().map(|x| -x).collect();
            inner.eval(t, q, v, &minus)
        })
        .expect("dimension already validated");
        if lag.has_analytic_partials() {
            let inner = lag.clone();
            out.dv = Some(Arc::new(move |t, q, v| {
                let minus: Vec<f64> = v.iter().map(|x| -x).collect();
                let p = inner
                    .partials(t, q, v, &minus)
                    .expect("analytic partials do not fail");
                p.ddl.iter().zip(&p.ddr).map(|(a, b)| a - b).collect()
            }));
        }
        out
    }

    pub fn with_dv(
        mut self,
        dv: impl Fn(f64, &[f64], &[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        self.dv = Some(Arc::new(dv));
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn eval(&self, t: f64, q: &[f64], v: &[f64]) -> f64 {
        (self.eval)(t, q, v)
    }

    /// `∂ℒ/∂v`, analytic when supplied, central differences otherwise.
    pub fn dv(&self, t: f64, q: &[f64], v: &[f64]) -> Vec<f64> {
        if let Some(dv) = &self.dv {
            return dv(t, q, v);
        }
        let mut v = v.to_vec();
        (0..self.n)
            .map(|i| {
                let x = v[i];
                let step = self.fd_step * (1.0 + x.abs());
                v[i] = x + step;
                let up = self.eval(t, q, &v);
                v[i] = x - step;
                let down = self.eval(t, q, &v);
                v[i] = x;
                (up - down) / (2.0 * step)
            })
            .collect()
    }
}
