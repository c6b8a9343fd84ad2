//! Built-in signal profiles, Lagrangians and generators, addressable by name.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::examples::{example1_generator, example1_lagrangian, example2_generator, example2_lagrangian};
use crate::fracdiff::power_rule_exact;
use crate::grid::{Grid, SampledSignal};
use crate::noether::Generator;
use crate::varproblem::Lagrangian;

/// Closed-form signal on `[a, b]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Profile {
    /// `(t-a)^υ`
    Pow(f64),
    /// `(b-t)^υ`
    RPow(f64),
    /// `sin(t-a)`
    Sin,
    /// `sin(b-t)`
    RSin,
    /// `cos(t-a)`
    Cos,
    Const(f64),
}

impl Profile {
    pub fn eval(&self, a: f64, b: f64, t: f64) -> f64 {
        match *self {
            Profile::Pow(u) => (t - a).powf(u),
            Profile::RPow(u) => (b - t).powf(u),
            Profile::Sin => (t - a).sin(),
            Profile::RSin => (b - t).sin(),
            Profile::Cos => (t - a).cos(),
            Profile::Const(c) => c,
        }
    }

    pub fn sample(&self, grid: &Grid) -> SampledSignal {
        let (a, b) = (grid.a(), grid.b());
        SampledSignal::sample(grid, |t| self.eval(a, b, t))
    }

    /// Exact left derivative of order `p` at `t > a`, for the power and
    /// constant profiles.
    pub fn exact_left_derivative(&self, p: f64, a: f64, t: f64) -> Option<f64> {
        match *self {
            Profile::Pow(u) => power_rule_exact(p, u, a, t).ok(),
            Profile::Const(c) => power_rule_exact(p, 0.0, a, t).ok().map(|v| c * v),
            _ => None,
        }
    }
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let num = |arg: Option<&str>| -> Result<f64> {
            let a = arg.ok_or_else(|| Error::Parse(format!("profile `{name}` needs a value, e.g. `{name}:1`")))?;
            a.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number `{a}` in profile `{s}`")))
        };
        match name {
            "pow" => Ok(Profile::Pow(num(arg)?)),
            "rpow" => Ok(Profile::RPow(num(arg)?)),
            "const" => Ok(Profile::Const(num(arg)?)),
            "sin" if arg.is_none() => Ok(Profile::Sin),
            "rsin" if arg.is_none() => Ok(Profile::RSin),
            "cos" if arg.is_none() => Ok(Profile::Cos),
            _ => Err(Error::Parse(format!(
                "unknown profile `{s}`; expected pow:u, rpow:u, sin, rsin, cos or const:c"
            ))),
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Profile::Pow(u) => write!(f, "pow:{u}"),
            Profile::RPow(u) => write!(f, "rpow:{u}"),
            Profile::Sin => write!(f, "sin"),
            Profile::RSin => write!(f, "rsin"),
            Profile::Cos => write!(f, "cos"),
            Profile::Const(c) => write!(f, "const:{c}"),
        }
    }
}

pub const LAGRANGIANS: &[&str] = &["free_particle", "harmonic", "linear", "example1", "example2"];

/// Built-in Lagrangians:
/// `free_particle` `d_l²/2`, `harmonic` `(d_l² - q²)/2`, `linear` `d_l`,
/// and the two worked examples.
pub fn lagrangian(name: &str) -> Result<Lagrangian> {
    let zero1: crate::varproblem::PartialFn = Arc::new(|_, _, _, _| vec![0.0]);
    match name {
        "free_particle" => Lagrangian::new(1, |_, _, dl, _| 0.5 * dl[0] * dl[0])?.with_partials(
            zero1.clone(),
            Arc::new(|_, _, dl, _| vec![dl[0]]),
            zero1,
        ),
        "harmonic" => Lagrangian::new(1, |_, q, dl, _| 0.5 * (dl[0] * dl[0] - q[0] * q[0]))?
            .with_partials(
                Arc::new(|_, q, _, _| vec![-q[0]]),
                Arc::new(|_, _, dl, _| vec![dl[0]]),
                zero1,
            ),
        "linear" => Lagrangian::new(1, |_, _, dl, _| dl[0])?.with_partials(
            zero1.clone(),
            Arc::new(|_, _, _, _| vec![1.0]),
            zero1,
        ),
        "example1" => example1_lagrangian(),
        "example2" => example2_lagrangian(),
        other => Err(Error::Parse(format!(
            "unknown lagrangian `{other}`; expected one of {}",
            LAGRANGIANS.join(", ")
        ))),
    }
}

pub const GENERATORS: &[&str] = &[
    "example1",
    "example1_wrong",
    "example2",
    "example2_wrong",
    "translation",
    "time_translation",
    "zero",
];

/// Built-in generators for state dimension `n`. The `_wrong` variants are
/// negative controls: `example1_wrong` adds `ξ₁ = q₁`, `example2_wrong`
/// flips the sign of `τ`.
pub fn generator(name: &str, n: usize) -> Result<Generator> {
    let need = |want: usize| -> Result<()> {
        if n != want {
            return Err(Error::Domain(format!(
                "generator `{name}` has dimension {want}, problem has {n}"
            )));
        }
        Ok(())
    };
    match name {
        "example1" => {
            need(3)?;
            example1_generator()
        }
        "example1_wrong" => {
            need(3)?;
            Generator::new(3, |t, _| -t, |_, q| vec![q[0], 0.0, q[2]])
        }
        "example2" => {
            need(4)?;
            example2_generator()
        }
        "example2_wrong" => {
            need(4)?;
            Generator::new(
                4,
                |t, _| -2.0 * t / 3.0,
                |_, q| vec![q[0], -q[1], q[2] / 3.0, -q[3] / 3.0],
            )
        }
        "translation" => Generator::spatial(n, move |_, _| vec![1.0; n]),
        "time_translation" => Generator::new(n, |_, _| 1.0, move |_, _| vec![0.0; n]),
        "zero" => Generator::spatial(n, move |_, _| vec![0.0; n]),
        other => Err(Error::Parse(format!(
            "unknown generator `{other}`; expected one of {}",
            GENERATORS.join(", ")
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_round_trip() {
        for s in ["pow:0.8", "rpow:1.5", "sin", "rsin", "cos", "const:2"] {
            let p: Profile = s.parse().unwrap();
            assert_eq!(p.to_string(), s);
        }
        assert!("pow".parse::<Profile>().is_err());
        assert!("sin:2".parse::<Profile>().is_err());
        assert!("tan".parse::<Profile>().is_err());
    }

    #[test]
    fn reflected_profiles() {
        assert_eq!(Profile::RPow(2.0).eval(0.0, 1.0, 0.25), 0.5625);
        assert_eq!(Profile::RSin.eval(0.0, 1.0, 1.0), 0.0);
    }

    #[test]
    fn catalog_lookups() {
        for name in LAGRANGIANS {
            assert!(lagrangian(name).is_ok(), "{name}");
        }
        assert!(lagrangian("nope").is_err());
        assert!(generator("example1", 3).is_ok());
        assert!(generator("example1", 2).is_err());
        assert!(generator("translation", 5).is_ok());
    }
}
