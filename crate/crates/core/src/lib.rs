//! Discrete fractional calculus of variations: Riemann–Liouville operators
//! on uniform grids, fractional Euler–Lagrange residuals and extremal
//! solving, and verification of fractional Noether conservation laws.

pub mod catalog;
pub mod csvio;
pub mod error;
pub mod examples;
pub mod fracdiff;
pub mod grid;
pub mod noether;
pub mod special;
pub mod varproblem;

pub use error::{Error, Result};
pub use fracdiff::{FracOperator, FracOrder, Scheme, Side};
pub use grid::{Grid, SampledSignal, VectorPath};
