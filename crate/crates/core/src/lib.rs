//! Numerical one-sided moment generating functions.
//!
//! * [`distributions`]: Fréchet, the Pareto-to-Fréchet sequence, lognormal,
//!   uniform, point masses, CLT-standardized exponential sums, tabulated CDFs.
//! * [`quadrature`]: improper integrals with explicit divergence detection.
//! * [`mgf`]: `M(t)` by density quadrature and by the tail-integral formula.
//! * [`convergence`]: boundedness and weak-convergence verdicts for families,
//!   and the resulting MGF convergence report.
//! * [`montecarlo`]: seeded sampling used as an independent oracle.

pub mod convergence;
pub mod distributions;
pub mod error;
pub mod mgf;
pub mod montecarlo;
pub mod quadrature;

pub use error::{Error, Result};
