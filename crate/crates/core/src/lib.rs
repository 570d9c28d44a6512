//! Simulation and verification toolkit for the invariance principle of
//! products of partial sums of positive random variables.
//!
//! The central statistic is `(prod_{k<=n} S_k / (k mu))^(gamma / sqrt(n))`,
//! handled throughout in log space. Its scaling limit is
//! `exp(int_0^t W(x)/x dx)` for a standard Wiener process `W`, and under the
//! `sqrt(2 n ln ln n)` normalisation its limit points are described by the
//! Strassen ball. The modules mirror that structure:
//!
//! - [`variates`]: positive finite-variance laws and partial sums.
//! - [`wiener`]: Wiener paths on grids and the singular functional `int W(x)/x dx`.
//! - [`prodsum`]: the product-of-sums statistic, its path version and diagnostics.
//! - [`mcengine`]: seeded, order-deterministic Monte Carlo experiments.
//! - [`extremal`]: optimisation over the Strassen ball.
//! - [`lil`]: iterated-logarithm tracking along a single path.
//! - [`checks`]: analytic self-checks used by the `check` command.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod error;
pub mod extremal;
pub mod lil;
pub mod mcengine;
pub mod prodsum;
pub mod quadrature;
pub mod summation;
pub mod variates;
pub mod wiener;

pub use error::{Error, Result};
pub use mcengine::{derive_stream, GaussianSource, SeedStream};
pub use variates::{DistributionSpec, Family, SamplePath};
pub use wiener::{GridFunction, Interpretation};

/// Library version recorded in experiment metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
