//! Stein discrepancies built from reverse hazard rates, with certified
//! Kolmogorov / total-variation / Wasserstein-1 bounds for the Fréchet
//! approximation of normalized maxima.
//!
//! The crate has four layers:
//!
//! * numeric kernels: [`special`] (gamma family), [`quad`] (adaptive
//!   Gauss–Kronrod), [`roots`] (sign-change isolation);
//! * the distribution model in [`dist`]: a catalog of heavy-tailed laws,
//!   the Fréchet family, and the maxima transform with its normalizing
//!   sequences;
//! * the discrepancy machinery in [`stein`] (the discrepancies, distance
//!   bounds and closed forms) and [`solver`] (the underlying equation
//!   solutions and their envelope bounds);
//! * validation tooling: [`oracle`] (independent distance computations),
//!   [`karamata`] (regular-variation diagnostics) and [`sweep`]
//!   (n-sweeps, rate fits, CSV/SVG emission).

pub mod dist;
pub mod error;
pub mod karamata;
pub mod oracle;
pub mod quad;
pub mod roots;
pub mod special;
pub mod stein;

pub use dist::{catalog, maxima, scaling_sequence, Frechet, Law, Maxima, Spec};
pub use error::{Error, Result};
pub use quad::{QuadratureConfig, QuadratureResult};
pub use stein::{bounds, delta, delta_w, frechet_delta, BoundReport, DiscrepancyResult};
