//! Kernel interpolation on embedded surfaces with localized Lagrange bases.
//!
//! The crate builds interpolants from conditionally positive definite
//! surface-spline kernels on the unit sphere and on a torus of revolution,
//! in two flavors:
//!
//! * a dense route — assemble the saddle-point system over all nodes and
//!   factor it once (`interpolate`);
//! * a local route — solve one small system per node to get a localized,
//!   near-cardinal basis, then use it as a right preconditioner for GMRES
//!   so the full problem converges in a handful of iterations (`localbasis`,
//!   `solver`).
//!
//! `diagnostics` measures what makes the local route work: the exponential
//! decay of Lagrange functions and of their kernel coefficients away from
//! their center, and the stability of local combinations in L^p.
//!
//! Start with the runnable programs in `examples/`; each one exercises a
//! single capability end to end. A thin `local-lagrange` binary wraps the
//! same entry points for scripted use.

pub mod diagnostics;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod interpolate;
pub mod kernels;
pub mod localbasis;
pub mod solver;

pub use error::{Error, Result};
