//! Entropy of heat flow on model Riemannian manifolds.
//!
//! The crate computes the entropy `-int u log u` and its time derivative for
//! solutions of `du/dt = (1/2) Lap u` on the circle, the flat 2-torus (with
//! or without a gradient drift), zonal data on the round 2-sphere, and for the
//! heat kernel of three-dimensional hyperbolic space, and checks the curvature
//! and spectral-gap bounds on the entropy rate against those computations.
//!
//! Modules:
//! - [`quadrature`]: adaptive Gauss-Kronrod integration on `[0, inf)`.
//! - [`specfun`]: `erf`, `log(sinh x / x)`, closed-form Gaussian-hyperbolic moments.
//! - [`h3`]: the hyperbolic heat kernel, its entropy decomposition and envelopes.
//! - [`spectral`]: exact spectral heat flow on the compact model manifolds.
//! - [`bounds`]: closed-form entropy-rate bounds and trace checking.
//! - [`verify`]: the named verification checks behind the `verify` subcommand.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod error;
pub mod format;
pub mod h3;
pub mod quadrature;
pub mod scaled;
pub mod specfun;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use quadrature::{QuadratureResult, QuadratureSpec};
pub use scaled::ExpScaled;
