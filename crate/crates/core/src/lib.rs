//! Numerical laboratory for β-Hua-Pickrell interacting particle systems.
//!
//! The crate is organised by subsystem:
//!
//! * [`model`]: parameters, configurations in the Weyl chamber, and the
//!   symmetric-function kernel with its algebraic identities.
//! * [`pseudojacobi`]: pseudo-Jacobi and classical Jacobi polynomials, their
//!   zeros, the electrostatic characterisation and orthogonality checks.
//! * [`dynamics`]: the frozen (β = ∞) flow, the finite-β SDE, the
//!   elementary-symmetric flow, transformed flows and the heat equation.
//! * [`measures`]: Hua-Pickrell densities, Metropolis sampling, the
//!   equilibrium measure and empirical measures.
//! * [`spectral_stats`]: limiting moment ODEs, Cauchy-transform PDE, CLT
//!   covariance matrices and the Monte Carlo freezing harness.
//!
//! Supporting numerics (complex log-gamma, adaptive quadrature, seeded RNG
//! streams, ODE stepping) live in [`special`], [`quadrature`], [`rng`] and
//! [`ode`].

// `!(x > 0.0)` style guards are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod dynamics;
pub mod error;
pub mod measures;
pub mod model;
pub mod ode;
pub mod poly;
pub mod pseudojacobi;
pub mod quadrature;
pub mod rng;
pub mod special;
pub mod spectral_stats;

pub use error::{Error, Result};
pub use model::{BetaParam, Configuration, ModelParams, Trajectory};
