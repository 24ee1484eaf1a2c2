//! Pseudo-spectral laboratory for the fractional Navier-Stokes equations
//!
//! ```text
//! u_t + (u . grad) u + grad p = -nu (-Lap)^alpha u,   div u = 0,   x in T^3
//! ```
//!
//! built around the plane-wave norm-inflation construction: lacunary pairs of
//! waves whose mutual interaction transfers energy to the lowest mode and
//! inflates negative-index Besov norms.
//!
//! * [`spectral`]: fields, FFTs, heat semigroup, Leray projection, products.
//! * [`besov`]: Littlewood-Paley and heat-semigroup Besov norms.
//! * [`construction`]: the initial data and its parameter constraints.
//! * [`oracles`]: closed-form first Picard iterate.
//! * [`solver`]: mild-solution time stepping, Duhamel quadrature, decomposition.
//! * [`harness`]: experiment configs, CSV series, sweeps and lemma checks.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod besov;
pub mod construction;
pub mod error;
pub mod harness;
pub mod oracles;
pub mod quadrature;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
