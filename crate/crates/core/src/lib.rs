//! Relative equilibria of three bodies on the unit sphere under the
//! cotangent potential.
//!
//! Shapes are triples of arc angles `(sigma1, sigma2, sigma3)`. The crate
//! evaluates the Lagrange and Euler shape conditions, inverts them for the
//! mass ratios, embeds solutions as rotating configurations, verifies them by
//! direct integration, and traces one-dimensional families of solutions with
//! their bifurcation events.

pub mod continuation;
pub mod dynamics;
pub mod embedding;
pub mod error;
pub mod inverse_mass;
pub mod roots;
pub mod shape_core;
pub mod symmetric_families;
pub mod verify;

pub use error::{Error, Result};
pub use shape_core::{LambdaTriple, MassTriple, Region, Shape};
