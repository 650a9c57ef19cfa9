//! Algebraic conditions that single out Lagrange and Euler relative
//! equilibria in the space of arc-angle triples, with their gradients.
//!
//! All routines are pure functions of their inputs. The sphere radius is
//! fixed to one.

mod lagrange;
mod types;

pub use lagrange::{
    ere_equator, ere_meridian_d, ere_meridian_d_gradient, ere_meridian_d_on,
    ere_meridian_d_unchecked, inertia_tensor, lambda_gradients, lambda_gradients_weighted, lambda_mass_coefficients,
    lambda_triple, lre_residual, normalized_lre_residual, region_membership,
    region_membership_with, residual_jacobian, tilde_lambda, tilde_lambda_gradient,
    tilde_lambda_raw,
};
pub use types::{
    cyclic_to_last, others, InertiaTensor, LambdaTriple, MassTriple, Region, Shape, MASS_EQ_TOL,
    SINGULAR_SIN, TOL_NEWTON, TOL_PLANE,
};
