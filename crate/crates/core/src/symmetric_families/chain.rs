//! Divided-difference chain of the equal-mass reduced function.
//!
//! `g0(x, y, z)` is the reduced difference with unit mass ratio. The next
//! functions are defined by
//!
//! ```text
//! g0(x,y,z) - g0(x,z,y) =  2 sin(y - z)        g1(x,y,z)
//! g1(x,y,z) - g1(y,x,z) = -2 (cos x - cos y)   g2(x,y,z)
//! g2(x,y,z) - g2(x,z,y) = 16 (cos y - cos z)   g3(x,y,z)
//! ```
//!
//! `g1` and `g2` are finite cosine sums, tabulated below as
//! `(a, b, c, coeff)` for `coeff * cos(a x + b y + c z)`.

use crate::shape_core::tilde_lambda_raw;

type Term = (i32, i32, i32, f64);

const G1: [Term; 18] = [
    (1, -2, 0, 1.0 / 16.0),
    (1, -2, 2, -1.0 / 32.0),
    (1, 0, -2, 1.0 / 16.0),
    (1, 0, 0, 1.0 / 4.0),
    (1, 0, 2, -3.0 / 32.0),
    (1, 0, 4, 1.0 / 32.0),
    (1, 2, -2, -1.0 / 32.0),
    (1, 2, 0, -3.0 / 32.0),
    (1, 2, 2, -3.0 / 16.0),
    (1, 2, 4, 1.0 / 32.0),
    (1, 4, 0, 1.0 / 32.0),
    (1, 4, 2, 1.0 / 32.0),
    (3, -2, 0, -1.0 / 32.0),
    (3, 0, -2, -1.0 / 32.0),
    (3, 0, 0, -3.0 / 32.0),
    (3, 0, 2, 1.0 / 32.0),
    (3, 2, 0, 1.0 / 32.0),
    (5, 0, 0, 1.0 / 32.0),
];

const G2: [Term; 18] = [
    (0, 0, 0, -3.0 / 32.0),
    (0, 0, 2, -3.0 / 32.0),
    (0, 2, -2, 1.0 / 32.0),
    (0, 2, 0, 3.0 / 32.0),
    (0, 4, 0, -1.0 / 32.0),
    (1, -3, 0, -1.0 / 32.0),
    (1, -1, 0, 3.0 / 16.0),
    (1, 1, 0, -1.0 / 32.0),
    (1, 1, 2, -3.0 / 16.0),
    (1, 1, 4, 1.0 / 32.0),
    (1, 3, 2, 1.0 / 32.0),
    (2, 0, -2, 1.0 / 32.0),
    (2, 0, 0, 3.0 / 32.0),
    (2, 2, 0, -1.0 / 32.0),
    (2, 2, 2, 1.0 / 32.0),
    (3, -1, 0, -1.0 / 32.0),
    (3, 1, 2, 1.0 / 32.0),
    (4, 0, 0, -1.0 / 32.0),
];

fn cosine_sum(terms: &[Term], x: f64, y: f64, z: f64) -> f64 {
    terms
        .iter()
        .map(|&(a, b, c, k)| k * (a as f64 * x + b as f64 * y + c as f64 * z).cos())
        .sum()
}

pub fn g0(x: f64, y: f64, z: f64) -> f64 {
    tilde_lambda_raw(x, y, z, 1.0)
}

pub fn g1(x: f64, y: f64, z: f64) -> f64 {
    cosine_sum(&G1, x, y, z)
}

pub fn g2(x: f64, y: f64, z: f64) -> f64 {
    cosine_sum(&G2, x, y, z)
}

/// Totally symmetric end of the chain.
pub fn g3(x: f64, y: f64, z: f64) -> f64 {
    (3.0 - (2.0 * x).cos() - (2.0 * y).cos() - (2.0 * z).cos())
        * (0.5 * (x + y)).cos()
        * (0.5 * (y + z)).cos()
        * (0.5 * (z + x)).cos()
        / 32.0
}
