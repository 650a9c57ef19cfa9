use std::f64::consts::PI;
use std::fmt;

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};

/// Tolerance for plane and boundary membership tests.
pub const TOL_PLANE: f64 = 1e-9;
/// Tolerance on normalized residual norms of the defining equations.
pub const TOL_NEWTON: f64 = 1e-12;
/// Shapes with `min sin(sigma_k)` below this are rejected by the evaluators.
pub const SINGULAR_SIN: f64 = 1e-8;
/// Relative tolerance under which two masses count as equal.
pub const MASS_EQ_TOL: f64 = 1e-12;

/// Triple of great-circle arc angles on the unit sphere.
///
/// `sigma(k)` is the minor arc between the two bodies other than `k`
/// (0-based: `sigma(0)` joins bodies 1 and 2 in the 1-based labels used
/// in printed output, i.e. the arc opposite body 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Shape {
    sigma: [f64; 3],
}

impl Shape {
    pub const fn new(sigma1: f64, sigma2: f64, sigma3: f64) -> Self {
        Self {
            sigma: [sigma1, sigma2, sigma3],
        }
    }

    pub fn equilateral(a: f64) -> Self {
        Self::new(a, a, a)
    }

    /// Isosceles shape with `sigma1 = sigma2 = sigma`.
    pub fn isosceles(sigma: f64, sigma3: f64) -> Self {
        Self::new(sigma, sigma, sigma3)
    }

    #[inline]
    pub fn sigma(&self, k: usize) -> f64 {
        self.sigma[k]
    }

    #[inline]
    pub fn as_array(&self) -> [f64; 3] {
        self.sigma
    }

    pub fn to_vector(&self) -> Vector3<f64> {
        Vector3::from(self.sigma)
    }

    pub fn from_vector(v: &Vector3<f64>) -> Self {
        Self::new(v[0], v[1], v[2])
    }

    pub fn sum(&self) -> f64 {
        self.sigma.iter().sum()
    }

    /// Distance to the open cube boundary, `min_k min(sigma_k, pi - sigma_k)`.
    pub fn cube_margin(&self) -> f64 {
        self.sigma
            .iter()
            .map(|&s| s.min(PI - s))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn min_sin(&self) -> f64 {
        self.sigma
            .iter()
            .map(|s| s.sin().abs())
            .fold(f64::INFINITY, f64::min)
    }

    /// `sigma_i + sigma_j - sigma_k`; negative means the shape is past the
    /// collinear plane on which body `k` sits between the other two.
    pub fn meridian_gap(&self, k: usize) -> f64 {
        let (i, j) = others(k);
        self.sigma[i] + self.sigma[j] - self.sigma[k]
    }

    /// `2 pi - sum(sigma)`; negative past the equator plane.
    pub fn equator_gap(&self) -> f64 {
        2.0 * PI - self.sum()
    }

    pub fn is_in_u(&self) -> bool {
        self.sigma.iter().all(|&s| s > 0.0 && s < PI)
    }

    /// Membership in the closed physical region (triangle inequalities).
    pub fn is_in_u_phys(&self) -> bool {
        self.is_in_u() && (0..3).all(|k| self.meridian_gap(k) >= 0.0) && self.equator_gap() >= 0.0
    }

    /// Relabel bodies: the new body `n` is the old body `perm[n]`.
    pub fn permuted(&self, perm: [usize; 3]) -> Self {
        Self::new(
            self.sigma[perm[0]],
            self.sigma[perm[1]],
            self.sigma[perm[2]],
        )
    }

    pub(crate) fn check_singular(&self) -> Result<()> {
        if !self.sigma.iter().all(|s| s.is_finite()) {
            return Err(Error::Domain(format!("non-finite shape {self}")));
        }
        if self.min_sin() < SINGULAR_SIN {
            return Err(Error::Domain(format!(
                "shape {self} touches sin(sigma) = 0"
            )));
        }
        Ok(())
    }

    pub fn max_abs_diff(&self, other: &Shape) -> f64 {
        (0..3)
            .map(|k| (self.sigma[k] - other.sigma[k]).abs())
            .fold(0.0, f64::max)
    }
}

impl From<[f64; 3]> for Shape {
    fn from(sigma: [f64; 3]) -> Self {
        Self { sigma }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({:.6}, {:.6}, {:.6})",
            self.sigma[0], self.sigma[1], self.sigma[2]
        )
    }
}

/// The two indices other than `k`, in cyclic order.
#[inline]
pub fn others(k: usize) -> (usize, usize) {
    ((k + 1) % 3, (k + 2) % 3)
}

/// Cyclic relabeling that moves index `k` into the last slot.
#[inline]
pub fn cyclic_to_last(k: usize) -> [usize; 3] {
    let (i, j) = others(k);
    [i, j, k]
}

/// Three positive masses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassTriple {
    m: [f64; 3],
}

impl MassTriple {
    pub fn new(m1: f64, m2: f64, m3: f64) -> Result<Self> {
        let m = [m1, m2, m3];
        if m.iter().any(|&x| !(x.is_finite() && x > 0.0)) {
            return Err(Error::Domain(format!(
                "masses must be positive and finite, got ({m1}, {m2}, {m3})"
            )));
        }
        Ok(Self { m })
    }

    pub fn equal() -> Self {
        Self { m: [1.0; 3] }
    }

    /// `(nu1, nu2, 1)`.
    pub fn from_ratios(nu1: f64, nu2: f64) -> Result<Self> {
        Self::new(nu1, nu2, 1.0)
    }

    /// Two-nearly-equal parametrization: `(nu - dnu, nu + dnu, 1)`.
    pub fn from_nu_dnu(nu: f64, dnu: f64) -> Result<Self> {
        Self::new(nu - dnu, nu + dnu, 1.0)
    }

    /// `m1 = m2 = nu`, `m3 = 1`.
    pub fn partial_equal(nu: f64) -> Result<Self> {
        Self::new(nu, nu, 1.0)
    }

    #[inline]
    pub fn m(&self, k: usize) -> f64 {
        self.m[k]
    }

    pub fn as_array(&self) -> [f64; 3] {
        self.m
    }

    pub fn total(&self) -> f64 {
        self.m.iter().sum()
    }

    /// `(m1/m3, m2/m3)`.
    pub fn ratios(&self) -> (f64, f64) {
        (self.m[0] / self.m[2], self.m[1] / self.m[2])
    }

    /// `(nu, dnu)` with `nu = (nu1 + nu2)/2`, `dnu = (nu2 - nu1)/2`.
    pub fn nu_dnu(&self) -> (f64, f64) {
        let (n1, n2) = self.ratios();
        (0.5 * (n1 + n2), 0.5 * (n2 - n1))
    }

    pub fn permuted(&self, perm: [usize; 3]) -> Self {
        Self {
            m: [self.m[perm[0]], self.m[perm[1]], self.m[perm[2]]],
        }
    }

    pub fn pair_equal(&self, i: usize, j: usize) -> bool {
        (self.m[i] - self.m[j]).abs() <= MASS_EQ_TOL * self.m[i].max(self.m[j])
    }

    pub fn all_equal(&self) -> bool {
        self.pair_equal(0, 1) && self.pair_equal(1, 2)
    }

    /// The unique equal pair when exactly two masses coincide.
    pub fn equal_pair(&self) -> Option<(usize, usize)> {
        if self.all_equal() {
            return None;
        }
        [(0, 1), (1, 2), (0, 2)]
            .into_iter()
            .find(|&(i, j)| self.pair_equal(i, j))
    }

    pub fn all_distinct(&self) -> bool {
        !self.all_equal() && self.equal_pair().is_none()
    }
}

impl fmt::Display for MassTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.m[0], self.m[1], self.m[2])
    }
}

/// Values of the three expressions whose common value is the eigenvalue of the inertia tensor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaTriple {
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
}

impl LambdaTriple {
    pub fn get(&self, k: usize) -> f64 {
        [self.lambda1, self.lambda2, self.lambda3][k]
    }

    pub fn lambda12(&self) -> f64 {
        self.lambda1 - self.lambda2
    }

    pub fn lambda23(&self) -> f64 {
        self.lambda2 - self.lambda3
    }

    pub fn lambda31(&self) -> f64 {
        self.lambda3 - self.lambda1
    }

    pub fn max_abs(&self) -> f64 {
        self.lambda1
            .abs()
            .max(self.lambda2.abs())
            .max(self.lambda3.abs())
    }

    pub fn mean(&self) -> f64 {
        (self.lambda1 + self.lambda2 + self.lambda3) / 3.0
    }
}

/// Symmetric 3x3 representation of the inertia tensor in shape variables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InertiaTensor(pub Matrix3<f64>);

impl InertiaTensor {
    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }
}

/// Finest region label for an arbitrary angle triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Outside,
    InU,
    InUPhys,
    /// On the collinear plane where body `k` (0-based) sits between the other two.
    OnMeridianPlane(usize),
    OnEquatorPlane,
}
