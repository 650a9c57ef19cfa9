//! Inverse problem for general masses: the mass ratios that make a given
//! shape a Lagrange solution, the rank-drop curve `h = 0` on the collinear
//! planes, and the meridian bifurcation points for given mass ratios.
//!
//! Planar routines use labels where body 3 sits between bodies 1 and 2
//! (`sigma3 = sigma1 + sigma2`); the `_on` variants relabel cyclically.

use std::f64::consts::PI;

use nalgebra::{Matrix2, Matrix2x3, Matrix3, Vector2, Vector3};

use crate::error::{Error, Result};
use crate::roots::{bisect, golden_min};
use crate::shape_core::{
    cyclic_to_last, ere_meridian_d_gradient, lambda_gradients_weighted, lambda_mass_coefficients,
    MassTriple, Shape,
};
use crate::symmetric_families::sigma_e;

/// Relative singular-value gap below which a matrix counts as rank deficient.
pub const RANK_TOL: f64 = 1e-9;
/// `|h|` accepted as on the curve.
pub const H_TOL: f64 = 1e-8;
/// Grid cells used to isolate meridian roots.
pub const MERIDIAN_GRID: usize = 4096;
/// `|F|` at a local extremum accepted as a double root.
pub const TANGENCY_TOL: f64 = 1e-10;

/// Mass ratios `(nu1, nu2) = (m1/m3, m2/m3)` solving the Lagrange conditions at a fixed shape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MassSolution {
    UniquePositive {
        nu1: f64,
        nu2: f64,
        det_s_tilde: f64,
    },
    UniqueNonpositive {
        nu1: f64,
        nu2: f64,
        det_s_tilde: f64,
    },
    /// All `(nu1, nu2)` with `row . (nu1, nu2, 1) = 0`.
    OneParameterFamily { row: [f64; 3], det_s_tilde: f64 },
    NoSolution { det_s_tilde: f64 },
}

impl MassSolution {
    pub fn det_s_tilde(&self) -> f64 {
        match *self {
            MassSolution::UniquePositive { det_s_tilde, .. }
            | MassSolution::UniqueNonpositive { det_s_tilde, .. }
            | MassSolution::OneParameterFamily { det_s_tilde, .. }
            | MassSolution::NoSolution { det_s_tilde } => det_s_tilde,
        }
    }

    pub fn ratios(&self) -> Option<(f64, f64)> {
        match *self {
            MassSolution::UniquePositive { nu1, nu2, .. }
            | MassSolution::UniqueNonpositive { nu1, nu2, .. } => Some((nu1, nu2)),
            _ => None,
        }
    }

    pub fn is_unique_positive(&self) -> bool {
        matches!(self, MassSolution::UniquePositive { .. })
    }

    /// `nu2` on a one-parameter family.
    pub fn family_nu2(&self, nu1: f64) -> Option<f64> {
        match *self {
            MassSolution::OneParameterFamily { row, .. } if row[1] != 0.0 => {
                Some(-(row[2] + row[0] * nu1) / row[1])
            }
            _ => None,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            MassSolution::UniquePositive { .. } => "unique-positive",
            MassSolution::UniqueNonpositive { .. } => "unique-nonpositive",
            MassSolution::OneParameterFamily { .. } => "one-parameter-family",
            MassSolution::NoSolution { .. } => "no-solution",
        }
    }
}

/// The 2x3 matrix `S` with `S (m1, m2, m3)^t = (lambda12, lambda23)^t`.
pub fn s_matrix(shape: &Shape) -> Result<Matrix2x3<f64>> {
    let c = lambda_mass_coefficients(shape)?;
    let mut s = Matrix2x3::zeros();
    for i in 0..3 {
        s[(0, i)] = c[(0, i)] - c[(1, i)];
        s[(1, i)] = c[(1, i)] - c[(2, i)];
    }
    Ok(s)
}

// Row then column equilibration; keeps the rank, removes the sin^-3 scales.
fn equilibrated<R: nalgebra::Dim, C: nalgebra::Dim, S>(m: &nalgebra::Matrix<f64, R, C, S>) -> nalgebra::OMatrix<f64, R, C>
where
    S: nalgebra::Storage<f64, R, C>,
    nalgebra::DefaultAllocator: nalgebra::allocator::Allocator<R, C>,
{
    let mut a = m.clone_owned();
    for mut row in a.row_iter_mut() {
        let s = row.amax();
        if s > 0.0 {
            row /= s;
        }
    }
    for mut col in a.column_iter_mut() {
        let s = col.amax();
        if s > 0.0 {
            col /= s;
        }
    }
    a
}

fn numeric_rank(singular: &[f64]) -> usize {
    let top = singular.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    singular.iter().filter(|&&v| v > RANK_TOL * top).count()
}

pub fn mass_ratios_for_shape(shape: &Shape) -> Result<MassSolution> {
    let s = s_matrix(shape)?;
    let st = Matrix2::new(s[(0, 0)], s[(0, 1)], s[(1, 0)], s[(1, 1)]);
    let det = st.determinant();
    let rank_s = numeric_rank(equilibrated(&s).svd(false, false).singular_values.as_slice());
    let rank_st = numeric_rank(equilibrated(&st).svd(false, false).singular_values.as_slice());
    if rank_st == 2 {
        let rhs = Vector2::new(-s[(0, 2)], -s[(1, 2)]);
        let nu = st
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Domain(format!("singular S~ at {shape}")))?;
        let (nu1, nu2) = (nu[0], nu[1]);
        return Ok(if nu1 > 0.0 && nu2 > 0.0 {
            MassSolution::UniquePositive {
                nu1,
                nu2,
                det_s_tilde: det,
            }
        } else {
            MassSolution::UniqueNonpositive {
                nu1,
                nu2,
                det_s_tilde: det,
            }
        });
    }
    if rank_s == 2 {
        return Ok(MassSolution::NoSolution { det_s_tilde: det });
    }
    let r0 = s.row(0);
    let r1 = s.row(1);
    let row = if r0.norm() >= r1.norm() { r0 } else { r1 };
    Ok(MassSolution::OneParameterFamily {
        row: [row[0], row[1], row[2]],
        det_s_tilde: det,
    })
}

/// Point `(sigma1, sigma2)` of the collinear plane `sigma3 = sigma1 + sigma2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanePoint {
    pub sigma1: f64,
    pub sigma2: f64,
}

impl PlanePoint {
    pub fn new(sigma1: f64, sigma2: f64) -> Self {
        Self { sigma1, sigma2 }
    }

    pub fn sigma3(&self) -> f64 {
        self.sigma1 + self.sigma2
    }

    pub fn shape(&self) -> Shape {
        Shape::new(self.sigma1, self.sigma2, self.sigma3())
    }
}

/// `h = cos 3 s3 - 3 cos s3 + 2 cos 2 s3 cos(s1 - s2)`.
pub fn h_residual(p: &PlanePoint) -> f64 {
    let s3 = p.sigma3();
    (3.0 * s3).cos() - 3.0 * s3.cos() + 2.0 * (2.0 * s3).cos() * (p.sigma1 - p.sigma2).cos()
}

/// `cos(sigma1 - sigma2)` on `h = 0` as a function of `sigma3`.
pub fn cos_delta_on_h(sigma3: f64) -> f64 {
    (3.0 * sigma3.cos() - (3.0 * sigma3).cos()) / (2.0 * (2.0 * sigma3).cos())
}

/// Derivative of [`cos_delta_on_h`].
pub fn cos_delta_on_h_derivative(sigma3: f64) -> f64 {
    let c2 = (2.0 * sigma3).cos();
    (9.0 + 4.0 * c2 + (4.0 * sigma3).cos()) * sigma3.sin() / (2.0 * c2 * c2)
}

/// Largest `sigma3` on the h curve, `2 sigma_E`.
pub fn h_curve_sigma3_max() -> f64 {
    2.0 * sigma_e()
}

/// Point of the h curve at `sigma3 in (pi/2, 2 sigma_E]`, with
/// `sigma2 - sigma1` of sign `side`.
pub fn h_curve_point(sigma3: f64, side: f64) -> Result<PlanePoint> {
    if !(sigma3 > 0.5 * PI && sigma3 <= h_curve_sigma3_max() + 1e-15) {
        return Err(Error::Domain(format!(
            "sigma3 = {sigma3} outside (pi/2, 2 sigma_E]"
        )));
    }
    let delta = cos_delta_on_h(sigma3).clamp(-1.0, 1.0).acos() * side.signum();
    Ok(PlanePoint::new(0.5 * (sigma3 - delta), 0.5 * (sigma3 + delta)))
}

/// Components of `S_row1 x S_row2` which the closed form fixes:
/// `(sin s2 / sin s1, sin s1 / sin s2) h / 2`.
pub fn s_row_cross_closed_form(p: &PlanePoint) -> (f64, f64) {
    let (s1, s2) = (p.sigma1.sin(), p.sigma2.sin());
    let h = h_residual(p);
    (0.5 * h * s2 / s1, 0.5 * h * s1 / s2)
}

/// The affine relation between `nu1` and `nu2` on the h curve.
pub fn mass_family_on_h(p: &PlanePoint, nu1: f64) -> Result<f64> {
    mass_family_on_h_with(p, nu1, H_TOL)
}

pub fn mass_family_on_h_with(p: &PlanePoint, nu1: f64, tol: f64) -> Result<f64> {
    let h = h_residual(p);
    if h.abs() > tol {
        return Err(Error::OffCurve { h });
    }
    let (slope, intercept) = family_coefficients(p);
    Ok(slope * nu1 + intercept)
}

/// `(slope, intercept)` of `nu2 = slope * nu1 + intercept`, from `lambda12 = 0`.
pub fn family_coefficients(p: &PlanePoint) -> (f64, f64) {
    let (a1, a2, a3) = (p.sigma1, p.sigma2, p.sigma3());
    let (t1, t2, t3) = (a1.sin().powi(3), a2.sin().powi(3), a3.sin().powi(3));
    let den = 1.0 - a3.cos() * t2 / t1;
    let slope = (1.0 - a3.cos() * t1 / t2) / den;
    let intercept = (a2.cos() / t1 - a1.cos() / t2) * t3 / den;
    (slope, intercept)
}

/// The factor `r` of `d = sin(s1 - s2) h r` once `nu2` follows the affine relation.
pub fn d_factor_r(p: &PlanePoint, nu1: f64) -> f64 {
    let (a1, a2, a3) = (p.sigma1, p.sigma2, p.sigma3());
    let num = a3.cos()
        * (1.0 - (2.0 * a3).cos() + nu1 * (1.0 - (2.0 * a1).cos()))
        * (a3.cos() - (2.0 * a3).cos() * (a1 - a2).cos());
    let den = 4.0
        * (1.0 - a3.cos() * a2.sin().powi(3) / a1.sin().powi(3))
        * a1.sin().powi(4)
        * a2.sin().powi(2)
        * a3.sin().powi(2);
    num / den
}

/// Closed-form `det M` for the Euler-family gradient on the h curve.
pub fn det_m_closed_form(p: &PlanePoint) -> f64 {
    let (a1, a2, a3) = (p.sigma1, p.sigma2, p.sigma3());
    let c2 = (2.0 * a3).cos();
    8.0 * (a1 - a2).sin() * a3.sin().powi(5) * (3.0 + 3.0 * c2 + (4.0 * a3).cos())
        / (c2 * c2
            * a1.sin().powi(4)
            * a2.sin().powi(4)
            * (1.0 - a3.cos() * a2.sin().powi(3) / a1.sin().powi(3)))
}

/// The trigonometric polynomial `n(sigma3)` entering `det A`.
pub fn n_polynomial(sigma3: f64) -> f64 {
    let c = |k: f64| (k * sigma3).cos();
    -710.0 - 1108.0 * c(2.0) - 449.0 * c(4.0) - 100.0 * c(6.0)
        + 6.0 * c(8.0)
        + 8.0 * c(10.0)
        + c(12.0)
}

/// Gradient of `d` along the plane (`sigma3 = sigma1 + sigma2`) for fixed masses.
pub fn d_plane_gradient(p: &PlanePoint, masses: &MassTriple) -> Vector2<f64> {
    let g = ere_meridian_d_gradient(2, &p.shape(), masses);
    Vector2::new(g[0] + g[2], g[1] + g[2])
}

/// `A` with `grad lambda12 x grad lambda23 = A (nu1^2, nu1, 1)^t` when `nu2`
/// follows the affine relation; computed from exact evaluations at three `nu1`.
pub fn lagrange_tangent_matrix(p: &PlanePoint) -> Result<Matrix3<f64>> {
    let (slope, intercept) = family_coefficients(p);
    let shape = p.shape();
    let tangent = |nu1: f64| -> Result<Vector3<f64>> {
        let g = lambda_gradients_weighted(&shape, [nu1, slope * nu1 + intercept, 1.0])?;
        Ok((g[0] - g[1]).cross(&(g[1] - g[2])))
    };
    let xs = [0.0, 1.0, 2.0];
    let c: Vec<Vector3<f64>> = xs.iter().map(|&x| tangent(x)).collect::<Result<_>>()?;
    // Lagrange interpolation of the quadratic in nu1
    let mut a = Matrix3::zeros();
    for comp in 0..3 {
        let (y0, y1, y2) = (c[0][comp], c[1][comp], c[2][comp]);
        a[(comp, 0)] = 0.5 * (y0 - 2.0 * y1 + y2);
        a[(comp, 1)] = 0.5 * (-3.0 * y0 + 4.0 * y1 - y2);
        a[(comp, 2)] = y0;
    }
    Ok(a)
}

/// Meridian bifurcation point for given `(nu, dnu)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeridianRoot {
    pub sigma1: f64,
    pub sigma2: f64,
    pub sigma3: f64,
    /// 2 for a tangential contact.
    pub multiplicity: u8,
}

impl MeridianRoot {
    pub fn shape(&self) -> Shape {
        Shape::new(self.sigma1, self.sigma2, self.sigma3)
    }
}

/// `sin(sigma2 - sigma1)` on the h curve for masses `(nu - dnu, nu + dnu, 1)`.
pub fn sin_delta(sigma3: f64, nu: f64, dnu: f64) -> f64 {
    let (c2, c4, c6) = (
        (2.0 * sigma3).cos(),
        (4.0 * sigma3).cos(),
        (6.0 * sigma3).cos(),
    );
    -dnu * (16.0 + 11.0 * c2 + c6) * sigma3.sin()
        / (2.0 * c2 * ((1.0 + c4) - nu * (5.0 + 4.0 * c2 + c4)))
}

/// `F = 1 - cos^2 Delta - sin^2 Delta`; its zeros are the meridian bifurcation points.
pub fn meridian_root_function(sigma3: f64, nu: f64, dnu: f64) -> f64 {
    let c = cos_delta_on_h(sigma3);
    let s = sin_delta(sigma3, nu, dnu);
    1.0 - c * c - s * s
}

/// Zero of the `sin Delta` denominator in `(pi/2, 2 sigma_E)`, present for `2/3 <= nu <= 1`.
pub fn sin_delta_pole(nu: f64) -> Option<f64> {
    // with u = cos 2 s3: (nu - 1) u^2 + 2 nu u + 2 nu = 0
    let (a, b, c) = (nu - 1.0, 2.0 * nu, 2.0 * nu);
    let u_hi = (4.0 * sigma_e()).cos();
    let cands: Vec<f64> = if a.abs() < 1e-15 {
        vec![-c / b]
    } else {
        let disc = b * b - 4.0 * a * c;
        if disc < 0.0 {
            return None;
        }
        vec![(-b + disc.sqrt()) / (2.0 * a), (-b - disc.sqrt()) / (2.0 * a)]
    };
    cands
        .into_iter()
        .find(|&u| (-1.0..=u_hi).contains(&u))
        .map(|u| PI - 0.5 * u.acos())
        .filter(|&s3| s3 > 0.5 * PI && s3 < h_curve_sigma3_max())
}

/// Meridian bifurcation points on `sigma3 = sigma1 + sigma2` for masses
/// `(nu - dnu, nu + dnu, 1)`; between zero and three points.
pub fn meridian_bifurcation_roots(nu: f64, dnu: f64) -> Result<Vec<MeridianRoot>> {
    if !(nu > 0.0) || dnu.abs() >= nu || !dnu.is_finite() {
        return Err(Error::Domain(format!(
            "masses (nu - dnu, nu + dnu, 1) = ({}, {}, 1) not positive",
            nu - dnu,
            nu + dnu
        )));
    }
    let lo = 0.5 * PI + 1e-9;
    let hi = h_curve_sigma3_max();
    let f = |s3: f64| meridian_root_function(s3, nu, dnu);
    let mut intervals = vec![(lo, hi)];
    if let Some(pole) = sin_delta_pole(nu) {
        intervals = vec![(lo, pole - 1e-12), (pole + 1e-12, hi)];
    }
    let mut roots: Vec<(f64, u8)> = Vec::new();
    let total = hi - lo;
    for &(a, b) in &intervals {
        if b <= a {
            continue;
        }
        let n = ((MERIDIAN_GRID as f64) * (b - a) / total).ceil().max(8.0) as usize;
        roots.extend(roots_on_interval(&f, a, b, n));
    }
    if dnu == 0.0 && roots.iter().all(|(r, _)| (r - hi).abs() > 1e-9) && f(hi).abs() < 1e-12 {
        roots.push((hi, 1));
    }
    roots.sort_by(|a, b| a.0.total_cmp(&b.0));
    roots.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-9);
    Ok(roots
        .into_iter()
        .map(|(s3, mult)| {
            let c = cos_delta_on_h(s3).clamp(-1.0, 1.0);
            let s = sin_delta(s3, nu, dnu);
            // (c, s) lie on the unit circle at a root; normalize out round-off
            let delta = s.atan2(c);
            MeridianRoot {
                sigma1: 0.5 * (s3 - delta),
                sigma2: 0.5 * (s3 + delta),
                sigma3: s3,
                multiplicity: mult,
            }
        })
        .collect())
}

fn roots_on_interval<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, n: usize) -> Vec<(f64, u8)> {
    let h = (b - a) / n as f64;
    let xs: Vec<f64> = (0..=n).map(|i| if i == n { b } else { a + h * i as f64 }).collect();
    let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let mut out = Vec::new();
    for i in 0..n {
        let (y0, y1) = (ys[i], ys[i + 1]);
        if y0.is_finite() && y1.is_finite() && y0.signum() != y1.signum() {
            if let Some(r) = bisect(f, xs[i], xs[i + 1], 1e-14) {
                out.push((r, 1));
            }
        }
    }
    // interior extrema that fail to cross on the grid: either a tangency or a
    // close pair of roots inside one pair of cells
    for i in 1..n {
        let (yl, y, yr) = (ys[i - 1], ys[i], ys[i + 1]);
        let is_max = y >= yl && y >= yr && y < 0.0;
        let is_min = y <= yl && y <= yr && y > 0.0;
        if !(is_max || is_min) {
            continue;
        }
        let sign = if is_max { -1.0 } else { 1.0 };
        let (x, fx) = golden_min(|x| sign * f(x), xs[i - 1], xs[i + 1], 1e-13);
        let fx = sign * fx;
        if fx.abs() < TANGENCY_TOL {
            out.push((x, 2));
        } else if fx.signum() != y.signum() {
            if let Some(r) = bisect(f, xs[i - 1], x, 1e-14) {
                out.push((r, 1));
            }
            if let Some(r) = bisect(f, x, xs[i + 1], 1e-14) {
                out.push((r, 1));
            }
        }
    }
    out
}

/// `(nu, dnu)` of `masses` after relabeling so body `k` sits in the middle.
pub fn nu_dnu_for_plane(k: usize, masses: &MassTriple) -> (f64, f64) {
    let m = masses.permuted(cyclic_to_last(k));
    let (n1, n2) = (m.m(0) / m.m(2), m.m(1) / m.m(2));
    (0.5 * (n1 + n2), 0.5 * (n2 - n1))
}

/// Meridian bifurcation shapes on the plane of body `k` (0-based), in the
/// original labels.
pub fn meridian_bifurcation_shapes_on(k: usize, masses: &MassTriple) -> Result<Vec<(Shape, u8)>> {
    let perm = cyclic_to_last(k);
    let (nu, dnu) = nu_dnu_for_plane(k, masses);
    let roots = meridian_bifurcation_roots(nu, dnu)?;
    Ok(roots
        .into_iter()
        .map(|r| {
            let local = r.shape().as_array();
            let mut sig = [0.0; 3];
            for n in 0..3 {
                sig[perm[n]] = local[n];
            }
            (Shape::from(sig), r.multiplicity)
        })
        .collect())
}

/// Tangential contact between two root counts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tangency {
    pub dnu: f64,
    pub sigma3: f64,
    /// `|F|` at the touching extremum.
    pub residual: f64,
}

/// Locates the `dnu` in `[lo, hi]` where the number of meridian roots
/// changes, by bisection on the root count, and the double root there.
pub fn meridian_tangency(nu: f64, lo: f64, hi: f64) -> Result<Tangency> {
    let count = |d: f64| -> Result<usize> {
        Ok(meridian_bifurcation_roots(nu, d)?
            .iter()
            .map(|r| r.multiplicity as usize)
            .sum())
    };
    let (c_lo, c_hi) = (count(lo)?, count(hi)?);
    if c_lo == c_hi {
        return Err(Error::Domain(format!(
            "root count {c_lo} is the same at dnu = {lo} and {hi}"
        )));
    }
    let (mut a, mut b) = (lo, hi);
    while b - a > 1e-13 * b.abs().max(1.0) {
        let m = 0.5 * (a + b);
        if count(m)? == c_lo {
            a = m;
        } else {
            b = m;
        }
    }
    let dnu = 0.5 * (a + b);
    // the touching extremum: smallest local minimum of |F| away from the pole
    let f = |s3: f64| meridian_root_function(s3, nu, dnu).abs();
    let pole = sin_delta_pole(nu);
    let (x_lo, x_hi) = (0.5 * PI + 1e-9, h_curve_sigma3_max());
    let n = MERIDIAN_GRID;
    let xs: Vec<f64> = (0..=n).map(|i| x_lo + (x_hi - x_lo) * i as f64 / n as f64).collect();
    let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let mut best: Option<(f64, f64)> = None;
    for i in 1..n {
        let (l, r) = (xs[i - 1], xs[i + 1]);
        if pole.is_some_and(|p| l <= p && p <= r) || !(ys[i] <= ys[i - 1] && ys[i] <= ys[i + 1]) {
            continue;
        }
        let (x, fx) = golden_min(f, l, r, 1e-13);
        if best.is_none_or(|(_, v)| fx < v) {
            best = Some((x, fx));
        }
    }
    let (sigma3, residual) = best.ok_or_else(|| {
        Error::Domain("no extremum of the root function near the tangency".into())
    })?;
    Ok(Tangency {
        dnu,
        sigma3,
        residual,
    })
}

/// Counts of the `l pi / n` grid census of shapes.
#[derive(Debug, Clone, PartialEq)]
pub struct Census {
    /// Grid points of `U_phys` with the inequalities decided exactly.
    pub points_exact: usize,
    /// Of those, points on the equator plane; their solutions are Euler configurations.
    pub on_equator: usize,
    /// Points off the equator plane passing the inequalities evaluated in
    /// double precision on `l * pi / n`; one-ulp round-off drops some
    /// collinear shapes.
    pub points_floating: usize,
    /// Unique positive mass solutions off the equator plane.
    pub unique_positive: usize,
    pub positive_det: usize,
    pub scalene: usize,
    pub solutions: Vec<(Shape, MassSolution)>,
}

/// Classifies the grid `sigma_k = l pi / n`, `1 <= l < n`,
/// `sigma1 <= sigma2 <= sigma3`, inside `U_phys`.
pub fn grid_census(n: usize) -> Result<Census> {
    let step = PI / n as f64;
    let mut c = Census {
        points_exact: 0,
        on_equator: 0,
        points_floating: 0,
        unique_positive: 0,
        positive_det: 0,
        scalene: 0,
        solutions: Vec::new(),
    };
    for a in 1..n {
        for b in a..n {
            for k in b..n {
                if k > a + b || a + b + k > 2 * n {
                    continue;
                }
                c.points_exact += 1;
                if a + b + k == 2 * n {
                    c.on_equator += 1;
                    continue;
                }
                let sig = [a, b, k].map(|l| l as f64 * PI / n as f64);
                if sig[2] <= sig[0] + sig[1] {
                    c.points_floating += 1;
                }
                let shape = Shape::new(a as f64 * step, b as f64 * step, k as f64 * step);
                let sol = mass_ratios_for_shape(&shape)?;
                if sol.is_unique_positive() {
                    c.unique_positive += 1;
                    if sol.det_s_tilde() > 0.0 {
                        c.positive_det += 1;
                    }
                    if a != b && b != k {
                        c.scalene += 1;
                    }
                }
                c.solutions.push((shape, sol));
            }
        }
    }
    Ok(c)
}
