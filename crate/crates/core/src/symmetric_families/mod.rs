//! Equal and partially equal masses: the isosceles reduction
//! `sigma1 = sigma2 = sigma`, its mass-ratio formula, the isosceles/scalene
//! bifurcation set `j = 0`, and the chain certificate ruling out scalene
//! solutions for three equal masses.

mod chain;

use std::f64::consts::PI;

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use chain::{g0, g1, g2, g3};

use crate::error::{Error, Result};
use crate::roots::grid_roots;
use crate::shape_core::{lambda_gradients, tilde_lambda_gradient, tilde_lambda_raw, MassTriple, Shape};

/// Scalar roots are isolated on this many uniform cells before bisection.
pub const ROOT_GRID: usize = 2048;
/// Bisection tolerance for scalar constants.
pub const ROOT_TOL: f64 = 1e-13;

/// Isosceles shape `(sigma, sigma, sigma3)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsoscelesPoint {
    pub sigma: f64,
    pub sigma3: f64,
}

impl IsoscelesPoint {
    pub fn new(sigma: f64, sigma3: f64) -> Self {
        Self { sigma, sigma3 }
    }

    pub fn shape(&self) -> Shape {
        Shape::isosceles(self.sigma, self.sigma3)
    }

    pub fn is_in_u(&self) -> bool {
        self.sigma > 0.0 && self.sigma < PI && self.sigma3 > 0.0 && self.sigma3 < PI
    }

    /// `sigma3 <= 2 sigma` and `sigma3 <= 2 (pi - sigma)`.
    pub fn is_in_u_phys(&self) -> bool {
        self.is_in_u() && self.sigma3 <= 2.0 * self.sigma && self.sigma3 <= 2.0 * (PI - self.sigma)
    }

    fn check_u(&self) -> Result<()> {
        if self.is_in_u() {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "isosceles point ({}, {}) outside (0, pi)^2",
                self.sigma, self.sigma3
            )))
        }
    }
}

/// Equal-mass isosceles function; zeros are the equal-mass isosceles shapes.
pub fn g_isosceles(p: &IsoscelesPoint) -> f64 {
    tilde_lambda_raw(p.sigma3, p.sigma, p.sigma, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EqualMassConstants {
    /// Equilateral/isosceles bifurcation size, root of `4 + 5 cos 2 sigma`.
    pub sigma_c: f64,
    /// Meridian Euler endpoint, root of `2 + 4 cos 2 sigma + cos 4 sigma`.
    pub sigma_e: f64,
}

pub fn equal_mass_constants() -> EqualMassConstants {
    let half = 0.5 * PI;
    let sc = grid_roots(|s| 4.0 + 5.0 * (2.0 * s).cos(), 0.0, half, ROOT_GRID, ROOT_TOL);
    let se = grid_roots(
        |s| 2.0 + 4.0 * (2.0 * s).cos() + (4.0 * s).cos(),
        0.0,
        half,
        ROOT_GRID,
        ROOT_TOL,
    );
    debug_assert_eq!((sc.len(), se.len()), (1, 1));
    EqualMassConstants {
        sigma_c: sc[0],
        sigma_e: se[0],
    }
}

/// `arccos(2^(-3/4))`.
pub fn sigma_e() -> f64 {
    2f64.powf(-0.75).acos()
}

/// `arccos(-4/5) / 2`.
pub fn sigma_c() -> f64 {
    0.5 * (-0.8f64).acos()
}

/// Largest residuals of the chain identities over random samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleneCertificate {
    pub samples: usize,
    pub chain1: f64,
    pub chain2: f64,
    pub chain3: f64,
    pub g3_symmetry: f64,
    /// Deviation of `g` on `x + y = pi` from `(cos 2x - 1) sin^3 z / 2`.
    pub slice: f64,
    /// Smallest `|g|` on the slice relative to `sin^2 x sin^3 z`.
    pub slice_min_ratio: f64,
}

impl ScaleneCertificate {
    pub fn max_residual(&self) -> f64 {
        self.chain1
            .max(self.chain2)
            .max(self.chain3)
            .max(self.g3_symmetry)
            .max(self.slice)
    }
}

/// Certification threshold for [`scalene_certificate`].
pub const CERTIFICATE_LIMIT: f64 = 1e-9;

/// Checks the chain identities at `samples` points of `(0, pi)^3` drawn
/// from a seeded generator.
pub fn scalene_certificate(samples: usize, seed: u64) -> Result<ScaleneCertificate> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cert = ScaleneCertificate {
        samples,
        chain1: 0.0,
        chain2: 0.0,
        chain3: 0.0,
        g3_symmetry: 0.0,
        slice: 0.0,
        slice_min_ratio: f64::INFINITY,
    };
    for _ in 0..samples {
        let (x, y, z): (f64, f64, f64) = (
            rng.random_range(0.0..PI),
            rng.random_range(0.0..PI),
            rng.random_range(0.0..PI),
        );
        let r1 = g0(x, y, z) - g0(x, z, y) - 2.0 * (y - z).sin() * g1(x, y, z);
        let r2 = g1(x, y, z) - g1(y, x, z) + 2.0 * (x.cos() - y.cos()) * g2(x, y, z);
        let r3 = g2(x, y, z) - g2(x, z, y) - 16.0 * (y.cos() - z.cos()) * g3(x, y, z);
        cert.chain1 = cert.chain1.max(r1.abs());
        cert.chain2 = cert.chain2.max(r2.abs());
        cert.chain3 = cert.chain3.max(r3.abs());
        let base = g3(x, y, z);
        for (a, b, c) in [(x, z, y), (y, x, z), (y, z, x), (z, x, y), (z, y, x)] {
            cert.g3_symmetry = cert.g3_symmetry.max((g3(a, b, c) - base).abs());
        }
        let expected = 0.5 * ((2.0 * x).cos() - 1.0) * z.sin().powi(3);
        let on_slice = g0(x, PI - x, z);
        cert.slice = cert.slice.max((on_slice - expected).abs());
        let scale = x.sin().powi(2) * z.sin().powi(3);
        if scale > 1e-12 {
            cert.slice_min_ratio = cert.slice_min_ratio.min(on_slice.abs() / scale);
        }
    }
    let worst = cert.max_residual();
    if worst > CERTIFICATE_LIMIT {
        return Err(Error::CertificateFailure {
            what: "equal-mass chain identities".into(),
            residual: worst,
            limit: CERTIFICATE_LIMIT,
        });
    }
    Ok(cert)
}

/// `alpha = (1 + cos s3) sin^3 s3 - 2 cos s sin^3 s`, `beta = sin^3 s - cos s sin^3 s3`.
pub fn alpha_beta(p: &IsoscelesPoint) -> (f64, f64) {
    let (s, c) = p.sigma.sin_cos();
    let (s3, c3) = p.sigma3.sin_cos();
    let (ss, ss3) = (s * s * s, s3 * s3 * s3);
    ((1.0 + c3) * ss3 - 2.0 * c * ss, ss - c * ss3)
}

/// Below this size both `alpha` and `beta` count as zero.
pub const INDETERMINATE_TOL: f64 = 1e-10;

/// Mass ratio `nu = m1/m3 = m2/m3` making `p` an isosceles Lagrange shape;
/// `None` when no positive ratio exists.
pub fn nu_for_isosceles(p: &IsoscelesPoint) -> Result<Option<f64>> {
    p.check_u()?;
    let (a, b) = alpha_beta(p);
    if a.abs() < INDETERMINATE_TOL && b.abs() < INDETERMINATE_TOL {
        return Err(Error::Indeterminate(format!(
            "alpha = beta = 0 at ({}, {}); every ratio works",
            p.sigma, p.sigma3
        )));
    }
    if a * b <= 0.0 {
        return Ok(None);
    }
    Ok(Some(p.sigma3.sin().powi(3) * b / (p.sigma.sin().powi(3) * a)))
}

/// Isosceles/scalene bifurcation function `j(sigma, sigma3)`.
pub fn j_residual(p: &IsoscelesPoint) -> Result<f64> {
    Ok(j_terms(p)?.0)
}

/// `(dj/dsigma, dj/dsigma3)`.
pub fn j_gradient(p: &IsoscelesPoint) -> Result<(f64, f64)> {
    let (_, d) = j_terms(p)?;
    Ok(d)
}

/// Denominators below this size raise [`Error::DenominatorZero`].
pub const J_DENOMINATOR_TOL: f64 = 1e-12;

fn j_terms(p: &IsoscelesPoint) -> Result<(f64, (f64, f64))> {
    p.check_u()?;
    let (s, c) = p.sigma.sin_cos();
    let (s3, c3) = p.sigma3.sin_cos();
    let t = s3 * s3 * s3;
    let (alpha, beta) = alpha_beta(p);
    let den = alpha / t;
    if den.abs() < J_DENOMINATOR_TOL {
        return Err(Error::DenominatorZero(format!(
            "1 + cos s3 - 2 cos s sin^3 s / sin^3 s3 = {den:.3e} at ({}, {})",
            p.sigma, p.sigma3
        )));
    }
    let c2 = (2.0 * p.sigma).cos();
    let a = (1.0 + 2.0 * c2) * t;
    let pp = c * c3;
    let n = 6.0 * pp * beta * t;
    let value = a + n / alpha;

    let a_s = -4.0 * (2.0 * p.sigma).sin() * t;
    let t_3 = 3.0 * s3 * s3 * c3;
    let a_3 = (1.0 + 2.0 * c2) * t_3;
    let p_s = -s * c3;
    let p_3 = -c * s3;
    let b_s = 3.0 * s * s * c + s * t;
    let b_3 = -c * t_3;
    let al_s = 2.0 * s.powi(4) - 6.0 * c * c * s * s;
    let al_3 = -s3 * t + (1.0 + c3) * t_3;
    let n_s = 6.0 * (p_s * beta * t + pp * b_s * t);
    let n_3 = 6.0 * (p_3 * beta * t + pp * b_3 * t + pp * beta * t_3);
    let d_s = a_s + (n_s * alpha - n * al_s) / (alpha * alpha);
    let d_3 = a_3 + (n_3 * alpha - n * al_3) / (alpha * alpha);
    Ok((value, (d_s, d_3)))
}

/// `alpha * j`, which has the zero set of `j` away from `alpha = 0` and no
/// pole; returned with `(d/dsigma, d/dsigma3)`.
pub fn j_numerator(p: &IsoscelesPoint) -> Result<(f64, (f64, f64))> {
    p.check_u()?;
    let (s, c) = p.sigma.sin_cos();
    let (s3, c3) = p.sigma3.sin_cos();
    let t = s3 * s3 * s3;
    let t_3 = 3.0 * s3 * s3 * c3;
    let (alpha, beta) = alpha_beta(p);
    let c2 = (2.0 * p.sigma).cos();
    let a = (1.0 + 2.0 * c2) * t;
    let a_s = -4.0 * (2.0 * p.sigma).sin() * t;
    let a_3 = (1.0 + 2.0 * c2) * t_3;
    let pp = c * c3;
    let b_s = 3.0 * s * s * c + s * t;
    let b_3 = -c * t_3;
    let al_s = 2.0 * s.powi(4) - 6.0 * c * c * s * s;
    let al_3 = -s3 * t + (1.0 + c3) * t_3;
    let n = 6.0 * pp * beta * t;
    let n_s = 6.0 * (-s * c3 * beta * t + pp * b_s * t);
    let n_3 = 6.0 * (-c * s3 * beta * t + pp * b_3 * t + pp * beta * t_3);
    Ok((
        a * alpha + n,
        (a_s * alpha + a * al_s + n_s, a_3 * alpha + a * al_3 + n_3),
    ))
}

/// Tangent `grad lambda~12 x grad lambda23` of the scalene family at an
/// isosceles point, with the mass ratio from [`nu_for_isosceles`].
pub fn scalene_direction(p: &IsoscelesPoint) -> Result<Vector3<f64>> {
    let nu = nu_for_isosceles(p)?.ok_or_else(|| {
        Error::Domain(format!(
            "no positive mass ratio at ({}, {})",
            p.sigma, p.sigma3
        ))
    })?;
    scalene_direction_with(p, nu)
}

pub fn scalene_direction_with(p: &IsoscelesPoint, nu: f64) -> Result<Vector3<f64>> {
    let shape = p.shape();
    let masses = MassTriple::partial_equal(nu)?;
    let gt = tilde_lambda_gradient(&shape, (0, 1), &masses)?;
    let g = lambda_gradients(&shape, &masses)?;
    Ok(gt.cross(&(g[1] - g[2])))
}

/// Component of [`scalene_direction`] across the isosceles plane,
/// `c . (1, -1, 0)`. Its zeros on `j = 0` are the exceptional points where
/// no scalene family leaves the plane transversally.
pub fn scalene_transversality(p: &IsoscelesPoint) -> Result<f64> {
    let c = scalene_direction(p)?;
    Ok(c[0] - c[1])
}

/// Sizes `sigma3` bounding the no-solution band of the `m3 -> 0` limit:
/// roots of `(1 + cos s3) sin^3 s3 = (sqrt(3)/2)^3`.
pub fn restricted_limit_bounds() -> (f64, f64) {
    let target = (0.75f64).powf(1.5);
    let r = grid_roots(
        |z| (1.0 + z.cos()) * z.sin().powi(3) - target,
        0.0,
        PI,
        ROOT_GRID,
        ROOT_TOL,
    );
    debug_assert_eq!(r.len(), 2);
    (r[0], r[1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shape_core::lre_residual;

    fn nu_minus() -> f64 {
        8.0 * (36.0 - 5.0 * 3f64.sqrt()) / 333.0
    }
    fn nu_plus() -> f64 {
        8.0 * (36.0 + 5.0 * 3f64.sqrt()) / 333.0
    }

    #[test]
    fn g_values() {
        assert!((g_isosceles(&IsoscelesPoint::new(PI / 2.0, PI / 2.0)) + 1.0).abs() < 1e-14);
        let se = sigma_e();
        assert!(g_isosceles(&IsoscelesPoint::new(se, 2.0 * se)).abs() < 1e-14);
        for &(s, s3) in &[(0.3, 1.1), (1.2, 0.4), (2.5, 2.9)] {
            let a = g_isosceles(&IsoscelesPoint::new(s, s3));
            let b = g_isosceles(&IsoscelesPoint::new(PI - s, PI - s3));
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn g_on_diagonal() {
        for &s in &[0.2f64, 0.9, 1.7, 2.8] {
            let want = s.sin().powi(5) * (4.0 + 5.0 * (2.0 * s).cos());
            assert!((g_isosceles(&IsoscelesPoint::new(s, s)) - want).abs() < 1e-13);
        }
    }

    #[test]
    fn constants() {
        let k = equal_mass_constants();
        assert!((k.sigma_c - sigma_c()).abs() < 1e-12);
        assert!((k.sigma_e - sigma_e()).abs() < 1e-12);
        assert!(g_isosceles(&IsoscelesPoint::new(k.sigma_c, k.sigma_c)).abs() < 1e-11);
        assert!(k.sigma_c.sin().powi(5) > 0.5);
    }

    #[test]
    fn certificate_passes() {
        let c = scalene_certificate(500, 7).unwrap();
        assert!(c.max_residual() < 1e-10, "{c:?}");
        assert!(c.slice_min_ratio > 0.99);
    }

    #[test]
    fn alpha_beta_lines() {
        let se = sigma_e();
        let (a, b) = alpha_beta(&IsoscelesPoint::new(se, 2.0 * se));
        assert!(a.abs() < 1e-14 && b.abs() < 1e-14);
        for &s in &[0.3, 0.7, 1.2, 1.5] {
            let (a, b) = alpha_beta(&IsoscelesPoint::new(s, 2.0 * s));
            let (sn, c) = s.sin_cos();
            let q = 8.0 * c.powi(4) - 1.0;
            assert!((a - 2.0 * sn.powi(3) * c * q).abs() < 1e-13);
            assert!((b + sn.powi(3) * q).abs() < 1e-13);
        }
        for &s in &[1.6, 2.0, 2.6, 3.1] {
            let p = IsoscelesPoint::new(s, 2.0 * PI - 2.0 * s);
            let (a, b) = alpha_beta(&p);
            assert!(a * b > 0.0);
            let nu = nu_for_isosceles(&p).unwrap().unwrap();
            assert!((nu - 4.0 * s.cos().powi(2)).abs() < 1e-11);
        }
    }

    #[test]
    fn example_ratios() {
        let a = nu_for_isosceles(&IsoscelesPoint::new(PI / 3.0, PI / 2.0)).unwrap().unwrap();
        let b = nu_for_isosceles(&IsoscelesPoint::new(2.0 * PI / 3.0, PI / 2.0))
            .unwrap()
            .unwrap();
        assert!((a - nu_minus()).abs() < 1e-13);
        assert!((b - nu_plus()).abs() < 1e-13);
    }

    #[test]
    fn indeterminate_at_euler_point() {
        let se = sigma_e();
        let r = nu_for_isosceles(&IsoscelesPoint::new(se, 2.0 * se));
        assert!(matches!(r, Err(Error::Indeterminate(_))));
    }

    #[test]
    fn nu_solves_lagrange_condition() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut hits = 0;
        for _ in 0..2000 {
            let p = IsoscelesPoint::new(rng.random_range(0.05..PI - 0.05), rng.random_range(0.05..PI - 0.05));
            if !p.is_in_u_phys() {
                continue;
            }
            if let Ok(Some(nu)) = nu_for_isosceles(&p) {
                let m = MassTriple::partial_equal(nu).unwrap();
                let (l12, l23) = lre_residual(&p.shape(), &m).unwrap();
                let scale = 1.0 + nu;
                assert!(l12.abs() < 1e-10 * scale && l23.abs() < 1e-10 * scale.max(nu));
                hits += 1;
            }
        }
        assert!(hits > 200);
    }

    #[test]
    fn euler_coupling_only_at_sigma_e() {
        let n = 10_000;
        for i in 1..n {
            let s = 0.5 * PI * i as f64 / n as f64;
            if (s - sigma_e()).abs() < 1e-6 {
                continue;
            }
            let (a, b) = alpha_beta(&IsoscelesPoint::new(s, 2.0 * s));
            assert!(a * b < 0.0, "sigma {s}");
        }
    }

    #[test]
    fn nu_below_four_on_equator_line() {
        for i in 1..2000 {
            let s = 0.5 * PI + 0.5 * PI * i as f64 / 2000.0;
            let nu = nu_for_isosceles(&IsoscelesPoint::new(s, 2.0 * PI - 2.0 * s))
                .unwrap()
                .unwrap();
            assert!(nu < 4.0);
        }
    }

    #[test]
    fn j_examples() {
        assert!(j_residual(&IsoscelesPoint::new(PI / 3.0, PI / 2.0)).unwrap().abs() < 1e-14);
        assert!(j_residual(&IsoscelesPoint::new(2.0 * PI / 3.0, PI / 2.0)).unwrap().abs() < 1e-14);
    }

    #[test]
    fn j_gradient_matches_differences() {
        let h = 1e-6;
        for &(s, s3) in &[(0.9, 1.4), (1.1, 1.7), (2.0, 1.3)] {
            let p = IsoscelesPoint::new(s, s3);
            let (ds, d3) = j_gradient(&p).unwrap();
            let f = |a: f64, b: f64| j_residual(&IsoscelesPoint::new(a, b)).unwrap();
            let fs = (f(s + h, s3) - f(s - h, s3)) / (2.0 * h);
            let f3 = (f(s, s3 + h) - f(s, s3 - h)) / (2.0 * h);
            assert!((ds - fs).abs() < 1e-6 * (1.0 + fs.abs()));
            assert!((d3 - f3).abs() < 1e-6 * (1.0 + f3.abs()));
        }
    }

    #[test]
    fn j_denominator_guard() {
        // alpha vanishes on sigma3 = 2 sigma at sigma_e
        let se = sigma_e();
        let r = j_residual(&IsoscelesPoint::new(se, 2.0 * se));
        assert!(matches!(r, Err(Error::DenominatorZero(_))));
    }

    #[test]
    fn scalene_direction_at_examples() {
        let c = scalene_direction(&IsoscelesPoint::new(PI / 3.0, PI / 2.0)).unwrap();
        let k = 3.0 * 3f64.sqrt() * nu_minus() / 8.0;
        assert!((c - Vector3::new(k, -k, 0.0)).norm() < 1e-12, "{c}");
        let c = scalene_direction(&IsoscelesPoint::new(2.0 * PI / 3.0, PI / 2.0)).unwrap();
        let k = 3.0 * 3f64.sqrt() * nu_plus() / 8.0;
        assert!((c - Vector3::new(-k, k, 0.0)).norm() < 1e-12, "{c}");
    }

    #[test]
    fn j_numerator_matches_alpha_times_j() {
        for &(a, b) in &[(1.0, 1.7), (0.6, 0.9), (1.3, 2.2)] {
            let p = IsoscelesPoint::new(a, b);
            let (v, (ds, d3)) = j_numerator(&p).unwrap();
            let (alpha, _) = alpha_beta(&p);
            assert!((v - alpha * j_residual(&p).unwrap()).abs() < 1e-12);
            let h = 1e-6;
            let fs = (j_numerator(&IsoscelesPoint::new(a + h, b)).unwrap().0
                - j_numerator(&IsoscelesPoint::new(a - h, b)).unwrap().0)
                / (2.0 * h);
            let f3 = (j_numerator(&IsoscelesPoint::new(a, b + h)).unwrap().0
                - j_numerator(&IsoscelesPoint::new(a, b - h)).unwrap().0)
                / (2.0 * h);
            assert!((fs - ds).abs() < 1e-8 && (f3 - d3).abs() < 1e-8);
        }
    }

    #[test]
    fn restricted_bounds() {
        let (s, l) = restricted_limit_bounds();
        assert!((s - 0.81).abs() < 0.01 && (l - 1.84).abs() < 0.01);
        for z in [s, l] {
            let (a, _) = alpha_beta(&IsoscelesPoint::new(PI / 3.0, z));
            assert!(a.abs() < 1e-12);
        }
    }
}
