use nalgebra::{Matrix2x3, Matrix3, Vector3};

use super::types::{others, InertiaTensor, LambdaTriple, MassTriple, Region, Shape, TOL_PLANE};
use crate::error::{Error, Result};

/// Precomputed sines, cosines and cubed sines of a shape.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Trig {
    pub s: [f64; 3],
    pub c: [f64; 3],
    pub s3: [f64; 3],
}

impl Trig {
    pub fn of(shape: &Shape) -> Self {
        let a = shape.as_array();
        let s = a.map(f64::sin);
        let c = a.map(f64::cos);
        let s3 = s.map(|x| x * x * x);
        Self { s, c, s3 }
    }
}

/// Finest region label, using [`TOL_PLANE`] for the boundary planes.
pub fn region_membership(shape: &Shape) -> Region {
    region_membership_with(shape, TOL_PLANE)
}

pub fn region_membership_with(shape: &Shape, tol_plane: f64) -> Region {
    if !shape.is_in_u() {
        return Region::Outside;
    }
    for k in 0..3 {
        if shape.meridian_gap(k).abs() <= tol_plane {
            return Region::OnMeridianPlane(k);
        }
    }
    if shape.equator_gap().abs() <= tol_plane {
        return Region::OnEquatorPlane;
    }
    if (0..3).all(|k| shape.meridian_gap(k) > 0.0) && shape.equator_gap() > 0.0 {
        Region::InUPhys
    } else {
        Region::InU
    }
}

// lambda_k = m_a + m_b - (m_a cos(s_b) sin^3(s_a) + m_b cos(s_a) sin^3(s_b)) / sin^3(s_k)
// with (a, b) the two indices other than k.
fn lambda_k(t: &Trig, m: &[f64; 3], k: usize) -> f64 {
    let (a, b) = others(k);
    let n = m[a] * t.c[b] * t.s3[a] + m[b] * t.c[a] * t.s3[b];
    m[a] + m[b] - n / t.s3[k]
}

fn grad_lambda_k(t: &Trig, m: &[f64; 3], k: usize) -> Vector3<f64> {
    let (a, b) = others(k);
    let n = m[a] * t.c[b] * t.s3[a] + m[b] * t.c[a] * t.s3[b];
    let mut g = Vector3::zeros();
    g[k] = 3.0 * t.c[k] * n / (t.s3[k] * t.s[k]);
    g[a] = -(3.0 * m[a] * t.c[b] * t.s[a] * t.s[a] * t.c[a] - m[b] * t.s[a] * t.s3[b]) / t.s3[k];
    g[b] = -(3.0 * m[b] * t.c[a] * t.s[b] * t.s[b] * t.c[b] - m[a] * t.s[b] * t.s3[a]) / t.s3[k];
    g
}

pub fn lambda_triple(shape: &Shape, masses: &MassTriple) -> Result<LambdaTriple> {
    shape.check_singular()?;
    let t = Trig::of(shape);
    let m = masses.as_array();
    Ok(LambdaTriple {
        lambda1: lambda_k(&t, &m, 0),
        lambda2: lambda_k(&t, &m, 1),
        lambda3: lambda_k(&t, &m, 2),
    })
}

/// `(lambda12, lambda23)`; both vanish exactly on Lagrange shapes.
pub fn lre_residual(shape: &Shape, masses: &MassTriple) -> Result<(f64, f64)> {
    let l = lambda_triple(shape, masses)?;
    Ok((l.lambda12(), l.lambda23()))
}

/// Scale-free size of `(lambda12, lambda23)`: the norm divided by `M + max |lambda_k|`.
pub fn normalized_lre_residual(shape: &Shape, masses: &MassTriple) -> Result<f64> {
    let l = lambda_triple(shape, masses)?;
    let r = l.lambda12().hypot(l.lambda23());
    Ok(r / (masses.total() + l.max_abs()))
}

pub fn lambda_gradients(shape: &Shape, masses: &MassTriple) -> Result<[Vector3<f64>; 3]> {
    shape.check_singular()?;
    let t = Trig::of(shape);
    let m = masses.as_array();
    Ok([0, 1, 2].map(|k| grad_lambda_k(&t, &m, k)))
}

/// Gradients of the three lambdas for arbitrary real weights in place of the
/// masses; the lambdas are linear in the masses.
pub fn lambda_gradients_weighted(shape: &Shape, weights: [f64; 3]) -> Result<[Vector3<f64>; 3]> {
    shape.check_singular()?;
    let t = Trig::of(shape);
    Ok([0, 1, 2].map(|k| grad_lambda_k(&t, &weights, k)))
}

/// Rows are the analytic gradients of `lambda12` and `lambda23` with respect to `sigma`.
pub fn residual_jacobian(shape: &Shape, masses: &MassTriple) -> Result<Matrix2x3<f64>> {
    let [g1, g2, g3] = lambda_gradients(shape, masses)?;
    let r1 = g1 - g2;
    let r2 = g2 - g3;
    Ok(Matrix2x3::new(
        r1[0], r1[1], r1[2], //
        r2[0], r2[1], r2[2],
    ))
}

/// `C[(k, i)] = d lambda_k / d m_i`; the lambdas are linear in the masses.
pub fn lambda_mass_coefficients(shape: &Shape) -> Result<Matrix3<f64>> {
    shape.check_singular()?;
    let t = Trig::of(shape);
    let mut out = Matrix3::zeros();
    for i in 0..3 {
        let mut m = [0.0; 3];
        m[i] = 1.0;
        for k in 0..3 {
            out[(k, i)] = lambda_k(&t, &m, k);
        }
    }
    Ok(out)
}

fn tilde_terms(si: f64, sj: f64, sk: f64, nu: f64) -> (f64, Vector3<f64>) {
    let (sin_i, cos_i) = si.sin_cos();
    let (sin_j, cos_j) = sj.sin_cos();
    let (sin_k, cos_k) = sk.sin_cos();
    let (sin_ij, cos_ij) = (si + sj).sin_cos();
    let (si2, sj2) = (sin_i * sin_i, sin_j * sin_j);
    let q = si2 * si2 + si2 * sj2 + sj2 * sj2;
    let q_i = 2.0 * sin_i * cos_i * (2.0 * si2 + sj2);
    let q_j = 2.0 * sin_j * cos_j * (2.0 * sj2 + si2);
    let r = (3.0 * si + sj).cos() + (si + 3.0 * sj).cos() - 2.0 * cos_ij;
    let r_i = -3.0 * (3.0 * si + sj).sin() - (si + 3.0 * sj).sin() + 2.0 * sin_ij;
    let r_j = -(3.0 * si + sj).sin() - 3.0 * (si + 3.0 * sj).sin() + 2.0 * sin_ij;
    let sk3 = sin_k * sin_k * sin_k;
    let value = nu * cos_k * sin_ij * q - 0.25 * sk3 * r;
    let d_i = nu * cos_k * (cos_ij * q + sin_ij * q_i) - 0.25 * sk3 * r_i;
    let d_j = nu * cos_k * (cos_ij * q + sin_ij * q_j) - 0.25 * sk3 * r_j;
    let d_k = -nu * sin_k * sin_ij * q - 0.75 * sin_k * sin_k * cos_k * r;
    (value, Vector3::new(d_i, d_j, d_k))
}

/// The reduced function `lambda~_ij(sigma_i, sigma_j, sigma_k; nu)` as a raw
/// function of its three arguments (no mass checks).
pub fn tilde_lambda_raw(si: f64, sj: f64, sk: f64, nu: f64) -> f64 {
    tilde_terms(si, sj, sk, nu).0
}

fn check_pair(pair: (usize, usize), masses: &MassTriple) -> Result<usize> {
    let (i, j) = pair;
    if i == j || i > 2 || j > 2 {
        return Err(Error::Precondition(format!("invalid pair ({i}, {j})")));
    }
    if !masses.pair_equal(i, j) {
        return Err(Error::Precondition(format!(
            "factorization needs m_{} = m_{}, got {} and {}",
            i + 1,
            j + 1,
            masses.m(i),
            masses.m(j)
        )));
    }
    Ok(3 - i - j)
}

/// Reduced difference for an equal-mass pair, normalized so that
/// `lambda_i - lambda_j = m_k sin(sigma_i - sigma_j) / (sin^3 sigma_i sin^3 sigma_j) * lambda~_ij`
/// with `nu = m_i / m_k`.
pub fn tilde_lambda(shape: &Shape, pair: (usize, usize), masses: &MassTriple) -> Result<f64> {
    shape.check_singular()?;
    let k = check_pair(pair, masses)?;
    let (i, j) = pair;
    let nu = masses.m(i) / masses.m(k);
    Ok(tilde_lambda_raw(shape.sigma(i), shape.sigma(j), shape.sigma(k), nu))
}

/// Gradient of [`tilde_lambda`] with respect to `(sigma1, sigma2, sigma3)`.
pub fn tilde_lambda_gradient(
    shape: &Shape,
    pair: (usize, usize),
    masses: &MassTriple,
) -> Result<Vector3<f64>> {
    shape.check_singular()?;
    let k = check_pair(pair, masses)?;
    let (i, j) = pair;
    let nu = masses.m(i) / masses.m(k);
    let (_, local) = tilde_terms(shape.sigma(i), shape.sigma(j), shape.sigma(k), nu);
    let mut g = Vector3::zeros();
    g[i] = local[0];
    g[j] = local[1];
    g[k] = local[2];
    Ok(g)
}

// d in labels where body 3 sits between bodies 1 and 2 (sigma3 = sigma1 + sigma2).
fn meridian_d_terms(sig: [f64; 3], m: [f64; 3]) -> (f64, Vector3<f64>) {
    let [a1, a2, a3] = sig;
    let [m1, m2, m3] = m;
    let (s1, s2, s3) = (a1.sin(), a2.sin(), a3.sin());
    let (q1, q2, q3) = (s1 * s1, s2 * s2, s3 * s3);
    let (w1, w2, w3) = ((2.0 * a1).sin(), (2.0 * a2).sin(), (2.0 * a3).sin());
    let (v1, v2, v3) = (
        2.0 * (2.0 * a1).cos(),
        2.0 * (2.0 * a2).cos(),
        2.0 * (2.0 * a3).cos(),
    );
    // d/dx of 1/sin^2 x = -2 cos x / sin^3 x
    let (p1, p2, p3) = (
        -2.0 * a1.cos() / (q1 * s1),
        -2.0 * a2.cos() / (q2 * s2),
        -2.0 * a3.cos() / (q3 * s3),
    );
    let n3 = m1 * w2 - m2 * w1;
    let n1 = m2 * w3 + m3 * w2;
    let n2 = m3 * w1 + m1 * w3;
    let value = n3 / q3 + n1 / q1 - n2 / q2;
    let g1 = -m2 * v1 / q3 + n1 * p1 - m3 * v1 / q2;
    let g2 = m1 * v2 / q3 + m3 * v2 / q1 - n2 * p2;
    let g3 = n3 * p3 + m2 * v3 / q1 - m1 * v3 / q2;
    (value, Vector3::new(g1, g2, g3))
}

fn check_plane(shape: &Shape, k: usize) -> Result<()> {
    shape.check_singular()?;
    let gap = shape.meridian_gap(k);
    if gap.abs() > TOL_PLANE {
        return Err(Error::Domain(format!(
            "shape {shape} is off the collinear plane of body {} by {gap:.3e}",
            k + 1
        )));
    }
    Ok(())
}

/// Meridian Euler condition `d` on the plane `sigma3 = sigma1 + sigma2` (body 3 in the middle).
pub fn ere_meridian_d(shape: &Shape, masses: &MassTriple) -> Result<f64> {
    ere_meridian_d_on(2, shape, masses)
}

/// Meridian Euler condition on the plane where body `k` (0-based) sits in the middle.
pub fn ere_meridian_d_on(k: usize, shape: &Shape, masses: &MassTriple) -> Result<f64> {
    check_plane(shape, k)?;
    Ok(ere_meridian_d_unchecked(k, shape, masses))
}

/// Same as [`ere_meridian_d_on`] without the plane check; used by tracers
/// that carry the plane as a separate constraint.
pub fn ere_meridian_d_unchecked(k: usize, shape: &Shape, masses: &MassTriple) -> f64 {
    let perm = super::types::cyclic_to_last(k);
    meridian_d_terms(
        shape.permuted(perm).as_array(),
        masses.permuted(perm).as_array(),
    )
    .0
}

/// Gradient of the meridian condition with respect to all three `sigma`s.
pub fn ere_meridian_d_gradient(k: usize, shape: &Shape, masses: &MassTriple) -> Vector3<f64> {
    let perm = super::types::cyclic_to_last(k);
    let (_, local) = meridian_d_terms(
        shape.permuted(perm).as_array(),
        masses.permuted(perm).as_array(),
    );
    let mut g = Vector3::zeros();
    for (n, &old) in perm.iter().enumerate() {
        g[old] = local[n];
    }
    g
}

/// Euler configuration on the equator: exists iff `mu_k = sqrt(m_i m_j)`
/// satisfy the strict triangle inequalities.
pub fn ere_equator(masses: &MassTriple) -> Option<Shape> {
    let mu: [f64; 3] = [0, 1, 2].map(|k| {
        let (i, j) = others(k);
        (masses.m(i) * masses.m(j)).sqrt()
    });
    for k in 0..3 {
        let (i, j) = others(k);
        if mu[k] >= mu[i] + mu[j] {
            return None;
        }
    }
    let sig = [0, 1, 2].map(|k| {
        let (i, j) = others(k);
        let c = (mu[k] * mu[k] - mu[i] * mu[i] - mu[j] * mu[j]) / (2.0 * mu[i] * mu[j]);
        c.clamp(-1.0, 1.0).acos()
    });
    Some(Shape::from(sig))
}

pub fn inertia_tensor(shape: &Shape, masses: &MassTriple) -> InertiaTensor {
    let m = masses.as_array();
    let mut j = Matrix3::zeros();
    for k in 0..3 {
        let (a, b) = others(k);
        j[(k, k)] = m[a] + m[b];
        let off = -(m[a] * m[b]).sqrt() * shape.sigma(k).cos();
        j[(a, b)] = off;
        j[(b, a)] = off;
    }
    InertiaTensor(j)
}
