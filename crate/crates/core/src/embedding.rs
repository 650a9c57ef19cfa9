//! Realization of solved shapes as rigidly rotating configurations on the
//! unit sphere, and the angular momentum of such configurations.

use std::f64::consts::PI;

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::shape_core::{
    lambda_triple, normalized_lre_residual, others, MassTriple, Shape, TOL_NEWTON,
};

/// Hemisphere selector for Lagrange embeddings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hemisphere {
    North,
    South,
}

impl Hemisphere {
    pub fn sign(self) -> f64 {
        match self {
            Hemisphere::North => 1.0,
            Hemisphere::South => -1.0,
        }
    }
}

/// Bodies at colatitudes `theta` and azimuths `phi`, all rotating about the
/// z axis with angular velocity `omega > 0`. Body 1 sits at `phi = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Configuration {
    pub theta: [f64; 3],
    pub phi: [f64; 3],
    pub omega: f64,
    pub hemisphere: Hemisphere,
}

impl Configuration {
    pub fn position(&self, k: usize) -> Vector3<f64> {
        let (st, ct) = self.theta[k].sin_cos();
        let (sp, cp) = self.phi[k].sin_cos();
        Vector3::new(st * cp, st * sp, ct)
    }

    /// Signed volume `r1 . (r2 x r3)`; positive for the representative orientation.
    pub fn orientation(&self) -> f64 {
        self.position(0).dot(&self.position(1).cross(&self.position(2)))
    }

    /// The oppositely oriented triangle with the same shape.
    pub fn mirrored(&self) -> Self {
        Self {
            phi: self.phi.map(|p| -p),
            ..*self
        }
    }
}

/// Angular momentum vector of a configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularMomentum {
    pub cx: f64,
    pub cy: f64,
    pub cz: f64,
}

/// Lagrange embedding of a solved shape, rejecting residuals above [`TOL_NEWTON`].
pub fn embed(shape: &Shape, masses: &MassTriple, hemisphere: Hemisphere) -> Result<Configuration> {
    embed_with_tol(shape, masses, hemisphere, TOL_NEWTON)
}

pub fn embed_with_tol(
    shape: &Shape,
    masses: &MassTriple,
    hemisphere: Hemisphere,
    tol: f64,
) -> Result<Configuration> {
    let residual = normalized_lre_residual(shape, masses)?;
    if residual > tol {
        return Err(Error::NotAnLre { residual });
    }
    let lambda = lambda_triple(shape, masses)?.mean();
    let total = masses.total();
    if total - lambda < 0.0 {
        return Err(Error::EmbeddingImpossible(format!(
            "M - lambda = {:.6e} < 0",
            total - lambda
        )));
    }
    let s3 = shape.as_array().map(|x| x.sin().powi(3));
    let weight: f64 = (0..3).map(|k| masses.m(k) * s3[k] * s3[k]).sum();
    let scale = hemisphere.sign() * (total - lambda).sqrt() / weight.sqrt();
    let cos_theta = s3.map(|x| scale * x);
    if let Some(c) = cos_theta.iter().find(|c| c.abs() > 1.0) {
        return Err(Error::EmbeddingImpossible(format!(
            "cos(theta) = {c:.6} out of range"
        )));
    }
    let theta = cos_theta.map(f64::acos);
    let omega = (weight / (s3[0] * s3[1] * s3[2])).sqrt();

    // cos(phi_i - phi_j) from cos(sigma_ij) = cos t_i cos t_j + sin t_i sin t_j cos(dphi)
    let cos_dphi = |i: usize, j: usize| {
        let k = 3 - i - j;
        (shape.sigma(k).cos() - cos_theta[i] * cos_theta[j]) / (theta[i].sin() * theta[j].sin())
    };
    let to_angle = |c: f64| -> Result<f64> {
        if c.abs() > 1.0 + 1e-9 {
            Err(Error::EmbeddingImpossible(format!(
                "cos(phi_i - phi_j) = {c:.6} out of range"
            )))
        } else {
            Ok(c.clamp(-1.0, 1.0).acos())
        }
    };
    let phi2 = to_angle(cos_dphi(0, 1))?;
    let phi3_abs = to_angle(cos_dphi(0, 2))?;
    let want23 = cos_dphi(1, 2);
    let phi3 = if ((phi2 - phi3_abs).cos() - want23).abs() <= ((phi2 + phi3_abs).cos() - want23).abs()
    {
        phi3_abs
    } else {
        -phi3_abs
    };
    if ((phi2 - phi3).cos() - want23).abs() > 1e-7 {
        return Err(Error::EmbeddingImpossible(format!(
            "azimuths inconsistent for shape {shape}"
        )));
    }
    let mut config = Configuration {
        theta,
        phi: [0.0, phi2, phi3],
        omega,
        hemisphere,
    };
    if config.orientation() < 0.0 {
        config = config.mirrored();
    }
    Ok(config)
}

/// Mutual arc angles of a configuration.
pub fn recover_shape(config: &Configuration) -> Shape {
    let sig = [0, 1, 2].map(|k| {
        let (i, j) = others(k);
        let c = config.theta[i].cos() * config.theta[j].cos()
            + config.theta[i].sin() * config.theta[j].sin() * (config.phi[i] - config.phi[j]).cos();
        c.clamp(-1.0, 1.0).acos()
    });
    Shape::from(sig)
}

/// Angular momentum of a rigidly rotating configuration (`theta' = 0`, `phi' = omega`).
pub fn angular_momentum(config: &Configuration, masses: &MassTriple) -> AngularMomentum {
    let w = config.omega;
    let (mut cx, mut cy, mut cz) = (0.0, 0.0, 0.0);
    for k in 0..3 {
        let (st, ct) = config.theta[k].sin_cos();
        let (sp, cp) = config.phi[k].sin_cos();
        let m = masses.m(k);
        cx -= w * m * st * ct * cp;
        cy -= w * m * st * ct * sp;
        cz += w * m * st * st;
    }
    AngularMomentum { cx, cy, cz }
}

/// Euler configuration on the equator. Its angular velocity is free; the
/// returned configuration uses `omega = 1`.
pub fn embed_equator_ere(shape: &Shape) -> Result<Configuration> {
    if (shape.sum() - 2.0 * PI).abs() > 1e-9 {
        return Err(Error::EmbeddingImpossible(format!(
            "shape {shape} is not on the equator plane"
        )));
    }
    Ok(Configuration {
        theta: [0.5 * PI; 3],
        phi: [0.0, shape.sigma(2), shape.sigma(2) + shape.sigma(0)],
        omega: 1.0,
        hemisphere: Hemisphere::North,
    })
}

/// Euler configuration on a rotating meridian with body `k` (0-based) in the middle.
///
/// The bodies lie on one great circle through the poles at signed polar angles
/// `psi`; the tilt is fixed by `sum m sin(2 psi) = 0` and `omega^2` by the
/// balance of centrifugal and potential forces along the circle.
pub fn embed_meridian_ere(shape: &Shape, masses: &MassTriple, k: usize) -> Result<Configuration> {
    if shape.meridian_gap(k).abs() > 1e-9 {
        return Err(Error::EmbeddingImpossible(format!(
            "shape {shape} is not on the collinear plane of body {}",
            k + 1
        )));
    }
    let (i, j) = others(k);
    // offsets along the circle: i at 0, k at sigma_j, j at sigma_j + sigma_i
    let mut offset = [0.0; 3];
    offset[k] = shape.sigma(j);
    offset[j] = shape.sigma(j) + shape.sigma(i);
    let (a, b) = (0..3).fold((0.0, 0.0), |(a, b), n| {
        let m = masses.m(n);
        (a + m * (2.0 * offset[n]).cos(), b + m * (2.0 * offset[n]).sin())
    });
    let base = 0.5 * (-b).atan2(a);
    let mut best: Option<(Configuration, f64)> = None;
    for n in 0..4 {
        let psi0 = base + 0.5 * PI * n as f64;
        let psi = offset.map(|o| psi0 + o);
        let sc: [f64; 3] = psi.map(|p| p.sin() * p.cos());
        if sc.iter().any(|v| v.abs() < 1e-6) {
            continue;
        }
        let force = circle_forces(&psi, masses);
        let estimates: Vec<f64> = (0..3).map(|n| -force[n] / (masses.m(n) * sc[n])).collect();
        let w2 = estimates[0];
        let spread = estimates
            .iter()
            .map(|e| (e - w2).abs())
            .fold(0.0, f64::max);
        if w2 <= 0.0 || spread > 1e-7 * w2.abs().max(1.0) {
            continue;
        }
        let config = meridian_config(&psi, w2.sqrt());
        if best.as_ref().is_none_or(|(_, s)| spread < *s) {
            best = Some((config, spread));
        }
    }
    best.map(|(c, _)| c).ok_or_else(|| {
        Error::EmbeddingImpossible(format!(
            "shape {shape} admits no rotating-meridian realization for masses {masses}"
        ))
    })
}

// Tangential potential forces along a great circle through the poles,
// dU/dpsi_n for U = sum m_a m_b cot(sigma_ab).
fn circle_forces(psi: &[f64; 3], masses: &MassTriple) -> [f64; 3] {
    let mut f = [0.0; 3];
    for n in 0..3 {
        for q in 0..3 {
            if q == n {
                continue;
            }
            let diff = psi[n] - psi[q];
            let s = diff.sin();
            // d cot(|diff|)/d psi_n = -sign(diff) / sin^2 = -1/sin^2 * sign; sin(diff) carries sign for |diff| < pi
            f[n] -= masses.m(n) * masses.m(q) * diff.signum() / (s * s);
        }
    }
    f
}

fn meridian_config(psi: &[f64; 3], omega: f64) -> Configuration {
    let mut theta = [0.0; 3];
    let mut phi = [0.0; 3];
    for n in 0..3 {
        let p = psi[n].rem_euclid(2.0 * PI);
        if p <= PI {
            theta[n] = p;
            phi[n] = 0.0;
        } else {
            theta[n] = 2.0 * PI - p;
            phi[n] = PI;
        }
    }
    // body 1 at phi = 0 by convention
    if phi[0] != 0.0 {
        phi = phi.map(|p| if p == 0.0 { PI } else { 0.0 });
    }
    Configuration {
        theta,
        phi,
        omega,
        hemisphere: Hemisphere::North,
    }
}
