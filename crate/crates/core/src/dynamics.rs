//! Direct integration of the equations of motion on the unit sphere, used to
//! confirm that embedded relative equilibria rotate rigidly.
//!
//! With `U = sum_{i<j} m_i m_j cot(sigma_ij)` and kinetic energy
//! `T = 1/2 sum m_k (theta_k'^2 + sin^2 theta_k phi_k'^2)` the Euler-Lagrange
//! equations read
//!
//! ```text
//! theta_k'' = sin t cos t phi_k'^2 + (1/m_k) dU/dtheta_k
//! phi_k''   = ((1/m_k) dU/dphi_k - 2 sin t cos t theta_k' phi_k') / sin^2 t
//! ```
//!
//! where `d cot(sigma)/d cos(sigma) = (1 - cos^2 sigma)^(-3/2)`.

use std::f64::consts::PI;

use nalgebra::Vector3;

use crate::embedding::{
    embed, embed_equator_ere, embed_meridian_ere, recover_shape, Configuration, Hemisphere,
};
use crate::error::{Error, Result};
use crate::shape_core::{region_membership, MassTriple, Region, Shape};

/// Positions and velocities in spherical coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseState {
    pub theta: [f64; 3],
    pub phi: [f64; 3],
    pub dtheta: [f64; 3],
    pub dphi: [f64; 3],
}

impl PhaseState {
    /// Rigid rotation of a configuration about the z axis.
    pub fn from_configuration(config: &Configuration) -> Self {
        Self {
            theta: config.theta,
            phi: config.phi,
            dtheta: [0.0; 3],
            dphi: [config.omega; 3],
        }
    }

    pub fn position(&self, k: usize) -> Vector3<f64> {
        let (st, ct) = self.theta[k].sin_cos();
        let (sp, cp) = self.phi[k].sin_cos();
        Vector3::new(st * cp, st * sp, ct)
    }

    pub fn velocity(&self, k: usize) -> Vector3<f64> {
        let (st, ct) = self.theta[k].sin_cos();
        let (sp, cp) = self.phi[k].sin_cos();
        let (td, pd) = (self.dtheta[k], self.dphi[k]);
        Vector3::new(
            td * ct * cp - pd * st * sp,
            td * ct * sp + pd * st * cp,
            -td * st,
        )
    }

    /// Mutual arc angles at this instant.
    pub fn shape(&self) -> Shape {
        let sig = [0, 1, 2].map(|k| {
            let (i, j) = crate::shape_core::others(k);
            self.position(i).dot(&self.position(j)).clamp(-1.0, 1.0).acos()
        });
        Shape::from(sig)
    }

    fn axpy(&self, h: f64, d: &PhaseState) -> PhaseState {
        let f = |a: [f64; 3], b: [f64; 3]| [a[0] + h * b[0], a[1] + h * b[1], a[2] + h * b[2]];
        PhaseState {
            theta: f(self.theta, d.theta),
            phi: f(self.phi, d.phi),
            dtheta: f(self.dtheta, d.dtheta),
            dphi: f(self.dphi, d.dphi),
        }
    }
}

/// Time derivative of all twelve phase variables.
pub fn state_derivative(state: &PhaseState, masses: &MassTriple) -> Result<PhaseState> {
    let (st, ct) = (state.theta.map(f64::sin), state.theta.map(f64::cos));
    let mut du_dtheta = [0.0; 3];
    let mut du_dphi = [0.0; 3];
    for k in 0..3 {
        for j in 0..3 {
            if j == k {
                continue;
            }
            let dphi = state.phi[k] - state.phi[j];
            let (sd, cd) = dphi.sin_cos();
            let c = ct[k] * ct[j] + st[k] * st[j] * cd;
            if c.abs() > 1.0 - 1e-10 {
                return Err(Error::CollisionProximity { cos: c });
            }
            let w = masses.m(k) * masses.m(j) * (1.0 - c * c).powf(-1.5);
            du_dtheta[k] += w * (-st[k] * ct[j] + ct[k] * st[j] * cd);
            du_dphi[k] += w * (-st[k] * st[j] * sd);
        }
    }
    let mut ddtheta = [0.0; 3];
    let mut ddphi = [0.0; 3];
    for k in 0..3 {
        let m = masses.m(k);
        let sc = st[k] * ct[k];
        ddtheta[k] = sc * state.dphi[k] * state.dphi[k] + du_dtheta[k] / m;
        ddphi[k] =
            (du_dphi[k] / m - 2.0 * sc * state.dtheta[k] * state.dphi[k]) / (st[k] * st[k]);
    }
    Ok(PhaseState {
        theta: state.dtheta,
        phi: state.dphi,
        dtheta: ddtheta,
        dphi: ddphi,
    })
}

/// Potential `sum m_i m_j cot(sigma_ij)`.
pub fn potential(state: &PhaseState, masses: &MassTriple) -> f64 {
    let mut u = 0.0;
    for k in 0..3 {
        let (i, j) = crate::shape_core::others(k);
        let c = state.position(i).dot(&state.position(j));
        u += masses.m(i) * masses.m(j) * c / (1.0 - c * c).sqrt();
    }
    u
}

/// Total energy `T - U`.
pub fn energy(state: &PhaseState, masses: &MassTriple) -> f64 {
    let kinetic: f64 = (0..3)
        .map(|k| {
            let s = state.theta[k].sin();
            0.5 * masses.m(k)
                * (state.dtheta[k] * state.dtheta[k] + s * s * state.dphi[k] * state.dphi[k])
        })
        .sum();
    kinetic - potential(state, masses)
}

/// Angular momentum `sum m_k r_k x r_k'`.
pub fn angular_momentum(state: &PhaseState, masses: &MassTriple) -> Vector3<f64> {
    (0..3)
        .map(|k| masses.m(k) * state.position(k).cross(&state.velocity(k)))
        .sum()
}

/// One classical fourth-order Runge-Kutta step.
pub fn rk4_step(state: &PhaseState, masses: &MassTriple, h: f64) -> Result<PhaseState> {
    let k1 = state_derivative(state, masses)?;
    let k2 = state_derivative(&state.axpy(0.5 * h, &k1), masses)?;
    let k3 = state_derivative(&state.axpy(0.5 * h, &k2), masses)?;
    let k4 = state_derivative(&state.axpy(h, &k3), masses)?;
    let mut out = *state;
    for n in 0..3 {
        out.theta[n] += h / 6.0 * (k1.theta[n] + 2.0 * k2.theta[n] + 2.0 * k3.theta[n] + k4.theta[n]);
        out.phi[n] += h / 6.0 * (k1.phi[n] + 2.0 * k2.phi[n] + 2.0 * k3.phi[n] + k4.phi[n]);
        out.dtheta[n] +=
            h / 6.0 * (k1.dtheta[n] + 2.0 * k2.dtheta[n] + 2.0 * k3.dtheta[n] + k4.dtheta[n]);
        out.dphi[n] += h / 6.0 * (k1.dphi[n] + 2.0 * k2.dphi[n] + 2.0 * k3.dphi[n] + k4.dphi[n]);
    }
    Ok(out)
}

/// Default number of integration steps per rotation period.
pub const STEPS_PER_PERIOD: usize = 4096;

/// Summary of a rigid-rotation integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidityReport {
    /// `max_t |sigma(t) - sigma(0)|_inf`.
    pub max_drift: f64,
    /// Relative energy change over the run.
    pub energy_drift: f64,
    /// Relative change of `c_z`.
    pub cz_drift: f64,
    /// `max_t max(|c_x|, |c_y|)`.
    pub max_cxy: f64,
    /// `max_t |state(t) - rigid rotation(t)|_inf` over the angles.
    pub max_phase_error: f64,
    pub omega: f64,
}

/// Integrates a rotating configuration for `periods * 2 pi / omega`.
pub fn rigidity_check_config(
    config: &Configuration,
    masses: &MassTriple,
    periods: f64,
    steps_per_period: usize,
) -> Result<RigidityReport> {
    if config.omega <= 0.0 || !config.omega.is_finite() {
        return Err(Error::Precondition(format!(
            "omega = {} is not a positive rotation rate",
            config.omega
        )));
    }
    let start = PhaseState::from_configuration(config);
    let shape0 = start.shape();
    let e0 = energy(&start, masses);
    let c0 = angular_momentum(&start, masses);
    let period = 2.0 * PI / config.omega;
    let steps = ((periods * steps_per_period as f64).round() as usize).max(1);
    let h = periods * period / steps as f64;
    let mut state = start;
    let mut report = RigidityReport {
        max_drift: 0.0,
        energy_drift: 0.0,
        cz_drift: 0.0,
        max_cxy: c0.x.abs().max(c0.y.abs()),
        max_phase_error: 0.0,
        omega: config.omega,
    };
    for n in 1..=steps {
        state = rk4_step(&state, masses, h)?;
        let t = h * n as f64;
        report.max_drift = report.max_drift.max(state.shape().max_abs_diff(&shape0));
        let c = angular_momentum(&state, masses);
        report.max_cxy = report.max_cxy.max(c.x.abs()).max(c.y.abs());
        for k in 0..3 {
            let dt = (state.theta[k] - start.theta[k]).abs();
            let dp = (state.phi[k] - start.phi[k] - config.omega * t).abs();
            report.max_phase_error = report.max_phase_error.max(dt).max(dp);
        }
    }
    let e1 = energy(&state, masses);
    let c1 = angular_momentum(&state, masses);
    report.energy_drift = (e1 - e0).abs() / e0.abs().max(1.0);
    report.cz_drift = (c1.z - c0.z).abs() / c0.z.abs().max(1.0);
    Ok(report)
}

/// Embeds a solved shape (Lagrange, meridian Euler or equator Euler,
/// chosen by region) and integrates it with `steps_per_period` RK4 steps.
pub fn rigidity_check(
    shape: &Shape,
    masses: &MassTriple,
    periods: f64,
    steps_per_period: usize,
) -> Result<RigidityReport> {
    let config = match region_membership(shape) {
        Region::OnMeridianPlane(k) => embed_meridian_ere(shape, masses, k)?,
        Region::OnEquatorPlane => embed_equator_ere(shape)?,
        _ => embed(shape, masses, Hemisphere::North)?,
    };
    debug_assert!(recover_shape(&config).max_abs_diff(shape) < 1e-6);
    rigidity_check_config(&config, masses, periods, steps_per_period)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn right_equilateral() -> (Configuration, MassTriple) {
        let m = MassTriple::equal();
        (
            embed(&Shape::equilateral(PI / 2.0), &m, Hemisphere::North).unwrap(),
            m,
        )
    }

    #[test]
    fn relative_equilibrium_has_no_acceleration() {
        let (c, m) = right_equilateral();
        let d = state_derivative(&PhaseState::from_configuration(&c), &m).unwrap();
        for k in 0..3 {
            assert!(d.dtheta[k].abs() < 1e-12);
            assert!(d.dphi[k].abs() < 1e-12);
        }
    }

    #[test]
    fn equilateral_rotates_rigidly() {
        let (c, m) = right_equilateral();
        let r = rigidity_check_config(&c, &m, 1.0, STEPS_PER_PERIOD).unwrap();
        assert!(r.max_drift < 1e-6, "{r:?}");
        assert!(r.energy_drift < 1e-8 && r.cz_drift < 1e-8, "{r:?}");
        assert!(r.max_cxy < 1e-8);
    }

    #[test]
    fn non_equilibrium_deforms() {
        let (c, m) = right_equilateral();
        let mut start = PhaseState::from_configuration(&c);
        start.theta[0] += 0.1;
        let mut state = start;
        let h = 2.0 * PI / c.omega / 1024.0;
        let s0 = start.shape();
        let mut drift: f64 = 0.0;
        for _ in 0..1024 {
            state = rk4_step(&state, &m, h).unwrap();
            drift = drift.max(state.shape().max_abs_diff(&s0));
        }
        assert!(drift > 1e-2, "drift {drift}");
    }

    #[test]
    fn fourth_order_convergence() {
        let (c, m) = right_equilateral();
        let mut start = PhaseState::from_configuration(&c);
        start.theta[0] += 0.05;
        start.dphi[1] *= 1.02;
        let t = 2.0 * PI / c.omega;
        let run = |n: usize| {
            let mut s = start;
            for _ in 0..n {
                s = rk4_step(&s, &m, t / n as f64).unwrap();
            }
            s
        };
        let reference = run(4096);
        let err = |s: PhaseState| {
            (0..3)
                .map(|k| (s.theta[k] - reference.theta[k]).abs().max((s.phi[k] - reference.phi[k]).abs()))
                .fold(0.0, f64::max)
        };
        let (e1, e2) = (err(run(128)), err(run(256)));
        let ratio = e1 / e2;
        assert!((12.0..20.0).contains(&ratio), "ratio {ratio}, {e1} {e2}");
    }

    #[test]
    fn collision_is_reported() {
        let s = PhaseState {
            theta: [1.0, 1.0, 2.0],
            phi: [0.0, 0.0, 1.0],
            dtheta: [0.0; 3],
            dphi: [0.0; 3],
        };
        let err = state_derivative(&s, &MassTriple::equal()).unwrap_err();
        assert!(matches!(err, Error::CollisionProximity { .. }));
    }
}
