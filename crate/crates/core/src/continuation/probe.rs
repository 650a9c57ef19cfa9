//! Scalar event functions watched along a trace.

use std::f64::consts::PI;

use nalgebra::Vector3;

use crate::error::Result;
use crate::shape_core::{others, tilde_lambda, tilde_lambda_gradient, MassTriple, Shape};
use crate::symmetric_families::{alpha_beta, scalene_transversality, IsoscelesPoint};

use super::{Domain, EventKind, Family, TraceOptions};

/// Index of the vertex `(0, 0, 0)` of the physical tetrahedron; vertex
/// `k < 3` is the one with `sigma_k = 0` and the other two arcs equal to `pi`.
pub const ORIGIN: usize = 3;

/// Distance-like size of `x` from a tetrahedron vertex: the mean of the
/// three small arcs `sigma_k, pi - sigma_i, pi - sigma_j` (or `mean sigma`
/// at the origin).
pub fn vertex_size(v: usize, x: &Vector3<f64>) -> f64 {
    vertex_size_gradient(v).dot(x) + if v == ORIGIN { 0.0 } else { 2.0 * PI / 3.0 }
}

pub fn vertex_size_gradient(v: usize) -> Vector3<f64> {
    let third = 1.0 / 3.0;
    if v == ORIGIN {
        return Vector3::repeat(third);
    }
    let mut g = Vector3::repeat(-third);
    g[v] = third;
    g
}

// Plane of body k in the middle; h vanishes where the Euler and Lagrange
// conditions become dependent.
fn h_terms(k: usize, x: &Vector3<f64>) -> (f64, Vector3<f64>) {
    let (i, j) = others(k);
    let (a, b, c) = (x[i], x[j], x[k]);
    let (sd, cd) = (a - b).sin_cos();
    let c2 = (2.0 * c).cos();
    let value = (3.0 * c).cos() - 3.0 * c.cos() + 2.0 * c2 * cd;
    let mut g = Vector3::zeros();
    g[i] = -2.0 * c2 * sd;
    g[j] = 2.0 * c2 * sd;
    g[k] = -3.0 * (3.0 * c).sin() + 3.0 * c.sin() - 4.0 * (2.0 * c).sin() * cd;
    (value, g)
}

/// `h` of the collinear plane `k` at `x`.
pub fn h_on_plane(k: usize, x: &Vector3<f64>) -> f64 {
    h_terms(k, x).0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Probe {
    MeridianGap(usize),
    EquatorGap,
    Vertex(usize),
    CubeMargin,
    PairGap(usize, usize),
    TildeLambda(usize, usize),
    H(usize),
    Transversality,
    /// `alpha * beta` on the plane `sigma1 = sigma2`; positive where an
    /// isosceles point has a positive mass ratio.
    AlphaBeta,
}

impl Probe {
    pub fn value(&self, x: &Vector3<f64>, masses: &MassTriple, opts: &TraceOptions) -> Result<f64> {
        Ok(match *self {
            Probe::MeridianGap(k) => {
                let (i, j) = others(k);
                x[i] + x[j] - x[k]
            }
            Probe::EquatorGap => 2.0 * PI - x.sum(),
            Probe::Vertex(v) => vertex_size(v, x) - opts.vertex_radius,
            Probe::CubeMargin => Shape::from_vector(x).cube_margin() - opts.cube_margin,
            Probe::PairGap(i, j) => x[i] - x[j],
            Probe::TildeLambda(i, j) => tilde_lambda(&Shape::from_vector(x), (i, j), masses)?,
            Probe::H(k) => h_terms(k, x).0,
            Probe::Transversality => {
                scalene_transversality(&IsoscelesPoint::new(0.5 * (x[0] + x[1]), x[2]))?
            }
            Probe::AlphaBeta => {
                let (a, b) = alpha_beta(&IsoscelesPoint::new(0.5 * (x[0] + x[1]), x[2]));
                a * b
            }
        })
    }

    pub fn gradient(
        &self,
        x: &Vector3<f64>,
        masses: &MassTriple,
        opts: &TraceOptions,
    ) -> Result<Vector3<f64>> {
        let mut g = Vector3::zeros();
        match *self {
            Probe::MeridianGap(k) => {
                let (i, j) = others(k);
                g[i] = 1.0;
                g[j] = 1.0;
                g[k] = -1.0;
            }
            Probe::EquatorGap => g = Vector3::repeat(-1.0),
            Probe::Vertex(v) => g = vertex_size_gradient(v),
            Probe::CubeMargin => {
                let (mut best, mut at, mut sign) = (f64::INFINITY, 0, 1.0);
                for k in 0..3 {
                    for (d, s) in [(x[k], 1.0), (PI - x[k], -1.0)] {
                        if d < best {
                            (best, at, sign) = (d, k, s);
                        }
                    }
                }
                g[at] = sign;
            }
            Probe::PairGap(i, j) => {
                g[i] = 1.0;
                g[j] = -1.0;
            }
            Probe::TildeLambda(i, j) => {
                g = tilde_lambda_gradient(&Shape::from_vector(x), (i, j), masses)?;
            }
            Probe::H(k) => g = h_terms(k, x).1,
            Probe::Transversality | Probe::AlphaBeta => {
                let h = 1e-6;
                for c in 0..3 {
                    let mut xp = *x;
                    let mut xm = *x;
                    xp[c] += h;
                    xm[c] -= h;
                    g[c] = (self.value(&xp, masses, opts)? - self.value(&xm, masses, opts)?)
                        / (2.0 * h);
                }
            }
        }
        Ok(g)
    }
}

/// A probe, the event it signals, and whether the trace stops there.
/// Terminal probes are positive inside the traced domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rule {
    pub probe: Probe,
    pub kind: EventKind,
    pub terminal: bool,
}

fn rule(probe: Probe, kind: EventKind, terminal: bool) -> Rule {
    Rule {
        probe,
        kind,
        terminal,
    }
}

fn boundary_rules(out: &mut Vec<Rule>) {
    for v in 0..4 {
        out.push(rule(Probe::Vertex(v), EventKind::BoundaryExit, true));
    }
    out.push(rule(Probe::CubeMargin, EventKind::BoundaryExit, true));
}

/// Event rules of a shape family in a domain.
pub fn rules_for(family: Family, masses: &MassTriple, domain: Domain) -> Vec<Rule> {
    let physical = domain == Domain::Physical;
    let mut out = Vec::new();
    match family {
        Family::EreMeridian(k) => {
            out.push(rule(Probe::H(k), EventKind::MeridianPlaneCrossing(k), false));
            out.push(rule(Probe::EquatorGap, EventKind::BoundaryExit, true));
        }
        Family::EreEquatorPoint => {}
        _ => {
            for k in 0..3 {
                out.push(rule(
                    Probe::MeridianGap(k),
                    EventKind::MeridianPlaneCrossing(k),
                    physical,
                ));
            }
            out.push(rule(Probe::EquatorGap, EventKind::EquatorCoupling, physical));
        }
    }
    match family {
        Family::LreScalene { pair: (i, j) } => out.push(rule(
            Probe::PairGap(i, j),
            EventKind::IsoscelesScaleneBifurcation,
            false,
        )),
        Family::LreIsosceles { pair: (i, j) } => {
            let k = 3 - i - j;
            if masses.all_equal() {
                out.push(rule(
                    Probe::PairGap(j, k),
                    EventKind::EquilateralIsoscelesBifurcation,
                    false,
                ));
            } else {
                out.push(rule(
                    Probe::TildeLambda(i, j),
                    EventKind::IsoscelesScaleneBifurcation,
                    false,
                ));
            }
        }
        Family::LreEquilateral => out.push(rule(
            Probe::TildeLambda(1, 2),
            EventKind::EquilateralIsoscelesBifurcation,
            false,
        )),
        _ => {}
    }
    boundary_rules(&mut out);
    out
}

/// Rules for the `j = 0` curve: its triple points, and the edge of the
/// region with positive mass ratio or the cube.
pub fn j_curve_rules() -> Vec<Rule> {
    vec![
        rule(Probe::Transversality, EventKind::TriplePoint, false),
        rule(Probe::AlphaBeta, EventKind::BoundaryExit, true),
        rule(Probe::CubeMargin, EventKind::BoundaryExit, true),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vertex_sizes() {
        let o = Vector3::new(0.1, 0.2, 0.3);
        assert!((vertex_size(ORIGIN, &o) - 0.2).abs() < 1e-15);
        let v = Vector3::new(PI - 0.1, PI - 0.2, 0.3);
        assert!((vertex_size(2, &v) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn h_gradient_matches_finite_differences() {
        let x = Vector3::new(0.7, 1.1, 1.8);
        for k in 0..3 {
            let (_, g) = h_terms(k, &x);
            for c in 0..3 {
                let mut xp = x;
                let mut xm = x;
                xp[c] += 1e-6;
                xm[c] -= 1e-6;
                let d = (h_terms(k, &xp).0 - h_terms(k, &xm).0) / 2e-6;
                assert!((d - g[c]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn h_matches_plane_point_form() {
        let p = crate::inverse_mass::PlanePoint::new(0.4, 1.2);
        let x = p.shape().to_vector();
        assert!((h_on_plane(2, &x) - crate::inverse_mass::h_residual(&p)).abs() < 1e-14);
    }
}
