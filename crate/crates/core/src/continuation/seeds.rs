//! Starting points for branch traces.

use std::f64::consts::PI;

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::inverse_mass::meridian_bifurcation_shapes_on;
use crate::shape_core::{ere_equator, lambda_gradients, others, MassTriple, Shape};

use super::probe::{vertex_size, vertex_size_gradient, ORIGIN};
use super::system::{DefiningSystem, FamilySystem};
use super::tracer::{correct, project};
use super::{Family, TraceOptions};

/// Almost-equilateral Lagrange shape of mean arc `epsilon`, from the
/// small-size expansion, polished to the exact solution at fixed
/// `sum(sigma) = 3 epsilon`.
pub fn seed_zero_lre(masses: &MassTriple, epsilon: f64) -> Result<Shape> {
    if !(epsilon > 0.0 && epsilon <= 0.1) {
        return Err(Error::Precondition(format!(
            "epsilon must lie in (0, 0.1], got {epsilon}"
        )));
    }
    let expansion = zero_lre_expansion(masses, epsilon);
    if masses.all_equal() {
        return Ok(expansion);
    }
    let family = match masses.equal_pair() {
        Some(pair) => Family::LreIsosceles { pair },
        None => Family::LreGeneric,
    };
    let system = FamilySystem::new(family, *masses)?;
    let opts = TraceOptions::default();
    let n = Vector3::repeat(1.0);
    let (x, _) = correct(&system, &expansion.to_vector(), &n, &Vector3::zeros(), 3.0 * epsilon, &opts)
        .map_err(|e| Error::NewtonDivergence(format!("zero-size seed at epsilon {epsilon}: {e}")))?;
    Ok(Shape::from_vector(&x))
}

/// `sigma_l = epsilon + (m_l / M - 1/3) epsilon^3 / 6`.
pub fn zero_lre_expansion(masses: &MassTriple, epsilon: f64) -> Shape {
    let total = masses.total();
    let e3 = epsilon.powi(3) / 6.0;
    Shape::from([0, 1, 2].map(|l| epsilon + (masses.m(l) / total - 1.0 / 3.0) * e3))
}

/// The Euler configuration on the equator as a Lagrange seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquatorSeed {
    pub shape: Shape,
    /// Unit tangent of the Lagrange family through the seed.
    pub tangent: Vector3<f64>,
    /// `(1, 1, 1) . (grad lambda12 x grad lambda23)` with unit gradients;
    /// nonzero means the family crosses the equator plane transversally.
    pub crossing: f64,
}

pub fn seed_from_equator(masses: &MassTriple) -> Option<EquatorSeed> {
    let shape = ere_equator(masses)?;
    let g = lambda_gradients(&shape, masses).ok()?;
    let a = g[0] - g[1];
    let b = g[1] - g[2];
    let c = (a / a.norm()).cross(&(b / b.norm()));
    let crossing = c.sum();
    Some(EquatorSeed {
        shape,
        tangent: c.normalize(),
        crossing,
    })
}

/// `true` when `x` is in the physical region up to `slack` on its faces.
pub(crate) fn physical(x: &Vector3<f64>, slack: f64) -> bool {
    let s = Shape::from_vector(x);
    s.is_in_u()
        && (0..3).all(|k| s.meridian_gap(k) >= -slack)
        && s.equator_gap() >= -slack
}

fn slice_point(v: usize, eps: f64, u: [f64; 3]) -> Vector3<f64> {
    Vector3::from([0, 1, 2].map(|k| {
        if v == ORIGIN || k == v {
            eps * u[k]
        } else {
            PI - eps * u[k]
        }
    }))
}

fn push_distinct(out: &mut Vec<Vector3<f64>>, x: Vector3<f64>, tol: f64) {
    if out.iter().all(|p| (p - x).norm() > tol) {
        out.push(x);
    }
}

/// Solutions of `system` on the slice `vertex_size(v) = eps` near vertex
/// `v` of the physical tetrahedron, from a barycentric grid of `n` cells per side.
pub fn vertex_slice_seeds<S: DefiningSystem + ?Sized>(
    system: &S,
    v: usize,
    eps: f64,
    n: usize,
    opts: &TraceOptions,
) -> Vec<Shape> {
    let normal = vertex_size_gradient(v);
    let mut out = Vec::new();
    for a in 1..n {
        for b in 1..n - a {
            let u = [a, b, n - a - b].map(|q| 3.0 * q as f64 / n as f64);
            let start = slice_point(v, eps, u);
            let Ok((x, _)) = correct(system, &start, &normal, &start, 0.0, opts) else {
                continue;
            };
            if physical(&x, 1e-9)
                && (vertex_size(v, &x) - eps).abs() < 1e-9
                && (x - start).norm() < 4.0 * eps
            {
                push_distinct(&mut out, x, 1e-7);
            }
        }
    }
    out.iter().map(Shape::from_vector).collect()
}

/// Lagrange-Euler bifurcation points on the three collinear planes, polished
/// on the plane against `system`. Tangential roots come with multiplicity 2.
pub fn meridian_seeds<S: DefiningSystem + ?Sized>(
    system: &S,
    masses: &MassTriple,
    opts: &TraceOptions,
) -> Vec<(Shape, usize, u8)> {
    let mut out = Vec::new();
    for k in 0..3 {
        let Ok(roots) = meridian_bifurcation_shapes_on(k, masses) else {
            continue;
        };
        let (i, j) = others(k);
        let mut n = Vector3::zeros();
        n[i] = 1.0;
        n[j] = 1.0;
        n[k] = -1.0;
        for (shape, mult) in roots {
            let x = shape.to_vector();
            let Ok((y, _)) = correct(system, &x, &n, &Vector3::zeros(), 0.0, opts) else {
                continue;
            };
            if (y - x).norm() < 1e-6 {
                out.push((Shape::from_vector(&y), k, mult));
            }
        }
    }
    out
}

/// The equator Euler point when it also solves `system`.
pub fn equator_seed<S: DefiningSystem + ?Sized>(
    system: &S,
    masses: &MassTriple,
    opts: &TraceOptions,
) -> Option<Shape> {
    let x = ere_equator(masses)?.to_vector();
    let (y, _) = correct(system, &x, &Vector3::repeat(1.0), &Vector3::zeros(), 2.0 * PI, opts).ok()?;
    ((y - x).norm() < 1e-6).then(|| Shape::from_vector(&y))
}

/// Interior candidates from sign changes of both equations over the cells
/// of an `n^3` grid, each projected onto the curve.
pub fn grid_seeds<S, F>(system: &S, n: usize, keep: F, opts: &TraceOptions) -> Vec<Shape>
where
    S: DefiningSystem + ?Sized,
    F: Fn(&Vector3<f64>) -> bool,
{
    let step = PI / n as f64;
    let node = |a: usize, b: usize, c: usize| Vector3::new(a as f64, b as f64, c as f64) * step;
    let m = n + 1;
    let mut vals = vec![[f64::NAN; 2]; m * m * m];
    let idx = |a: usize, b: usize, c: usize| (a * m + b) * m + c;
    for a in 1..n {
        for b in 1..n {
            for c in 1..n {
                if let Ok((f, _)) = system.eval(&node(a, b, c)) {
                    vals[idx(a, b, c)] = [f[0], f[1]];
                }
            }
        }
    }
    let mut out = Vec::new();
    for a in 1..n - 1 {
        for b in 1..n - 1 {
            for c in 1..n - 1 {
                let center = node(a, b, c) + Vector3::repeat(0.5 * step);
                if !keep(&center) {
                    continue;
                }
                let mut lo = [f64::INFINITY; 2];
                let mut hi = [f64::NEG_INFINITY; 2];
                let mut bad = false;
                for corner in 0..8 {
                    let v = vals[idx(a + (corner & 1), b + ((corner >> 1) & 1), c + (corner >> 2))];
                    bad |= v.iter().any(|x| !x.is_finite());
                    for r in 0..2 {
                        lo[r] = lo[r].min(v[r]);
                        hi[r] = hi[r].max(v[r]);
                    }
                }
                if bad || !(0..2).all(|r| lo[r] <= 0.0 && hi[r] >= 0.0) {
                    continue;
                }
                if let Ok(y) = project(system, &center, opts) {
                    if (y - center).norm() < 2.0 * step && keep(&y) {
                        out.push(Shape::from_vector(&y));
                    }
                }
            }
        }
    }
    out
}

/// Candidates on a plane family: sign changes of the second equation over a
/// 2D grid of the plane `embed(u, v)`, `u, v in (0, pi)`.
pub fn plane_grid_seeds<S, E, F>(system: &S, n: usize, embed: E, keep: F, opts: &TraceOptions) -> Vec<Shape>
where
    S: DefiningSystem + ?Sized,
    E: Fn(f64, f64) -> Vector3<f64>,
    F: Fn(&Vector3<f64>) -> bool,
{
    let step = PI / n as f64;
    let at = |a: usize, b: usize| embed(a as f64 * step, b as f64 * step);
    let val = |a: usize, b: usize| system.eval(&at(a, b)).map(|(f, _)| f[1]).unwrap_or(f64::NAN);
    let m = n + 1;
    let mut vals = vec![f64::NAN; m * m];
    for a in 1..n {
        for b in 1..n {
            vals[a * m + b] = val(a, b);
        }
    }
    let mut out = Vec::new();
    for a in 1..n - 1 {
        for b in 1..n - 1 {
            let center = embed((a as f64 + 0.5) * step, (b as f64 + 0.5) * step);
            if !keep(&center) {
                continue;
            }
            let v = [vals[a * m + b], vals[(a + 1) * m + b], vals[a * m + b + 1], vals[(a + 1) * m + b + 1]];
            if v.iter().any(|x| !x.is_finite()) {
                continue;
            }
            let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if lo > 0.0 || hi < 0.0 {
                continue;
            }
            if let Ok(y) = project(system, &center, opts) {
                if (y - center).norm() < 3.0 * step && keep(&y) {
                    out.push(Shape::from_vector(&y));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shape_core::normalized_lre_residual;

    #[test]
    fn equal_masses_give_equilateral() {
        let s = seed_zero_lre(&MassTriple::equal(), 0.05).unwrap();
        assert_eq!(s, Shape::equilateral(0.05));
    }

    #[test]
    fn zero_lre_ordering_and_expansion() {
        let m = MassTriple::new(1.0, 2.0, 4.0).unwrap();
        let eps = 0.05;
        let s = seed_zero_lre(&m, eps).unwrap();
        assert!(normalized_lre_residual(&s, &m).unwrap() < 1e-12);
        assert!(s.sigma(0) < s.sigma(1) && s.sigma(1) < s.sigma(2));
        assert!((s.sum() - 3.0 * eps).abs() < 1e-14);
        let e = zero_lre_expansion(&m, eps);
        // the expansion is accurate to the next order, O(eps^5)
        assert!(s.max_abs_diff(&e) < 10.0 * eps.powi(5), "{}", s.max_abs_diff(&e));
        for l in 0..3 {
            let want = (m.m(l) / 7.0 - 1.0 / 3.0) * eps.powi(3) / 6.0;
            assert!((s.sigma(l) - eps - want).abs() < 0.05 * want.abs());
        }
    }

    #[test]
    fn zero_lre_two_variable_oracle() {
        // independent polish: eliminate sigma3 = 3 eps - sigma1 - sigma2 and
        // run a 2x2 Newton with finite-difference Jacobian
        let m = MassTriple::new(1.0, 3.0, 2.0).unwrap();
        let eps = 0.08;
        let f = |a: f64, b: f64| {
            let s = Shape::new(a, b, 3.0 * eps - a - b);
            crate::shape_core::lre_residual(&s, &m).unwrap()
        };
        let (mut a, mut b) = (eps, eps);
        for _ in 0..30 {
            let (f0, f1) = f(a, b);
            let h = 1e-9;
            let (fa0, fa1) = f(a + h, b);
            let (fb0, fb1) = f(a, b + h);
            let j = nalgebra::Matrix2::new((fa0 - f0) / h, (fb0 - f0) / h, (fa1 - f1) / h, (fb1 - f1) / h);
            let d = j.try_inverse().unwrap() * nalgebra::Vector2::new(f0, f1);
            a -= d[0];
            b -= d[1];
        }
        let s = seed_zero_lre(&m, eps).unwrap();
        assert!((s.sigma(0) - a).abs() < 1e-10 && (s.sigma(1) - b).abs() < 1e-10);
    }

    #[test]
    fn zero_lre_rejects_large_epsilon() {
        assert!(seed_zero_lre(&MassTriple::equal(), 0.2).is_err());
        assert!(seed_zero_lre(&MassTriple::equal(), 0.0).is_err());
    }

    #[test]
    fn equator_seeds() {
        let s = seed_from_equator(&MassTriple::equal()).unwrap();
        assert!(s.shape.max_abs_diff(&Shape::equilateral(2.0 * PI / 3.0)) < 1e-14);
        assert!(seed_from_equator(&MassTriple::new(1.0, 2.0, 12.0).unwrap()).is_none());
        let s = seed_from_equator(&MassTriple::new(1.0, 2.0, 4.0).unwrap()).unwrap();
        assert!(s.crossing.abs() > 1e-3);
        assert!(normalized_lre_residual(&s.shape, &MassTriple::new(1.0, 2.0, 4.0).unwrap()).unwrap() < 1e-12);
    }
}
