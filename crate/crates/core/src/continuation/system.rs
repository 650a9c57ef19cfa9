//! Defining equations of the traced curves: two scalar equations in the
//! three arc angles, with analytic gradients.

use nalgebra::{Matrix2x3, Vector2, Vector3};

use crate::error::{Error, Result};
use crate::shape_core::{
    ere_meridian_d_gradient, ere_meridian_d_unchecked, lambda_gradients, lambda_triple, others,
    tilde_lambda, tilde_lambda_gradient, MassTriple, Shape,
};
use crate::symmetric_families::{j_numerator, IsoscelesPoint};

use super::Family;

/// Two equations `F(x) = 0` cutting out a curve in shape space.
pub trait DefiningSystem: Sync {
    /// `F(x)` and its Jacobian.
    fn eval(&self, x: &Vector3<f64>) -> Result<(Vector2<f64>, Matrix2x3<f64>)>;

    /// Scale-free residual used for convergence tests and reporting.
    fn residual(&self, x: &Vector3<f64>) -> Result<f64>;
}

fn rows(a: Vector3<f64>, b: Vector3<f64>) -> Matrix2x3<f64> {
    Matrix2x3::new(a[0], a[1], a[2], b[0], b[1], b[2])
}

fn unit(k: usize) -> Vector3<f64> {
    let mut e = Vector3::zeros();
    e[k] = 1.0;
    e
}

fn pair_gap(i: usize, j: usize) -> Vector3<f64> {
    unit(i) - unit(j)
}

/// Equations of a shape family at fixed masses.
#[derive(Debug, Clone, Copy)]
pub struct FamilySystem {
    pub family: Family,
    pub masses: MassTriple,
}

impl FamilySystem {
    pub fn new(family: Family, masses: MassTriple) -> Result<Self> {
        match family {
            Family::LreIsosceles { pair: (i, j) } | Family::LreScalene { pair: (i, j) } => {
                if i == j || i > 2 || j > 2 || !masses.pair_equal(i, j) {
                    return Err(Error::Precondition(format!(
                        "family {family} needs m_{} = m_{} (masses {masses})",
                        i + 1,
                        j + 1
                    )));
                }
            }
            Family::LreEquilateral if !masses.all_equal() => {
                return Err(Error::Precondition(format!(
                    "equilateral family needs equal masses, got {masses}"
                )));
            }
            Family::EreMeridian(k) if k > 2 => {
                return Err(Error::Precondition(format!("no collinear plane {k}")));
            }
            Family::EreEquatorPoint => {
                return Err(Error::Precondition("the equator Euler point is isolated".into()));
            }
            _ => {}
        }
        Ok(Self { family, masses })
    }

    fn lambda_scale(&self, shape: &Shape) -> Result<f64> {
        let l = lambda_triple(shape, &self.masses)?;
        Ok(self.masses.total() + l.max_abs())
    }
}

fn third(i: usize, j: usize) -> usize {
    3 - i - j
}

impl DefiningSystem for FamilySystem {
    fn eval(&self, x: &Vector3<f64>) -> Result<(Vector2<f64>, Matrix2x3<f64>)> {
        let shape = Shape::from_vector(x);
        let m = &self.masses;
        match self.family {
            Family::LreGeneric => {
                let l = lambda_triple(&shape, m)?;
                let g = lambda_gradients(&shape, m)?;
                Ok((
                    Vector2::new(l.lambda12(), l.lambda23()),
                    rows(g[0] - g[1], g[1] - g[2]),
                ))
            }
            Family::LreIsosceles { pair: (i, j) } => {
                let k = third(i, j);
                let gap = x[i] - x[j];
                if m.all_equal() {
                    // lambda_j - lambda_k carries the factor sin(sigma_j - sigma_k)
                    let t = tilde_lambda(&shape, (j, k), m)?;
                    let gt = tilde_lambda_gradient(&shape, (j, k), m)?;
                    Ok((Vector2::new(gap, t), rows(pair_gap(i, j), gt)))
                } else {
                    let l = lambda_triple(&shape, m)?;
                    let g = lambda_gradients(&shape, m)?;
                    Ok((
                        Vector2::new(gap, l.get(j) - l.get(k)),
                        rows(pair_gap(i, j), g[j] - g[k]),
                    ))
                }
            }
            Family::LreScalene { pair: (i, j) } => {
                let k = third(i, j);
                let t = tilde_lambda(&shape, (i, j), m)?;
                let gt = tilde_lambda_gradient(&shape, (i, j), m)?;
                let l = lambda_triple(&shape, m)?;
                let g = lambda_gradients(&shape, m)?;
                Ok((Vector2::new(t, l.get(j) - l.get(k)), rows(gt, g[j] - g[k])))
            }
            Family::LreEquilateral => Ok((
                Vector2::new(x[0] - x[1], x[1] - x[2]),
                rows(pair_gap(0, 1), pair_gap(1, 2)),
            )),
            Family::EreMeridian(k) => {
                shape.check_singular()?;
                let (i, j) = others(k);
                let gap = x[i] + x[j] - x[k];
                let d = ere_meridian_d_unchecked(k, &shape, m);
                let gd = ere_meridian_d_gradient(k, &shape, m);
                Ok((Vector2::new(gap, d), rows(unit(i) + unit(j) - unit(k), gd)))
            }
            Family::EreEquatorPoint => Err(Error::Precondition("the equator Euler point is isolated".into())),
        }
    }

    fn residual(&self, x: &Vector3<f64>) -> Result<f64> {
        let shape = Shape::from_vector(x);
        let (f, _) = self.eval(x)?;
        let m = &self.masses;
        Ok(match self.family {
            Family::LreGeneric => f.norm() / self.lambda_scale(&shape)?,
            Family::LreIsosceles { .. } if m.all_equal() => f[0].abs() + f[1].abs() / 6.0,
            Family::LreIsosceles { .. } => f[0].abs() + f[1].abs() / self.lambda_scale(&shape)?,
            Family::LreScalene { pair: (i, _) } => {
                let nu = m.m(i) / m.m(third_of_pair(self.family));
                f[0].abs() / (1.0 + nu) + f[1].abs() / self.lambda_scale(&shape)?
            }
            Family::LreEquilateral => f.norm(),
            Family::EreMeridian(_) => {
                let inv: f64 = x.iter().map(|s| 1.0 / s.sin().powi(2)).sum();
                f[0].abs() + f[1].abs() / (m.total() * inv)
            }
            Family::EreEquatorPoint => f.norm(),
        })
    }
}

fn third_of_pair(family: Family) -> usize {
    match family {
        Family::LreIsosceles { pair: (i, j) } | Family::LreScalene { pair: (i, j) } => third(i, j),
        _ => unreachable!("family without an equal pair"),
    }
}

/// The locus `j = 0` on the plane `sigma1 = sigma2`, where the mass ratio
/// at each point is the one making it an isosceles Lagrange shape. The
/// second equation is `alpha * j`, free of the pole of `j`.
#[derive(Debug, Clone, Copy, Default)]
pub struct JCurveSystem;

impl DefiningSystem for JCurveSystem {
    fn eval(&self, x: &Vector3<f64>) -> Result<(Vector2<f64>, Matrix2x3<f64>)> {
        let p = IsoscelesPoint::new(0.5 * (x[0] + x[1]), x[2]);
        let (j, (js, j3)) = j_numerator(&p)?;
        Ok((
            Vector2::new(x[0] - x[1], j),
            rows(pair_gap(0, 1), Vector3::new(0.5 * js, 0.5 * js, j3)),
        ))
    }

    fn residual(&self, x: &Vector3<f64>) -> Result<f64> {
        let (f, _) = self.eval(x)?;
        Ok(f[0].abs() + f[1].abs())
    }
}
