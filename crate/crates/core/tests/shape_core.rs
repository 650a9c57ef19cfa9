use std::f64::consts::PI;

use nalgebra::{SymmetricEigen, Vector3};
use proptest::prelude::*;
use sphere_re::shape_core::*;

const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [1, 2, 0], [2, 0, 1], [0, 2, 1], [2, 1, 0], [1, 0, 2]];

fn angle() -> impl Strategy<Value = f64> {
    0.05f64..PI - 0.05
}

fn mass() -> impl Strategy<Value = f64> {
    0.1f64..10.0
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn relabeling_permutes_lambdas(a in angle(), b in angle(), c in angle(), m1 in mass(), m2 in mass(), m3 in mass()) {
        let s = Shape::new(a, b, c);
        let m = MassTriple::new(m1, m2, m3).unwrap();
        let l = lambda_triple(&s, &m).unwrap();
        for p in PERMS {
            let lp = lambda_triple(&s.permuted(p), &m.permuted(p)).unwrap();
            for n in 0..3 {
                prop_assert!(rel(lp.get(n), l.get(p[n])) < 1e-12);
            }
        }
    }

    #[test]
    fn lambda_differences_sum_to_zero(a in angle(), b in angle(), c in angle(), m1 in mass(), m2 in mass(), m3 in mass()) {
        let l = lambda_triple(&Shape::new(a, b, c), &MassTriple::new(m1, m2, m3).unwrap()).unwrap();
        let sum = l.lambda12() + l.lambda23() + l.lambda31();
        prop_assert!(sum.abs() < 1e-12 * (1.0 + l.max_abs()));
    }

    #[test]
    fn equal_arcs_give_mass_difference(a in angle(), c in angle(), m1 in mass(), m2 in mass(), m3 in mass(), k in 0usize..3) {
        let (i, j) = others(k);
        let mut sig = [0.0; 3];
        sig[i] = a;
        sig[j] = a;
        sig[k] = c;
        let m = MassTriple::new(m1, m2, m3).unwrap();
        let l = lambda_triple(&Shape::from(sig), &m).unwrap();
        let want = (m.m(i) - m.m(j)) * (c.cos() - 1.0);
        prop_assert!((l.get(i) - l.get(j) - want).abs() < 1e-9 * (1.0 + l.max_abs()));
    }

    #[test]
    fn equal_masses_factor_the_difference(a in angle(), b in angle(), c in angle(), mu in mass(), mk in mass(), k in 0usize..3) {
        prop_assume!((a - b).abs() > 1e-3);
        let (i, j) = others(k);
        let mut sig = [0.0; 3];
        sig[i] = a;
        sig[j] = b;
        sig[k] = c;
        let mut ms = [mu; 3];
        ms[k] = mk;
        let m = MassTriple::new(ms[0], ms[1], ms[2]).unwrap();
        let s = Shape::from(sig);
        let l = lambda_triple(&s, &m).unwrap();
        let t = tilde_lambda(&s, (i, j), &m).unwrap();
        let factored = mk * (a - b).sin() / (a.sin().powi(3) * b.sin().powi(3)) * t;
        let direct = l.get(i) - l.get(j);
        prop_assert!((direct - factored).abs() <= 1e-10 * direct.abs().max(1e-6 * (1.0 + l.max_abs())),
            "{direct} vs {factored}");
    }

    #[test]
    fn jacobian_matches_central_differences(a in angle(), b in angle(), c in angle(), m1 in mass(), m2 in mass(), m3 in mass()) {
        let s = Shape::new(a, b, c);
        let m = MassTriple::new(m1, m2, m3).unwrap();
        let jac = residual_jacobian(&s, &m).unwrap();
        let h = 1e-6;
        let x = s.to_vector();
        for r in 0..2 {
            let norm = jac.row(r).norm();
            for col in 0..3 {
                let mut xp = x;
                let mut xm = x;
                xp[col] += h;
                xm[col] -= h;
                let fp = lre_residual(&Shape::from_vector(&xp), &m).unwrap();
                let fm = lre_residual(&Shape::from_vector(&xm), &m).unwrap();
                let d = if r == 0 { fp.0 - fm.0 } else { fp.1 - fm.1 } / (2.0 * h);
                prop_assert!((d - jac[(r, col)]).abs() < 1e-6 * (1.0 + norm));
            }
        }
    }

    #[test]
    fn tilde_gradient_matches_central_differences(a in angle(), b in angle(), c in angle(), mu in mass(), mk in mass()) {
        let s = Shape::new(a, b, c);
        let m = MassTriple::new(mu, mu, mk).unwrap();
        let g = tilde_lambda_gradient(&s, (0, 1), &m).unwrap();
        let x = s.to_vector();
        for col in 0..3 {
            let mut xp = x;
            let mut xm = x;
            xp[col] += 1e-6;
            xm[col] -= 1e-6;
            let d = (tilde_lambda(&Shape::from_vector(&xp), (0, 1), &m).unwrap()
                - tilde_lambda(&Shape::from_vector(&xm), (0, 1), &m).unwrap()) / 2e-6;
            prop_assert!((d - g[col]).abs() < 1e-6 * (1.0 + g.norm()));
        }
    }
}

#[test]
fn isosceles_tilde_lambda_closed_form() {
    for (sig, s3, nu) in [(0.7, 1.1, 0.4), (1.2, 2.0, 3.0), (2.1, 1.4, 1.7)] {
        let m = MassTriple::partial_equal(nu).unwrap();
        let t = tilde_lambda(&Shape::isosceles(sig, s3), (0, 1), &m).unwrap();
        let want = sig.sin().powi(2)
            * (6.0 * nu * sig.sin().powi(3) * sig.cos() * s3.cos()
                + (1.0 + 2.0 * (2.0 * sig).cos()) * s3.sin().powi(3));
        assert!((t - want).abs() < 1e-13, "{t} vs {want}");
    }
}

#[test]
fn euclidean_limit_tangent() {
    // sigma_k = s / R with R = s / eps: R^-2 (grad l12 x grad l23) -> 9 M^2 / s^2 (1, 1, 1)
    let m = MassTriple::new(1.0, 2.0, 4.0).unwrap();
    let mt = m.total();
    let mut last = f64::INFINITY;
    for eps in [1e-2, 3e-3, 1e-3] {
        let s = Shape::equilateral(eps);
        let j = residual_jacobian(&s, &m).unwrap();
        let c: Vector3<f64> = j.row(0).transpose().cross(&j.row(1).transpose()) * eps * eps;
        let want = Vector3::repeat(9.0 * mt * mt);
        let err = (c - want).norm() / want.norm();
        assert!(err < 10.0 * eps * eps, "eps {eps}: {c:?}");
        assert!(err < last);
        last = err;
    }
}

#[test]
fn example_one_scalene_direction() {
    let s3 = 3f64.sqrt();
    let nu = 8.0 * (36.0 - 5.0 * s3) / 333.0;
    let m = MassTriple::partial_equal(nu).unwrap();
    let p = Shape::new(PI / 3.0, PI / 3.0, PI / 2.0);
    let (l12, l23) = lre_residual(&p, &m).unwrap();
    assert!(l12.abs() < 1e-12 && l23.abs() < 1e-12);
    let gt = tilde_lambda_gradient(&p, (0, 1), &m).unwrap();
    let g = lambda_gradients(&p, &m).unwrap();
    let c = gt.cross(&(g[1] - g[2]));
    let want = Vector3::new(1.0, -1.0, 0.0) * (3.0 * s3 * nu / 8.0);
    assert!((c - want).norm() < 1e-12, "{c:?}");
}

#[test]
fn inertia_eigenvalue_is_the_common_lambda() {
    let s3 = 3f64.sqrt();
    let cases = [
        (
            Shape::new(PI / 3.0, PI / 3.0, PI / 2.0),
            MassTriple::partial_equal(8.0 * (36.0 - 5.0 * s3) / 333.0).unwrap(),
        ),
        (
            Shape::new(PI / 4.0, 3.0 * PI / 4.0, 5.0 * PI / 6.0),
            MassTriple::new((2.0 + 3.0 * s3) / 2.0, (-2.0 + 5.0 * s3) / 2.0, 1.0).unwrap(),
        ),
    ];
    for (s, m) in cases {
        let lam = lambda_triple(&s, &m).unwrap().mean();
        let j = inertia_tensor(&s, &m);
        let e = SymmetricEigen::new(*j.matrix());
        let (n, ev) = e
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - lam).abs().total_cmp(&(b.1 - lam).abs()))
            .unwrap();
        assert!((ev - lam).abs() < 1e-10, "{ev} vs {lam}");
        let psi = e.eigenvectors.column(n);
        assert!((j.matrix() * psi - psi * lam).norm() < 1e-10);
    }
}

#[test]
fn region_examples() {
    let se = 2f64.powf(-0.75).acos();
    assert_eq!(region_membership(&Shape::equilateral(PI / 2.0)), Region::InUPhys);
    assert_eq!(region_membership(&Shape::new(se, se, 2.0 * se)), Region::OnMeridianPlane(2));
    assert_eq!(
        region_membership(&Shape::equilateral(2.0 * PI / 3.0)),
        Region::OnEquatorPlane
    );
    assert_eq!(region_membership(&Shape::new(0.3, 0.4, 1.5)), Region::InU);
    assert_eq!(region_membership(&Shape::new(0.3, 0.4, 3.5)), Region::Outside);
}
