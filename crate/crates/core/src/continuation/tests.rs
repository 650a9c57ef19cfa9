use super::*;
use nalgebra::{Matrix2x3, Vector2};
use std::f64::consts::PI;

/// Unit circle in the plane `x2 = 1`, centred inside the cube.
struct Circle;

impl DefiningSystem for Circle {
    fn eval(&self, x: &Vector3<f64>) -> Result<(Vector2<f64>, Matrix2x3<f64>)> {
        let (u, v) = (x[0] - 1.5, x[1] - 1.5);
        Ok((
            Vector2::new(x[2] - 1.0, u * u + v * v - 1.0),
            Matrix2x3::new(0.0, 0.0, 1.0, 2.0 * u, 2.0 * v, 0.0),
        ))
    }

    fn residual(&self, x: &Vector3<f64>) -> Result<f64> {
        Ok(self.eval(x)?.0.norm())
    }
}

/// The line `x1 = x2 = 0`, on which the Jacobian rows become parallel at
/// `x0 = 0.5`.
struct Pinched;

impl DefiningSystem for Pinched {
    fn eval(&self, x: &Vector3<f64>) -> Result<(Vector2<f64>, Matrix2x3<f64>)> {
        let d = x[0] - 0.5;
        Ok((
            Vector2::new(x[1], x[1] + d * x[2]),
            Matrix2x3::new(0.0, 1.0, 0.0, x[2], 1.0, d),
        ))
    }

    fn residual(&self, x: &Vector3<f64>) -> Result<f64> {
        Ok(self.eval(x)?.0.norm())
    }
}

fn shape(a: f64, b: f64, c: f64) -> Shape {
    Shape::from([a, b, c])
}

#[test]
fn family_and_event_names_round_trip() {
    let families = [
        Family::LreGeneric,
        Family::LreIsosceles { pair: (0, 1) },
        Family::LreIsosceles { pair: (1, 2) },
        Family::LreScalene { pair: (0, 2) },
        Family::LreEquilateral,
        Family::EreMeridian(0),
        Family::EreMeridian(2),
        Family::EreEquatorPoint,
    ];
    for f in families {
        assert_eq!(f.to_string().parse::<Family>().unwrap(), f);
    }
    let kinds = [
        EventKind::MeridianPlaneCrossing(1),
        EventKind::EquatorCoupling,
        EventKind::IsoscelesScaleneBifurcation,
        EventKind::EquilateralIsoscelesBifurcation,
        EventKind::BoundaryExit,
        EventKind::LoopClosure,
        EventKind::TangentDegenerate,
        EventKind::TriplePoint,
    ];
    for k in kinds {
        assert_eq!(k.to_string().parse::<EventKind>().unwrap(), k);
    }
    for bad in ["lre-isosceles-11", "lre-scalene-4", "ere-meridian-0", "meridian-crossing-9", ""] {
        assert!(bad.parse::<Family>().is_err() && bad.parse::<EventKind>().is_err());
    }
}

#[test]
fn hausdorff_of_polylines() {
    let a = vec![Vector3::new(0.0, 0.0, 0.0), Vector3::new(1.0, 0.0, 0.0)];
    let b = vec![
        Vector3::new(0.0, 0.1, 0.0),
        Vector3::new(0.5, 0.1, 0.0),
        Vector3::new(1.0, 0.1, 0.0),
    ];
    assert!((hausdorff(&a, &b) - 0.1).abs() < 1e-15);
    assert_eq!(hausdorff(&a, &a), 0.0);
    // Densifying a polyline does not move it.
    let dense: Vec<_> = (0..=10).map(|i| Vector3::new(i as f64 / 10.0, 0.0, 0.0)).collect();
    assert!(hausdorff(&a, &dense) < 1e-15);
    assert!((polyline_distance(&Vector3::new(2.0, 0.0, 0.0), &a) - 1.0).abs() < 1e-15);
}

#[test]
fn circle_closes_with_exact_length_and_events() {
    let opts = TraceOptions {
        domain: Domain::Cube,
        ..TraceOptions::default()
    };
    let rules = [Rule {
        probe: Probe::PairGap(0, 1),
        kind: EventKind::IsoscelesScaleneBifurcation,
        terminal: false,
    }];
    let m = MassTriple::equal();
    let c = trace_curve(&Circle, &rules, &m, &shape(2.5, 1.5, 1.0), 1.0, &opts).unwrap();
    assert!(c.closed);
    assert_eq!(c.termination, EventKind::LoopClosure);
    let len = c.points.last().unwrap().arclength;
    // inscribed polygon with chords <= 0.02: deficit below L h^2 / 24
    assert!((len - 2.0 * PI).abs() < 2.0 * PI * 0.02f64.powi(2) / 24.0 + 1e-9, "{len}");
    let crossings: Vec<_> = c
        .events
        .iter()
        .filter(|e| e.kind == EventKind::IsoscelesScaleneBifurcation)
        .collect();
    assert_eq!(crossings.len(), 2);
    let r = 0.5f64.sqrt();
    for e in crossings {
        let x = e.location.to_vector();
        let off = (x[0] - 1.5).abs();
        assert!((off - r).abs() < 1e-10 && (x[0] - x[1]).abs() < 1e-10, "{}", e.location);
    }
    for p in &c.points {
        assert!(p.residual < 1e-10);
        assert!((p.tangent.norm() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn parallel_rows_end_the_trace() {
    let opts = TraceOptions {
        domain: Domain::Cube,
        degenerate_tol: 0.05,
        ..TraceOptions::default()
    };
    let m = MassTriple::equal();
    let seed = shape(1.5, 0.0, 0.0);
    let t = tangent(&Pinched, &seed.to_vector(), opts.degenerate_tol).unwrap().unwrap();
    let towards = if t[0] < 0.0 { 1.0 } else { -1.0 };
    let c = trace_curve(&Pinched, &[], &m, &seed, towards, &opts).unwrap();
    assert_eq!(c.termination, EventKind::TangentDegenerate);
    let end = c.points.last().unwrap().shape.to_vector();
    assert!((end[0] - 0.5).abs() < 0.05 + 1e-12, "{end:?}");
    assert_eq!(c.events.last().unwrap().kind, EventKind::TangentDegenerate);
}

#[test]
fn seeds_off_the_curve_or_outside_are_rejected() {
    let m = MassTriple::partial_equal(0.7).unwrap();
    let fam = Family::LreIsosceles { pair: (0, 1) };
    // sigma3 > pi: outside the cube
    let outside = trace_branch(&shape(2.0, 2.0, 4.2), &m, fam, 1.0);
    assert!(matches!(outside, Err(Error::SeedInvalid(_)) | Err(Error::Precondition(_))));
    let degenerate = trace_curve(&Pinched, &[], &m, &shape(0.5, 0.0, 0.0), 1.0, &TraceOptions::default());
    assert!(matches!(degenerate, Err(Error::SeedInvalid(_))));
}

#[test]
fn lagrange_families_by_mass_symmetry() {
    assert_eq!(
        lagrange_families(&MassTriple::new(1.0, 2.0, 4.0).unwrap()),
        vec![Family::LreGeneric]
    );
    let pair = lagrange_families(&MassTriple::partial_equal(0.7).unwrap());
    assert!(pair.contains(&Family::LreIsosceles { pair: (0, 1) }));
    assert!(pair.contains(&Family::LreScalene { pair: (0, 1) }));
    assert_eq!(lagrange_families(&MassTriple::equal()).len(), 4);
}
