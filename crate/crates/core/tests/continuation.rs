use std::collections::HashSet;

use proptest::prelude::*;
use sphere_re::continuation::*;
use sphere_re::MassTriple;

fn check_branch_invariants(b: &Branch, opts: &TraceOptions) {
    let n = b.points.len();
    assert!(n >= 2, "{} has {n} points", b.family);
    for (i, p) in b.points.iter().enumerate() {
        assert!(p.residual < 1e-10, "{} point {i} residual {:e}", b.family, p.residual);
        assert!((p.tangent.norm() - 1.0).abs() < 1e-9);
    }
    for w in b.points.windows(2) {
        let chord = (w[1].shape.to_vector() - w[0].shape.to_vector()).norm();
        assert!(chord <= 2.0 * opts.max_step, "{} chord {chord}", b.family);
        assert!(w[1].arclength >= w[0].arclength);
    }
    for e in meridian_events(b) {
        assert!(e.value.abs() < 1e-8, "{} h = {:e} at {}", b.family, e.value, e.location);
    }
}

fn meridian_events(b: &Branch) -> impl Iterator<Item = &Event> {
    b.events
        .iter()
        .filter(|e| matches!(e.kind, EventKind::MeridianPlaneCrossing(_)))
}

fn zero_branch(m: &MassTriple, opts: &TraceOptions) -> Branch {
    let seed = seed_zero_lre(m, opts.vertex_radius).unwrap();
    let fwd = trace_branch_with(&seed, m, Family::LreGeneric, 1.0, opts).unwrap();
    if fwd.points.len() > 2 {
        fwd
    } else {
        trace_branch_with(&seed, m, Family::LreGeneric, -1.0, opts).unwrap()
    }
}

#[test]
fn zero_branch_meets_the_euler_family_on_plane_three() {
    let m = MassTriple::new(1.0, 2.0, 4.0).unwrap();
    let opts = TraceOptions::default();
    let b = zero_branch(&m, &opts);
    check_branch_invariants(&b, &opts);
    let end = b.events.last().unwrap();
    assert_eq!(end.kind, EventKind::MeridianPlaneCrossing(2));
    assert!(end.value.abs() < 1e-8);
    assert_eq!(b.ordering_signs(), Some([-1, -1, 1]));

    // The Euler family through the crossing runs back to the origin.
    let ere = trace_full_branch(&end.location, &m, Family::EreMeridian(2), &opts).unwrap();
    check_branch_invariants(&ere, &opts);
    let near_origin = ere
        .points
        .iter()
        .map(|p| vertex_size(ORIGIN, &p.shape.to_vector()))
        .fold(f64::INFINITY, f64::min);
    assert!(near_origin < opts.vertex_radius + 1e-9, "{near_origin}");
    assert!(ere.distance_to(&end.location) < 1e-9);
}

#[test]
fn equator_branch_keeps_the_mass_ordering() {
    let m = MassTriple::new(1.0, 2.0, 4.0).unwrap();
    let opts = TraceOptions::default();
    let seed = seed_from_equator(&m).unwrap();
    for dir in [1.0, -1.0] {
        let b = trace_branch_with(&seed.shape, &m, Family::LreGeneric, dir, &opts).unwrap();
        if b.points.len() > 2 {
            check_branch_invariants(&b, &opts);
            // sigma1 < sigma2 < sigma3
            assert_eq!(b.ordering_signs(), Some([-1, -1, 1]));
        }
    }
}

#[test]
fn atlas_branches_satisfy_invariants_and_realise_six_orderings() {
    let m = MassTriple::from_nu_dnu(11.0 / 12.0, 0.03).unwrap();
    let opts = AtlasOptions::default();
    let a = atlas(&m, &opts).unwrap();
    assert!(a.failures.is_empty(), "{:?}", a.failures);
    assert_eq!(a.branches.len(), 7);
    let mut orderings = HashSet::new();
    for b in &a.branches {
        check_branch_invariants(b, &opts.trace);
        let o = b.ordering_signs().expect("ordering changes along a branch");
        assert!(o.iter().all(|&s| s != 0));
        orderings.insert(o);
    }
    assert_eq!(orderings.len(), 6);
    // The zero-size branch and the equator branch share one ordering.
    let zero = a
        .branches
        .iter()
        .find(|b| b.distance_to(&seed_zero_lre(&m, opts.trace.vertex_radius).unwrap()) < 1e-9)
        .unwrap();
    let eq = seed_from_equator(&m).unwrap().shape;
    let equator = a.branches.iter().find(|b| b.distance_to(&eq) < 1e-9).unwrap();
    assert_ne!(zero, equator);
    assert_eq!(zero.ordering_signs(), equator.ordering_signs());
}

#[test]
fn halving_the_step_keeps_the_geometry() {
    let m = MassTriple::new(1.0, 2.0, 4.0).unwrap();
    let coarse = TraceOptions::default();
    let fine = TraceOptions {
        max_step: 0.5 * coarse.max_step,
        max_turn: 0.5 * coarse.max_turn,
        ..coarse
    };
    let a = zero_branch(&m, &coarse);
    let b = zero_branch(&m, &fine);
    assert_eq!(a.events.len(), b.events.len());
    for (x, y) in a.events.iter().zip(&b.events) {
        assert_eq!(x.kind, y.kind);
        let d = (x.location.to_vector() - y.location.to_vector()).norm();
        assert!(d < 1e-6, "{} moved by {d:e}", x.kind);
    }
    // Vertices lie on the same curve, so the polylines differ only by
    // their chord sagitta.
    let sagitta = coarse.max_step * coarse.max_turn / 4.0;
    assert!(a.hausdorff(&b) < sagitta, "{:e}", a.hausdorff(&b));
    assert!((a.length() - b.length()).abs() < 1e-5);
}

#[test]
fn branch_counts_for_distinct_masses() {
    let opts = AtlasOptions::default();
    for (m, n) in [
        (MassTriple::from_nu_dnu(11.0 / 12.0, -0.03).unwrap(), 7),
        (MassTriple::new(1.0, 2.0, 4.0).unwrap(), 3),
        (MassTriple::new(1.0, 2.0, 12.0).unwrap(), 2),
    ] {
        let a = atlas(&m, &opts).unwrap();
        assert!(a.failures.is_empty());
        assert_eq!(a.branches.len(), n, "{m}");
    }
}

#[test]
fn equal_masses_bifurcate_off_the_equilateral_line() {
    let a = atlas(&MassTriple::equal(), &AtlasOptions::default()).unwrap();
    assert!(a.failures.is_empty());
    let eq = a.branches.iter().find(|b| b.family == Family::LreEquilateral).unwrap();
    let points: Vec<f64> = eq
        .events_of(EventKind::EquilateralIsoscelesBifurcation)
        .map(|e| e.location.sigma(0))
        .collect();
    let sc = sphere_re::symmetric_families::sigma_c();
    assert_eq!(points.len(), 2);
    assert!(points.iter().any(|s| (s - sc).abs() < 1e-9), "{points:?}");
    // Each isosceles plane carries branches through both bifurcation points.
    for pair in [(0, 1), (1, 2), (0, 2)] {
        let n = a
            .branches
            .iter()
            .filter(|b| b.family == Family::LreIsosceles { pair })
            .flat_map(|b| b.events_of(EventKind::EquilateralIsoscelesBifurcation))
            .count();
        assert_eq!(n, 2, "{pair:?}");
    }
}

#[test]
fn euler_branches_stay_on_their_plane() {
    let m = MassTriple::new(1.0, 2.0, 4.0).unwrap();
    let opts = AtlasOptions::default();
    let a = ere_atlas(&m, &opts).unwrap();
    assert!(a.failures.is_empty());
    for b in &a.branches {
        check_branch_invariants(b, &opts.trace);
        let Family::EreMeridian(k) = b.family else { panic!() };
        for p in &b.points {
            let x = p.shape.to_vector();
            let (i, j) = ((k + 1) % 3, (k + 2) % 3);
            assert!((x[i] + x[j] - x[k]).abs() < 1e-10);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn zero_branch_preserves_the_mass_ordering(a in 0.2f64..5.0, b in 0.2f64..5.0) {
        prop_assume!((a - b).abs() > 0.05 && (a - 1.0).abs() > 0.05 && (b - 1.0).abs() > 0.05);
        let m = MassTriple::new(a, b, 1.0).unwrap();
        let opts = TraceOptions::default();
        let br = zero_branch(&m, &opts);
        let o = br.ordering_signs();
        prop_assert!(o.is_some());
        let o = o.unwrap();
        let ms = [a, b, 1.0];
        for (n, (i, j)) in [(0usize, 1usize), (1, 2), (2, 0)].into_iter().enumerate() {
            let want = if ms[i] > ms[j] { 1 } else { -1 };
            prop_assert_eq!(o[n], want);
        }
        prop_assert!(br.max_residual() < 1e-10);
    }
}
