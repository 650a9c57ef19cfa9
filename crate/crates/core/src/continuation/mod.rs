//! One-dimensional families of relative equilibria in shape space at fixed
//! masses: predictor-corrector tracing, event detection and branch
//! enumeration.
//!
//! A Lagrange family is a curve where both `lambda` differences vanish. It
//! ends where it leaves the physical tetrahedron: on a collinear face at a
//! point of the `h = 0` curve (where an Euler family on that face meets it),
//! at the Euler point on the equator face, or in a small neighbourhood of a
//! vertex of the tetrahedron. Vertex neighbourhoods are cut off at
//! `vertex_size = TraceOptions::vertex_radius`, and the same slices are used
//! to seed traces, so a branch found from either end has the same extent.

mod probe;
mod seeds;
mod system;
mod tracer;

use std::fmt;
use std::str::FromStr;

use nalgebra::Vector3;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::shape_core::{ere_equator, MassTriple, Shape};
use crate::symmetric_families::{nu_for_isosceles, IsoscelesPoint};

pub use probe::{h_on_plane, j_curve_rules, rules_for, vertex_size, Probe, Rule, ORIGIN};
pub use seeds::{
    equator_seed, grid_seeds, meridian_seeds, plane_grid_seeds, seed_from_equator, seed_zero_lre,
    vertex_slice_seeds, zero_lre_expansion, EquatorSeed,
};
pub use system::{DefiningSystem, FamilySystem, JCurveSystem};
pub use tracer::{correct, project, tangent, trace_curve, trace_curve_full, TracedCurve};

/// Which region bounds a trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    /// Stop on leaving the physical tetrahedron.
    Physical,
    /// Record face crossings and continue inside the open cube.
    Cube,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceOptions {
    pub initial_step: f64,
    pub max_step: f64,
    pub min_step: f64,
    pub grow: f64,
    pub shrink: f64,
    /// Corrector iterations at or below which the step grows.
    pub fast_iterations: usize,
    pub max_corrector_iterations: usize,
    /// Relative size of the last Newton step at convergence.
    pub corrector_tol: f64,
    /// Bound on the defining system's normalized residual at accepted points.
    pub residual_tol: f64,
    /// Largest angle (radians) between consecutive tangents.
    pub max_turn: f64,
    /// Chord length to which events are bisected.
    pub event_tol: f64,
    /// Event functions this close to zero at the seed count as active there.
    pub active_tol: f64,
    pub active_rate: f64,
    pub loop_tol: f64,
    pub loop_alignment: f64,
    /// Distance from the seed a trace must reach before it can close a loop.
    pub loop_min_excursion: f64,
    /// Tangents are degenerate when the unit gradients are parallel to this.
    pub degenerate_tol: f64,
    /// Size of the vertex neighbourhoods cut off by the tracer.
    pub vertex_radius: f64,
    /// Distance to the cube faces at which traces stop.
    pub cube_margin: f64,
    pub domain: Domain,
    pub max_points: usize,
}

impl Default for TraceOptions {
    fn default() -> Self {
        Self {
            initial_step: 1e-3,
            max_step: 0.02,
            min_step: 1e-7,
            grow: 1.3,
            shrink: 0.5,
            fast_iterations: 3,
            max_corrector_iterations: 12,
            corrector_tol: 1e-13,
            residual_tol: 1e-10,
            max_turn: 0.01,
            event_tol: 1e-10,
            active_tol: 1e-9,
            active_rate: 1e-6,
            loop_tol: 1e-6,
            loop_alignment: 0.99,
            loop_min_excursion: 5e-3,
            degenerate_tol: 1e-10,
            vertex_radius: 0.05,
            cube_margin: 0.01,
            domain: Domain::Physical,
            max_points: 200_000,
        }
    }
}

/// Shape family of a branch. Pairs and planes are 0-based indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// Lagrange shapes for pairwise distinct masses.
    LreGeneric,
    /// Lagrange shapes on the plane `sigma_i = sigma_j` (needs `m_i = m_j`).
    LreIsosceles { pair: (usize, usize) },
    /// Lagrange shapes off the plane for `m_i = m_j`, where the reduced
    /// difference `lambda~_ij` vanishes.
    LreScalene { pair: (usize, usize) },
    LreEquilateral,
    /// Euler shapes on the plane where body `k` sits in the middle.
    EreMeridian(usize),
    EreEquatorPoint,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Family::LreGeneric => write!(f, "lre-generic"),
            Family::LreIsosceles { pair: (i, j) } => write!(f, "lre-isosceles-{}{}", i + 1, j + 1),
            Family::LreScalene { pair: (i, j) } => write!(f, "lre-scalene-{}{}", i + 1, j + 1),
            Family::LreEquilateral => write!(f, "lre-equilateral"),
            Family::EreMeridian(k) => write!(f, "ere-meridian-{}", k + 1),
            Family::EreEquatorPoint => write!(f, "ere-equator-point"),
        }
    }
}

fn digit(c: u8) -> Option<usize> {
    (b'1'..=b'3').contains(&c).then(|| (c - b'1') as usize)
}

fn parse_pair(s: &str) -> Option<(usize, usize)> {
    match s.as_bytes() {
        &[a, b] => Some((digit(a)?, digit(b)?)).filter(|(i, j)| i != j),
        _ => None,
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Precondition(format!("unknown family '{s}'"));
        Ok(match s {
            "lre-generic" => Family::LreGeneric,
            "lre-equilateral" => Family::LreEquilateral,
            "ere-equator-point" => Family::EreEquatorPoint,
            _ => {
                if let Some(p) = s.strip_prefix("lre-isosceles-") {
                    Family::LreIsosceles {
                        pair: parse_pair(p).ok_or_else(bad)?,
                    }
                } else if let Some(p) = s.strip_prefix("lre-scalene-") {
                    Family::LreScalene {
                        pair: parse_pair(p).ok_or_else(bad)?,
                    }
                } else if let Some(k) = s.strip_prefix("ere-meridian-") {
                    match k.as_bytes() {
                        &[c] => Family::EreMeridian(digit(c).ok_or_else(bad)?),
                        _ => return Err(bad()),
                    }
                } else {
                    return Err(bad());
                }
            }
        })
    }
}

impl Family {
    pub fn is_lagrange(&self) -> bool {
        !matches!(self, Family::EreMeridian(_) | Family::EreEquatorPoint)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventKind {
    /// Crossing of the collinear plane where body `k` is in the middle.
    MeridianPlaneCrossing(usize),
    EquatorCoupling,
    IsoscelesScaleneBifurcation,
    EquilateralIsoscelesBifurcation,
    BoundaryExit,
    LoopClosure,
    TangentDegenerate,
    /// On the `j = 0` curve: the scalene direction lies in the isosceles plane.
    TriplePoint,
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            EventKind::MeridianPlaneCrossing(k) => write!(f, "meridian-crossing-{}", k + 1),
            EventKind::EquatorCoupling => write!(f, "equator-coupling"),
            EventKind::IsoscelesScaleneBifurcation => write!(f, "isosceles-scalene"),
            EventKind::EquilateralIsoscelesBifurcation => write!(f, "equilateral-isosceles"),
            EventKind::BoundaryExit => write!(f, "boundary-exit"),
            EventKind::LoopClosure => write!(f, "loop-closure"),
            EventKind::TangentDegenerate => write!(f, "tangent-degenerate"),
            EventKind::TriplePoint => write!(f, "triple-point"),
        }
    }
}

impl FromStr for EventKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "equator-coupling" => EventKind::EquatorCoupling,
            "isosceles-scalene" => EventKind::IsoscelesScaleneBifurcation,
            "equilateral-isosceles" => EventKind::EquilateralIsoscelesBifurcation,
            "boundary-exit" => EventKind::BoundaryExit,
            "loop-closure" => EventKind::LoopClosure,
            "tangent-degenerate" => EventKind::TangentDegenerate,
            "triple-point" => EventKind::TriplePoint,
            _ => {
                let k = s
                    .strip_prefix("meridian-crossing-")
                    .and_then(|k| match k.as_bytes() {
                        &[c] => digit(c),
                        _ => None,
                    })
                    .ok_or_else(|| Error::Precondition(format!("unknown event '{s}'")))?;
                EventKind::MeridianPlaneCrossing(k)
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchPoint {
    pub shape: Shape,
    pub arclength: f64,
    /// Unit tangent in the direction of increasing arclength.
    pub tangent: Vector3<f64>,
    /// Normalized residual of the family's defining equations.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub kind: EventKind,
    pub location: Shape,
    pub arclength: f64,
    /// `h` of the plane for meridian crossings; otherwise the event
    /// function's value at the located point.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub family: Family,
    pub masses: MassTriple,
    pub points: Vec<BranchPoint>,
    pub events: Vec<Event>,
    pub closed: bool,
}

fn segment_distance(p: &Vector3<f64>, a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
    let ab = b - a;
    let l2 = ab.norm_squared();
    let t = if l2 == 0.0 {
        0.0
    } else {
        ((p - a).dot(&ab) / l2).clamp(0.0, 1.0)
    };
    (p - (a + ab * t)).norm()
}

/// Distance from `p` to the polyline through `pts`.
pub fn polyline_distance(p: &Vector3<f64>, pts: &[Vector3<f64>]) -> f64 {
    match pts {
        [] => f64::INFINITY,
        [a] => (p - a).norm(),
        _ => pts
            .windows(2)
            .map(|w| segment_distance(p, &w[0], &w[1]))
            .fold(f64::INFINITY, f64::min),
    }
}

/// Symmetric Hausdorff distance between two polylines.
pub fn hausdorff(a: &[Vector3<f64>], b: &[Vector3<f64>]) -> f64 {
    let one = |x: &[Vector3<f64>], y: &[Vector3<f64>]| {
        x.iter()
            .map(|p| polyline_distance(p, y))
            .fold(0.0, f64::max)
    };
    one(a, b).max(one(b, a))
}

impl Branch {
    pub fn from_curve(family: Family, masses: MassTriple, curve: TracedCurve) -> Self {
        Self {
            family,
            masses,
            points: curve.points,
            events: curve.events,
            closed: curve.closed,
        }
    }

    pub fn vertices(&self) -> Vec<Vector3<f64>> {
        self.points.iter().map(|p| p.shape.to_vector()).collect()
    }

    pub fn length(&self) -> f64 {
        self.points.last().map_or(0.0, |p| p.arclength)
    }

    pub fn distance_to(&self, shape: &Shape) -> f64 {
        polyline_distance(&shape.to_vector(), &self.vertices())
    }

    pub fn hausdorff(&self, other: &Branch) -> f64 {
        hausdorff(&self.vertices(), &other.vertices())
    }

    pub fn events_of(&self, kind: EventKind) -> impl Iterator<Item = &Event> {
        self.events.iter().filter(move |e| e.kind == kind)
    }

    pub fn max_residual(&self) -> f64 {
        self.points.iter().map(|p| p.residual).fold(0.0, f64::max)
    }

    /// Signs of `(sigma1 - sigma2, sigma2 - sigma3, sigma3 - sigma1)` when
    /// they are constant over the branch (ignoring points within `1e-9` of
    /// a tie), else `None`.
    pub fn ordering_signs(&self) -> Option<[i8; 3]> {
        let mut signs: [Option<i8>; 3] = [None; 3];
        for p in &self.points {
            for (n, (i, j)) in [(0, 1), (1, 2), (2, 0)].into_iter().enumerate() {
                let d = p.shape.sigma(i) - p.shape.sigma(j);
                if d.abs() < 1e-9 {
                    continue;
                }
                let s = if d > 0.0 { 1 } else { -1 };
                match signs[n] {
                    None => signs[n] = Some(s),
                    Some(t) if t != s => return None,
                    _ => {}
                }
            }
        }
        Some(signs.map(|s| s.unwrap_or(0)))
    }
}

/// Traces a family from `seed` in one direction (`direction` = +1 or -1
/// along the cross-product tangent), with default options.
pub fn trace_branch(seed: &Shape, masses: &MassTriple, family: Family, direction: f64) -> Result<Branch> {
    trace_branch_with(seed, masses, family, direction, &TraceOptions::default())
}

pub fn trace_branch_with(
    seed: &Shape,
    masses: &MassTriple,
    family: Family,
    direction: f64,
    opts: &TraceOptions,
) -> Result<Branch> {
    let system = FamilySystem::new(family, *masses)?;
    let rules = rules_for(family, masses, opts.domain);
    let curve = trace_curve(&system, &rules, masses, seed, direction, opts)?;
    Ok(Branch::from_curve(family, *masses, curve))
}

/// Traces a family through `seed` in both directions.
pub fn trace_full_branch(seed: &Shape, masses: &MassTriple, family: Family, opts: &TraceOptions) -> Result<Branch> {
    let system = FamilySystem::new(family, *masses)?;
    let rules = rules_for(family, masses, opts.domain);
    let curve = trace_curve_full(&system, &rules, masses, seed, opts)?;
    Ok(Branch::from_curve(family, *masses, curve))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtlasOptions {
    pub trace: TraceOptions,
    /// Barycentric cells per side of the vertex slices.
    pub vertex_grid: usize,
    /// Cells per axis of the interior sign-change scan.
    pub scan_grid: usize,
    /// Branches closer than this in Hausdorff distance are identified.
    pub match_tol: f64,
    pub parallel: bool,
}

impl Default for AtlasOptions {
    fn default() -> Self {
        Self {
            trace: TraceOptions::default(),
            vertex_grid: 40,
            scan_grid: 24,
            match_tol: 1e-4,
            parallel: true,
        }
    }
}

/// Branches found for one mass triple, with the seeds that failed to trace.
#[derive(Debug, Clone)]
pub struct Atlas {
    pub masses: MassTriple,
    pub branches: Vec<Branch>,
    pub failures: Vec<(Family, Shape, Error)>,
    /// Number of seeds tried.
    pub seeds: usize,
}

/// Lagrange families present for the mass triple.
pub fn lagrange_families(masses: &MassTriple) -> Vec<Family> {
    if masses.all_equal() {
        vec![
            Family::LreEquilateral,
            Family::LreIsosceles { pair: (0, 1) },
            Family::LreIsosceles { pair: (1, 2) },
            Family::LreIsosceles { pair: (0, 2) },
        ]
    } else if let Some(pair) = masses.equal_pair() {
        vec![Family::LreIsosceles { pair }, Family::LreScalene { pair }]
    } else {
        vec![Family::LreGeneric]
    }
}

fn interior(x: &Vector3<f64>, opts: &TraceOptions) -> bool {
    let s = Shape::from_vector(x);
    seeds::physical(x, 0.0)
        && (0..3).all(|k| s.meridian_gap(k) > 0.0)
        && s.equator_gap() > 0.0
        && (0..4).all(|v| vertex_size(v, x) > opts.vertex_radius)
        && s.cube_margin() > opts.cube_margin
}

fn endpoint_seeds(family: Family, masses: &MassTriple, opts: &AtlasOptions) -> Result<Vec<Shape>> {
    let system = FamilySystem::new(family, *masses)?;
    let t = &opts.trace;
    let mut out = Vec::new();
    // With equal masses the small-size seed is equilateral and lies on no
    // isosceles branch.
    let zero_seeded = match family {
        Family::LreScalene { .. } | Family::EreMeridian(_) => false,
        Family::LreIsosceles { .. } => !masses.all_equal(),
        _ => true,
    };
    if zero_seeded {
        if let Ok(s) = seed_zero_lre(masses, t.vertex_radius) {
            out.push(s);
        }
    }
    for v in [ORIGIN, 0, 1, 2] {
        out.extend(vertex_slice_seeds(&system, v, t.vertex_radius, opts.vertex_grid, t));
    }
    match family {
        Family::EreMeridian(k) => out.extend(
            meridian_seeds(&system, masses, t)
                .into_iter()
                .filter(|&(_, plane, _)| plane == k)
                .map(|(s, _, _)| s),
        ),
        _ => {
            out.extend(meridian_seeds(&system, masses, t).into_iter().map(|(s, _, _)| s));
            out.extend(equator_seed(&system, masses, t));
        }
    }
    Ok(out)
}

fn scan_seeds(family: Family, masses: &MassTriple, opts: &AtlasOptions) -> Result<Vec<Shape>> {
    let system = FamilySystem::new(family, *masses)?;
    let t = &opts.trace;
    let keep = |x: &Vector3<f64>| interior(x, t);
    Ok(match family {
        Family::LreGeneric | Family::LreScalene { .. } => grid_seeds(&system, opts.scan_grid, keep, t),
        Family::LreIsosceles { pair: (i, j) } => {
            let k = 3 - i - j;
            let embed = |u: f64, v: f64| {
                let mut x = Vector3::zeros();
                x[i] = u;
                x[j] = u;
                x[k] = v;
                x
            };
            plane_grid_seeds(&system, 2 * opts.scan_grid, embed, keep, t)
        }
        Family::EreMeridian(k) => {
            let (i, j) = crate::shape_core::others(k);
            let embed = |u: f64, v: f64| {
                let mut x = Vector3::zeros();
                x[i] = u;
                x[j] = v;
                x[k] = u + v;
                x
            };
            let on_face = |x: &Vector3<f64>| {
                let s = Shape::from_vector(x);
                x[k] < std::f64::consts::PI
                    && (0..4).all(|v| vertex_size(v, x) > t.vertex_radius)
                    && s.cube_margin() > t.cube_margin
            };
            plane_grid_seeds(&system, 2 * opts.scan_grid, embed, on_face, t)
        }
        Family::LreEquilateral | Family::EreEquatorPoint => Vec::new(),
    })
}

fn collect(
    masses: &MassTriple,
    families: &[Family],
    opts: &AtlasOptions,
) -> Result<Atlas> {
    let mut atlas = Atlas {
        masses: *masses,
        branches: Vec::new(),
        failures: Vec::new(),
        seeds: 0,
    };
    let trace = |family: Family, seed: &Shape| trace_full_branch(seed, masses, family, &opts.trace);
    let admit = |atlas: &mut Atlas, family: Family, seed: Shape, r: Result<Branch>| match r {
        Ok(b) => {
            if atlas
                .branches
                .iter()
                .all(|o| o.family != b.family || o.hausdorff(&b) >= opts.match_tol)
            {
                atlas.branches.push(b);
            }
        }
        Err(e) => atlas.failures.push((family, seed, e)),
    };

    let mut ends = Vec::new();
    for &f in families {
        ends.extend(endpoint_seeds(f, masses, opts)?.into_iter().map(|s| (f, s)));
    }
    atlas.seeds += ends.len();
    let traced: Vec<Result<Branch>> = if opts.parallel {
        ends.par_iter().map(|(f, s)| trace(*f, s)).collect()
    } else {
        ends.iter().map(|(f, s)| trace(*f, s)).collect()
    };
    for ((f, s), r) in ends.into_iter().zip(traced) {
        admit(&mut atlas, f, s, r);
    }

    for &f in families {
        let mut pending = scan_seeds(f, masses, opts)?;
        atlas.seeds += pending.len();
        let off_branches = |atlas: &Atlas, s: &Shape| {
            atlas
                .branches
                .iter()
                .filter(|b| b.family == f)
                .all(|b| b.distance_to(s) > opts.match_tol)
        };
        pending.retain(|s| off_branches(&atlas, s));
        while let Some(seed) = pending.first().copied() {
            let r = trace(f, &seed);
            let failed = r.is_err();
            admit(&mut atlas, f, seed, r);
            if failed {
                pending.remove(0);
            } else {
                pending.retain(|s| off_branches(&atlas, s));
                // a seed that retraces onto a known branch would otherwise loop
                if pending.first() == Some(&seed) {
                    pending.remove(0);
                }
            }
        }
    }
    Ok(atlas)
}

/// All Lagrange branches for the masses, seeded from the vertex slices
/// (the zero-size family among them), the collinear-face bifurcation
/// points, the equator Euler point and an interior sign-change scan.
pub fn atlas(masses: &MassTriple, opts: &AtlasOptions) -> Result<Atlas> {
    collect(masses, &lagrange_families(masses), opts)
}

pub fn enumerate_branches(masses: &MassTriple) -> Result<Vec<Branch>> {
    Ok(atlas(masses, &AtlasOptions::default())?.branches)
}

/// Euler branches on the three collinear faces.
pub fn ere_atlas(masses: &MassTriple, opts: &AtlasOptions) -> Result<Atlas> {
    collect(masses, &[0, 1, 2].map(Family::EreMeridian), opts)
}

/// The equator Euler configuration as a one-point branch.
pub fn equator_point_branch(masses: &MassTriple) -> Option<Branch> {
    let shape = ere_equator(masses)?;
    Some(Branch {
        family: Family::EreEquatorPoint,
        masses: *masses,
        points: vec![BranchPoint {
            shape,
            arclength: 0.0,
            tangent: Vector3::zeros(),
            residual: 0.0,
        }],
        events: vec![Event {
            kind: EventKind::EquatorCoupling,
            location: shape,
            arclength: 0.0,
            value: 0.0,
        }],
        closed: false,
    })
}

/// Point of the isosceles plane where `j = 0` and the scalene direction
/// lies in the plane, with its mass ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriplePoint {
    pub point: IsoscelesPoint,
    pub nu: f64,
}

/// Components of the `j = 0` curve inside the region of positive mass
/// ratio, from a sign-change scan with `n` cells per axis.
pub fn j_curves(n: usize, opts: &TraceOptions) -> Vec<TracedCurve> {
    let system = JCurveSystem;
    let rules = j_curve_rules();
    let masses = MassTriple::equal();
    let embed = |u: f64, v: f64| Vector3::new(u, u, v);
    let keep = |x: &Vector3<f64>| {
        let (a, b) = crate::symmetric_families::alpha_beta(&IsoscelesPoint::new(x[0], x[2]));
        a * b > 0.0 && Shape::from_vector(x).cube_margin() > opts.cube_margin
    };
    let mut pending = plane_grid_seeds(&system, n, embed, keep, opts);
    let mut out: Vec<TracedCurve> = Vec::new();
    while let Some(seed) = pending.first().copied() {
        pending.remove(0);
        let Ok(c) = trace_curve_full(&system, &rules, &masses, &seed, opts) else {
            continue;
        };
        let verts: Vec<_> = c.points.iter().map(|p| p.shape.to_vector()).collect();
        pending.retain(|s| polyline_distance(&s.to_vector(), &verts) > 1e-4);
        out.push(c);
    }
    out
}

/// Triple points found on [`j_curves`], off the equilateral line (where
/// the transversality test vanishes at the equal-mass bifurcations).
pub fn triple_points(n: usize, opts: &TraceOptions) -> Vec<TriplePoint> {
    let mut out: Vec<TriplePoint> = Vec::new();
    for c in j_curves(n, opts) {
        for e in c.events.iter().filter(|e| e.kind == EventKind::TriplePoint) {
            let s = e.location;
            let p = IsoscelesPoint::new(0.5 * (s.sigma(0) + s.sigma(1)), s.sigma(2));
            if (p.sigma - p.sigma3).abs() < 1e-6 {
                continue;
            }
            let Ok(Some(nu)) = nu_for_isosceles(&p) else {
                continue;
            };
            if out
                .iter()
                .all(|q| (q.point.sigma - p.sigma).abs() + (q.point.sigma3 - p.sigma3).abs() > 1e-8)
            {
                out.push(TriplePoint { point: p, nu });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests;
