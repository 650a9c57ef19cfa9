use std::f64::consts::PI;
use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use rayon::prelude::*;
use sphere_re::continuation::{
    atlas, ere_atlas, j_curves, trace_branch_with, trace_full_branch, AtlasOptions, Branch, Domain, TraceOptions,
};
use sphere_re::embedding::{angular_momentum, embed_equator_ere, embed_meridian_ere, embed_with_tol, Hemisphere};
use sphere_re::inverse_mass::{
    h_curve_point, h_curve_sigma3_max, mass_ratios_for_shape, meridian_bifurcation_shapes_on, MassSolution,
};
use sphere_re::shape_core::{
    ere_meridian_d_unchecked, lambda_triple, region_membership_with, TOL_NEWTON, TOL_PLANE,
};
use sphere_re::symmetric_families::{nu_for_isosceles, IsoscelesPoint};
use sphere_re::verify::run_suite;
use sphere_re::{MassTriple, Region, Shape};

use crate::args::{Cli, Command, Direction, DomainArg, GlobalArgs, HemisphereArg, MassArgs, ScanKind};
use crate::output::{BranchFile, Cell, Table};
use crate::UsageError;

const NU_GRID: usize = 200;
const J_GRID: usize = 64;
const H_GRID: usize = 400;

/// How a successful run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Done,
    VerifyFailed,
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let g = &cli.global;
    match &cli.command {
        Command::Residual { shape, masses } => emit(g, &residual(g, &Shape::from(shape.shape), &masses_of(masses)?)?),
        Command::Solve { shape } => emit(g, &solve(&Shape::from(shape.shape))?),
        Command::Embed {
            shape,
            masses,
            hemisphere,
        } => emit(g, &embed(g, &Shape::from(shape.shape), &masses_of(masses)?, *hemisphere)?),
        Command::Trace {
            shape,
            masses,
            family,
            direction,
            domain,
        } => {
            let mut opts = trace_options(g);
            opts.domain = match domain {
                DomainArg::Physical => Domain::Physical,
                DomainArg::Cube => Domain::Cube,
            };
            let seed = Shape::from(shape.shape);
            let m = masses_of(masses)?;
            let b = match direction {
                Direction::Both => trace_full_branch(&seed, &m, *family, &opts)?,
                Direction::Forward => trace_branch_with(&seed, &m, *family, 1.0, &opts)?,
                Direction::Backward => trace_branch_with(&seed, &m, *family, -1.0, &opts)?,
            };
            eprintln!(
                "{}: {} points, {} events, length {:.6}",
                b.family,
                b.points.len(),
                b.events.len(),
                b.length()
            );
            write_out(g.out.as_deref(), &BranchFile::from_branch(&b).render(g.format))
        }
        Command::Atlas { masses, euler } => run_atlas(g, &masses_of(masses)?, *euler),
        Command::CountBifurcations { masses, plane } => {
            let m = masses_of(masses)?;
            let roots = meridian_bifurcation_shapes_on(*plane as usize - 1, &m)?;
            eprintln!("{} meridian bifurcation points", roots.len());
            let mut t = Table::new(&["sigma1", "sigma2", "sigma3", "multiplicity"]);
            for (s, mult) in roots {
                t.push(vec![s.sigma(0).into(), s.sigma(1).into(), s.sigma(2).into(), (mult as usize).into()]);
            }
            emit(g, &t)
        }
        Command::Scan { kind } => {
            let t = match kind {
                ScanKind::Nu => scan_nu(g.grid.map_or(NU_GRID, |n| n as usize)),
                ScanKind::J => scan_j(g),
                ScanKind::H => scan_h(g.grid.map_or(H_GRID, |n| n as usize))?,
            };
            emit(g, &t)
        }
        Command::Verify => {
            let checks = run_suite();
            let mut t = Table::new(&["id", "name", "status", "expected", "observed"]);
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            for c in &checks {
                writeln!(lock, "{c}")?;
                t.push(vec![
                    (c.id as usize).into(),
                    c.name.into(),
                    if c.pass { "PASS" } else { "FAIL" }.into(),
                    c.expected.as_str().into(),
                    c.observed.as_str().into(),
                ]);
            }
            drop(lock);
            if let Some(p) = &g.out {
                write_out(Some(p), &t.render(g.format))?;
            }
            return Ok(if checks.iter().all(|c| c.pass) {
                Outcome::Done
            } else {
                Outcome::VerifyFailed
            });
        }
    }?;
    Ok(Outcome::Done)
}

fn masses_of(a: &MassArgs) -> Result<MassTriple> {
    let m = match (a.masses, a.nu, a.dnu) {
        (Some([m1, m2, m3]), _, _) => MassTriple::new(m1, m2, m3),
        (None, Some(nu), Some(dnu)) => MassTriple::from_nu_dnu(nu, dnu),
        _ => return Err(UsageError("give --masses a,b,c or --nu X --dnu Y".into()).into()),
    };
    m.map_err(|e| UsageError(e.to_string()).into())
}

fn trace_options(g: &GlobalArgs) -> TraceOptions {
    let mut o = TraceOptions::default();
    if let Some(s) = g.max_step {
        o.max_step = s;
        o.initial_step = o.initial_step.min(s);
    }
    if let Some(t) = g.tol_newton {
        o.residual_tol = t;
    }
    o
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().lock().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn emit(g: &GlobalArgs, t: &Table) -> Result<()> {
    write_out(g.out.as_deref(), &t.render(g.format))
}

fn region_name(r: Region) -> String {
    match r {
        Region::Outside => "outside".into(),
        Region::InU => "u".into(),
        Region::InUPhys => "u-phys".into(),
        Region::OnMeridianPlane(k) => format!("meridian-{}", k + 1),
        Region::OnEquatorPlane => "equator".into(),
    }
}

fn residual(g: &GlobalArgs, s: &Shape, m: &MassTriple) -> Result<Table> {
    let l = lambda_triple(s, m)?;
    let k = (0..3)
        .min_by(|&a, &b| s.meridian_gap(a).abs().total_cmp(&s.meridian_gap(b).abs()))
        .expect("three planes");
    let d = ere_meridian_d_unchecked(k, s, m);
    let region = region_membership_with(s, g.tol_plane.unwrap_or(TOL_PLANE));
    let mut t = Table::new(&["lambda12", "lambda23", "lambda31", "d", "plane", "plane_gap", "region"]);
    t.push(vec![
        l.lambda12().into(),
        l.lambda23().into(),
        l.lambda31().into(),
        d.into(),
        (k + 1).into(),
        s.meridian_gap(k).into(),
        region_name(region).into(),
    ]);
    Ok(t)
}

fn solve(s: &Shape) -> Result<Table> {
    let sol = mass_ratios_for_shape(s)?;
    let (nu1, nu2) = sol.ratios().unzip();
    let row = match sol {
        MassSolution::OneParameterFamily { row, .. } => Some(row),
        _ => None,
    };
    let mut t = Table::new(&["kind", "nu1", "nu2", "det_s_tilde", "row1", "row2", "row3"]);
    t.push(vec![
        sol.kind_name().into(),
        nu1.into(),
        nu2.into(),
        sol.det_s_tilde().into(),
        row.map(|r| r[0]).into(),
        row.map(|r| r[1]).into(),
        row.map(|r| r[2]).into(),
    ]);
    Ok(t)
}

fn embed(g: &GlobalArgs, s: &Shape, m: &MassTriple, h: HemisphereArg) -> Result<Table> {
    let region = region_membership_with(s, g.tol_plane.unwrap_or(TOL_PLANE));
    let (kind, c) = match region {
        Region::OnEquatorPlane => ("equator-euler".to_string(), embed_equator_ere(s)?),
        Region::OnMeridianPlane(k) => (format!("meridian-euler-{}", k + 1), embed_meridian_ere(s, m, k)?),
        _ => {
            let hemi = match h {
                HemisphereArg::North => Hemisphere::North,
                HemisphereArg::South => Hemisphere::South,
            };
            let tol = g.tol_newton.unwrap_or(TOL_NEWTON);
            ("lagrange".to_string(), embed_with_tol(s, m, hemi, tol)?)
        }
    };
    let am = angular_momentum(&c, m);
    let mut t = Table::new(&[
        "kind", "theta1", "theta2", "theta3", "phi1", "phi2", "phi3", "omega", "cx", "cy", "cz",
    ]);
    t.push(vec![
        kind.into(),
        c.theta[0].into(),
        c.theta[1].into(),
        c.theta[2].into(),
        c.phi[0].into(),
        c.phi[1].into(),
        c.phi[2].into(),
        c.omega.into(),
        am.cx.into(),
        am.cy.into(),
        am.cz.into(),
    ]);
    Ok(t)
}

fn summary(branches: &[Branch]) -> Table {
    let mut t = Table::new(&[
        "branch", "family", "points", "events", "length", "closed", "max_residual", "first_event", "last_event",
    ]);
    for (n, b) in branches.iter().enumerate() {
        t.push(vec![
            (n + 1).into(),
            b.family.to_string().into(),
            b.points.len().into(),
            b.events.len().into(),
            b.length().into(),
            b.closed.into(),
            b.max_residual().into(),
            b.events.first().map(|e| e.kind.to_string()).into(),
            b.events.last().map(|e| e.kind.to_string()).into(),
        ]);
    }
    t
}

fn run_atlas(g: &GlobalArgs, m: &MassTriple, euler: bool) -> Result<()> {
    let mut opts = AtlasOptions {
        trace: trace_options(g),
        parallel: g.threads != Some(1),
        ..AtlasOptions::default()
    };
    if let Some(n) = g.grid {
        opts.scan_grid = n as usize;
    }
    let a = if euler { ere_atlas(m, &opts)? } else { atlas(m, &opts)? };
    for (f, s, e) in &a.failures {
        eprintln!("warning: seed {s} of {f} failed: {e}");
    }
    eprintln!("{} branches from {} seeds", a.branches.len(), a.seeds);
    let table = summary(&a.branches).render(g.format);
    match &g.out {
        None => write_out(None, &table),
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            let ext = g.format.extension();
            for (n, b) in a.branches.iter().enumerate() {
                let p = dir.join(format!("branch-{:02}.{ext}", n + 1));
                write_out(Some(&p), &BranchFile::from_branch(b).render(g.format))?;
            }
            write_out(Some(&dir.join(format!("summary.{ext}"))), &table)
        }
    }
}

/// Cell centres of `(0, pi)^2` on the plane `s1 = s2`, rows in `sigma3`.
fn scan_nu(n: usize) -> Table {
    let h = PI / n as f64;
    let rows: Vec<Vec<Vec<Cell>>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let s3 = (i as f64 + 0.5) * h;
            (0..n)
                .map(|j| {
                    let s = (j as f64 + 0.5) * h;
                    let p = IsoscelesPoint::new(s, s3);
                    let nu = nu_for_isosceles(&p).ok().flatten();
                    vec![s.into(), s3.into(), nu.into(), p.is_in_u_phys().into()]
                })
                .collect()
        })
        .collect();
    let mut t = Table::new(&["sigma", "sigma3", "nu", "in_u_phys"]);
    for r in rows.into_iter().flatten() {
        t.push(r);
    }
    t
}

fn scan_j(g: &GlobalArgs) -> Table {
    let opts = TraceOptions {
        domain: Domain::Cube,
        ..trace_options(g)
    };
    let curves = j_curves(g.grid.map_or(J_GRID, |n| n as usize), &opts);
    let mut t = Table::new(&["curve", "arclength", "sigma1", "sigma2", "sigma3", "event_flag"]);
    for (c, curve) in curves.iter().enumerate() {
        for p in &curve.points {
            let s = p.shape;
            t.push(vec![
                (c + 1).into(),
                p.arclength.into(),
                s.sigma(0).into(),
                s.sigma(1).into(),
                s.sigma(2).into(),
                Cell::Empty,
            ]);
        }
        for e in &curve.events {
            let s = e.location;
            t.push(vec![
                (c + 1).into(),
                e.arclength.into(),
                s.sigma(0).into(),
                s.sigma(1).into(),
                s.sigma(2).into(),
                e.kind.to_string().into(),
            ]);
        }
    }
    t
}

/// Both halves of the h curve, sampled at `n` values of `sigma3` in
/// `(pi/2, 2 sigma_E]`.
fn scan_h(n: usize) -> Result<Table> {
    let (lo, hi) = (0.5 * PI, h_curve_sigma3_max());
    let mut t = Table::new(&["side", "sigma1", "sigma2", "sigma3"]);
    for side in [-1.0, 1.0] {
        for i in 1..=n {
            let s3 = lo + (hi - lo) * i as f64 / n as f64;
            let p = h_curve_point(s3.min(hi), side)?;
            t.push(vec![Cell::Int(side as i64), p.sigma1.into(), p.sigma2.into(), p.sigma3().into()]);
        }
    }
    Ok(t)
}
