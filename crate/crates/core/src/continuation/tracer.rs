//! Predictor-corrector tracing of a curve `F = 0` with event localization.

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::shape_core::{MassTriple, Shape};

use super::probe::Rule;
use super::system::DefiningSystem;
use super::{BranchPoint, Event, EventKind, TraceOptions};

/// Polyline with events produced by [`trace_curve`].
#[derive(Debug, Clone, PartialEq)]
pub struct TracedCurve {
    pub points: Vec<BranchPoint>,
    pub events: Vec<Event>,
    pub closed: bool,
    pub termination: EventKind,
}

/// Unit tangent `n1 x n2` from the normalized rows of the Jacobian, or
/// `None` when the rows are parallel to within `tol`.
pub fn tangent<S: DefiningSystem + ?Sized>(
    system: &S,
    x: &Vector3<f64>,
    tol: f64,
) -> Result<Option<Vector3<f64>>> {
    let (_, j) = system.eval(x)?;
    let a: Vector3<f64> = j.row(0).transpose();
    let b: Vector3<f64> = j.row(1).transpose();
    let (na, nb) = (a.norm(), b.norm());
    if na == 0.0 || nb == 0.0 {
        return Ok(None);
    }
    let c = (a / na).cross(&(b / nb));
    let n = c.norm();
    Ok((n >= tol).then(|| c / n))
}

/// Newton iteration on `F = 0` together with the linear constraint
/// `normal . (y - anchor) = offset`.
pub fn correct<S: DefiningSystem + ?Sized>(
    system: &S,
    start: &Vector3<f64>,
    normal: &Vector3<f64>,
    anchor: &Vector3<f64>,
    offset: f64,
    opts: &TraceOptions,
) -> Result<(Vector3<f64>, usize)> {
    let mut y = *start;
    for it in 1..=opts.max_corrector_iterations {
        let (f, j) = system.eval(&y)?;
        let a = Matrix3::from_rows(&[j.row(0).into_owned(), j.row(1).into_owned(), normal.transpose()]);
        let rhs = Vector3::new(f[0], f[1], normal.dot(&(y - anchor)) - offset);
        let delta = a
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::NewtonDivergence("singular corrector matrix".into()))?;
        y -= delta;
        let step = delta.norm();
        if !step.is_finite() || step > 1.0 {
            return Err(Error::NewtonDivergence(format!("corrector step {step:.3e}")));
        }
        if converged(system, &y, step, opts)? {
            return Ok((y, it));
        }
    }
    Err(Error::NewtonDivergence(format!(
        "corrector did not converge in {} iterations",
        opts.max_corrector_iterations
    )))
}

// Either the Newton step reached round-off, or the residual did while an
// ill-conditioned Jacobian keeps the steps at a slightly larger floor.
fn converged<S: DefiningSystem + ?Sized>(
    system: &S,
    y: &Vector3<f64>,
    step: f64,
    opts: &TraceOptions,
) -> Result<bool> {
    let scale = 1.0 + y.norm();
    if step > ROUNDOFF_STEP * scale {
        return Ok(false);
    }
    let r = system.residual(y)?;
    Ok(r < opts.residual_tol && (step <= opts.corrector_tol * scale || r < 1e-3 * opts.residual_tol))
}

/// Largest Newton step accepted at convergence when the residual is at round-off.
const ROUNDOFF_STEP: f64 = 1e-9;

/// Newton on `F = 0` plus one scalar event function `e = 0`.
fn polish_event<S: DefiningSystem + ?Sized>(
    system: &S,
    rule: &Rule,
    masses: &MassTriple,
    start: &Vector3<f64>,
    opts: &TraceOptions,
) -> Result<Vector3<f64>> {
    let mut y = *start;
    for _ in 0..opts.max_corrector_iterations {
        let (f, j) = system.eval(&y)?;
        let e = rule.probe.value(&y, masses, opts)?;
        let ge = rule.probe.gradient(&y, masses, opts)?;
        let a = Matrix3::from_rows(&[j.row(0).into_owned(), j.row(1).into_owned(), ge.transpose()]);
        let delta = a
            .lu()
            .solve(&Vector3::new(f[0], f[1], e))
            .ok_or_else(|| Error::NewtonDivergence("singular event system".into()))?;
        y -= delta;
        if !delta.norm().is_finite() || delta.norm() > 1e-3 {
            break;
        }
        if delta.norm() <= ROUNDOFF_STEP * (1.0 + y.norm())
            && rule.probe.value(&y, masses, opts)?.abs() <= opts.active_tol * ge.norm()
            && converged(system, &y, delta.norm(), opts)?
        {
            return Ok(y);
        }
    }
    Err(Error::NewtonDivergence("event polish".into()))
}

/// Minimum-norm Newton projection of `x` onto `F = 0`.
pub fn project<S: DefiningSystem + ?Sized>(
    system: &S,
    x: &Vector3<f64>,
    opts: &TraceOptions,
) -> Result<Vector3<f64>> {
    let mut y = *x;
    for _ in 0..4 * opts.max_corrector_iterations {
        let (f, j) = system.eval(&y)?;
        let jjt = j * j.transpose();
        let w = jjt
            .try_inverse()
            .ok_or_else(|| Error::NewtonDivergence("rank-deficient Jacobian".into()))?
            * f;
        let delta = j.transpose() * w;
        y -= delta;
        let step = delta.norm();
        if !step.is_finite() || step > 1.0 {
            return Err(Error::NewtonDivergence(format!("projection step {step:.3e}")));
        }
        if converged(system, &y, step, opts)? {
            return Ok(y);
        }
    }
    Err(Error::NewtonDivergence("projection did not converge".into()))
}

struct Crossing {
    tau: f64,
    at: Vector3<f64>,
    rule: Rule,
}

struct Tracer<'a, S: DefiningSystem + ?Sized> {
    system: &'a S,
    rules: &'a [Rule],
    masses: MassTriple,
    opts: &'a TraceOptions,
}

impl<S: DefiningSystem + ?Sized> Tracer<'_, S> {
    fn values(&self, x: &Vector3<f64>) -> Result<Vec<f64>> {
        self.rules
            .iter()
            .map(|r| Ok(r.probe.value(x, &self.masses, self.opts).unwrap_or(f64::NAN)))
            .collect()
    }

    // Within `active_tol` of the event surface, measured by `|v| / |grad v|`.
    fn near_zero(&self, r: &Rule, x: &Vector3<f64>, v: f64) -> bool {
        if !v.is_finite() {
            return false;
        }
        match r.probe.gradient(x, &self.masses, self.opts) {
            Ok(g) => v.abs() <= self.opts.active_tol * g.norm(),
            Err(_) => false,
        }
    }

    fn point(&self, x: Vector3<f64>, t: Vector3<f64>, arclength: f64) -> Result<BranchPoint> {
        Ok(BranchPoint {
            shape: Shape::from_vector(&x),
            arclength,
            tangent: t,
            residual: self.system.residual(&x)?,
        })
    }

    fn oriented_tangent(&self, x: &Vector3<f64>, reference: &Vector3<f64>) -> Result<Option<Vector3<f64>>> {
        Ok(tangent(self.system, x, self.opts.degenerate_tol)?
            .map(|t| if t.dot(reference) < 0.0 { -t } else { t }))
    }

    // Bisection on the chord parameter, each chord point projected back to
    // the curve across the chord.
    fn locate(&self, rule: &Rule, x: &Vector3<f64>, y: &Vector3<f64>, a: f64) -> Result<Crossing> {
        let chord = y - x;
        let len = chord.norm();
        let dir = chord / len;
        let on_curve = |tau: f64| -> Result<Vector3<f64>> {
            if tau == 0.0 {
                return Ok(*x);
            }
            if tau == 1.0 {
                return Ok(*y);
            }
            let p = x + chord * tau;
            Ok(correct(self.system, &p, &dir, &p, 0.0, self.opts)?.0)
        };
        let (mut lo, mut hi) = (0.0, 1.0);
        let (mut z_lo, mut z_hi) = (*x, *y);
        let sa = a.signum();
        while (hi - lo) * len > self.opts.event_tol {
            let mid = 0.5 * (lo + hi);
            let z = on_curve(mid)?;
            let v = rule.probe.value(&z, &self.masses, self.opts)?;
            if v.signum() == sa && v != 0.0 {
                (lo, z_lo) = (mid, z);
            } else {
                (hi, z_hi) = (mid, z);
            }
        }
        let guess = 0.5 * (z_lo + z_hi);
        let at = match polish_event(self.system, rule, &self.masses, &guess, self.opts) {
            Ok(p) if (p - guess).norm() < 1e-6 => p,
            _ => guess,
        };
        Ok(Crossing {
            tau: 0.5 * (lo + hi),
            at,
            rule: *rule,
        })
    }

    fn event(&self, rule: &Rule, at: &Vector3<f64>, arclength: f64) -> Result<Event> {
        let value = match rule.kind {
            EventKind::MeridianPlaneCrossing(k) => super::probe::h_on_plane(k, at),
            _ => rule.probe.value(at, &self.masses, self.opts)?,
        };
        Ok(Event {
            kind: rule.kind,
            location: Shape::from_vector(at),
            arclength,
            value,
        })
    }

    fn run(&self, seed: &Vector3<f64>, direction: f64) -> Result<TracedCurve> {
        let opts = self.opts;
        let x0 = project(self.system, seed, opts)
            .map_err(|e| Error::SeedInvalid(format!("seed {} does not converge: {e}", Shape::from_vector(seed))))?;
        let Some(t0) = tangent(self.system, &x0, opts.degenerate_tol)? else {
            return Err(Error::SeedInvalid(format!(
                "degenerate tangent at seed {}",
                Shape::from_vector(&x0)
            )));
        };
        let t0 = t0 * direction.signum();
        let mut points = vec![self.point(x0, t0, 0.0)?];
        let mut events = Vec::new();
        let mut vals = self.values(&x0)?;

        for (r, &v) in self.rules.iter().zip(&vals) {
            if r.terminal && v < 0.0 && !self.near_zero(r, &x0, v) {
                return Err(Error::SeedInvalid(format!(
                    "seed {} lies outside the traced domain",
                    Shape::from_vector(&x0)
                )));
            }
        }
        for (r, &v) in self.rules.iter().zip(&vals) {
            if !self.near_zero(r, &x0, v) {
                continue;
            }
            let g = r.probe.gradient(&x0, &self.masses, opts)?;
            let rate = g.dot(&t0);
            if r.terminal && rate < -opts.active_rate {
                events.push(self.event(r, &x0, 0.0)?);
                return Ok(TracedCurve {
                    points,
                    events,
                    closed: false,
                    termination: r.kind,
                });
            }
            if !r.terminal {
                events.push(self.event(r, &x0, 0.0)?);
            }
        }

        let (mut x, mut t) = (x0, t0);
        let mut h = opts.initial_step;
        let mut s = 0.0;
        let mut far = 0.0f64;
        loop {
            if points.len() >= opts.max_points {
                return Err(Error::NewtonDivergence(format!(
                    "trace did not terminate within {} points",
                    opts.max_points
                )));
            }
            let to_start = x0 - x;
            let landing = far > opts.loop_min_excursion
                && to_start.norm() <= h
                && t.dot(&to_start) > 0.0;
            let (pred, normal, offset) = if landing {
                (x0, t0, t0.dot(&(x0 - x)))
            } else {
                (x + t * h, t, h)
            };
            let attempt = correct(self.system, &pred, &normal, &x, offset, opts).and_then(|(y, it)| {
                let tn = self.oriented_tangent(&y, &t)?;
                Ok((y, it, tn))
            });
            let (y, iters, tn) = match attempt {
                Ok(v) => v,
                Err(e) => {
                    h *= opts.shrink;
                    if h < opts.min_step {
                        return Err(Error::NewtonDivergence(format!(
                            "step fell below {:.1e} at {}: {e}",
                            opts.min_step,
                            Shape::from_vector(&x)
                        )));
                    }
                    continue;
                }
            };
            let chord = (y - x).norm();
            let Some(tn) = tn else {
                s += chord;
                points.push(self.point(y, t, s)?);
                let rule_free = Event {
                    kind: EventKind::TangentDegenerate,
                    location: Shape::from_vector(&y),
                    arclength: s,
                    value: 0.0,
                };
                events.push(rule_free);
                return Ok(TracedCurve {
                    points,
                    events,
                    closed: false,
                    termination: EventKind::TangentDegenerate,
                });
            };
            let turned = tn.dot(&t) < opts.max_turn.cos() || chord > 2.0 * h.max(to_start.norm());
            if turned && h > opts.min_step {
                h = (h * opts.shrink).max(opts.min_step);
                continue;
            }

            let new_vals = self.values(&y)?;
            let mut crossings = Vec::new();
            for (r, (&a, &b)) in self.rules.iter().zip(vals.iter().zip(&new_vals)) {
                let hit = if r.terminal {
                    a > 0.0 && b <= 0.0
                } else {
                    (a * b < 0.0 || (b == 0.0 && a != 0.0)) && !self.near_zero(r, &x, a)
                };
                if hit {
                    match self.locate(r, &x, &y, a) {
                        Ok(c) => crossings.push((c, true)),
                        // Bisection can fail where the chord passes a
                        // singular shape; a terminal crossing still ends
                        // the trace, located on the chord.
                        Err(_) if r.terminal && b.is_finite() => {
                            let tau = a / (a - b);
                            let at = x + (y - x) * tau;
                            crossings.push((Crossing { tau, at, rule: *r }, false));
                        }
                        Err(_) => {}
                    }
                }
            }
            crossings.sort_by(|p, q| p.0.tau.total_cmp(&q.0.tau));
            for (c, on_curve) in crossings {
                let sc = s + (c.at - x).norm();
                events.push(self.event(&c.rule, &c.at, sc)?);
                if on_curve {
                    let tc = self.oriented_tangent(&c.at, &t)?.unwrap_or(t);
                    points.push(self.point(c.at, tc, sc)?);
                }
                if c.rule.terminal {
                    return Ok(TracedCurve {
                        points,
                        events,
                        closed: false,
                        termination: c.rule.kind,
                    });
                }
            }

            s += chord;
            if landing && (y - x0).norm() < opts.loop_tol && tn.dot(&t0) > opts.loop_alignment {
                points.push(self.point(x0, t0, s)?);
                events.push(Event {
                    kind: EventKind::LoopClosure,
                    location: Shape::from_vector(&x0),
                    arclength: s,
                    value: (y - x0).norm(),
                });
                return Ok(TracedCurve {
                    points,
                    events,
                    closed: true,
                    termination: EventKind::LoopClosure,
                });
            }
            points.push(self.point(y, tn, s)?);
            far = far.max((y - x0).norm());
            if iters <= opts.fast_iterations {
                h = (h * opts.grow).min(opts.max_step);
            }
            x = y;
            t = tn;
            vals = new_vals;
        }
    }
}

/// Traces `F = 0` from `seed` in the direction `direction * tangent`,
/// watching `rules`, until a terminal event, loop closure or a degenerate
/// tangent.
pub fn trace_curve<S: DefiningSystem + ?Sized>(
    system: &S,
    rules: &[Rule],
    masses: &MassTriple,
    seed: &Shape,
    direction: f64,
    opts: &TraceOptions,
) -> Result<TracedCurve> {
    Tracer {
        system,
        rules,
        masses: *masses,
        opts,
    }
    .run(&seed.to_vector(), direction)
}

/// Both directions from `seed`, joined into one polyline ordered along the
/// curve. Loops are traced once.
pub fn trace_curve_full<S: DefiningSystem + ?Sized>(
    system: &S,
    rules: &[Rule],
    masses: &MassTriple,
    seed: &Shape,
    opts: &TraceOptions,
) -> Result<TracedCurve> {
    let fwd = trace_curve(system, rules, masses, seed, 1.0, opts)?;
    if fwd.closed {
        return Ok(fwd);
    }
    let bwd = trace_curve(system, rules, masses, seed, -1.0, opts)?;
    let total = bwd.points.last().map_or(0.0, |p| p.arclength);
    let mut points: Vec<BranchPoint> = bwd
        .points
        .iter()
        .rev()
        .map(|p| BranchPoint {
            arclength: total - p.arclength,
            tangent: -p.tangent,
            ..*p
        })
        .collect();
    points.extend(fwd.points.iter().skip(1).map(|p| BranchPoint {
        arclength: total + p.arclength,
        ..*p
    }));
    let mut events: Vec<Event> = bwd
        .events
        .iter()
        .rev()
        .map(|e| Event {
            arclength: total - e.arclength,
            ..*e
        })
        .collect();
    for e in &fwd.events {
        let shifted = Event {
            arclength: total + e.arclength,
            ..*e
        };
        let dup = e.arclength == 0.0
            && events
                .iter()
                .any(|o| o.kind == e.kind && o.location.max_abs_diff(&e.location) < 1e-12);
        if !dup {
            events.push(shifted);
        }
    }
    Ok(TracedCurve {
        points,
        events,
        closed: false,
        termination: fwd.termination,
    })
}
