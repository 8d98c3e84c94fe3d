//! Inverse control maps and gradient-flow trajectories.

use serde::Serialize;

use crate::charges::{is_trapped, stationary_charges};
use crate::error::{Error, Result};
use crate::geom::{
    barycentric, circle_circle_intersections, line_circle_parameters, Circle, Point, Triangle, Vec2, EPS_GEO,
};
use crate::potentials::{coulomb_gradient, weighted_hooke_gradient, ChargeTriple, Potential, Weights};
use crate::workspace::{build_workspace, ConstraintId, Side, SpiderSpec, Workspace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ControlMode {
    Hooke,
    Coulomb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Certificate {
    TargetIsUniqueMinimum,
    TargetIsTrappedMinimum,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ControlParameters {
    Weights(Weights),
    Charges(ChargeTriple),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ControlSolution {
    pub mode: ControlMode,
    pub parameters: ControlParameters,
    pub target: Point,
    pub certificate: Certificate,
    /// Gradient norm of the controlled potential at the target.
    pub residual: f64,
}

/// Hooke weights whose unique minimum is `target`: its barycentric
/// coordinates, normalized to sum 1.
pub fn hooke_weights_for(target: Point, tri: &Triangle) -> Result<ControlSolution> {
    let l = barycentric(target, tri);
    if l.iter().any(|&v| v <= 0.0) {
        return Err(Error::TargetOutsideTriangle(target));
    }
    let weights = Weights::new(l[0], l[1], l[2])?;
    Ok(ControlSolution {
        mode: ControlMode::Hooke,
        parameters: ControlParameters::Weights(weights),
        target,
        certificate: Certificate::TargetIsUniqueMinimum,
        residual: weighted_hooke_gradient(target, tri, weights).norm(),
    })
}

/// Stationary charges holding `target`, certified when `target ∈ W(S) ∩ T(△)`.
pub fn coulomb_charges_for(target: Point, spec: &SpiderSpec) -> Result<ControlSolution> {
    let w = build_workspace(spec)?;
    if !w.contains(target) {
        return Err(Error::Unreachable(target));
    }
    let charges = stationary_charges(target, &spec.feet)?;
    if !is_trapped(target, &spec.feet) {
        return Err(Error::NotTrappable(target));
    }
    Ok(ControlSolution {
        mode: ControlMode::Coulomb,
        parameters: ControlParameters::Charges(charges),
        target,
        certificate: Certificate::TargetIsTrappedMinimum,
        residual: coulomb_gradient(target, &spec.feet, &charges)?.norm(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "constraint")]
pub enum SegmentTag {
    Free,
    Sliding(ConstraintId),
}

/// A maximal run of steps with one tag; `start..=end` index `points`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Segment {
    pub tag: SegmentTag,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub points: Vec<Point>,
    /// Potential value at each point.
    pub values: Vec<f64>,
    pub segments: Vec<Segment>,
    pub terminal: Point,
    /// Index of the first point in the workspace; `0` unless the flow started outside.
    pub entry: Option<usize>,
    /// Whether the projected descent fell below the tolerance before `max_steps`.
    pub converged: bool,
}

impl Trajectory {
    pub fn tags(&self) -> Vec<SegmentTag> {
        self.segments.iter().map(|s| s.tag).collect()
    }

    fn push(&mut self, p: Point, value: f64, tag: SegmentTag) {
        let i = self.points.len();
        self.points.push(p);
        self.values.push(value);
        match self.segments.last_mut() {
            Some(s) if s.tag == tag => s.end = i,
            _ => self.segments.push(Segment { tag, start: i - 1, end: i }),
        }
        self.terminal = p;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowOptions {
    /// Largest time step; steps are halved on overshoot and regrow up to this.
    pub step: f64,
    pub max_steps: usize,
    /// Stop once the projected descent is this small.
    pub tol: f64,
}

impl Default for FlowOptions {
    fn default() -> Self {
        FlowOptions { step: 1e-3, max_steps: 1_000_000, tol: 1e-8 }
    }
}

const ACTIVE_TOL: f64 = 1e-10;
const MAX_TURN: f64 = 0.05;

enum Move {
    Free(Vec2),
    Slide(ConstraintId, f64),
    Stuck,
}

/// The constraint circles currently enforced. A constraint violated at the
/// start of a flow is enforced only once the trajectory satisfies it.
struct Constraints<'a> {
    w: &'a Workspace,
    relaxed: Vec<ConstraintId>,
}

impl Constraints<'_> {
    fn all(&self) -> impl Iterator<Item = (ConstraintId, Circle)> + '_ {
        (0..3)
            .flat_map(|foot| [Side::Outer, Side::Inner].map(|side| ConstraintId { foot, side }))
            .filter(|c| !self.relaxed.contains(c))
            .map(|c| (c, self.w.circle(c)))
            .filter(|(_, circle)| circle.radius > 0.0)
    }

    fn excess(c: ConstraintId, circle: &Circle, p: Point) -> f64 {
        let d = p.distance(circle.center);
        match c.side {
            Side::Outer => d - circle.radius,
            Side::Inner => circle.radius - d,
        }
    }

    fn contains(&self, p: Point) -> bool {
        self.all().all(|(c, circle)| Self::excess(c, &circle, p) <= EPS_GEO)
    }

    fn violated(&self, p: Point) -> Vec<ConstraintId> {
        self.all().filter(|(c, circle)| Self::excess(*c, circle, p) > 0.0).map(|(c, _)| c).collect()
    }

    fn active(&self, p: Point) -> Vec<ConstraintId> {
        self.all().filter(|(c, circle)| Self::excess(*c, circle, p).abs() <= ACTIVE_TOL).map(|(c, _)| c).collect()
    }

    /// Enforces relaxed constraints that `p` now satisfies.
    fn update(&mut self, p: Point) {
        let w = self.w;
        self.relaxed.retain(|&c| Self::excess(c, &w.circle(c), p) > 0.0);
    }
}

/// Projected explicit descent on `w` from `start`.
///
/// Free steps follow `−∇f`. A step that would leave `w` stops on the first
/// constraint circle it crosses; from there the point slides along that
/// circle by the tangential part of the descent until the descent points
/// into `w` again. Slides that run into another circle stop at the corner.
/// A start outside `w` is allowed: the constraints it violates are ignored
/// until the trajectory first satisfies them.
pub fn gradient_flow<P: Potential + ?Sized>(
    f: &P,
    start: Point,
    w: &Workspace,
    opts: &FlowOptions,
) -> Result<Trajectory> {
    if w.is_empty() {
        return Err(Error::EmptyWorkspace);
    }
    let mut cons = Constraints { w, relaxed: w.violated_constraints(start, EPS_GEO) };
    let mut x = start;
    let mut fx = f.value(x)?;
    let mut traj = Trajectory {
        points: vec![x],
        values: vec![fx],
        segments: Vec::new(),
        terminal: x,
        entry: cons.relaxed.is_empty().then_some(0),
        converged: false,
    };
    let mut dt = opts.step;
    let mut steps = 0;
    while steps < opts.max_steps {
        let d = -f.gradient(x)?;
        let mv = choose_move(&cons, x, d);
        let speed = match mv {
            Move::Free(v) => v.norm(),
            Move::Slide(_, s) => s.abs(),
            Move::Stuck => 0.0,
        };
        if speed <= opts.tol {
            traj.converged = true;
            break;
        }
        let mut accepted = false;
        while dt > 1e-300 {
            let (y, tag) = match mv {
                Move::Free(v) => (free_step(&cons, x, v * dt), SegmentTag::Free),
                Move::Slide(c, s) => (slide_step(&cons, c, x, s * dt), SegmentTag::Sliding(c)),
                Move::Stuck => unreachable!(),
            };
            let fy = f.value(y)?;
            if fy <= fx && y != x {
                x = y;
                fx = fy;
                traj.push(x, fx, tag);
                accepted = true;
                dt = (dt * 1.25).min(opts.step);
                break;
            }
            dt *= 0.5;
        }
        if !accepted {
            // No representable decrease left.
            traj.converged = true;
            break;
        }
        if !cons.relaxed.is_empty() {
            cons.update(x);
            if cons.relaxed.is_empty() {
                traj.entry = Some(traj.points.len() - 1);
            }
        }
        steps += 1;
    }
    if traj.converged {
        check_terminal(f, &cons, traj)
    } else {
        Ok(traj)
    }
}

fn choose_move(cons: &Constraints, x: Point, d: Vec2) -> Move {
    let active = cons.active(x);
    let outward = |c: ConstraintId| {
        let n = (x - cons.w.circle(c).center).normalized().unwrap_or(Point::ORIGIN);
        match c.side {
            Side::Outer => n,
            Side::Inner => -n,
        }
    };
    let pushing = active.iter().any(|&c| d.dot(outward(c)) > 0.0);
    if !pushing && (active.len() < 2 || probe(cons, x, d)) {
        return Move::Free(d);
    }
    // Slide along the circle that keeps the most of the descent.
    let mut best: Option<(ConstraintId, f64)> = None;
    for &c in &active {
        let tau = outward(c).perp();
        let s = d.dot(tau);
        if s == 0.0 || !probe(cons, x, tau * s) {
            continue;
        }
        if best.is_none_or(|(_, b)| s.abs() > b.abs()) {
            best = Some((c, s));
        }
    }
    match best {
        Some((c, s)) => Move::Slide(c, s),
        None => Move::Stuck,
    }
}

/// Whether a short step along `v` keeps the enforced constraints.
fn probe(cons: &Constraints, x: Point, v: Vec2) -> bool {
    v.normalized().is_some_and(|u| cons.contains(x + u * 1e-7))
}

fn free_step(cons: &Constraints, x: Point, v: Vec2) -> Point {
    let y = x + v;
    let mut first: Option<(f64, ConstraintId)> = None;
    for (c, circle) in cons.all() {
        for t in line_circle_parameters(x, v, circle.center, circle.radius) {
            if t <= 1e-12 || t >= 1.0 {
                continue;
            }
            // Radial speed at the crossing decides whether the segment enters violation.
            let radial = (x + v * t - circle.center).dot(v);
            let exits = match c.side {
                Side::Outer => radial > 0.0,
                Side::Inner => radial < 0.0,
            };
            if exits && first.is_none_or(|(t0, _)| t < t0) {
                first = Some((t, c));
            }
        }
    }
    match first {
        None if cons.contains(y) => y,
        None => x,
        Some((t, c)) => {
            let circle = cons.w.circle(c);
            let p = x + v * t;
            let p = circle.center + (p - circle.center) * (circle.radius / p.distance(circle.center));
            snap_to_corner(cons, c, p)
        }
    }
}

fn slide_step(cons: &Constraints, c: ConstraintId, x: Point, arclength: f64) -> Point {
    let circle = cons.w.circle(c);
    // `arclength` is measured along `outward.perp()`, which turns
    // counterclockwise about the center of an outer circle and clockwise
    // about the center of a hole.
    let along = if c.side == Side::Outer { 1.0 } else { -1.0 };
    let dphi = (arclength / circle.radius).clamp(-MAX_TURN, MAX_TURN) * along;
    let y = circle.point_at(circle.angle_of(x) + dphi);
    if cons.contains(y) {
        y
    } else {
        snap_to_corner(cons, c, y)
    }
}

/// Moves a point on circle `c` that breaks another constraint to the
/// nearest intersection of `c` with a broken circle.
fn snap_to_corner(cons: &Constraints, c: ConstraintId, p: Point) -> Point {
    let circle = cons.w.circle(c);
    let mut best: Option<Point> = None;
    for other in cons.violated(p) {
        if other == c {
            continue;
        }
        let oc = cons.w.circle(other);
        if let Ok(pts) = circle_circle_intersections(circle.center, circle.radius, oc.center, oc.radius) {
            for q in pts {
                if cons.contains(q) && best.is_none_or(|b| q.distance(p) < b.distance(p)) {
                    best = Some(q);
                }
            }
        }
    }
    best.unwrap_or(p)
}

fn check_terminal<P: Potential + ?Sized>(f: &P, cons: &Constraints, traj: Trajectory) -> Result<Trajectory> {
    let x = traj.terminal;
    let active = cons.active(x);
    let stalled = match active.as_slice() {
        [] => !f.hessian(x)?.is_positive_definite(),
        [c] => {
            let circle = cons.w.circle(*c);
            let e = (x - circle.center) / circle.radius;
            let t = e.perp();
            let r = circle.radius;
            let g = f.gradient(x)?;
            let second = r * r * f.hessian(x)?.quad(t) - r * g.dot(e);
            second <= 0.0
        }
        _ => false,
    };
    if stalled {
        Err(Error::StalledAtSaddle { location: x, trajectory: Box::new(traj) })
    } else {
        Ok(traj)
    }
}
