//! Critical points of a potential on a workspace with boundary and corners.
//!
//! Interior critical points are ordinary zeros of the gradient. On a smooth
//! boundary arc the candidates are the critical points of the restriction, and
//! whether one changes the topology of sublevel sets depends on the descent
//! direction `−∇f` there:
//!
//! | restriction | descent  | effect           |
//! |-------------|----------|------------------|
//! | minimum     | inward   | no change        |
//! | minimum     | outward  | minimum (0-cell) |
//! | maximum     | inward   | no change        |
//! | maximum     | outward  | saddle (1-cell)  |
//!
//! Corners are decided by where the descent direction sits relative to the
//! interior tangent cone (see [`classify_corner`]).

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{line_circle_intersections, wrap_angle, Circle, Point, EPS_GEO};
use crate::newton::{bracketed_root, polish_stationary};
use crate::potentials::Potential;
use crate::workspace::{Corner, Workspace};

/// Below this, a Hessian determinant or second derivative counts as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MorseConfig {
    /// Seeding grid is `grid_n × grid_n` over the workspace bounding box.
    pub grid_n: usize,
    /// Gradient residual accepted after Newton polishing.
    pub newton_tol: f64,
    /// Polished zeros closer than this are merged.
    pub dedup_radius: f64,
    /// Samples per arc for the general boundary scan.
    pub boundary_samples: usize,
}

impl Default for MorseConfig {
    fn default() -> Self {
        MorseConfig { grid_n: 256, newton_tol: 1e-12, dedup_radius: 1e-8, boundary_samples: 4096 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CriticalKind {
    Interior,
    Boundary,
    Corner,
}

/// Cell attached to the sublevel set when passing a critical value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Cell {
    #[serde(rename = "none")]
    None,
    #[serde(rename = "0-cell")]
    Zero,
    #[serde(rename = "1-cell")]
    One,
    #[serde(rename = "2-cell")]
    Two,
}

impl Cell {
    pub fn dimension(self) -> Option<u8> {
        match self {
            Cell::None => None,
            Cell::Zero => Some(0),
            Cell::One => Some(1),
            Cell::Two => Some(2),
        }
    }

    fn from_index(i: u8) -> Cell {
        match i {
            0 => Cell::Zero,
            1 => Cell::One,
            _ => Cell::Two,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalPoint {
    pub location: Point,
    pub kind: CriticalKind,
    /// Morse index; `None` for boundary points that change nothing.
    pub index: Option<u8>,
    pub value: f64,
    pub cell: Cell,
}

/// Whether a restriction-critical point is a minimum or maximum along its arc.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Extremum {
    Min,
    Max,
}

/// A critical point of the potential restricted to one boundary arc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryCritical {
    pub arc: usize,
    pub location: Point,
    pub restriction: Extremum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoundaryClass {
    NoChange,
    /// Local minimum on the workspace: a 0-cell.
    Minimum,
    /// A 1-cell.
    Saddle,
}

impl BoundaryClass {
    pub fn cell(self) -> Cell {
        match self {
            BoundaryClass::NoChange => Cell::None,
            BoundaryClass::Minimum => Cell::Zero,
            BoundaryClass::Saddle => Cell::One,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MorseCensus {
    /// Counts `(μ0, μ1, μ2)` of topologically relevant critical points.
    pub mu: [usize; 3],
    pub euler: i64,
    pub critical_points: Vec<CriticalPoint>,
}

impl MorseCensus {
    fn from_points(critical_points: Vec<CriticalPoint>) -> Self {
        let mut mu = [0usize; 3];
        for c in &critical_points {
            if let Some(d) = c.cell.dimension() {
                mu[d as usize] += 1;
            }
        }
        let euler = mu[0] as i64 - mu[1] as i64 + mu[2] as i64;
        MorseCensus { mu, euler, critical_points }
    }
}

/// Zeros of the gradient strictly inside the workspace, sorted by location.
pub fn interior_critical_points<P: Potential + ?Sized>(
    f: &P,
    w: &Workspace,
    cfg: &MorseConfig,
) -> Result<Vec<CriticalPoint>> {
    let Some(bbox) = w.bbox() else { return Ok(Vec::new()) };
    let n = cfg.grid_n.max(3);
    let pad = 2.0 * bbox.width().max(bbox.height()) / n as f64;
    let bbox = bbox.expanded(pad);
    let zeros = stationary_points(f, bbox.min, bbox.max, n, |x| w.contains_interior(x, EPS_GEO), cfg)?;
    zeros
        .into_iter()
        .map(|x| {
            let h = f.hessian(x)?;
            let det = h.det();
            if det.abs() < DEGENERACY_TOL {
                return Err(Error::NonMorsePoint { location: x, det });
            }
            let index = h.negative_count();
            Ok(CriticalPoint {
                location: x,
                kind: CriticalKind::Interior,
                index: Some(index),
                value: f.value(x)?,
                cell: Cell::from_index(index),
            })
        })
        .collect()
}

/// Grid-seeded, Newton-polished gradient zeros in a box, filtered by `keep`.
///
/// Seeds are the grid nodes where `|∇f|²` is no larger than at any of the
/// eight neighbours. Results are deduplicated and sorted lexicographically.
pub(crate) fn stationary_points<P: Potential + ?Sized>(
    f: &P,
    lo: Point,
    hi: Point,
    n: usize,
    keep: impl Fn(Point) -> bool + Sync,
    cfg: &MorseConfig,
) -> Result<Vec<Point>> {
    let node = |i: usize, j: usize| {
        Point::new(lo.x + (hi.x - lo.x) * i as f64 / (n - 1) as f64, lo.y + (hi.y - lo.y) * j as f64 / (n - 1) as f64)
    };
    let r2: Vec<f64> = (0..n * n)
        .into_par_iter()
        .map(|k| f.gradient(node(k % n, k / n)).map(|g| g.norm_sq()).unwrap_or(f64::INFINITY))
        .collect();
    let seeds: Vec<Point> = (1..n - 1)
        .flat_map(|j| (1..n - 1).map(move |i| (i, j)))
        .filter(|&(i, j)| {
            let v = r2[j * n + i];
            v.is_finite()
                && (-1i64..=1)
                    .flat_map(|dj| (-1i64..=1).map(move |di| (di, dj)))
                    .filter(|&d| d != (0, 0))
                    .all(|(di, dj)| v <= r2[(j as i64 + dj) as usize * n + (i as i64 + di) as usize])
        })
        .map(|(i, j)| node(i, j))
        .collect();

    let mut found: Vec<Point> = seeds
        .par_iter()
        .filter_map(|&s| {
            let (x, res) = polish_stationary(f, s, 100)?;
            let h = f.hessian(x).ok()?;
            let scale = 1.0 + (h.xx.abs() + h.yy.abs() + 2.0 * h.xy.abs()) * (1.0 + x.norm());
            (res <= cfg.newton_tol * scale && x.x >= lo.x && x.x <= hi.x && x.y >= lo.y && x.y <= hi.y && keep(x))
                .then_some(x)
        })
        .collect();
    found.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    let mut unique: Vec<Point> = Vec::new();
    for p in found {
        if unique.iter().all(|u| u.distance(p) > cfg.dedup_radius) {
            unique.push(p);
        }
    }
    Ok(unique)
}

/// Derivatives of `θ ↦ f(center + r·e(θ))`.
fn restriction_derivatives<P: Potential + ?Sized>(f: &P, circle: &Circle, theta: f64) -> Result<(f64, f64)> {
    let e = Point::from_polar(1.0, theta);
    let t = e.perp();
    let x = circle.center + e * circle.radius;
    let g = f.gradient(x)?;
    let h = f.hessian(x)?;
    let r = circle.radius;
    Ok((r * g.dot(t), r * r * h.quad(t) - r * g.dot(e)))
}

fn restriction_type<P: Potential + ?Sized>(f: &P, circle: &Circle, p: Point) -> Result<Extremum> {
    let (_, second) = restriction_derivatives(f, circle, circle.angle_of(p))?;
    if second.abs() < DEGENERACY_TOL {
        let det = second;
        return Err(Error::NonMorsePoint { location: p, det });
    }
    Ok(if second > 0.0 { Extremum::Min } else { Extremum::Max })
}

/// Critical points of the potential restricted to each boundary arc (corners
/// excluded). Radial potentials use the closed form: the line through the
/// arc's center and the potential's center meets the circle at the two
/// restriction extrema. Other potentials fall back to [`scan_boundary_criticals`].
pub fn boundary_restriction_criticals<P: Potential + ?Sized>(
    f: &P,
    w: &Workspace,
    cfg: &MorseConfig,
) -> Result<Vec<BoundaryCritical>> {
    let Some(z) = f.radial_center() else {
        return scan_boundary_criticals(f, w, cfg.boundary_samples);
    };
    let mut out = Vec::new();
    for (k, arc) in w.arcs().iter().enumerate() {
        let c = arc.circle;
        if z.distance(c.center) < EPS_GEO {
            // Every point of the circle is critical.
            return Err(Error::NonMorsePoint { location: c.center, det: 0.0 });
        }
        let margin = EPS_GEO / c.radius;
        for p in line_circle_intersections(c.center, z, c.center, c.radius) {
            if arc.contains_angle(c.angle_of(p), margin) {
                out.push(BoundaryCritical { arc: k, location: p, restriction: restriction_type(f, &c, p)? });
            }
        }
    }
    Ok(out)
}

/// Restriction-critical points found by sampling the tangential derivative
/// along every arc and refining each sign change.
pub fn scan_boundary_criticals<P: Potential + ?Sized>(
    f: &P,
    w: &Workspace,
    samples: usize,
) -> Result<Vec<BoundaryCritical>> {
    let samples = samples.max(8);
    let mut out = Vec::new();
    for (k, arc) in w.arcs().iter().enumerate() {
        let c = arc.circle;
        // Work in increasing θ from the arc's counterclockwise-most start.
        let (theta0, span) =
            if arc.sweep > 0.0 { (arc.start_angle, arc.sweep) } else { (arc.start_angle + arc.sweep, -arc.sweep) };
        let d1 = |th: f64| restriction_derivatives(f, &c, th).ok().map(|d| d.0);
        let d2 = |th: f64| restriction_derivatives(f, &c, th).ok().map(|d| d.1);
        let thetas: Vec<f64> = (0..=samples).map(|i| theta0 + span * i as f64 / samples as f64).collect();
        let vals: Vec<Option<f64>> = thetas.iter().map(|&t| d1(t)).collect();
        let margin = EPS_GEO / c.radius;
        let mut roots: Vec<f64> = Vec::new();
        for i in 0..samples {
            let (Some(a), Some(b)) = (vals[i], vals[i + 1]) else { continue };
            if a == 0.0 || (a > 0.0) != (b > 0.0) {
                if let Some(r) = bracketed_root(d1, d2, thetas[i], thetas[i + 1]) {
                    let s = r - theta0;
                    let interior = arc.is_full() || (s > margin && s < span - margin);
                    if interior && roots.iter().all(|&q| (wrap_angle(q - r)).min(wrap_angle(r - q)) > 1e-9) {
                        roots.push(r);
                    }
                }
            }
        }
        for r in roots {
            let p = c.point_at(r);
            out.push(BoundaryCritical { arc: k, location: p, restriction: restriction_type(f, &c, p)? });
        }
    }
    Ok(out)
}

/// Applies the boundary table to one restriction-critical point. "Inward" and
/// "outward" refer to the descent direction `−∇f`.
pub fn classify_boundary_critical<P: Potential + ?Sized>(
    f: &P,
    bc: &BoundaryCritical,
    w: &Workspace,
) -> Result<BoundaryClass> {
    let g = f.gradient(bc.location)?;
    let n = w.arcs()[bc.arc].outward_normal(bc.location);
    let descent_out = -g.dot(n);
    if descent_out.abs() < DEGENERACY_TOL {
        return Err(Error::TangentGradient(bc.location));
    }
    Ok(match (bc.restriction, descent_out > 0.0) {
        (Extremum::Min, false) => BoundaryClass::NoChange,
        (Extremum::Min, true) => BoundaryClass::Minimum,
        (Extremum::Max, false) => BoundaryClass::NoChange,
        (Extremum::Max, true) => BoundaryClass::Saddle,
    })
}

/// Corner rule. With rays `u1`, `u2` leaving the corner along the two
/// incident arcs, the interior tangent cone is swept counterclockwise from
/// `u1` to `u2`.
///
/// * descent strictly inside the cone: no change;
/// * otherwise count the rays along which `f` decreases:
///   0 is a local minimum (0-cell); 1 slides along an arc (no change);
///   2 splits the local sublevel set in two when the cone is reflex (saddle,
///   1-cell) and is a boundary local maximum when the cone is convex (no change).
pub fn classify_corner<P: Potential + ?Sized>(f: &P, corner: &Corner, w: &Workspace) -> Result<BoundaryClass> {
    let p = corner.location;
    let g = f.gradient(p)?;
    let arcs = w.arcs();
    let u1 = arcs[corner.outgoing].tangent(p);
    let u2 = -arcs[corner.incoming].tangent(p);
    let cone = wrap_angle(u2.angle() - u1.angle());
    let d = -g;
    if d.norm() < DEGENERACY_TOL {
        return Err(Error::TangentGradient(p));
    }
    let rel = wrap_angle(d.angle() - u1.angle());
    let tol = 1e-12;
    if rel.min(2.0 * PI - rel) < tol || (rel - cone).abs() < tol {
        return Err(Error::TangentGradient(p));
    }
    if rel < cone {
        return Ok(BoundaryClass::NoChange);
    }
    let slopes = [g.dot(u1), g.dot(u2)];
    if slopes.iter().any(|s| s.abs() < DEGENERACY_TOL) {
        return Err(Error::TangentGradient(p));
    }
    let decreasing = slopes.iter().filter(|&&s| s < 0.0).count();
    Ok(match (decreasing, cone < PI) {
        (0, _) => BoundaryClass::Minimum,
        (2, false) => BoundaryClass::Saddle,
        _ => BoundaryClass::NoChange,
    })
}

/// Full census: interior critical points plus every boundary and corner
/// candidate (the latter with `cell = none` when they change nothing).
pub fn census<P: Potential + ?Sized>(f: &P, w: &Workspace, cfg: &MorseConfig) -> Result<MorseCensus> {
    let mut points = interior_critical_points(f, w, cfg)?;
    for bc in boundary_restriction_criticals(f, w, cfg)? {
        let class = classify_boundary_critical(f, &bc, w)?;
        points.push(CriticalPoint {
            location: bc.location,
            kind: CriticalKind::Boundary,
            index: class.cell().dimension(),
            value: f.value(bc.location)?,
            cell: class.cell(),
        });
    }
    for corner in w.corners() {
        let class = classify_corner(f, corner, w)?;
        points.push(CriticalPoint {
            location: corner.location,
            kind: CriticalKind::Corner,
            index: class.cell().dimension(),
            value: f.value(corner.location)?,
            cell: class.cell(),
        });
    }
    Ok(MorseCensus::from_points(points))
}
