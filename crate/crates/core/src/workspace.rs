//! The workspace `W(S)`: the intersection of three closed annuli about the feet.
//!
//! The boundary is computed from the arrangement of the (up to six) constraint
//! circles: each circle is cut at its intersections with the others and every
//! piece whose midpoint satisfies the remaining constraints is kept. Pieces
//! are oriented with the region on their left (outer circles counterclockwise,
//! inner circles clockwise) and chained into closed boundary cycles.
//! Counterclockwise cycles bound components and clockwise ones bound holes,
//! which yields the Betti numbers directly.

use std::f64::consts::{FRAC_PI_2, TAU};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{circle_circle_intersections, wrap_angle, BBox, Circle, Point, Triangle, Vec2, EPS_GEO};

/// Names the leg by foot index, `A`, `B` or `C`.
pub fn leg_name(i: usize) -> char {
    ['A', 'B', 'C'][i]
}

/// A two-link leg: the thigh hangs from the foot, the shin meets the center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Leg {
    pub thigh: f64,
    pub shin: f64,
}

impl Leg {
    /// Smallest reachable foot-to-center distance (the folded arm).
    pub fn reach_min(&self) -> f64 {
        self.thigh - self.shin
    }

    /// Largest reachable foot-to-center distance (the straight arm).
    pub fn reach_max(&self) -> f64 {
        self.thigh + self.shin
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpiderSpec {
    pub feet: Triangle,
    pub legs: [Leg; 3],
}

impl SpiderSpec {
    pub fn new(feet: Triangle, legs: [Leg; 3]) -> Result<Self> {
        for (i, leg) in legs.iter().enumerate() {
            if !(leg.shin > 0.0 && leg.shin.is_finite() && leg.thigh.is_finite()) {
                return Err(Error::InvalidSpec(format!(
                    "leg {}: shin must be positive, got {}",
                    leg_name(i),
                    leg.shin
                )));
            }
            if leg.thigh <= leg.shin {
                return Err(Error::InvalidSpec(format!(
                    "leg {}: thigh ({}) must exceed shin ({})",
                    leg_name(i),
                    leg.thigh,
                    leg.shin
                )));
            }
        }
        Ok(SpiderSpec { feet, legs })
    }

    pub fn uniform(feet: Triangle, thigh: f64, shin: f64) -> Result<Self> {
        SpiderSpec::new(feet, [Leg { thigh, shin }; 3])
    }

    /// Regular unit triangle, thigh 1.1, shin 0.9: annuli `[0.2, 2.0]`, a
    /// disc with three holes.
    pub fn holed() -> Self {
        SpiderSpec::uniform(Triangle::regular_unit(), 1.1, 0.9).expect("valid fixture")
    }

    /// Regular unit triangle, thigh 0.9, shin 0.4: annuli `[0.5, 1.3]`, a
    /// contractible three-arc region around the centroid.
    pub fn contractible() -> Self {
        SpiderSpec::uniform(Triangle::regular_unit(), 0.9, 0.4).expect("valid fixture")
    }

    pub fn annuli(&self) -> [Annulus; 3] {
        let feet = self.feet.vertices();
        std::array::from_fn(|i| Annulus {
            center: feet[i],
            inner: self.legs[i].reach_min(),
            outer: self.legs[i].reach_max(),
        })
    }
}

/// Closed annulus `inner ≤ |x − center| ≤ outer`. `inner = 0` is a disc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Annulus {
    pub center: Point,
    pub inner: f64,
    pub outer: f64,
}

impl Annulus {
    pub fn contains(&self, x: Point, tol: f64) -> bool {
        let d = x.distance(self.center);
        d <= self.outer + tol && d >= self.inner - tol
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Side {
    Inner,
    Outer,
}

/// One of the constraint circles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ConstraintId {
    pub foot: usize,
    pub side: Side,
}

/// A boundary arc, oriented with the workspace on its left.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Arc {
    pub constraint: ConstraintId,
    pub circle: Circle,
    /// Angle of the start point about the circle center.
    pub start_angle: f64,
    /// Signed angular extent; positive is counterclockwise, `±2π` is a full circle.
    pub sweep: f64,
    pub start: Point,
    pub end: Point,
}

impl Arc {
    pub fn is_full(&self) -> bool {
        self.sweep.abs() >= TAU
    }

    /// Point at parameter `t ∈ [0, 1]`.
    pub fn point_at(&self, t: f64) -> Point {
        self.circle.point_at(self.start_angle + t * self.sweep)
    }

    pub fn midpoint(&self) -> Point {
        self.point_at(0.5)
    }

    pub fn length(&self) -> f64 {
        self.sweep.abs() * self.circle.radius
    }

    /// Unit tangent in the direction of travel at a point of the circle.
    pub fn tangent(&self, p: Point) -> Vec2 {
        let radial = (p - self.circle.center) / self.circle.radius;
        radial.perp() * self.sweep.signum()
    }

    /// Unit normal pointing out of the workspace at a point of the circle.
    pub fn outward_normal(&self, p: Point) -> Vec2 {
        outward_normal(self.constraint, self.circle.center, p)
    }

    /// Angular position of `angle` measured along the arc from its start.
    pub fn offset_of(&self, angle: f64) -> f64 {
        if self.sweep > 0.0 {
            wrap_angle(angle - self.start_angle)
        } else {
            wrap_angle(self.start_angle - angle)
        }
    }

    /// True iff the circle point at `angle` lies on the arc, at least `margin`
    /// radians away from both ends. Full circles contain every angle.
    pub fn contains_angle(&self, angle: f64, margin: f64) -> bool {
        if self.is_full() {
            return true;
        }
        let s = self.offset_of(angle);
        s > margin && s < self.sweep.abs() - margin
    }

    /// Signed area enclosed between the arc and its chord plus the chord's
    /// shoelace term; summing over a cycle gives the enclosed signed area.
    fn area_term(&self) -> f64 {
        let r = self.circle.radius;
        0.5 * self.start.cross(self.end) + 0.5 * r * r * (self.sweep - self.sweep.sin())
    }

    fn extend_bbox(&self, b: &mut BBox) {
        b.include(self.start);
        b.include(self.end);
        for k in 0..4 {
            let a = k as f64 * FRAC_PI_2;
            if self.contains_angle(a, 0.0) {
                b.include(self.circle.point_at(a));
            }
        }
    }
}

fn outward_normal(c: ConstraintId, center: Point, p: Point) -> Vec2 {
    let radial = (p - center).normalized().unwrap_or(Point::new(1.0, 0.0));
    match c.side {
        Side::Outer => radial,
        Side::Inner => -radial,
    }
}

/// A point where two boundary arcs meet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Corner {
    pub location: Point,
    pub incoming: usize,
    pub outgoing: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Orientation {
    Counterclockwise,
    Clockwise,
}

/// A closed boundary cycle: arcs in traversal order, and the corner at the
/// end of each arc (empty for a single full circle).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryComponent {
    pub arcs: Vec<usize>,
    pub corners: Vec<usize>,
    pub orientation: Orientation,
    pub signed_area: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Workspace {
    annuli: [Annulus; 3],
    arcs: Vec<Arc>,
    corners: Vec<Corner>,
    components: Vec<BoundaryComponent>,
    betti: (usize, usize),
}

/// Builds `W(S)`; an empty intersection is an error.
pub fn build_workspace(spec: &SpiderSpec) -> Result<Workspace> {
    let w = Workspace::from_annuli(spec.annuli())?;
    if w.is_empty() {
        return Err(Error::EmptyWorkspace);
    }
    Ok(w)
}

pub fn contains(w: &Workspace, x: Point) -> bool {
    w.contains(x)
}

pub fn topology(w: &Workspace) -> (usize, usize) {
    w.betti
}

pub fn boundary_arcs(w: &Workspace) -> Result<&[BoundaryComponent]> {
    if w.is_empty() {
        return Err(Error::EmptyWorkspace);
    }
    Ok(&w.components)
}

impl Workspace {
    /// Intersection of three annuli; may be empty. Annuli with `inner = 0`
    /// are plain discs.
    pub fn from_annuli(annuli: [Annulus; 3]) -> Result<Self> {
        let circles: Vec<(ConstraintId, Circle)> = annuli
            .iter()
            .enumerate()
            .flat_map(|(foot, an)| {
                let outer = (ConstraintId { foot, side: Side::Outer }, Circle { center: an.center, radius: an.outer });
                let inner = (an.inner > 0.0).then_some((
                    ConstraintId { foot, side: Side::Inner },
                    Circle { center: an.center, radius: an.inner },
                ));
                std::iter::once(outer).chain(inner)
            })
            .collect();

        // Cut points per circle; each pair is intersected once so both circles
        // share bit-identical corner coordinates.
        let mut cuts: Vec<Vec<Point>> = vec![Vec::new(); circles.len()];
        for i in 0..circles.len() {
            for j in i + 1..circles.len() {
                let (ci, cj) = (circles[i].1, circles[j].1);
                let d = ci.center.distance(cj.center);
                if d >= EPS_GEO
                    && ((d - (ci.radius + cj.radius)).abs() <= EPS_GEO
                        || (d - (ci.radius - cj.radius).abs()).abs() <= EPS_GEO)
                {
                    let contact = circle_circle_intersections(ci.center, ci.radius, cj.center, cj.radius)?;
                    return Err(Error::DegenerateTangency(contact[0]));
                }
                let pts = circle_circle_intersections(ci.center, ci.radius, cj.center, cj.radius)
                    .map_err(|_| Error::DegenerateTangency(ci.center))?;
                cuts[i].extend(&pts);
                cuts[j].extend(&pts);
            }
        }

        let satisfies = |p: Point| annuli.iter().all(|an| an.contains(p, EPS_GEO));

        let mut arcs = Vec::new();
        for (k, &(id, circle)) in circles.iter().enumerate() {
            let mut pts: Vec<(f64, Point)> = cuts[k].iter().map(|&p| (wrap_angle(circle.angle_of(p)), p)).collect();
            pts.sort_by(|a, b| a.0.total_cmp(&b.0));
            for w in pts.windows(2) {
                if w[0].1.distance(w[1].1) < 1e3 * EPS_GEO && satisfies(w[0].1) {
                    return Err(Error::DegenerateTangency(w[0].1));
                }
            }
            if pts.is_empty() {
                if satisfies(circle.point_at(0.0)) {
                    let sweep = if id.side == Side::Outer { TAU } else { -TAU };
                    let p = circle.point_at(0.0);
                    arcs.push(Arc { constraint: id, circle, start_angle: 0.0, sweep, start: p, end: p });
                }
                continue;
            }
            let m = pts.len();
            for i in 0..m {
                let (a0, p0) = pts[i];
                let (mut a1, p1) = pts[(i + 1) % m];
                if i + 1 == m {
                    a1 += TAU;
                }
                if !satisfies(circle.point_at(0.5 * (a0 + a1))) {
                    continue;
                }
                let arc = match id.side {
                    Side::Outer => Arc { constraint: id, circle, start_angle: a0, sweep: a1 - a0, start: p0, end: p1 },
                    Side::Inner => Arc { constraint: id, circle, start_angle: a1, sweep: a0 - a1, start: p1, end: p0 },
                };
                arcs.push(arc);
            }
        }

        // Link each arc end to the unique arc starting there.
        let mut next = vec![usize::MAX; arcs.len()];
        let mut corners = Vec::new();
        let mut corner_at_end = vec![usize::MAX; arcs.len()];
        for (i, arc) in arcs.iter().enumerate() {
            if arc.is_full() {
                next[i] = i;
                continue;
            }
            let matches: Vec<usize> = arcs
                .iter()
                .enumerate()
                .filter(|(j, b)| *j != i && !b.is_full() && b.start.distance(arc.end) <= 1e3 * EPS_GEO)
                .map(|(j, _)| j)
                .collect();
            if matches.len() != 1 {
                return Err(Error::DegenerateTangency(arc.end));
            }
            next[i] = matches[0];
            corner_at_end[i] = corners.len();
            corners.push(Corner { location: arc.end, incoming: i, outgoing: matches[0] });
        }

        let mut components = Vec::new();
        let mut seen = vec![false; arcs.len()];
        for s in 0..arcs.len() {
            if seen[s] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut i = s;
            while !seen[i] {
                seen[i] = true;
                cycle.push(i);
                i = next[i];
            }
            if i != s {
                return Err(Error::DegenerateTangency(arcs[i].start));
            }
            let signed_area: f64 = cycle.iter().map(|&a| arcs[a].area_term()).sum();
            let corners_of =
                cycle.iter().filter(|&&a| corner_at_end[a] != usize::MAX).map(|&a| corner_at_end[a]).collect();
            components.push(BoundaryComponent {
                arcs: cycle,
                corners: corners_of,
                orientation: if signed_area > 0.0 { Orientation::Counterclockwise } else { Orientation::Clockwise },
                signed_area,
            });
        }
        // Outer boundaries first, then by position, for stable output.
        components.sort_by(|a, b| {
            (a.orientation == Orientation::Clockwise)
                .cmp(&(b.orientation == Orientation::Clockwise))
                .then(arcs[a.arcs[0]].start.x.total_cmp(&arcs[b.arcs[0]].start.x))
                .then(arcs[a.arcs[0]].start.y.total_cmp(&arcs[b.arcs[0]].start.y))
        });
        let b0 = components.iter().filter(|c| c.orientation == Orientation::Counterclockwise).count();
        let b1 = components.len() - b0;

        Ok(Workspace { annuli, arcs, corners, components, betti: (b0, b1) })
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn annuli(&self) -> &[Annulus; 3] {
        &self.annuli
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn corners(&self) -> &[Corner] {
        &self.corners
    }

    pub fn components(&self) -> &[BoundaryComponent] {
        &self.components
    }

    pub fn betti(&self) -> (usize, usize) {
        self.betti
    }

    pub fn euler(&self) -> i64 {
        self.betti.0 as i64 - self.betti.1 as i64
    }

    /// Arcs lying on outer (reach-maximum) circles.
    pub fn outer_arcs(&self) -> impl Iterator<Item = (usize, &Arc)> {
        self.arcs.iter().enumerate().filter(|(_, a)| a.constraint.side == Side::Outer)
    }

    /// Inner circles that bound a hole entirely on their own.
    pub fn hole_circles(&self) -> impl Iterator<Item = (usize, &Arc)> {
        self.arcs.iter().enumerate().filter(|(_, a)| a.constraint.side == Side::Inner && a.is_full())
    }

    /// Closed membership: all three annulus constraints, with [`EPS_GEO`] slack.
    pub fn contains(&self, x: Point) -> bool {
        self.annuli.iter().all(|an| an.contains(x, EPS_GEO))
    }

    /// Membership at least `margin` away from every constraint circle.
    pub fn contains_interior(&self, x: Point, margin: f64) -> bool {
        self.annuli.iter().all(|an| an.contains(x, -margin))
    }

    pub fn area(&self) -> f64 {
        self.components.iter().map(|c| c.signed_area).sum()
    }

    pub fn bbox(&self) -> Option<BBox> {
        let first = self.arcs.first()?;
        let mut b = BBox { min: first.start, max: first.start };
        for a in &self.arcs {
            a.extend_bbox(&mut b);
        }
        Some(b)
    }

    pub fn circle(&self, c: ConstraintId) -> Circle {
        let an = &self.annuli[c.foot];
        Circle {
            center: an.center,
            radius: match c.side {
                Side::Inner => an.inner,
                Side::Outer => an.outer,
            },
        }
    }

    /// Constraint circles passing within `tol` of `x`.
    pub fn active_constraints(&self, x: Point, tol: f64) -> Vec<ConstraintId> {
        let mut out = Vec::new();
        for (foot, an) in self.annuli.iter().enumerate() {
            let d = x.distance(an.center);
            if (d - an.outer).abs() <= tol {
                out.push(ConstraintId { foot, side: Side::Outer });
            }
            if an.inner > 0.0 && (d - an.inner).abs() <= tol {
                out.push(ConstraintId { foot, side: Side::Inner });
            }
        }
        out
    }

    /// Constraints violated by more than `tol` at `x`.
    pub fn violated_constraints(&self, x: Point, tol: f64) -> Vec<ConstraintId> {
        let mut out = Vec::new();
        for (foot, an) in self.annuli.iter().enumerate() {
            let d = x.distance(an.center);
            if d > an.outer + tol {
                out.push(ConstraintId { foot, side: Side::Outer });
            }
            if an.inner > 0.0 && d < an.inner - tol {
                out.push(ConstraintId { foot, side: Side::Inner });
            }
        }
        out
    }

    pub fn outward_normal(&self, c: ConstraintId, x: Point) -> Vec2 {
        outward_normal(c, self.annuli[c.foot].center, x)
    }

    /// The arc containing `p` in its relative interior, if any.
    pub fn arc_through(&self, p: Point, tol: f64) -> Option<usize> {
        self.arcs.iter().position(|a| {
            (p.distance(a.circle.center) - a.circle.radius).abs() <= tol && a.contains_angle(a.circle.angle_of(p), 0.0)
        })
    }

    /// Total turning of all boundary cycles divided by `2π`: equals `b0 − b1`
    /// for a planar region (Gauss–Bonnet), independently of the orientation
    /// bookkeeping above.
    pub fn turning_number(&self) -> f64 {
        let mut total = 0.0;
        for c in &self.corners {
            let a_in = &self.arcs[c.incoming];
            let a_out = &self.arcs[c.outgoing];
            let t_in = a_in.tangent(c.location);
            let t_out = a_out.tangent(c.location);
            total += t_in.cross(t_out).atan2(t_in.dot(t_out));
        }
        for a in &self.arcs {
            total += a.sweep;
        }
        total / TAU
    }
}

/// Interior angle of the workspace at a corner, in `(0, 2π)`.
pub fn interior_angle(w: &Workspace, corner: &Corner) -> f64 {
    let v_in = w.arcs[corner.incoming].tangent(corner.location);
    let v_out = w.arcs[corner.outgoing].tangent(corner.location);
    wrap_angle((-v_in).angle() - v_out.angle())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn holed_fixture() {
        let w = build_workspace(&SpiderSpec::holed()).unwrap();
        assert_eq!(w.outer_arcs().count(), 3);
        assert_eq!(w.hole_circles().count(), 3);
        assert_eq!(w.corners().len(), 3);
        assert_eq!(topology(&w), (1, 3));
        let comps = boundary_arcs(&w).unwrap();
        assert_eq!(comps.len(), 4);
        assert_eq!(comps[0].orientation, Orientation::Counterclockwise);
        assert_eq!(comps[0].arcs.len(), 3);
        assert_eq!(comps[0].corners.len(), 3);
        for c in &comps[1..] {
            assert_eq!(c.orientation, Orientation::Clockwise);
            assert_eq!(c.arcs.len(), 1);
            assert!(c.corners.is_empty());
        }
    }

    #[test]
    fn contractible_fixture() {
        let w = build_workspace(&SpiderSpec::contractible()).unwrap();
        assert_eq!(w.outer_arcs().count(), 3);
        assert_eq!(w.hole_circles().count(), 0);
        assert_eq!(w.corners().len(), 3);
        assert_eq!(topology(&w), (1, 0));
        assert_eq!(boundary_arcs(&w).unwrap().len(), 1);
        // Closest approach of the region to a foot.
        let closest = w
            .arcs()
            .iter()
            .flat_map(|a| (0..=1000).map(move |k| a.point_at(k as f64 / 1000.0)))
            .map(|p| p.distance(Point::new(1.0, 0.0)))
            .fold(f64::INFINITY, f64::min);
        assert!((closest - 0.5305).abs() < 1e-3, "{closest}");
    }

    #[test]
    fn empty_workspace() {
        let spec = SpiderSpec::uniform(Triangle::regular_unit(), 0.3, 0.2).unwrap();
        assert_eq!(build_workspace(&spec), Err(Error::EmptyWorkspace));
        let w = Workspace::from_annuli(spec.annuli()).unwrap();
        assert_eq!(topology(&w), (0, 0));
        assert_eq!(boundary_arcs(&w), Err(Error::EmptyWorkspace));
    }

    #[test]
    fn single_disc() {
        let o = Point::ORIGIN;
        let an = [
            Annulus { center: o, inner: 0.0, outer: 0.5 },
            Annulus { center: Point::new(0.1, 0.0), inner: 0.0, outer: 3.0 },
            Annulus { center: Point::new(0.0, 0.1), inner: 0.0, outer: 3.0 },
        ];
        let w = Workspace::from_annuli(an).unwrap();
        let comps = boundary_arcs(&w).unwrap();
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].arcs.len(), 1);
        assert!(w.arcs()[comps[0].arcs[0]].is_full());
        assert!(w.corners().is_empty());
        assert!((w.area() - PI * 0.25).abs() < 1e-12);
    }

    #[test]
    fn membership_examples() {
        let w = build_workspace(&SpiderSpec::holed()).unwrap();
        assert!(contains(&w, Point::ORIGIN));
        assert!(!contains(&w, Point::new(0.9, 0.0)));
        assert!(contains(&w, Point::new(0.8, 0.0)));
    }

    #[test]
    fn leg_validation_names_leg() {
        let bad = [Leg { thigh: 1.0, shin: 0.5 }, Leg { thigh: 0.3, shin: 0.4 }, Leg { thigh: 1.0, shin: 0.5 }];
        let err = SpiderSpec::new(Triangle::regular_unit(), bad).unwrap_err();
        assert!(matches!(&err, Error::InvalidSpec(m) if m.contains("leg B")), "{err}");
    }

    #[test]
    fn tangency_is_reported() {
        // Outer circles of radius √3/2 about feet √3 apart touch.
        let h = 3f64.sqrt() / 2.0;
        let spec = SpiderSpec::uniform(Triangle::regular_unit(), h * 0.75, h * 0.25).unwrap();
        assert!(matches!(build_workspace(&spec), Err(Error::DegenerateTangency(_))));
    }

    #[test]
    fn turning_number_matches_betti() {
        for spec in [SpiderSpec::holed(), SpiderSpec::contractible()] {
            let w = build_workspace(&spec).unwrap();
            assert!((w.turning_number() - w.euler() as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn arcs_lie_in_workspace() {
        for spec in [SpiderSpec::holed(), SpiderSpec::contractible()] {
            let w = build_workspace(&spec).unwrap();
            for a in w.arcs() {
                for k in 0..=200 {
                    assert!(w.contains(a.point_at(k as f64 / 200.0)));
                }
            }
            for c in w.corners() {
                assert_eq!(w.active_constraints(c.location, 1e-9).len(), 2);
            }
        }
    }
}
