//! Planar primitives: points, triangles, circles and their intersections.
//!
//! Everything here is a pure function of its inputs. Tangency and degeneracy
//! decisions share the single absolute tolerance [`EPS_GEO`]; fixtures are
//! O(1)-sized so an absolute tolerance is adequate.

use std::f64::consts::{PI, TAU};
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance (model units) for tangency and degeneracy decisions.
pub const EPS_GEO: f64 = 1e-9;

/// A point (or displacement vector) in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

/// Vectors and points share one representation.
pub type Vec2 = Point;

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    #[inline]
    pub fn from_polar(radius: f64, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Point::new(radius * c, radius * s)
    }

    #[inline]
    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3-D cross product.
    #[inline]
    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn distance(self, other: Point) -> f64 {
        (self - other).norm()
    }

    /// Counterclockwise quarter turn.
    #[inline]
    pub fn perp(self) -> Vec2 {
        Point::new(-self.y, self.x)
    }

    #[inline]
    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    /// Unit vector in the same direction; `None` for the zero vector.
    pub fn normalized(self) -> Option<Vec2> {
        let n = self.norm();
        (n > 0.0).then(|| self / n)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn lerp(self, other: Point, t: f64) -> Point {
        self + (other - self) * t
    }
}

impl From<[f64; 2]> for Point {
    fn from([x, y]: [f64; 2]) -> Self {
        Point::new(x, y)
    }
}

impl std::fmt::Display for Point {
    fn fmt(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

impl Add for Point {
    type Output = Point;
    #[inline]
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl AddAssign for Point {
    #[inline]
    fn add_assign(&mut self, rhs: Point) {
        self.x += rhs.x;
        self.y += rhs.y;
    }
}

impl Sub for Point {
    type Output = Point;
    #[inline]
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    #[inline]
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

impl Div<f64> for Point {
    type Output = Point;
    #[inline]
    fn div(self, s: f64) -> Point {
        Point::new(self.x / s, self.y / s)
    }
}

impl Neg for Point {
    type Output = Point;
    #[inline]
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

/// Symmetric 2×2 matrix, used for Hessians.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Sym2 {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

impl Sym2 {
    pub const fn new(xx: f64, xy: f64, yy: f64) -> Self {
        Sym2 { xx, xy, yy }
    }

    pub fn scaled_identity(s: f64) -> Self {
        Sym2::new(s, 0.0, s)
    }

    /// `s · v vᵀ`
    pub fn outer(v: Vec2, s: f64) -> Self {
        Sym2::new(s * v.x * v.x, s * v.x * v.y, s * v.y * v.y)
    }

    pub fn det(&self) -> f64 {
        self.xx * self.yy - self.xy * self.xy
    }

    pub fn trace(&self) -> f64 {
        self.xx + self.yy
    }

    pub fn apply(&self, v: Vec2) -> Vec2 {
        Point::new(self.xx * v.x + self.xy * v.y, self.xy * v.x + self.yy * v.y)
    }

    /// `vᵀ M v`
    pub fn quad(&self, v: Vec2) -> f64 {
        v.dot(self.apply(v))
    }

    /// Solves `M z = rhs`; `None` when singular.
    pub fn solve(&self, rhs: Vec2) -> Option<Vec2> {
        let det = self.det();
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        Some(Point::new((self.yy * rhs.x - self.xy * rhs.y) / det, (self.xx * rhs.y - self.xy * rhs.x) / det))
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let mean = 0.5 * self.trace();
        let r = (0.5 * (self.xx - self.yy)).hypot(self.xy);
        [mean - r, mean + r]
    }

    /// Number of negative eigenvalues (the Morse index).
    pub fn negative_count(&self) -> u8 {
        self.eigenvalues().iter().filter(|&&e| e < 0.0).count() as u8
    }

    pub fn is_positive_definite(&self) -> bool {
        self.det() > 0.0 && self.trace() > 0.0
    }
}

impl Add for Sym2 {
    type Output = Sym2;
    fn add(self, rhs: Sym2) -> Sym2 {
        Sym2::new(self.xx + rhs.xx, self.xy + rhs.xy, self.yy + rhs.yy)
    }
}

impl Mul<f64> for Sym2 {
    type Output = Sym2;
    fn mul(self, s: f64) -> Sym2 {
        Sym2::new(self.xx * s, self.xy * s, self.yy * s)
    }
}

/// One half of `(q − p) × (r − p)`; positive for counterclockwise order.
pub fn signed_area(p: Point, q: Point, r: Point) -> f64 {
    0.5 * (q - p).cross(r - p)
}

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BBox {
    pub min: Point,
    pub max: Point,
}

impl BBox {
    pub fn from_points(points: impl IntoIterator<Item = Point>) -> Option<BBox> {
        let mut it = points.into_iter();
        let first = it.next()?;
        let mut b = BBox { min: first, max: first };
        for p in it {
            b.include(p);
        }
        Some(b)
    }

    pub fn include(&mut self, p: Point) {
        self.min.x = self.min.x.min(p.x);
        self.min.y = self.min.y.min(p.y);
        self.max.x = self.max.x.max(p.x);
        self.max.y = self.max.y.max(p.y);
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn center(&self) -> Point {
        self.min.lerp(self.max, 0.5)
    }

    /// Square box with the same center, side `factor × max(width, height)`.
    pub fn squared(&self, factor: f64) -> BBox {
        let half = 0.5 * factor * self.width().max(self.height());
        let c = self.center();
        let d = Point::new(half, half);
        BBox { min: c - d, max: c + d }
    }

    pub fn expanded(&self, margin: f64) -> BBox {
        let d = Point::new(margin, margin);
        BBox { min: self.min - d, max: self.max + d }
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }
}

/// The reference triangle of feet `A`, `B`, `C`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Triangle {
    pub a: Point,
    pub b: Point,
    pub c: Point,
}

impl Triangle {
    pub fn new(a: Point, b: Point, c: Point) -> Result<Self> {
        let t = Triangle { a, b, c };
        if !(a.is_finite() && b.is_finite() && c.is_finite()) || t.signed_area().abs() < EPS_GEO {
            return Err(Error::DegenerateTriangle);
        }
        Ok(t)
    }

    /// Regular triangle inscribed in the unit circle with `A = (1, 0)`; centroid
    /// and incenter at the origin.
    pub fn regular_unit() -> Self {
        let h = 3f64.sqrt() / 2.0;
        Triangle { a: Point::new(1.0, 0.0), b: Point::new(-0.5, h), c: Point::new(-0.5, -h) }
    }

    pub fn vertices(&self) -> [Point; 3] {
        [self.a, self.b, self.c]
    }

    pub fn signed_area(&self) -> f64 {
        signed_area(self.a, self.b, self.c)
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    pub fn centroid(&self) -> Point {
        (self.a + self.b + self.c) / 3.0
    }

    pub fn incenter(&self) -> Point {
        let la = self.b.distance(self.c);
        let lb = self.c.distance(self.a);
        let lc = self.a.distance(self.b);
        (self.a * la + self.b * lb + self.c * lc) / (la + lb + lc)
    }

    pub fn bbox(&self) -> BBox {
        BBox::from_points(self.vertices()).expect("three vertices")
    }

    /// True iff every barycentric weight exceeds `margin`.
    pub fn contains_strictly(&self, x: Point, margin: f64) -> bool {
        barycentric(x, self).iter().all(|&w| w > margin)
    }

    pub fn map(&self, f: impl Fn(Point) -> Point) -> Triangle {
        Triangle { a: f(self.a), b: f(self.b), c: f(self.c) }
    }
}

/// Distances, sub-triangle areas and angles seen from a point `X`.
///
/// Index `i` pairs with vertex `i`: `areas[0]` is the area of `BCX` and
/// `angles[0]` is the angle `BXC`, and so on cyclically.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SubtriangleData {
    pub d: [f64; 3],
    pub areas: [f64; 3],
    pub angles: [f64; 3],
}

pub fn subtriangle_data(x: Point, tri: &Triangle) -> Result<SubtriangleData> {
    let v = tri.vertices();
    let r = v.map(|p| p - x);
    let d = r.map(|ri| ri.norm());
    if d.iter().any(|&di| di < EPS_GEO) {
        return Err(Error::DegenerateAtFoot);
    }
    let mut areas = [0.0; 3];
    let mut angles = [0.0; 3];
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let cr = r[j].cross(r[k]);
        areas[i] = 0.5 * cr.abs();
        angles[i] = cr.abs().atan2(r[j].dot(r[k]));
    }
    Ok(SubtriangleData { d, areas, angles })
}

/// Barycentric weights of `x` (summing to one); negative outside the triangle.
pub fn barycentric(x: Point, tri: &Triangle) -> [f64; 3] {
    let total = tri.signed_area();
    let w1 = signed_area(x, tri.b, tri.c) / total;
    let w2 = signed_area(tri.a, x, tri.c) / total;
    [w1, w2, 1.0 - w1 - w2]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Circle {
    pub center: Point,
    pub radius: f64,
}

impl Circle {
    pub fn point_at(&self, angle: f64) -> Point {
        self.center + Point::from_polar(self.radius, angle)
    }

    pub fn angle_of(&self, p: Point) -> f64 {
        (p - self.center).angle()
    }
}

/// Intersections of two circles. Tangency (within [`EPS_GEO`]) yields one point.
pub fn circle_circle_intersections(c1: Point, r1: f64, c2: Point, r2: f64) -> Result<Vec<Point>> {
    let delta = c2 - c1;
    let d = delta.norm();
    if d < EPS_GEO {
        if (r1 - r2).abs() < EPS_GEO {
            return Err(Error::CoincidentCircles);
        }
        return Ok(Vec::new());
    }
    let u = delta / d;
    let outer_gap = d - (r1 + r2);
    let inner_gap = (r1 - r2).abs() - d;
    if outer_gap.abs() <= EPS_GEO || inner_gap.abs() <= EPS_GEO {
        // Tangent: the single contact point lies on the center line.
        let along = if outer_gap.abs() <= EPS_GEO || r1 >= r2 { r1 } else { -r1 };
        return Ok(vec![c1 + u * along]);
    }
    if outer_gap > 0.0 || inner_gap > 0.0 {
        return Ok(Vec::new());
    }
    let along = (d * d + r1 * r1 - r2 * r2) / (2.0 * d);
    let half_chord = (r1 * r1 - along * along).max(0.0).sqrt();
    let base = c1 + u * along;
    let n = u.perp();
    Ok(vec![base + n * half_chord, base - n * half_chord])
}

/// Intersections of the infinite line through `p`, `q` with a circle, ordered
/// by their parameter along `p → q`. Tangency yields one point.
pub fn line_circle_intersections(p: Point, q: Point, center: Point, r: f64) -> Vec<Point> {
    line_circle_parameters(p, q - p, center, r).into_iter().map(|t| p + (q - p) * t).collect()
}

/// Parameters `t` (ascending) with `|p + t·dir − center| = r`.
pub(crate) fn line_circle_parameters(p: Point, dir: Vec2, center: Point, r: f64) -> Vec<f64> {
    let dd = dir.norm_sq();
    if dd == 0.0 {
        return Vec::new();
    }
    let f = p - center;
    // Foot of the perpendicular from the center, then the half chord.
    let t0 = -f.dot(dir) / dd;
    let closest = f + dir * t0;
    let dist = closest.norm();
    if (dist - r).abs() <= EPS_GEO {
        return vec![t0];
    }
    if dist > r {
        return Vec::new();
    }
    let half = ((r - dist) * (r + dist)).sqrt() / dd.sqrt();
    vec![t0 - half, t0 + half]
}

/// Maps an angle into `[0, 2π)`.
pub fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Maps an angle into `(−π, π]`.
pub fn wrap_signed(a: f64) -> f64 {
    let w = wrap_angle(a);
    if w > PI {
        w - TAU
    } else {
        w
    }
}
