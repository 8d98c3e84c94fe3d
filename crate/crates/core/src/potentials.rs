//! Hooke, weighted Hooke and Coulomb potentials with closed-form derivatives.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{Point, Sym2, Triangle, Vec2, EPS_GEO};

/// A smooth scalar field on (part of) the plane.
pub trait Potential: Sync {
    fn value(&self, x: Point) -> Result<f64>;
    fn gradient(&self, x: Point) -> Result<Vec2>;
    fn hessian(&self, x: Point) -> Result<Sym2>;

    /// Center of the concentric circular level sets, for potentials of the
    /// form `k·|x − z|² + c`. Lets boundary analysis use closed forms.
    fn radial_center(&self) -> Option<Point> {
        None
    }

    fn label(&self) -> &'static str;
}

/// Positive Hooke weights `(α, β, γ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Weights {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl Weights {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        let w = [alpha, beta, gamma];
        if w.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidWeights(w));
        }
        Ok(Weights { alpha, beta, gamma })
    }

    pub fn unit() -> Self {
        Weights { alpha: 1.0, beta: 1.0, gamma: 1.0 }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.alpha, self.beta, self.gamma]
    }

    pub fn sum(self) -> f64 {
        self.alpha + self.beta + self.gamma
    }

    pub fn scaled(self, s: f64) -> Result<Self> {
        Weights::new(self.alpha * s, self.beta * s, self.gamma * s)
    }
}

/// Three non-zero charges placed at the feet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ChargeTriple([f64; 3]);

impl ChargeTriple {
    pub fn new(q: [f64; 3]) -> Result<Self> {
        if q.iter().any(|&v| v == 0.0 || !v.is_finite()) {
            return Err(Error::InvalidCharges(q));
        }
        Ok(ChargeTriple(q))
    }

    pub fn equal() -> Self {
        ChargeTriple([1.0 / 3.0; 3])
    }

    pub fn get(&self) -> [f64; 3] {
        self.0
    }

    /// Rescaled so that `|q1| + |q2| + |q3| = 1`, signs kept.
    pub fn normalized(&self) -> Self {
        let s: f64 = self.0.iter().map(|q| q.abs()).sum();
        ChargeTriple(self.0.map(|q| q / s))
    }
}

/// `H(x) = coefficient·|x − center|² + offset`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HookeForm {
    pub center: Point,
    pub offset: f64,
    pub coefficient: f64,
}

impl HookeForm {
    pub fn new(tri: &Triangle, w: Weights) -> Self {
        let coefficient = w.sum();
        let center = weighted_center(tri, w);
        let offset = tri.vertices().iter().zip(w.to_array()).map(|(v, wi)| wi * v.norm_sq()).sum::<f64>()
            - coefficient * center.norm_sq();
        HookeForm { center, offset, coefficient }
    }

    pub fn eval(&self, x: Point) -> f64 {
        self.coefficient * (x - self.center).norm_sq() + self.offset
    }
}

fn weighted_center(tri: &Triangle, w: Weights) -> Point {
    (tri.a * w.alpha + tri.b * w.beta + tri.c * w.gamma) / w.sum()
}

pub fn hooke_value(x: Point, tri: &Triangle) -> f64 {
    tri.vertices().iter().map(|v| (x - *v).norm_sq()).sum()
}

pub fn hooke_gradient(x: Point, tri: &Triangle) -> Vec2 {
    x * 6.0 - (tri.a + tri.b + tri.c) * 2.0
}

pub fn weighted_hooke(x: Point, tri: &Triangle, w: Weights) -> f64 {
    tri.vertices().iter().zip(w.to_array()).map(|(v, wi)| wi * (x - *v).norm_sq()).sum()
}

pub fn weighted_hooke_gradient(x: Point, tri: &Triangle, w: Weights) -> Vec2 {
    x * (2.0 * w.sum()) - (tri.a * w.alpha + tri.b * w.beta + tri.c * w.gamma) * 2.0
}

/// The unique minimum `(αa + βb + γc)/(α + β + γ)`.
pub fn weighted_minimum(tri: &Triangle, w: Weights) -> Point {
    weighted_center(tri, w)
}

fn check_pole(d: f64) -> Result<()> {
    if d < EPS_GEO {
        Err(Error::PoleAtFoot)
    } else {
        Ok(())
    }
}

pub fn coulomb_value(x: Point, tri: &Triangle, q: &ChargeTriple) -> Result<f64> {
    let mut e = 0.0;
    for (v, qi) in tri.vertices().iter().zip(q.get()) {
        let d = x.distance(*v);
        check_pole(d)?;
        e += qi / d;
    }
    Ok(e)
}

pub fn coulomb_gradient(x: Point, tri: &Triangle, q: &ChargeTriple) -> Result<Vec2> {
    coulomb_gradient_raw(x, tri, q.get())
}

fn coulomb_gradient_raw(x: Point, tri: &Triangle, q: [f64; 3]) -> Result<Vec2> {
    let mut g = Point::ORIGIN;
    for (v, qi) in tri.vertices().iter().zip(q) {
        let r = x - *v;
        let d = r.norm();
        check_pole(d)?;
        g += r * (-qi / (d * d * d));
    }
    Ok(g)
}

pub fn coulomb_hessian(x: Point, tri: &Triangle, q: &ChargeTriple) -> Result<Sym2> {
    let mut h = Sym2::default();
    for (v, qi) in tri.vertices().iter().zip(q.get()) {
        let r = x - *v;
        let d = r.norm();
        check_pole(d)?;
        let d3 = d * d * d;
        h = h + Sym2::outer(r, 3.0 * qi / (d3 * d * d)) + Sym2::scaled_identity(-qi / d3);
    }
    Ok(h)
}

/// `Σ |x − v_i|²`
#[derive(Debug, Clone, Copy)]
pub struct Hooke {
    pub tri: Triangle,
}

impl Potential for Hooke {
    fn value(&self, x: Point) -> Result<f64> {
        Ok(hooke_value(x, &self.tri))
    }
    fn gradient(&self, x: Point) -> Result<Vec2> {
        Ok(hooke_gradient(x, &self.tri))
    }
    fn hessian(&self, _x: Point) -> Result<Sym2> {
        Ok(Sym2::scaled_identity(6.0))
    }
    fn radial_center(&self) -> Option<Point> {
        Some(self.tri.centroid())
    }
    fn label(&self) -> &'static str {
        "hooke"
    }
}

/// `α|x − a|² + β|x − b|² + γ|x − c|²`
#[derive(Debug, Clone, Copy)]
pub struct WeightedHooke {
    pub tri: Triangle,
    pub weights: Weights,
}

impl Potential for WeightedHooke {
    fn value(&self, x: Point) -> Result<f64> {
        Ok(weighted_hooke(x, &self.tri, self.weights))
    }
    fn gradient(&self, x: Point) -> Result<Vec2> {
        Ok(weighted_hooke_gradient(x, &self.tri, self.weights))
    }
    fn hessian(&self, _x: Point) -> Result<Sym2> {
        Ok(Sym2::scaled_identity(2.0 * self.weights.sum()))
    }
    fn radial_center(&self) -> Option<Point> {
        Some(weighted_minimum(&self.tri, self.weights))
    }
    fn label(&self) -> &'static str {
        "weighted"
    }
}

/// `Σ q_i / d_i`
#[derive(Debug, Clone, Copy)]
pub struct Coulomb {
    pub tri: Triangle,
    pub charges: ChargeTriple,
}

impl Potential for Coulomb {
    fn value(&self, x: Point) -> Result<f64> {
        coulomb_value(x, &self.tri, &self.charges)
    }
    fn gradient(&self, x: Point) -> Result<Vec2> {
        coulomb_gradient(x, &self.tri, &self.charges)
    }
    fn hessian(&self, x: Point) -> Result<Sym2> {
        coulomb_hessian(x, &self.tri, &self.charges)
    }
    fn label(&self) -> &'static str {
        "coulomb"
    }
}

/// `−f`, for probing maxima with minimum-oriented machinery.
#[derive(Debug, Clone, Copy)]
pub struct Negated<P>(pub P);

impl<P: Potential> Potential for Negated<P> {
    fn value(&self, x: Point) -> Result<f64> {
        self.0.value(x).map(|v| -v)
    }
    fn gradient(&self, x: Point) -> Result<Vec2> {
        self.0.gradient(x).map(|g| -g)
    }
    fn hessian(&self, x: Point) -> Result<Sym2> {
        self.0.hessian(x).map(|h| h * -1.0)
    }
    fn radial_center(&self) -> Option<Point> {
        self.0.radial_center()
    }
    fn label(&self) -> &'static str {
        "negated"
    }
}
