//! Stationary charges, the trapping domain and Coulomb equilibria.
//!
//! For a point `X` the stationary charges are the (projectively unique) charges
//! at the feet that make `X` an equilibrium. The gradient condition
//! `Σ q_i (X − v_i)/d_i³ = 0` says that `q_i/d_i³` are barycentric weights of
//! `X`, so `q_i ∝ d_i³ λ_i`.
//!
//! With those charges the Hessian at `X` is a positive multiple of `3M − I`
//! where `M = Σ λ_i u_i u_iᵀ` (unit vectors `u_i` towards `X`). Its trace is
//! always 1, so `X` is a trapped minimum exactly when the determinant is
//! positive. Expanding `det M` with sub-triangle areas gives
//! `2𝒜² det(3M − I) = 9 (Π sin α_i)(Σ d_i² 𝒜_i) − 4𝒜²`, see
//! [`trapping_discriminant`].

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{barycentric, subtriangle_data, BBox, Point, Triangle, EPS_GEO};
use crate::morse::{stationary_points, MorseConfig, DEGENERACY_TOL};
use crate::potentials::{coulomb_gradient, coulomb_hessian, coulomb_value, ChargeTriple, Coulomb};
use crate::workspace::{build_workspace, SpiderSpec, Workspace};

/// Normalized (`Σ|q_i| = 1`) charges making `x` an equilibrium.
pub fn stationary_charges(x: Point, tri: &Triangle) -> Result<ChargeTriple> {
    let s = subtriangle_data(x, tri)?;
    if s.areas.iter().any(|&a| a < EPS_GEO) {
        return Err(Error::ZeroCharge(x));
    }
    let lambda = barycentric(x, tri);
    let q: [f64; 3] = std::array::from_fn(|i| s.d[i].powi(3) * lambda[i]);
    Ok(ChargeTriple::new(q)?.normalized())
}

/// The closed-form trapping scalar `−2𝒜 + 9 (Π sin α_i)(Σ d_i² 𝒜_i)`.
///
/// This expression is not scale invariant; it reproduces the sign of the
/// stationary-charge Hessian only for triangles of area 1/2. See
/// [`trapping_discriminant`] for the scale-consistent form.
pub fn trapping_hessian(x: Point, tri: &Triangle) -> Result<f64> {
    let (prod_sin, weighted) = trapping_terms(x, tri)?;
    Ok(-2.0 * tri.area() + 9.0 * prod_sin * weighted)
}

/// `9 (Π sin α_i)(Σ d_i² 𝒜_i) − 4𝒜²`: positive exactly where the
/// stationary-charge Hessian is positive definite.
pub fn trapping_discriminant(x: Point, tri: &Triangle) -> Result<f64> {
    let (prod_sin, weighted) = trapping_terms(x, tri)?;
    let area = tri.area();
    Ok(9.0 * prod_sin * weighted - 4.0 * area * area)
}

fn trapping_terms(x: Point, tri: &Triangle) -> Result<(f64, f64)> {
    let s = subtriangle_data(x, tri)?;
    let prod_sin: f64 = s.angles.iter().map(|a| a.sin()).product();
    let weighted: f64 = (0..3).map(|i| s.d[i] * s.d[i] * s.areas[i]).sum();
    Ok((prod_sin, weighted))
}

/// Numeric trapping test: `x` strictly inside the triangle and the Hessian of
/// `E(·, Q(x))` positive definite at `x`.
pub fn is_trapped(x: Point, tri: &Triangle) -> bool {
    if !tri.contains_strictly(x, 0.0) {
        return false;
    }
    stationary_charges(x, tri)
        .and_then(|q| coulomb_hessian(x, tri, &q))
        .map(|h| h.is_positive_definite())
        .unwrap_or(false)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RegionDef {
    /// The trapping domain `T(△)`.
    Trapping { triangle: Triangle },
    /// `D(S) = W(S) ∩ T(△)`; `workspace` is `None` when `W(S)` is empty.
    Robust { triangle: Triangle, workspace: Option<Workspace> },
}

/// A region given by a membership predicate, with a grid sample of it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Region {
    pub def: RegionDef,
    /// Sampled box and grid spacing.
    pub bbox: BBox,
    pub resolution: f64,
    /// Grid cell centers satisfying the predicate, row-major from the bottom.
    pub sample: Vec<Point>,
}

impl Region {
    fn sampled(def: RegionDef, bbox: BBox, n: usize) -> Region {
        let n = n.max(1);
        let step = bbox.width().max(bbox.height()) / n as f64;
        let nx = (bbox.width() / step).round().max(1.0) as usize;
        let ny = (bbox.height() / step).round().max(1.0) as usize;
        let mut r = Region { def, bbox, resolution: step, sample: Vec::new() };
        for j in 0..ny {
            for i in 0..nx {
                let p = Point::new(bbox.min.x + (i as f64 + 0.5) * step, bbox.min.y + (j as f64 + 0.5) * step);
                if r.contains(p) {
                    r.sample.push(p);
                }
            }
        }
        r
    }

    pub fn contains(&self, x: Point) -> bool {
        match &self.def {
            RegionDef::Trapping { triangle } => is_trapped(x, triangle),
            RegionDef::Robust { triangle, workspace } => {
                workspace.as_ref().is_some_and(|w| w.contains(x)) && is_trapped(x, triangle)
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        self.sample.is_empty()
    }
}

/// `T(△)` sampled on an `n × n` grid over the triangle's bounding box.
pub fn trapping_domain(tri: &Triangle, n: usize) -> Region {
    Region::sampled(RegionDef::Trapping { triangle: *tri }, tri.bbox(), n)
}

/// `D(S) = W(S) ∩ T(△)`. An empty workspace gives an empty region.
pub fn robust_domain(spec: &SpiderSpec, n: usize) -> Region {
    let workspace = build_workspace(spec).ok();
    Region::sampled(RegionDef::Robust { triangle: spec.feet, workspace }, spec.feet.bbox(), n)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Equilibrium {
    pub location: Point,
    pub index: u8,
    pub residual: f64,
    pub value: f64,
}

/// Default search window: the triangle's bounding box scaled by 3 about its center.
pub fn default_window(tri: &Triangle) -> BBox {
    let b = tri.bbox();
    let c = b.center();
    let half = Point::new(1.5 * b.width(), 1.5 * b.height());
    BBox { min: c - half, max: c + half }
}

/// All equilibria of the charges inside `window`, seeded on an `n × n` grid
/// over a slightly larger box and Newton-polished. Sorted by location.
pub fn equilibria(tri: &Triangle, q: &ChargeTriple, window: BBox, n: usize) -> Result<Vec<Equilibrium>> {
    let f = Coulomb { tri: *tri, charges: *q };
    let cfg = MorseConfig { grid_n: n, ..MorseConfig::default() };
    let feet = tri.vertices();
    let keep = |x: Point| window.contains(x) && feet.iter().all(|v| v.distance(x) > 1e-6);
    // Seeding over a padded box catches zeros that sit right at the window edge.
    let padded = window.expanded(0.05 * window.width().max(window.height()));
    let zeros = stationary_points(&f, padded.min, padded.max, n.max(3), keep, &cfg)?;
    zeros
        .into_iter()
        .map(|x| {
            let h = coulomb_hessian(x, tri, q)?;
            let det = h.det();
            if det.abs() < DEGENERACY_TOL {
                return Err(Error::NonMorsePoint { location: x, det });
            }
            Ok(Equilibrium {
                location: x,
                index: h.negative_count(),
                residual: coulomb_gradient(x, tri, q)?.norm(),
                value: coulomb_value(x, tri, q)?,
            })
        })
        .collect()
}
