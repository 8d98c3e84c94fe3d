//! Lifting workspace data through the branched 8-fold cover `𝒞 → W`.
//!
//! A configuration is the center position plus a knee choice per leg. Over an
//! interior point each leg has two mirror knees (8 lifts); on a smooth boundary
//! arc one leg is straight or folded (4 lifts); at a corner two legs are (2).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{circle_circle_intersections, Point, EPS_GEO};
use crate::morse::{boundary_restriction_criticals, interior_critical_points, MorseConfig};
use crate::potentials::Potential;
use crate::workspace::{Side, Workspace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CspaceCensus {
    pub minima: usize,
    pub saddles: usize,
    pub maxima: usize,
    pub euler: i64,
    pub genus: i64,
}

/// Knee placements for a leg with foot `foot` and the center at `center`.
pub fn knee_positions(foot: Point, center: Point, thigh: f64, shin: f64) -> Result<Vec<Point>> {
    if !(thigh > 0.0 && shin > 0.0) {
        return Err(Error::InvalidSpec(format!("link lengths must be positive, got {thigh}, {shin}")));
    }
    let d = foot.distance(center);
    if d < (thigh - shin).abs() - EPS_GEO || d > thigh + shin + EPS_GEO || d < EPS_GEO {
        return Err(Error::Unreachable(center));
    }
    let knees = circle_circle_intersections(foot, thigh, center, shin)?;
    if knees.is_empty() {
        return Err(Error::Unreachable(center));
    }
    Ok(knees)
}

/// Number of configurations over a workspace point: the product of knee
/// counts over the three legs.
pub fn covering_degree(x: Point, w: &Workspace) -> Result<usize> {
    if !w.contains(x) {
        return Err(Error::NotInWorkspace(x));
    }
    let mut degree = 1;
    for an in w.annuli() {
        // Lengths are recovered from the annulus radii.
        let thigh = 0.5 * (an.outer + an.inner);
        let shin = 0.5 * (an.outer - an.inner);
        degree *= knee_positions(an.center, x, thigh, shin)?.len();
    }
    Ok(degree)
}

/// Workspace-level special points of a potential, as consumed by [`lift_census`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LiftInput {
    pub interior_minima: Vec<Point>,
    /// Every restriction-critical boundary point, whatever its classification.
    pub boundary_points: Vec<Point>,
    pub corners: Vec<Point>,
}

impl LiftInput {
    /// Collects the special points of `f` on `w`, insisting on the three-hole
    /// workspace with two special points per hole circle and one per outer arc.
    pub fn collect<P: Potential + ?Sized>(f: &P, w: &Workspace, cfg: &MorseConfig) -> Result<Self> {
        if w.betti() != (1, 3) {
            return Err(Error::UnsupportedTopology(format!(
                "expected a disc with three holes, got betti {:?}",
                w.betti()
            )));
        }
        let interior = interior_critical_points(f, w, cfg)?;
        if interior.iter().any(|c| c.index != Some(0)) {
            return Err(Error::UnsupportedTopology("interior critical point that is not a minimum".into()));
        }
        let bcs = boundary_restriction_criticals(f, w, cfg)?;
        let arcs = w.arcs();
        for (k, arc) in arcs.iter().enumerate() {
            let count = bcs.iter().filter(|b| b.arc == k).count();
            let expected = match (arc.constraint.side, arc.is_full()) {
                (Side::Inner, true) => 2,
                (Side::Outer, false) => 1,
                _ => {
                    return Err(Error::UnsupportedTopology(format!("unexpected boundary arc {:?}", arc.constraint)));
                }
            };
            if count != expected {
                return Err(Error::UnsupportedTopology(format!(
                    "arc {:?} carries {count} special points, expected {expected}",
                    arc.constraint
                )));
            }
        }
        let input = LiftInput {
            interior_minima: interior.iter().map(|c| c.location).collect(),
            boundary_points: bcs.iter().map(|b| b.location).collect(),
            corners: w.corners().iter().map(|c| c.location).collect(),
        };
        if input.boundary_points.len() != 9 || input.corners.len() != 3 {
            return Err(Error::UnsupportedTopology(format!(
                "{} boundary special points and {} corners",
                input.boundary_points.len(),
                input.corners.len()
            )));
        }
        Ok(input)
    }
}

/// Counts critical points upstairs: each workspace special point contributes
/// as many critical points as it has lifts. Interior minima lift to minima,
/// boundary special points to saddles and corners to maxima.
pub fn lift_census(input: &LiftInput, w: &Workspace) -> Result<CspaceCensus> {
    let lifts = |pts: &[Point]| -> Result<usize> { pts.iter().map(|&p| covering_degree(p, w)).sum() };
    let minima = lifts(&input.interior_minima)?;
    let saddles = lifts(&input.boundary_points)?;
    let maxima = lifts(&input.corners)?;
    let euler = minima as i64 - saddles as i64 + maxima as i64;
    if euler % 2 != 0 {
        return Err(Error::UnsupportedTopology(format!("odd Euler characteristic {euler}")));
    }
    Ok(CspaceCensus { minima, saddles, maxima, euler, genus: (2 - euler) / 2 })
}
