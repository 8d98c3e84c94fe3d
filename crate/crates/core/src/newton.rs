//! Root polishing shared by the critical-point finders.

use crate::geom::{Point, Vec2};
use crate::potentials::Potential;

/// Damped Newton on `∇f = 0`. Returns the best point and its gradient norm,
/// or `None` if the iteration left the potential's domain.
pub(crate) fn polish_stationary<P: Potential + ?Sized>(f: &P, start: Point, max_iter: usize) -> Option<(Point, f64)> {
    let mut x = start;
    let mut g = f.gradient(x).ok()?;
    let mut res = g.norm();
    for _ in 0..max_iter {
        if res == 0.0 {
            break;
        }
        let h = f.hessian(x).ok()?;
        let step: Vec2 = match h.solve(g) {
            Some(s) if s.is_finite() => s,
            _ => break,
        };
        // Halve until the residual does not grow.
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let cand = x - step * t;
            if let Ok(gc) = f.gradient(cand) {
                let rc = gc.norm();
                if rc < res || (rc == res && t == 1.0) {
                    let moved = (cand - x).norm();
                    x = cand;
                    g = gc;
                    res = rc;
                    accepted = moved > 0.0;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Some((x, res))
}

/// Safeguarded Newton for a scalar root bracketed by `[lo, hi]` (signs of
/// `g(lo)` and `g(hi)` differ). `dg` is the derivative.
pub(crate) fn bracketed_root(
    g: impl Fn(f64) -> Option<f64>,
    dg: impl Fn(f64) -> Option<f64>,
    mut lo: f64,
    mut hi: f64,
) -> Option<f64> {
    let mut g_lo = g(lo)?;
    if g_lo == 0.0 {
        return Some(lo);
    }
    let mut t = 0.5 * (lo + hi);
    for _ in 0..200 {
        let gt = g(t)?;
        if gt == 0.0 {
            return Some(t);
        }
        if (gt > 0.0) == (g_lo > 0.0) {
            lo = t;
            g_lo = gt;
        } else {
            hi = t;
        }
        if (hi - lo).abs() <= 1e-15 * (1.0 + t.abs()) {
            break;
        }
        let newton = dg(t).filter(|d| *d != 0.0).map(|d| t - gt / d);
        t = match newton {
            Some(n) if n > lo.min(hi) && n < lo.max(hi) => n,
            _ => 0.5 * (lo + hi),
        };
    }
    Some(t)
}
