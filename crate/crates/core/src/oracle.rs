//! Brute-force checks: finite differences and a grid-filtration census.
//!
//! The census rasterizes the region and sweeps the sublevel sets of the
//! potential twice. The forward sweep unions region pixels in increasing
//! order with 4-connectivity, so component births are minima and merges are
//! saddles. The backward sweep grows the complement (8-connectivity) from the
//! pixels outside the region in decreasing order: new complement components
//! are maxima and complement merges are saddles that close a loop. Components
//! of the initial complement never die, so a merge of two of them always
//! counts. Other pairs count only when their persistence exceeds the local
//! oscillation of the sampled values at the death pixel, measured over all
//! eight neighbours so that thin parts of the region get the same threshold.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{BBox, Point, Sym2, Vec2};
use crate::potentials::Potential;
use crate::workspace::Workspace;

/// Central-difference gradient. Any failed or non-finite evaluation on the
/// stencil is reported as [`Error::StencilOutOfDomain`].
pub fn fd_gradient(f: impl Fn(Point) -> Result<f64>, x: Point, h: f64) -> Result<Vec2> {
    let e = |p: Point| match f(p) {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::StencilOutOfDomain(x)),
    };
    let dx = Point::new(h, 0.0);
    let dy = Point::new(0.0, h);
    e(x)?;
    Ok(Point::new((e(x + dx)? - e(x - dx)?) / (2.0 * h), (e(x + dy)? - e(x - dy)?) / (2.0 * h)))
}

/// Central-difference Hessian on the 3×3 stencil of spacing `h`.
pub fn fd_hessian(f: impl Fn(Point) -> Result<f64>, x: Point, h: f64) -> Result<Sym2> {
    let e = |i: f64, j: f64| match f(x + Point::new(i * h, j * h)) {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::StencilOutOfDomain(x)),
    };
    let c = e(0.0, 0.0)?;
    let h2 = h * h;
    let xx = (e(1.0, 0.0)? - 2.0 * c + e(-1.0, 0.0)?) / h2;
    let yy = (e(0.0, 1.0)? - 2.0 * c + e(0.0, -1.0)?) / h2;
    let xy = (e(1.0, 1.0)? - e(1.0, -1.0)? - e(-1.0, 1.0)? + e(-1.0, -1.0)?) / (4.0 * h2);
    Ok(Sym2::new(xx, xy, yy))
}

/// One counted persistence event of the filtration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridEvent {
    /// 0 for a minimum, 1 for a saddle, 2 for a maximum.
    pub index: u8,
    pub location: Point,
    pub value: f64,
    /// `None` for classes that never die.
    pub persistence: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridCensus {
    pub mu: [usize; 3],
    /// Grid side `n`.
    pub resolution: usize,
    /// Number of region pixels swept.
    pub level_count: usize,
    /// `V − E + F` of the rasterized region (4-connected pixel complex).
    pub raster_euler: i64,
    pub events: Vec<GridEvent>,
}

impl GridCensus {
    pub fn euler(&self) -> i64 {
        self.mu[0] as i64 - self.mu[1] as i64 + self.mu[2] as i64
    }

    /// Counts restricted to events located in `keep`.
    pub fn mu_where(&self, keep: impl Fn(Point) -> bool) -> [usize; 3] {
        let mut mu = [0; 3];
        for e in self.events.iter().filter(|e| keep(e.location)) {
            mu[e.index as usize] += 1;
        }
        mu
    }
}

/// Census of `f` on `w` at resolution `n`, confirmed at `2n`.
pub fn grid_census<P: Potential + ?Sized>(f: &P, w: &Workspace, n: usize) -> Result<GridCensus> {
    let coarse = grid_census_at(f, w, n)?;
    let fine = grid_census_at(f, w, 2 * n)?;
    if coarse.mu != fine.mu {
        return Err(Error::ResolutionTooCoarse { coarse: n, fine: 2 * n });
    }
    Ok(coarse)
}

/// Census of `f` on `w` at a single resolution.
pub fn grid_census_at<P: Potential + ?Sized>(f: &P, w: &Workspace, n: usize) -> Result<GridCensus> {
    let b = w.bbox().ok_or(Error::EmptyWorkspace)?;
    let side = b.width().max(b.height());
    // A few pixels of padding so the outside is one complement component.
    let bbox = b.squared(1.0).expanded(4.0 * side / n as f64);
    box_census(f, bbox, n, |x| w.contains(x))
}

/// Census of `f` on the pixels of an `n × n` grid over `bbox` whose centers
/// satisfy `mask`.
pub fn box_census<P: Potential + ?Sized>(
    f: &P,
    bbox: BBox,
    n: usize,
    mask: impl Fn(Point) -> bool + Sync,
) -> Result<GridCensus> {
    let grid = Grid::sample(f, bbox, n, mask);
    if grid.inside.iter().all(|&i| !i) {
        return Err(Error::EmptyWorkspace);
    }
    Ok(grid.census())
}

/// `(b0, b1)` of the sampled sublevel set `{x ∈ w : f(x) ≤ level}`.
pub fn sublevel_betti<P: Potential + ?Sized>(f: &P, w: &Workspace, n: usize, level: f64) -> Result<(usize, usize)> {
    let b = w.bbox().ok_or(Error::EmptyWorkspace)?;
    let side = b.width().max(b.height());
    let bbox = b.squared(1.0).expanded(4.0 * side / n as f64);
    let mut grid = Grid::sample(f, bbox, n, |x| w.contains(x));
    for k in 0..grid.inside.len() {
        grid.inside[k] = grid.inside[k] && grid.vals[k] <= level;
    }
    Ok(grid.betti())
}

struct Grid {
    n: usize,
    bbox: BBox,
    step: f64,
    vals: Vec<f64>,
    inside: Vec<bool>,
}

const N4: [(i64, i64); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];
const N8: [(i64, i64); 8] = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)];

/// Smallest 4-component of region pixels kept; smaller ones are slivers
/// cut off at sharp corners by the sampling.
const MIN_COMPONENT: usize = 8;

impl Grid {
    fn sample<P: Potential + ?Sized>(f: &P, bbox: BBox, n: usize, mask: impl Fn(Point) -> bool + Sync) -> Grid {
        let step = bbox.width().max(bbox.height()) / n as f64;
        let center = |k: usize| {
            Point::new(bbox.min.x + ((k % n) as f64 + 0.5) * step, bbox.min.y + ((k / n) as f64 + 0.5) * step)
        };
        let sampled: Vec<(bool, f64)> = (0..n * n)
            .into_par_iter()
            .map(|k| {
                let p = center(k);
                match f.value(p) {
                    Ok(v) if v.is_finite() => (mask(p), v),
                    _ => (false, f64::NAN),
                }
            })
            .collect();
        let (inside, vals) = sampled.into_iter().unzip();
        let mut g = Grid { n, bbox, step, vals, inside };
        g.drop_slivers();
        g
    }

    fn center(&self, k: usize) -> Point {
        Point::new(
            self.bbox.min.x + ((k % self.n) as f64 + 0.5) * self.step,
            self.bbox.min.y + ((k / self.n) as f64 + 0.5) * self.step,
        )
    }

    fn neighbours<'a>(&self, k: usize, offsets: &'a [(i64, i64)]) -> impl Iterator<Item = usize> + 'a {
        let n = self.n as i64;
        let (i, j) = ((k as i64) % n, (k as i64) / n);
        offsets.iter().filter_map(move |&(di, dj)| {
            let (a, b) = (i + di, j + dj);
            (a >= 0 && a < n && b >= 0 && b < n).then_some((b * n + a) as usize)
        })
    }

    fn drop_slivers(&mut self) {
        let mut uf = UnionFind::new(self.inside.len());
        for k in 0..self.inside.len() {
            if self.inside[k] {
                for q in self.neighbours(k, &N4).collect::<Vec<_>>() {
                    if self.inside[q] {
                        uf.union(k, q);
                    }
                }
            }
        }
        let mut size = vec![0usize; self.inside.len()];
        for k in 0..self.inside.len() {
            if self.inside[k] {
                size[uf.find(k)] += 1;
            }
        }
        for k in 0..self.inside.len() {
            if self.inside[k] && size[uf.find(k)] < MIN_COMPONENT {
                self.inside[k] = false;
            }
        }
    }

    /// Largest value difference to an 8-neighbour, inside the region or not.
    fn oscillation(&self, k: usize) -> f64 {
        self.neighbours(k, &N8)
            .filter(|&q| self.vals[q].is_finite())
            .map(|q| (self.vals[q] - self.vals[k]).abs())
            .fold(0.0, f64::max)
    }

    fn euler(&self) -> i64 {
        let n = self.n;
        let at = |i: usize, j: usize| self.inside[j * n + i];
        let mut v = 0i64;
        let mut e = 0i64;
        let mut f = 0i64;
        for j in 0..n {
            for i in 0..n {
                if !at(i, j) {
                    continue;
                }
                v += 1;
                if i + 1 < n && at(i + 1, j) {
                    e += 1;
                }
                if j + 1 < n && at(i, j + 1) {
                    e += 1;
                }
                if i + 1 < n && j + 1 < n && at(i + 1, j) && at(i, j + 1) && at(i + 1, j + 1) {
                    f += 1;
                }
            }
        }
        v - e + f
    }

    fn betti(&self) -> (usize, usize) {
        let total = self.inside.len();
        let mut fg = UnionFind::new(total);
        let mut bg = UnionFind::new(total);
        for k in 0..total {
            let (offsets, uf): (&[(i64, i64)], &mut UnionFind) =
                if self.inside[k] { (&N4, &mut fg) } else { (&N8, &mut bg) };
            for q in self.neighbours(k, offsets).collect::<Vec<_>>() {
                if self.inside[q] == self.inside[k] {
                    uf.union(k, q);
                }
            }
        }
        let b0 = (0..total).filter(|&k| self.inside[k] && fg.find(k) == k).count();
        let holes = (0..total).filter(|&k| !self.inside[k] && bg.find(k) == k).count();
        (b0, holes.saturating_sub(1))
    }

    fn census(&self) -> GridCensus {
        let total = self.inside.len();
        let mut order: Vec<usize> = (0..total).filter(|&k| self.inside[k]).collect();
        order.par_sort_unstable_by(|&a, &b| self.vals[a].total_cmp(&self.vals[b]).then(a.cmp(&b)));
        // Rank in the filtration; ties were broken by index above.
        let mut rank = vec![usize::MAX; total];
        for (r, &k) in order.iter().enumerate() {
            rank[k] = r;
        }
        let mut events = Vec::new();

        // Sublevel components: the root remembers its birth pixel.
        let mut uf = UnionFind::new(total);
        let mut birth = vec![usize::MAX; total];
        let mut added = vec![false; total];
        for &p in &order {
            added[p] = true;
            let mut roots: Vec<usize> = self.neighbours(p, &N4).filter(|&q| added[q]).map(|q| uf.find(q)).collect();
            roots.sort_unstable_by_key(|&r| rank[birth[r]]);
            roots.dedup();
            let Some(&oldest) = roots.first() else {
                birth[p] = p;
                continue;
            };
            for &r in &roots[1..] {
                let b = birth[r];
                let persistence = self.vals[p] - self.vals[b];
                if persistence > self.oscillation(p) {
                    events.push(self.event(0, b, Some(persistence)));
                    events.push(self.event(1, p, Some(persistence)));
                }
                uf.parent[r] = oldest;
            }
            uf.parent[p] = oldest;
        }
        for &p in &order {
            if uf.find(p) == p {
                events.push(self.event(0, birth[p], None));
            }
        }

        // Superlevel complement, seeded by everything outside the region.
        let mut uf = UnionFind::new(total);
        // Birth pixel of each complement component, `usize::MAX` for the essential ones.
        let mut birth = vec![usize::MAX; total];
        let mut added: Vec<bool> = self.inside.iter().map(|&i| !i).collect();
        for k in 0..total {
            if added[k] {
                for q in self.neighbours(k, &N8).collect::<Vec<_>>() {
                    if added[q] {
                        uf.union(k, q);
                    }
                }
            }
        }
        // Older means born at a higher value; essential components are oldest.
        let age = |b: usize| if b == usize::MAX { (0, 0) } else { (1, usize::MAX - rank[b]) };
        for &p in order.iter().rev() {
            added[p] = true;
            let mut roots: Vec<usize> =
                self.neighbours(p, &N8).filter(|&q| added[q] && q != p).map(|q| uf.find(q)).collect();
            roots.sort_unstable();
            roots.dedup();
            roots.sort_by_key(|&r| (age(birth[r]), r));
            let Some(&oldest) = roots.first() else {
                birth[p] = p;
                continue;
            };
            for &r in &roots[1..] {
                let b = birth[r];
                if b == usize::MAX {
                    events.push(self.event(1, p, None));
                } else {
                    let persistence = self.vals[b] - self.vals[p];
                    if persistence > self.oscillation(p) {
                        events.push(self.event(2, b, Some(persistence)));
                        events.push(self.event(1, p, Some(persistence)));
                    }
                }
                uf.parent[r] = oldest;
            }
            uf.parent[p] = oldest;
        }

        let mut mu = [0usize; 3];
        for e in &events {
            mu[e.index as usize] += 1;
        }
        events.sort_by(|a, b| {
            a.index
                .cmp(&b.index)
                .then(a.location.x.total_cmp(&b.location.x))
                .then(a.location.y.total_cmp(&b.location.y))
        });
        GridCensus { mu, resolution: self.n, level_count: order.len(), raster_euler: self.euler(), events }
    }

    fn event(&self, index: u8, k: usize, persistence: Option<f64>) -> GridEvent {
        GridEvent { index, location: self.center(k), value: self.vals[k], persistence }
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut k: usize) -> usize {
        while self.parent[k] != k {
            self.parent[k] = self.parent[self.parent[k]];
            k = self.parent[k];
        }
        k
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}
