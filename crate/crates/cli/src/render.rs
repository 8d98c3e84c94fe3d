//! Deterministic SVG output.
//!
//! World coordinates are mapped into a fixed-width canvas with the y axis
//! flipped. Every number is printed with three decimals so identical scenes
//! give identical bytes.

use std::f64::consts::PI;
use std::fmt::Write;

use spiderlab_core::{Arc, BBox, CriticalPoint, Point, Potential, Region, SegmentTag, Trajectory, Workspace};

const WIDTH: f64 = 600.0;
const MARGIN: f64 = 20.0;
const ARROW_GRID: usize = 21;

pub enum Scene<'a> {
    Workspace(&'a Workspace),
    Region(&'a Region),
    Trajectory { trajectory: &'a Trajectory, workspace: &'a Workspace },
    Field { potential: &'a dyn Potential, workspace: &'a Workspace, critical_points: &'a [CriticalPoint] },
}

struct Canvas {
    bbox: BBox,
    scale: f64,
    height: f64,
    body: String,
}

fn num(v: f64) -> String {
    let s = format!("{v:.3}");
    if s == "-0.000" {
        "0.000".to_string()
    } else {
        s
    }
}

impl Canvas {
    fn new(bbox: Option<BBox>) -> Canvas {
        let bbox = bbox.unwrap_or(BBox { min: Point::new(-1.0, -1.0), max: Point::new(1.0, 1.0) });
        let span = bbox.width().max(bbox.height()).max(1e-9);
        let scale = (WIDTH - 2.0 * MARGIN) / span;
        let height = bbox.height() * scale + 2.0 * MARGIN;
        Canvas { bbox, scale, height, body: String::new() }
    }

    fn x(&self, p: Point) -> String {
        num((p.x - self.bbox.min.x) * self.scale + MARGIN)
    }

    fn y(&self, p: Point) -> String {
        num((self.bbox.max.y - p.y) * self.scale + MARGIN)
    }

    fn xy(&self, p: Point) -> String {
        format!("{} {}", self.x(p), self.y(p))
    }

    /// Elliptical-arc command from the current point along `sweep` radians.
    /// Sweep is capped below a full turn by the caller.
    fn arc_to(&self, d: &mut String, radius: f64, sweep: f64, end: Point) {
        let r = num(radius * self.scale);
        let large = u8::from(sweep.abs() > PI);
        // The y flip turns counterclockwise into the SVG negative-angle direction.
        let flag = u8::from(sweep <= 0.0);
        write!(d, " A {r} {r} 0 {large} {flag} {}", self.xy(end)).unwrap();
    }

    fn arc_path(&self, d: &mut String, arc: &Arc) {
        if arc.is_full() {
            let mid = arc.point_at(0.5);
            self.arc_to(d, arc.circle.radius, arc.sweep / 2.0, mid);
            self.arc_to(d, arc.circle.radius, arc.sweep / 2.0, arc.point_at(1.0));
        } else {
            self.arc_to(d, arc.circle.radius, arc.sweep, arc.end);
        }
    }

    fn dot(&mut self, p: Point, r: f64, fill: &str, class: &str) {
        writeln!(
            self.body,
            r#"<circle class="{class}" cx="{}" cy="{}" r="{}" fill="{fill}"/>"#,
            self.x(p),
            self.y(p),
            num(r)
        )
        .unwrap();
    }

    fn finish(self) -> String {
        let mut s = String::new();
        s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
            w = num(WIDTH),
            h = num(self.height)
        )
        .unwrap();
        s.push_str(&self.body);
        s.push_str("</svg>\n");
        s
    }
}

/// One subpath per boundary component; drawn even-odd so holes stay open
/// whichever way they are traversed.
fn workspace_path_data(c: &Canvas, w: &Workspace) -> String {
    let arcs = w.arcs();
    let mut d = String::new();
    for comp in w.components() {
        if !d.is_empty() {
            d.push(' ');
        }
        write!(d, "M {}", c.xy(arcs[comp.arcs[0]].start)).unwrap();
        for &k in &comp.arcs {
            c.arc_path(&mut d, &arcs[k]);
        }
        d.push_str(" Z");
    }
    d
}

fn draw_workspace(c: &mut Canvas, w: &Workspace) {
    if w.components().is_empty() {
        return;
    }
    let d = workspace_path_data(c, w);
    writeln!(
        c.body,
        r##"<path class="workspace" fill="#dde8f3" fill-rule="evenodd" stroke="#333333" stroke-width="1.5" d="{d}"/>"##
    )
    .unwrap();
}

fn region_path_data(c: &Canvas, region: &Region) -> String {
    let step = region.resolution;
    let cell = |p: Point| {
        (
            ((p.x - region.bbox.min.x) / step - 0.5).round() as i64,
            ((p.y - region.bbox.min.y) / step - 0.5).round() as i64,
        )
    };
    let corner = |i: i64, j: i64| Point::new(region.bbox.min.x + i as f64 * step, region.bbox.min.y + j as f64 * step);
    let mut d = String::new();
    let emit = |d: &mut String, j: i64, i0: i64, i1: i64| {
        if !d.is_empty() {
            d.push(' ');
        }
        let lo = corner(i0, j);
        let hi = corner(i1 + 1, j + 1);
        write!(d, "M {} H {} V {} H {} Z", c.xy(lo), c.x(hi), c.y(hi), c.x(lo)).unwrap();
    };
    let mut run: Option<(i64, i64, i64)> = None;
    for &p in &region.sample {
        let (i, j) = cell(p);
        run = match run {
            Some((rj, i0, i1)) if rj == j && i == i1 + 1 => Some((rj, i0, i)),
            Some((rj, i0, i1)) => {
                emit(&mut d, rj, i0, i1);
                Some((j, i, i))
            }
            None => Some((j, i, i)),
        };
    }
    if let Some((rj, i0, i1)) = run {
        emit(&mut d, rj, i0, i1);
    }
    d
}

fn tag_style(tag: SegmentTag) -> (&'static str, &'static str) {
    match tag {
        SegmentTag::Free => ("free", "#1f77b4"),
        SegmentTag::Sliding(_) => ("sliding", "#d62728"),
    }
}

fn index_color(cp: &CriticalPoint) -> &'static str {
    match cp.index {
        Some(0) => "#2ca02c",
        Some(1) => "#ff7f0e",
        Some(2) => "#d62728",
        _ => "#7f7f7f",
    }
}

pub fn render_svg(scene: &Scene) -> String {
    match scene {
        Scene::Workspace(w) => {
            let mut c = Canvas::new(w.bbox().map(|b| b.expanded(0.05 * b.width().max(b.height()))));
            draw_workspace(&mut c, w);
            for corner in w.corners() {
                c.dot(corner.location, 3.0, "#333333", "corner");
            }
            c.finish()
        }
        Scene::Region(region) => {
            let mut c = Canvas::new(Some(region.bbox));
            if !region.is_empty() {
                let d = region_path_data(&c, region);
                writeln!(
                    c.body,
                    r##"<path class="region" fill="#9467bd" fill-rule="evenodd" stroke="none" d="{d}"/>"##
                )
                .unwrap();
            }
            c.finish()
        }
        Scene::Trajectory { trajectory, workspace } => {
            let mut bbox = workspace.bbox().unwrap_or(BBox { min: trajectory.terminal, max: trajectory.terminal });
            for &p in &trajectory.points {
                bbox.include(p);
            }
            let mut c = Canvas::new(Some(bbox.expanded(0.05 * bbox.width().max(bbox.height()))));
            draw_workspace(&mut c, workspace);
            for seg in &trajectory.segments {
                let (class, color) = tag_style(seg.tag);
                let pts: Vec<String> =
                    trajectory.points[seg.start..=seg.end].iter().map(|&p| format!("{},{}", c.x(p), c.y(p))).collect();
                writeln!(
                    c.body,
                    r#"<polyline class="{class}" fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
                    pts.join(" ")
                )
                .unwrap();
            }
            if let Some(&start) = trajectory.points.first() {
                c.dot(start, 4.0, "#000000", "start");
            }
            c.dot(trajectory.terminal, 4.0, "#2ca02c", "terminal");
            c.finish()
        }
        Scene::Field { potential, workspace, critical_points } => {
            let Some(bbox) = workspace.bbox() else {
                return Canvas::new(None).finish();
            };
            let mut c = Canvas::new(Some(bbox.expanded(0.05 * bbox.width().max(bbox.height()))));
            draw_workspace(&mut c, workspace);
            let span = bbox.width().max(bbox.height());
            let spacing = span / ARROW_GRID as f64;
            let mut d = String::new();
            for j in 0..ARROW_GRID {
                for i in 0..ARROW_GRID {
                    let p =
                        Point::new(bbox.min.x + (i as f64 + 0.5) * spacing, bbox.min.y + (j as f64 + 0.5) * spacing);
                    if !workspace.contains(p) {
                        continue;
                    }
                    let Some(dir) = potential.gradient(p).ok().and_then(|g| (-g).normalized()) else {
                        continue;
                    };
                    let tip = p + dir * (0.4 * spacing);
                    let side = dir.perp() * (0.12 * spacing);
                    let back = tip - dir * (0.15 * spacing);
                    if !d.is_empty() {
                        d.push(' ');
                    }
                    write!(
                        d,
                        "M {} L {} M {} L {} L {}",
                        c.xy(p),
                        c.xy(tip),
                        c.xy(back + side),
                        c.xy(tip),
                        c.xy(back - side)
                    )
                    .unwrap();
                }
            }
            if !d.is_empty() {
                writeln!(c.body, r##"<path class="field" fill="none" stroke="#555555" stroke-width="1" d="{d}"/>"##)
                    .unwrap();
            }
            for cp in critical_points.iter() {
                c.dot(cp.location, 4.0, index_color(cp), "critical");
            }
            c.finish()
        }
    }
}
