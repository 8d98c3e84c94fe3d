//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

use std::f64::consts::PI;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spiderlab_core::geom::{line_circle_intersections, Triangle};
use spiderlab_core::morse::{
    boundary_restriction_criticals, classify_boundary_critical, classify_corner, BoundaryClass, CriticalKind,
};
use spiderlab_core::potentials::{coulomb_gradient, coulomb_value, weighted_minimum};
use spiderlab_core::{
    build_workspace, census, default_window, equilibria, fd_gradient, fd_hessian, gradient_flow, grid_census,
    hooke_weights_for, lift_census, robust_domain, stationary_charges, trapping_discriminant, trapping_hessian,
    ChargeTriple, Coulomb, CspaceCensus, Error, FlowOptions, Hooke, LiftInput, MorseConfig, Point, Potential,
    SegmentTag, SpiderSpec, WeightedHooke, Weights,
};

const SADDLE_LOCATION_TOL: f64 = 1e-8;
const STATIONARY_REL_TOL: f64 = 1e-9;
const CENTROID_CHARGE_TOL: f64 = 1e-12;
const TRAP_H_TOL: f64 = 1e-12;
const SIGN_AGREEMENT: f64 = 0.999;
const MAXWELL_BOUND: usize = 4;
const ROUND_TRIP_TOL: f64 = 1e-10;
const RESCALE_TOL: f64 = 1e-12;
const FLOW_END_TOL: f64 = 1e-6;
const GRAD_REL_TOL: f64 = 1e-6;
const HESS_REL_TOL: f64 = 1e-5;
const ORACLE_GRID: usize = 512;

type Outcome = Result<String, String>;
type Criterion = (&'static str, &'static str, fn() -> Outcome);

fn t1() -> Triangle {
    Triangle::regular_unit()
}

fn s1() -> SpiderSpec {
    SpiderSpec::holed()
}

fn s2() -> SpiderSpec {
    SpiderSpec::contractible()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: Error) -> String {
    format!("{}: {e}", e.name())
}

fn random_triangle(rng: &mut ChaCha8Rng) -> Triangle {
    loop {
        let p = |rng: &mut ChaCha8Rng| Point::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let Ok(t) = Triangle::new(p(rng), p(rng), p(rng)) else { continue };
        let sides = [t.a.distance(t.b), t.b.distance(t.c), t.c.distance(t.a)];
        let longest = sides.iter().cloned().fold(0.0, f64::max);
        // Skip needles: the smallest altitude is at least 5% of the longest side.
        if 2.0 * t.area() / longest >= 0.05 * longest {
            return t;
        }
    }
}

fn random_interior(rng: &mut ChaCha8Rng, tri: &Triangle) -> Point {
    loop {
        let (u, v): (f64, f64) = (rng.gen(), rng.gen());
        if u > 1e-3 && v > 1e-3 && u + v < 1.0 - 1e-3 {
            return tri.a + (tri.b - tri.a) * u + (tri.c - tri.a) * v;
        }
    }
}

fn interior_grid(tri: &Triangle, n: usize) -> Vec<Point> {
    let b = tri.bbox();
    let mut pts = Vec::new();
    for j in 0..n {
        for i in 0..n {
            let p = Point::new(
                b.min.x + (i as f64 + 0.5) * b.width() / n as f64,
                b.min.y + (j as f64 + 0.5) * b.height() / n as f64,
            );
            if tri.contains_strictly(p, 1e-6) {
                pts.push(p);
            }
        }
    }
    pts
}

fn census_s1_hooke() -> Outcome {
    let w = build_workspace(&s1()).map_err(err)?;
    let f = Hooke { tri: t1() };
    let c = census(&f, &w, &MorseConfig::default()).map_err(err)?;
    ensure(c.mu == [1, 3, 0], || format!("mu = {:?}", c.mu))?;
    let grid = grid_census(&f, &w, ORACLE_GRID).map_err(err)?;
    ensure(grid.mu == c.mu, || format!("grid oracle mu = {:?}, analytic {:?}", grid.mu, c.mu))?;

    let z = t1().centroid();
    let minimum = c.critical_points.iter().find(|p| p.index == Some(0)).ok_or("no minimum")?;
    ensure(minimum.kind == CriticalKind::Interior && minimum.location.distance(z) <= SADDLE_LOCATION_TOL, || {
        format!("minimum {:?} at {}", minimum.kind, minimum.location)
    })?;
    let saddles: Vec<Point> = c.critical_points.iter().filter(|p| p.index == Some(1)).map(|p| p.location).collect();
    let mut worst: f64 = 0.0;
    for foot in t1().vertices() {
        let hits = line_circle_intersections(z, foot, foot, s1().legs[0].reach_min());
        let far = hits
            .iter()
            .copied()
            .max_by(|a, b| a.distance(z).total_cmp(&b.distance(z)))
            .ok_or("line misses the hole circle")?;
        let d = saddles.iter().map(|s| s.distance(far)).fold(f64::INFINITY, f64::min);
        worst = worst.max(d);
    }
    ensure(worst <= SADDLE_LOCATION_TOL, || format!("saddle off by {worst:e}"))?;
    Ok(format!("mu={:?}, oracle mu={:?} at n={ORACLE_GRID}, saddle error {worst:.1e}", c.mu, grid.mu))
}

fn census_s2_no_change() -> Outcome {
    let w = build_workspace(&s2()).map_err(err)?;
    let f = Hooke { tri: t1() };
    let cfg = MorseConfig::default();
    let c = census(&f, &w, &cfg).map_err(err)?;
    ensure(c.mu == [1, 0, 0], || format!("mu = {:?}", c.mu))?;
    let bcs = boundary_restriction_criticals(&f, &w, &cfg).map_err(err)?;
    for bc in &bcs {
        let class = classify_boundary_critical(&f, bc, &w).map_err(err)?;
        ensure(class == BoundaryClass::NoChange, || format!("boundary point {} is {class:?}", bc.location))?;
    }
    for corner in w.corners() {
        let class = classify_corner(&f, corner, &w).map_err(err)?;
        ensure(class == BoundaryClass::NoChange, || format!("corner {} is {class:?}", corner.location))?;
    }
    Ok(format!("mu={:?}; {} boundary points and {} corners all no-change", c.mu, bcs.len(), w.corners().len()))
}

fn perfect_morse() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut weights = vec![Weights::unit()];
    for _ in 0..10 {
        weights.push(Weights::new(rng.gen_range(0.1..3.0), rng.gen_range(0.1..3.0), rng.gen_range(0.1..3.0)).unwrap());
    }
    let mut checked = 0;
    for spec in [s1(), s2()] {
        let w = build_workspace(&spec).map_err(err)?;
        let (b0, b1) = w.betti();
        for &wt in &weights {
            let f = WeightedHooke { tri: t1(), weights: wt };
            let c = census(&f, &w, &MorseConfig::default()).map_err(err)?;
            ensure(c.mu == [b0, b1, 0], || {
                format!("weights {:?}: mu {:?} vs betti ({b0},{b1},0)", wt.to_array(), c.mu)
            })?;
            checked += 1;
        }
    }
    Ok(format!("{checked} censuses equal the Betti numbers"))
}

fn cspace_census() -> Outcome {
    let w = build_workspace(&s1()).map_err(err)?;
    let input = LiftInput::collect(&Hooke { tri: t1() }, &w, &MorseConfig::default()).map_err(err)?;
    let c = lift_census(&input, &w).map_err(err)?;
    let expected = CspaceCensus { minima: 8, saddles: 36, maxima: 6, euler: -22, genus: 12 };
    ensure(c == expected, || format!("{c:?}"))?;
    Ok(format!("minima {} saddles {} maxima {} euler {} genus {}", c.minima, c.saddles, c.maxima, c.euler, c.genus))
}

fn stationary_property() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let tri = random_triangle(&mut rng);
        for _ in 0..1000 {
            let x = random_interior(&mut rng, &tri);
            let q = stationary_charges(x, &tri).map_err(err)?;
            let g = coulomb_gradient(x, &tri, &q).map_err(err)?;
            // Relative to the size of the individual forces.
            let scale: f64 = tri.vertices().iter().zip(q.get()).map(|(v, qi)| qi.abs() / v.distance(x).powi(2)).sum();
            worst = worst.max(g.norm() / scale);
        }
    }
    ensure(worst <= STATIONARY_REL_TOL, || format!("relative residual {worst:e}"))?;
    let q = stationary_charges(t1().centroid(), &t1()).map_err(err)?.normalized().get();
    let dev = q.iter().map(|qi| (qi - 1.0 / 3.0).abs()).fold(0.0, f64::max);
    ensure(dev <= CENTROID_CHARGE_TOL, || format!("centroid charges {q:?}"))?;
    Ok(format!("worst relative residual {worst:.1e} over 50000 points; centroid deviation {dev:.1e}"))
}

fn trapping_scalar() -> Outcome {
    let tri = t1();
    let h = trapping_hessian(tri.centroid(), &tri).map_err(err)?;
    let expected = 243.0 / 32.0 - 1.5 * 3f64.sqrt();
    ensure((h - expected).abs() <= TRAP_H_TOL, || format!("h(centroid) = {h}, expected {expected}"))?;
    Ok(format!("h(centroid) = {h:.12}"))
}

fn trapping_sign() -> Outcome {
    let tri = t1();
    let pts = interior_grid(&tri, 142);
    ensure(pts.len() >= 10_000, || format!("only {} grid points", pts.len()))?;
    let (mut printed, mut corrected) = (0usize, 0usize);
    for &x in &pts {
        let q = stationary_charges(x, &tri).map_err(err)?;
        let det = fd_hessian(|p| coulomb_value(p, &tri, &q), x, 1e-4).map_err(err)?.det();
        if (trapping_hessian(x, &tri).map_err(err)? > 0.0) == (det > 0.0) {
            printed += 1;
        }
        if (trapping_discriminant(x, &tri).map_err(err)? > 0.0) == (det > 0.0) {
            corrected += 1;
        }
    }
    let n = pts.len() as f64;
    let (fp, fc) = (printed as f64 / n, corrected as f64 / n);
    let detail = format!(
        "closed-form h agrees in sign at {:.2}% of {} points (need {:.1}%); det(3M - I) form agrees at {:.2}%",
        100.0 * fp,
        pts.len(),
        100.0 * SIGN_AGREEMENT,
        100.0 * fc
    );
    if fp >= SIGN_AGREEMENT {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn robust_domain_s2() -> Outcome {
    let spec = s2();
    let region = robust_domain(&spec, 256);
    ensure(!region.is_empty(), || "D(S2) sample is empty".into())?;
    ensure(region.contains(t1().centroid()), || "centroid not in D(S2)".into())?;
    let cfg = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/s2.json");
    let args = ["spiderlab", "control", "--mode", "coulomb", "--target", "0,0", "--config", cfg.to_str().unwrap()];
    let (mut out, mut errout) = (Vec::new(), Vec::new());
    let code = spiderlab_cli::run(args, &mut out, &mut errout);
    ensure(code == 0, || format!("exit {code}: {}", String::from_utf8_lossy(&out)))?;
    let v: serde_json::Value = serde_json::from_slice(&out).map_err(|e| e.to_string())?;
    ensure(v["certificate"] == "TargetIsTrappedMinimum", || format!("certificate {}", v["certificate"]))?;
    Ok(format!("{} sample cells in D(S2); CLI certificate {}", region.sample.len(), v["certificate"]))
}

fn maxwell_bound() -> Outcome {
    let tri = t1();
    let window = default_window(&tri);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut largest = 0;
    for _ in 0..200 {
        let q: [f64; 3] = std::array::from_fn(|_| {
            let m = rng.gen_range(0.05..1.0);
            if rng.gen_bool(0.5) {
                m
            } else {
                -m
            }
        });
        let q = ChargeTriple::new(q).map_err(err)?;
        let coarse = equilibria(&tri, &q, window, 512).map_err(err)?;
        let fine = equilibria(&tri, &q, window, 1024).map_err(err)?;
        ensure(coarse.len() <= MAXWELL_BOUND, || format!("{} equilibria for {:?}", coarse.len(), q.get()))?;
        ensure(coarse.len() == fine.len(), || {
            format!("{:?}: {} at 512, {} at 1024", q.get(), coarse.len(), fine.len())
        })?;
        largest = largest.max(coarse.len());
    }
    let unit = ChargeTriple::new([1.0; 3]).map_err(err)?;
    for n in [512, 1024] {
        let eq = equilibria(&tri, &unit, window, n).map_err(err)?;
        let minima = eq.iter().filter(|e| e.index == 0).count();
        let saddles = eq.iter().filter(|e| e.index == 1).count();
        ensure(eq.len() == 4 && minima == 1 && saddles == 3, || {
            format!("q=(1,1,1) at n={n}: {} equilibria, {minima} minima, {saddles} saddles", eq.len())
        })?;
    }
    Ok(format!("at most {largest} equilibria over 200 triples; q=(1,1,1) gives 1 minimum + 3 saddles at 512 and 1024"))
}

fn hooke_control() -> Outcome {
    let tri = t1();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut worst_rt, mut worst_scale): (f64, f64) = (0.0, 0.0);
    for _ in 0..1000 {
        let target = random_interior(&mut rng, &tri);
        let sol = hooke_weights_for(target, &tri).map_err(err)?;
        let spiderlab_core::ControlParameters::Weights(w) = sol.parameters else {
            return Err("Hooke control returned charges".into());
        };
        let m = weighted_minimum(&tri, w);
        worst_rt = worst_rt.max(m.distance(target));
        let lambda = 10f64.powf(rng.gen_range(-3.0..3.0));
        let scaled = weighted_minimum(&tri, w.scaled(lambda).map_err(err)?);
        worst_scale = worst_scale.max(scaled.distance(m));
    }
    ensure(worst_rt <= ROUND_TRIP_TOL, || format!("round trip off by {worst_rt:e}"))?;
    ensure(worst_scale <= RESCALE_TOL, || format!("rescaling moved the minimum by {worst_scale:e}"))?;
    Ok(format!("round trip {worst_rt:.1e}, rescaling {worst_scale:.1e}"))
}

fn flow_portrait() -> Outcome {
    let w = build_workspace(&s1()).map_err(err)?;
    let f = Hooke { tri: t1() };
    let opts = FlowOptions::default();
    let t = gradient_flow(&f, Point::new(1.5, 0.05), &w, &opts).map_err(err)?;
    let kinds: Vec<&str> = t
        .tags()
        .iter()
        .map(|tag| match tag {
            SegmentTag::Free => "free",
            SegmentTag::Sliding(_) => "sliding",
        })
        .collect();
    ensure(kinds == ["free", "sliding", "free"], || format!("tags {kinds:?}"))?;
    let rises = t.values.windows(2).filter(|v| v[1] > v[0]).count();
    ensure(rises == 0, || format!("H increases on {rises} steps"))?;
    let end = t.terminal.distance(t1().centroid());
    ensure(end <= FLOW_END_TOL, || format!("ends {end:e} from the centroid"))?;
    let stall = match gradient_flow(&f, Point::new(1.5, 0.0), &w, &opts) {
        Err(Error::StalledAtSaddle { location, .. }) => location.distance(Point::new(1.2, 0.0)),
        Err(e) => return Err(err(e)),
        Ok(t) => return Err(format!("axis start converged to {}", t.terminal)),
    };
    ensure(stall <= FLOW_END_TOL, || format!("stalled {stall:e} from (1.2, 0)"))?;
    Ok(format!(
        "{} steps, tags {kinds:?}, end error {end:.1e}; axis start stalls {stall:.1e} from (1.2, 0)",
        t.points.len()
    ))
}

fn derivative_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut worst_g: f64 = 0.0;
    let mut worst_h: f64 = 0.0;
    for i in 0..1000 {
        let tri = random_triangle(&mut rng);
        let f: Box<dyn Potential> = match i % 3 {
            0 => Box::new(Hooke { tri }),
            1 => Box::new(WeightedHooke {
                tri,
                weights: Weights::new(rng.gen_range(0.1..3.0), rng.gen_range(0.1..3.0), rng.gen_range(0.1..3.0))
                    .unwrap(),
            }),
            _ => Box::new(Coulomb {
                tri,
                charges: ChargeTriple::new(std::array::from_fn(|_| rng.gen_range(-1.0..1.0))).map_err(err)?,
            }),
        };
        // Keep the stencil away from the poles.
        let x = loop {
            let a = rng.gen_range(0.0..2.0 * PI);
            let x = tri.centroid() + Point::from_polar(rng.gen_range(0.0..2.0), a);
            if tri.vertices().iter().all(|v| v.distance(x) > 0.1) {
                break x;
            }
        };
        let value = |p: Point| f.value(p);
        let g = f.gradient(x).map_err(err)?;
        let g_fd = fd_gradient(value, x, 1e-5).map_err(err)?;
        worst_g = worst_g.max((g - g_fd).norm() / g.norm().max(1.0));
        let h = f.hessian(x).map_err(err)?;
        let h_fd = fd_hessian(value, x, 1e-4).map_err(err)?;
        let scale = h.xx.abs().max(h.xy.abs()).max(h.yy.abs()).max(1.0);
        let e = (h.xx - h_fd.xx).abs().max((h.xy - h_fd.xy).abs()).max((h.yy - h_fd.yy).abs());
        worst_h = worst_h.max(e / scale);
    }
    ensure(worst_g <= GRAD_REL_TOL, || format!("gradient error {worst_g:e}"))?;
    ensure(worst_h <= HESS_REL_TOL, || format!("Hessian error {worst_h:e}"))?;
    Ok(format!("worst gradient {worst_g:.1e}, worst Hessian {worst_h:.1e}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("1", "workspace census S1 (Hooke)", census_s1_hooke),
        ("2", "no boundary singularity S2 (Hooke)", census_s2_no_change),
        ("3", "perfect Morse functions", perfect_morse),
        ("4", "configuration-space census", cspace_census),
        ("5", "stationary charges", stationary_property),
        ("6a", "trapping scalar at the centroid", trapping_scalar),
        ("6b", "trapping scalar sign vs numeric Hessian", trapping_sign),
        ("7", "robust domain D(S2) and CLI control", robust_domain_s2),
        ("8", "Maxwell bound", maxwell_bound),
        ("9", "robust Hooke control", hooke_control),
        ("10", "gradient-flow phase portrait", flow_portrait),
        ("11", "derivative oracles", derivative_oracles),
    ];
    let mut failed = 0;
    for (id, name, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {id:>3}  {name}: {detail} [{secs:.2}s]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {id:>3}  {name}: {detail} [{secs:.2}s]");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
