use proptest::prelude::*;
use spiderlab_core::workspace::{build_workspace, Leg, SpiderSpec};
use spiderlab_core::{Point, Triangle};

fn raw_contains(spec: &SpiderSpec, x: Point) -> bool {
    spec.feet.vertices().iter().zip(spec.legs).all(|(v, leg)| {
        let d = v.distance(x);
        d >= leg.reach_min() && d <= leg.reach_max()
    })
}

fn legs() -> impl Strategy<Value = [Leg; 3]> {
    prop::array::uniform3((0.6f64..1.6, 0.05f64..0.55)).prop_map(|a| a.map(|(thigh, shin)| Leg { thigh, shin }))
}

fn triangles() -> impl Strategy<Value = Triangle> {
    prop::array::uniform3((-0.25f64..0.25, -0.25f64..0.25)).prop_filter_map("degenerate", |d| {
        let t = Triangle::regular_unit();
        let v = t.vertices();
        Triangle::new(
            v[0] + Point::new(d[0].0, d[0].1),
            v[1] + Point::new(d[1].0, d[1].1),
            v[2] + Point::new(d[2].0, d[2].1),
        )
        .ok()
    })
}

/// Points away from every constraint circle, where closed and slack membership agree.
fn decisive(spec: &SpiderSpec, x: Point) -> bool {
    spec.feet.vertices().iter().zip(spec.legs).all(|(v, leg)| {
        let d = v.distance(x);
        (d - leg.reach_min()).abs() > 1e-8 && (d - leg.reach_max()).abs() > 1e-8
    })
}

#[test]
fn contains_matches_raw_inequalities() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    for spec in [SpiderSpec::holed(), SpiderSpec::contractible()] {
        let w = build_workspace(&spec).unwrap();
        for _ in 0..10_000 {
            let x = Point::new(rng.gen_range(-2.5..2.5), rng.gen_range(-2.5..2.5));
            if decisive(&spec, x) {
                assert_eq!(w.contains(x), raw_contains(&spec, x), "{x:?}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn contains_matches_raw_on_random_specs(feet in triangles(), legs in legs(), pts in prop::collection::vec((-2.5f64..2.5, -2.5f64..2.5), 200)) {
        let spec = SpiderSpec::new(feet, legs).unwrap();
        if let Ok(w) = build_workspace(&spec) {
            for (x, y) in pts {
                let p = Point::new(x, y);
                if decisive(&spec, p) {
                    prop_assert_eq!(w.contains(p), raw_contains(&spec, p));
                }
            }
        }
    }

    #[test]
    fn euler_matches_turning_number(feet in triangles(), legs in legs()) {
        let spec = SpiderSpec::new(feet, legs).unwrap();
        if let Ok(w) = build_workspace(&spec) {
            let (b0, b1) = w.betti();
            prop_assert!(b1 <= 3);
            prop_assert!((w.turning_number() - (b0 as f64 - b1 as f64)).abs() < 1e-9);
            prop_assert!(w.area() > 0.0);
            for a in w.arcs() {
                for t in [0.0, 0.25, 0.5, 0.75, 1.0] {
                    prop_assert!(w.contains(a.point_at(t)));
                }
            }
            for c in w.corners() {
                prop_assert_eq!(w.active_constraints(c.location, 1e-9).len(), 2);
            }
        }
    }

    #[test]
    fn enlarging_reach_keeps_points(feet in triangles(), legs in legs(), grow in 0.0f64..0.3, shrink in 0.0f64..0.04, pts in prop::collection::vec((-2.5f64..2.5, -2.5f64..2.5), 200)) {
        // R⁺ grows by `grow`, R⁻ shrinks by `shrink` (kept positive).
        let bigger = legs.map(|l| {
            let r_min = (l.reach_min() - shrink).max(0.01);
            let r_max = l.reach_max() + grow;
            Leg { thigh: 0.5 * (r_min + r_max), shin: 0.5 * (r_max - r_min) }
        });
        let small = SpiderSpec::new(feet, legs).unwrap();
        let large = SpiderSpec::new(feet, bigger).unwrap();
        for (x, y) in pts {
            let p = Point::new(x, y);
            if raw_contains(&small, p) {
                prop_assert!(raw_contains(&large, p));
                if let Ok(w) = build_workspace(&large) {
                    prop_assert!(w.contains(p));
                }
            }
        }
    }
}

#[test]
fn betti_matches_raster_on_random_specs() {
    use rand::{Rng, SeedableRng};
    use spiderlab_core::oracle::sublevel_betti;
    use spiderlab_core::Hooke;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
    let mut checked = 0;
    let mut mismatches = Vec::new();
    while checked < 60 {
        let t = Triangle::regular_unit();
        let v = t.vertices();
        let mut j = || Point::new(rng.gen_range(-0.25..0.25), rng.gen_range(-0.25..0.25));
        let Ok(feet) = Triangle::new(v[0] + j(), v[1] + j(), v[2] + j()) else { continue };
        let legs = std::array::from_fn(|_| Leg { thigh: rng.gen_range(0.6..1.6), shin: rng.gen_range(0.1..0.55) });
        let spec = SpiderSpec::new(feet, legs).unwrap();
        let Ok(w) = build_workspace(&spec) else { continue };
        let f = Hooke { tri: feet };
        let raster = sublevel_betti(&f, &w, 512, f64::INFINITY).unwrap();
        if raster != w.betti() {
            mismatches.push((spec, w.betti(), raster));
        }
        checked += 1;
    }
    assert!(mismatches.is_empty(), "{mismatches:#?}");
}
