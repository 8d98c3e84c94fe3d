use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spiderlab_core::oracle::{fd_gradient, fd_hessian};
use spiderlab_core::{ChargeTriple, Coulomb, Hooke, Point, Potential, Triangle, WeightedHooke, Weights};

fn random_triangle(rng: &mut impl Rng) -> Triangle {
    loop {
        let mut p = || Point::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
        if let Ok(t) = Triangle::new(p(), p(), p()) {
            if t.area() > 0.2 {
                return t;
            }
        }
    }
}

fn check(f: &dyn Potential, x: Point) {
    let value = |p: Point| f.value(p);
    let g = f.gradient(x).unwrap();
    let g_fd = fd_gradient(value, x, 1e-5).unwrap();
    assert!((g - g_fd).norm() <= 1e-6 * g.norm().max(1.0), "{} gradient at {x:?}: {g:?} vs {g_fd:?}", f.label());
    let h = f.hessian(x).unwrap();
    let h_fd = fd_hessian(value, x, 1e-4).unwrap();
    let scale = h.xx.abs().max(h.yy.abs()).max(h.xy.abs()).max(1.0);
    let err = (h.xx - h_fd.xx).abs().max((h.yy - h_fd.yy).abs()).max((h.xy - h_fd.xy).abs());
    assert!(err <= 1e-5 * scale, "{} hessian at {x:?}: {h:?} vs {h_fd:?}", f.label());
}

#[test]
fn analytic_derivatives_match_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let tri = random_triangle(&mut rng);
        let x = loop {
            let x = Point::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            if tri.vertices().iter().all(|v| v.distance(x) > 0.2) {
                break x;
            }
        };
        let weights = Weights::new(rng.gen_range(0.1..3.0), rng.gen_range(0.1..3.0), rng.gen_range(0.1..3.0)).unwrap();
        let q = loop {
            let q: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-2.0..2.0));
            if q.iter().all(|v| v.abs() > 0.1) {
                break ChargeTriple::new(q).unwrap();
            }
        };
        check(&Hooke { tri }, x);
        check(&WeightedHooke { tri, weights }, x);
        check(&Coulomb { tri, charges: q }, x);
    }
}

#[test]
fn coulomb_hessian_is_symmetric_with_planar_trace() {
    let tri = Triangle::regular_unit();
    let q = ChargeTriple::new([0.7, -0.2, 1.3]).unwrap();
    let f = Coulomb { tri, charges: q };
    let x = Point::new(0.1, 0.35);
    let h = f.hessian(x).unwrap();
    let expected: f64 = tri.vertices().iter().zip(q.get()).map(|(v, qi)| qi / v.distance(x).powi(3)).sum();
    assert!((h.trace() - expected).abs() <= 1e-12 * expected.abs().max(1.0));
}
