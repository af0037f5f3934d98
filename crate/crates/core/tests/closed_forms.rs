//! Operators against closed forms computed independently of the library.

use driftgeom::geodesics::{drifted_laplacian_of_distance, shoot_geodesic, sn_minus_k};
use driftgeom::geometry::{ric_x, ricci, BoxDomain, ChartManifold, PotentialVariant, VectorFieldSpec};
use driftgeom::operators::{bochner_residual, drifted_laplacian, ScalarField};
use driftgeom::quad::{integrate, QuadOptions};
use driftgeom::worked_examples::{counterexample_bound_check, CounterexampleFamily, ParaboloidClosedForms};

fn halfplane() -> ChartManifold {
    ChartManifold::hyperbolic_halfplane(1.0, BoxDomain::new(vec![-6.0, 0.0], vec![6.0, 10.0]).unwrap()).unwrap()
}

#[test]
fn hyperbolic_ricci_is_minus_metric() {
    let m = halfplane();
    for p in [[0.0, 1.0], [1.5, 0.3], [-2.0, 4.0]] {
        let r = ricci(&m, &p).unwrap();
        let g = 1.0 / (p[1] * p[1]);
        assert!((r[(0, 0)] + g).abs() < 1e-12 * g && (r[(1, 1)] + g).abs() < 1e-12 * g && r[(0, 1)].abs() < 1e-12 * g);
    }
}

#[test]
fn paraboloid_gauss_curvature() {
    let m = ChartManifold::paraboloid(3.0);
    for p in [[0.0, 0.0], [1.0, 0.0], [0.3, -1.2]] {
        let s: f64 = p[0] * p[0] + p[1] * p[1];
        let k = 4.0 / (1.0 + 4.0 * s).powi(2);
        let r = ricci(&m, &p).unwrap();
        let g = m.metric_at(&p).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((r[(i, j)] - k * g[(i, j)]).abs() < 1e-13);
            }
        }
        assert!((ParaboloidClosedForms::gauss_curvature(p[0], p[1]) - k).abs() < 1e-15);
    }
}

#[test]
fn gradient_drift_gives_bakry_emery_tensor() {
    // X = ∇f with f = x² − y on the flat plane: Ric_X = Hess f = diag(2, 0)
    let m = ChartManifold::euclidean(2, 3.0);
    let x = VectorFieldSpec::gradient_of("grad", &m, std::sync::Arc::new(|c: &[driftgeom::jet::Jet]| c[0] * c[0] - c[1]));
    let r = ric_x(&m, &x, &[0.4, -0.3]).unwrap();
    assert_eq!((r[(0, 0)], r[(0, 1)], r[(1, 1)]), (2.0, 0.0, 0.0));
}

#[test]
fn hyperbolic_laplacian_of_a_power() {
    // Δ y^s = s(s−1) y^s on the half-plane; the drift ∂_y adds −s y^{s−1}
    let m = halfplane();
    let u = ScalarField::from_expr("y^2.5", |c| c[1].powf(2.5));
    let x = VectorFieldSpec::constant(vec![0.0, 1.0]);
    let p = [0.7, 1.3];
    let y: f64 = 1.3;
    let expect = 2.5 * 1.5 * y.powf(2.5) - 2.5 * y.powf(1.5);
    assert!((drifted_laplacian(&m, &x, &u, &p).unwrap() - expect).abs() < 1e-12);
}

#[test]
fn bochner_on_a_gradient_soliton_drift() {
    let m = ChartManifold::paraboloid(2.0);
    let x = VectorFieldSpec::paraboloid_gradient(&m, PotentialVariant::Literal);
    let u = ScalarField::from_expr("cos(x)e^y", |c| c[0].cos() * c[1].exp());
    let t = bochner_residual(&m, &x, &u, &[0.4, -0.6]).unwrap();
    assert!(t.relative_residual() < 1e-12, "{t:?}");
}

#[test]
fn distance_laplacian_matches_model() {
    let h = halfplane();
    for r in [0.5, 1.0, 2.0] {
        for th in [0.3f64, 2.0, 4.0] {
            let p = shoot_geodesic(&h, &[0.0, 1.0], &[th.cos(), th.sin()], r, 1e-3).unwrap();
            let lap = drifted_laplacian_of_distance(&h, &VectorFieldSpec::zero(2), &[0.0, 1.0], p.endpoint()).unwrap();
            let (s, c) = sn_minus_k(1.0, r).unwrap();
            assert!((lap - c / s).abs() < 1e-7, "r={r} θ={th}: {lap} vs {}", 1.0 / r.tanh());
        }
    }
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        s += f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

#[test]
fn counterexample_drift_against_simpson() {
    let fam = CounterexampleFamily::new(0.5, (-12.0, 12.0)).unwrap();
    for x in [-11.0, -0.3, 0.7, 4.0, 12.0] {
        let oracle = simpson(|t| (1.0 + t * t).powf(-0.25), 0.0, x, 20000);
        assert!((fam.b(x).unwrap() - oracle).abs() < 1e-12, "{x}");
    }
    let rep = counterexample_bound_check(0.5, &[1.0, 50.0, 400.0], None).unwrap();
    assert!(rep.pass, "{rep:?}");
}

#[test]
fn adaptive_quadrature_on_a_peak() {
    let v = integrate(|t| 1.0 / (1e-4 + t * t), -1.0, 1.0, QuadOptions::default()).unwrap();
    assert!((v - 2.0 * 100.0 * (100.0f64).atan()).abs() < 1e-9);
}
