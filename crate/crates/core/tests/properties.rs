use std::sync::Arc;

use driftgeom::config::Config;
use driftgeom::estimates::{raw_bracket, CubicCoeffs, EstimateParams};
use driftgeom::geometry::fd::christoffel_fd;
use driftgeom::geometry::{christoffel, ric_x, BoxDomain, ChartManifold, GraphHeight, ChartKind, PotentialVariant, VectorFieldSpec};
use driftgeom::jet::Jet;
use driftgeom::operators::{drifted_laplacian, ScalarField};
use driftgeom::report::Csv;
use proptest::prelude::*;

fn manifolds() -> Vec<ChartManifold> {
    vec![
        ChartManifold::euclidean(2, 3.0),
        ChartManifold::hyperbolic_halfplane(1.0, BoxDomain::new(vec![-3.0, 0.2], vec![3.0, 4.0]).unwrap()).unwrap(),
        ChartManifold::paraboloid(3.0),
        ChartManifold::new(
            ChartKind::GraphSurface(GraphHeight::Custom {
                name: "bump".into(),
                f: Arc::new(|x: &[Jet]| (-(x[0] * x[0] + x[1] * x[1] * 0.5)).exp()),
                injectivity_radius: 1.0,
            }),
            BoxDomain::square(2, -3.0, 3.0),
        )
        .unwrap(),
    ]
}

fn point() -> impl Strategy<Value = [f64; 2]> {
    (-2.0..2.0f64, 0.5..2.0f64).prop_map(|(x, y)| [x, y])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn christoffels_are_torsion_free(p in point(), which in 0usize..4) {
        let m = &manifolds()[which];
        prop_assert!(christoffel(m, &p).unwrap().max_torsion() <= 1e-14);
    }

    #[test]
    fn ad_christoffels_match_finite_differences(p in point(), which in 0usize..4) {
        let m = &manifolds()[which];
        let ad = christoffel(m, &p).unwrap();
        let fd = christoffel_fd(m, &p, 1e-4).unwrap();
        for (a, f) in ad.data.iter().zip(&fd.data) {
            prop_assert!((a - f).abs() <= 1e-6 * (1.0 + a.abs()), "{a} vs {f}");
        }
    }

    #[test]
    fn ric_x_is_symmetric(p in point(), which in 0usize..4) {
        let m = &manifolds()[which];
        let x = VectorFieldSpec::paraboloid_gradient(m, PotentialVariant::Alternate);
        prop_assert!(ric_x(m, &x, &p).unwrap().max_asymmetry() <= 1e-12);
    }

    #[test]
    fn drifted_laplacian_is_linear(p in point(), a in -3.0..3.0f64, b in -3.0..3.0f64, which in 0usize..4) {
        let m = &manifolds()[which];
        let x = VectorFieldSpec::constant(vec![0.7, -0.4]);
        let u = ScalarField::from_expr("u", |c| (c[0] * 0.5).sin() * c[1]);
        let v = ScalarField::from_expr("v", |c| (c[0] * c[1] * 0.3).exp());
        let w = ScalarField::from_expr("w", move |c| (c[0] * 0.5).sin() * c[1] * a + (c[0] * c[1] * 0.3).exp() * b);
        let lu = drifted_laplacian(m, &x, &u, &p).unwrap();
        let lv = drifted_laplacian(m, &x, &v, &p).unwrap();
        let lw = drifted_laplacian(m, &x, &w, &p).unwrap();
        prop_assert!((lw - a * lu - b * lv).abs() <= 1e-12 * (1.0 + lw.abs() + (a * lu).abs() + (b * lv).abs()));
    }

    #[test]
    fn cubic_sign_pattern_and_roots(beta in 1e-6..50.0f64, lambda in 1e-6..50.0f64, a in 0.0..500.0f64) {
        let c = CubicCoeffs::from_beta_lambda_a(beta, lambda, a).unwrap();
        prop_assert!(c.p < 0.0 && c.q < 0.0);
        let floor = 1104.0 * beta * beta * lambda * lambda - 1e-9 * c.p.abs().powi(3).max(1.0);
        prop_assert!(c.discriminant() >= floor);
        let r = c.roots().unwrap();
        prop_assert_eq!(r.iter().filter(|&&t| t > 0.0).count(), 1);
        prop_assert!(r[2] <= c.root_bound() + 1e-12);
        for t in r {
            let scale = t.abs().powi(3) + c.p.abs() * t.abs() + c.q.abs();
            prop_assert!((t * t * t + c.p * t + c.q).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn bracket_is_monotone(
        n in 2usize..6, k in 0.0..5.0f64, lambda in 0.0..5.0f64, alpha in -5.0..5.0f64, beta in 0.0..5.0f64,
        r in 0.1..10.0f64, dk in 0.0..1.0f64, dl in 0.0..1.0f64, da in 0.0..1.0f64, db in 0.0..1.0f64, dr in 0.0..1.0f64,
    ) {
        let base = raw_bracket(&EstimateParams::new(n, k, lambda, alpha, beta, r).unwrap());
        let up = raw_bracket(&EstimateParams::new(n, k + dk, lambda + dl, alpha + da, beta + db, r).unwrap());
        let wider = raw_bracket(&EstimateParams::new(n, k, lambda, alpha, beta, r + dr).unwrap());
        prop_assert!(up >= base);
        prop_assert!(wider <= base);
    }

    #[test]
    fn csv_round_trips(rows in prop::collection::vec(prop::collection::vec(prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO, 3), 0..20)) {
        let c = Csv::new("t.csv", &["a", "b", "c"], rows);
        let bytes = c.to_bytes().unwrap();
        let back = Csv::parse("t.csv", std::str::from_utf8(&bytes).unwrap()).unwrap();
        prop_assert_eq!(&back, &c);
        prop_assert_eq!(back.to_bytes().unwrap(), bytes);
    }

    #[test]
    fn config_canonical_form_round_trips(entries in prop::collection::btree_map("[a-z][a-z0-9_]{0,8}", "[a-zA-Z0-9.,:-]{0,12}", 0..8)) {
        let text: String = entries.iter().map(|(k, v)| format!("  {k} =  {v}\n")).collect();
        let c: Config = text.parse().unwrap();
        let again: Config = c.canonical().parse().unwrap();
        prop_assert_eq!(c.canonical(), again.canonical());
        prop_assert_eq!(c.hash("e"), again.hash("e"));
    }
}
