use driftgeom::estimates::liouville_decay_experiment;
use driftgeom::estimates::LiouvillePreset;
use driftgeom::geometry::{BoxDomain, ChartManifold, VectorFieldSpec};
use driftgeom::operators::Nonlinearity;
use driftgeom::solver::{solve_elliptic_2d, solve_ode_1d, Boundary, SolveOptions};
use driftgeom::Error;

#[test]
fn semilinear_exponential_solution() {
    // Δu − u = 0 has u = e^{(x+y)/√2}
    let m = ChartManifold::euclidean(2, 2.0);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let bc = Boundary::from_fn("exp((x+y)/sqrt2)", move |p| ((p[0] + p[1]) * s).exp());
    let mut errs = Vec::new();
    for h in [1.0 / 16.0, 1.0 / 32.0] {
        let sol = solve_elliptic_2d(&m, &VectorFieldSpec::zero(2), &Nonlinearity::linear(-1.0), &BoxDomain::square(2, 0.0, 1.0), &bc, h, SolveOptions::default()).unwrap();
        assert!(sol.converged);
        let e = sol.values.iter().enumerate().map(|(k, v)| {
            let (i, j) = sol.mesh.coords(k);
            (v - bc.eval(&sol.mesh.point(i, j))).abs()
        }).fold(0.0, f64::max);
        errs.push(e);
    }
    let ratio = errs[0] / errs[1];
    assert!((3.5..4.5).contains(&ratio), "{errs:?}");
}

#[test]
fn hyperbolic_rotation_drift_keeps_constants() {
    let m = ChartManifold::hyperbolic_halfplane(1.0, BoxDomain::new(vec![-2.0, 0.2], vec![2.0, 3.0]).unwrap()).unwrap();
    let x = VectorFieldSpec::constant(vec![0.3, 0.1]);
    let sol = solve_elliptic_2d(&m, &x, &Nonlinearity::zero(), &BoxDomain::new(vec![-1.0, 0.5], vec![1.0, 2.5]).unwrap(), &Boundary::constant(2.0), 0.125, SolveOptions::default()).unwrap();
    assert!(sol.values.iter().all(|&v| (v - 2.0).abs() < 1e-12));
}

#[test]
fn positivity_guard() {
    let m = ChartManifold::euclidean(2, 2.0);
    let opts = SolveOptions { require_positive: true, ..SolveOptions::default() };
    let bc = Boundary::linear(-0.5, 1.0, 0.0);
    let r = solve_elliptic_2d(&m, &VectorFieldSpec::zero(2), &Nonlinearity::zero(), &BoxDomain::square(2, 0.0, 1.0), &bc, 0.25, opts);
    assert!(matches!(r, Err(Error::Positivity { .. })), "{r:?}");
}

#[test]
fn constant_liouville_run_is_all_zero() {
    let m = ChartManifold::euclidean(2, 5.0);
    let rep = liouville_decay_experiment(&m, &VectorFieldSpec::zero(2), &[0.0, 0.0], &[0.5, 1.0], LiouvillePreset::Constant(3.0), 16, SolveOptions::default()).unwrap();
    assert!(rep.all_zero && rep.pass && rep.decay_exponent.is_none());
}

#[test]
fn ode_log_space_survives_huge_growth() {
    // b = 2x: u = ∫_0^x e^{t²}, so log u(30) ≈ 900 − log 60
    let sol = solve_ode_1d(std::sync::Arc::new(|x| 2.0 * x), 0.0, 1.0, (0.0, 30.0), 1e-12).unwrap();
    let lu = sol.log_u(30.0).unwrap();
    let approx = 900.0 - 60f64.ln() + (1.0 / 1800.0f64).ln_1p();
    assert!((lu - approx).abs() < 1e-5, "{lu} vs {approx}");
}
