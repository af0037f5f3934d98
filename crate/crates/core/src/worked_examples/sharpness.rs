//! `R^n` with `X = ∂/∂x_1` and `u = e^{x_1}`: a positive `X`-harmonic
//! function of exponential growth with `|∇ log u| ≡ 1`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::estimates::omega_growth;
use crate::geometry::{ric_x, BoxDomain, ChartManifold, VectorFieldSpec};
use crate::operators::{drifted_laplacian, Nonlinearity, ScalarField};
use crate::solver::{log_gradient_sup, solve_elliptic_2d, Boundary, Region, SolveOptions};

#[derive(Clone, Debug, Serialize)]
pub struct SharpnessReport {
    pub samples: usize,
    pub max_abs_laplacian: f64,
    pub laplacian_tolerance: f64,
    pub ric_x_zero: bool,
    pub omega_radii: Vec<f64>,
    pub omega: f64,
    pub omega_tolerance: f64,
    /// `sqrt(sup |∇u|²/u²)` from the grid solve on `[0,1]²` with `h = 1/64`.
    pub grid_log_gradient: f64,
    pub grid_tolerance: f64,
    /// `sup |∇ log u|² / (Ω + Ω²)`: the smallest constant consistent with the
    /// growth bound.
    pub min_consistent_cn: f64,
    pub pass: bool,
}

pub fn sharpness_example_check() -> Result<SharpnessReport> {
    let m = ChartManifold::euclidean(2, 40.0);
    let x = VectorFieldSpec::constant(vec![1.0, 0.0]).with_global_bound(1.0);
    let u = ScalarField::from_expr("exp(x1)", |c| c[0].exp());
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let pts: Vec<[f64; 2]> = (0..100).map(|_| [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)]).collect();
    let mut max_abs_laplacian: f64 = 0.0;
    let mut ric_x_zero = true;
    for p in &pts {
        max_abs_laplacian = max_abs_laplacian.max(drifted_laplacian(&m, &x, &u, p)?.abs() / p[0].exp());
        let r = ric_x(&m, &x, p)?;
        ric_x_zero &= (0..2).all(|i| (0..2).all(|j| r[(i, j)] == 0.0));
    }
    let radii = vec![4.0, 8.0, 16.0, 32.0];
    let omega = omega_growth(&m, &u, &[0.0, 0.0], &radii, 16)?.omega;
    let unit = BoxDomain::square(2, 0.0, 1.0);
    let sol = solve_elliptic_2d(&m, &x, &Nonlinearity::zero(), &unit, &Boundary::exp_x(), 1.0 / 64.0, SolveOptions::default())?;
    let grid_log_gradient = log_gradient_sup(&sol, &m, &Region::Rect(unit))?.value.sqrt();
    let (laplacian_tolerance, omega_tolerance, grid_tolerance) = (1e-10, 5e-2, 2e-3);
    Ok(SharpnessReport {
        samples: pts.len(),
        max_abs_laplacian,
        laplacian_tolerance,
        ric_x_zero,
        omega_radii: radii,
        omega,
        omega_tolerance,
        grid_log_gradient,
        grid_tolerance,
        min_consistent_cn: 1.0 / (omega + omega * omega),
        pass: max_abs_laplacian <= laplacian_tolerance
            && ric_x_zero
            && (omega - 1.0).abs() <= omega_tolerance
            && (grid_log_gradient - 1.0).abs() <= grid_tolerance,
    })
}

#[cfg(test)]
mod tests {
    #[test]
    fn sharpness_holds() {
        let r = super::sharpness_example_check().unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.min_consistent_cn <= 0.5 + 0.05);
    }
}
