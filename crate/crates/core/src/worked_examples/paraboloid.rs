//! The paraboloid `z = x² + y²` with drift `X = ∇Φ`: printed closed forms
//! against the automatic-differentiation pipeline, and the curvature/decay
//! hypotheses of the Liouville theorem under both potentials.

use serde::Serialize;

use crate::error::Result;
use crate::estimates::drift_shell_max;
use crate::geometry::{christoffel, min_eig_ric_x_on_grid, ric_x, ricci, ChartManifold, LocalGeometry, PotentialVariant, VectorFieldSpec};
use crate::jet::Jet;
use crate::linalg::Mat;
use crate::operators::covariant_hessian_jet;
use crate::par;
use crate::quad::integrate;

type M2 = [[f64; 2]; 2];

/// The closed forms exactly as printed for the paraboloid example.
pub struct ParaboloidClosedForms;

fn d(x: f64, y: f64) -> f64 {
    1.0 + 4.0 * x * x + 4.0 * y * y
}

impl ParaboloidClosedForms {
    pub fn g(x: f64, y: f64) -> M2 {
        [[1.0 + 4.0 * x * x, 4.0 * x * y], [4.0 * x * y, 1.0 + 4.0 * y * y]]
    }

    pub fn g_inv(x: f64, y: f64) -> M2 {
        let s = 1.0 / d(x, y);
        [[s * (1.0 + 4.0 * y * y), -s * 4.0 * x * y], [-s * 4.0 * x * y, s * (1.0 + 4.0 * x * x)]]
    }

    pub fn gauss_curvature(x: f64, y: f64) -> f64 {
        4.0 / d(x, y).powi(2)
    }

    pub fn ricci(x: f64, y: f64) -> M2 {
        let k = Self::gauss_curvature(x, y);
        Self::g(x, y).map(|r| r.map(|v| k * v))
    }

    /// `Γ^k_ij` with zero-based indices.
    pub fn christoffel(k: usize, i: usize, j: usize, x: f64, y: f64) -> f64 {
        if i != j {
            return 0.0;
        }
        4.0 * [x, y][k] / d(x, y)
    }

    /// The potential as defined, `½ ∫_0^{x²+y²} dt / (1 + 4t²)`, by quadrature.
    pub fn phi(x: f64, y: f64) -> Result<f64> {
        Ok(0.5 * integrate(|t| 1.0 / (1.0 + 4.0 * t * t), 0.0, x * x + y * y, Default::default())?)
    }

    pub fn grad_eucl_phi(x: f64, y: f64) -> [f64; 2] {
        [0.5 * x / d(x, y), 0.5 * y / d(x, y)]
    }

    pub fn hess_eucl_phi(x: f64, y: f64) -> M2 {
        let s = 1.0 / d(x, y).powi(2);
        [[s * (1.0 - 4.0 * x * x + 4.0 * y * y), -s * 8.0 * x * y], [-s * 8.0 * x * y, s * (1.0 + 4.0 * x * x - 4.0 * y * y)]]
    }

    pub fn hess_phi(x: f64, y: f64) -> M2 {
        let s = 1.0 / d(x, y).powi(2);
        [[s * (1.0 - 8.0 * x * x), -s * 8.0 * x * y], [-s * 8.0 * x * y, s * (1.0 - 8.0 * y * y)]]
    }

    pub fn ric_x(x: f64, y: f64) -> M2 {
        let s = 4.0 / d(x, y).powi(2);
        [[s * (1.0 + 2.0 * x * x), s * 2.0 * x * y], [s * 2.0 * x * y, s * (1.0 + 2.0 * y * y)]]
    }

    pub fn x_norm_sq(x: f64, y: f64) -> f64 {
        0.25 * (x * x + y * y) / d(x, y).powi(3)
    }
}

/// Values of one quantity at a point, flattened.
type Eval = Box<dyn Fn(f64, f64) -> Result<Vec<f64>> + Sync + Send>;

fn flat(m: M2) -> Vec<f64> {
    vec![m[0][0], m[0][1], m[1][0], m[1][1]]
}

fn flat_mat(m: &Mat<f64>) -> Vec<f64> {
    vec![m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]]
}

#[derive(Clone, Debug, Serialize)]
pub struct Discrepancy {
    pub quantity: String,
    /// Potential the AD side was built from (only for drift quantities).
    pub variant: Option<PotentialVariant>,
    /// Whether the printed form is expected to agree with AD.
    pub asserted: bool,
    pub max_abs_deviation: f64,
    pub at: [f64; 2],
    pub tolerance: f64,
    /// Asserted rows: deviation within tolerance. Informational rows: always true.
    pub ok: bool,
    pub flagged: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpotValue {
    pub name: String,
    pub point: [f64; 2],
    pub printed: f64,
    pub ad: f64,
    pub expected: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClosedFormReport {
    pub grid_points: usize,
    pub rows: Vec<Discrepancy>,
    pub spot_values: Vec<SpotValue>,
    /// Informational quantities whose deviation exceeds the tolerance.
    pub inconsistencies: Vec<String>,
    pub pass: bool,
}

fn ad_side(m: &ChartManifold, variant: Option<PotentialVariant>, name: &str) -> Eval {
    let m = m.clone();
    let x = variant.map(|v| VectorFieldSpec::paraboloid_gradient(&m, v));
    let pot = variant.map(|v| v.potential());
    match name {
        "g" => Box::new(move |a, b| Ok(flat_mat(&m.metric_at(&[a, b])?))),
        "g_inv" => Box::new(move |a, b| Ok(flat_mat(&m.metric_at(&[a, b])?.inverse()?))),
        "K" => Box::new(move |a, b| {
            // K = ½ scalar curvature in dimension 2
            let p = [a, b];
            let gi = m.metric_at(&p)?.inverse()?;
            let r = ricci(&m, &p)?;
            Ok(vec![0.5 * (0..2).flat_map(|i| (0..2).map(move |j| (i, j))).map(|(i, j)| gi[(i, j)] * r[(i, j)]).sum::<f64>()])
        }),
        "Ric" => Box::new(move |a, b| Ok(flat_mat(&ricci(&m, &[a, b])?))),
        "Phi" => Box::new(move |a, b| Ok(vec![pot.as_ref().expect("variant")(&Jet::vars(&[a, b], 0)).value()])),
        "grad_eucl_Phi" => Box::new(move |a, b| {
            let j = pot.as_ref().expect("variant")(&Jet::vars(&[a, b], 1));
            Ok(vec![j.d1(0), j.d1(1)])
        }),
        "Hess_eucl_Phi" => Box::new(move |a, b| {
            let j = pot.as_ref().expect("variant")(&Jet::vars(&[a, b], 2));
            Ok(vec![j.d2(0, 0), j.d2(0, 1), j.d2(1, 0), j.d2(1, 1)])
        }),
        "Hess_Phi" => Box::new(move |a, b| {
            let geo = LocalGeometry::at(&m, &[a, b], 0)?;
            let j = pot.as_ref().expect("variant")(&Jet::vars(&[a, b], 2));
            Ok(flat_mat(&covariant_hessian_jet(&geo, &j).values()))
        }),
        "Ric_X" => Box::new(move |a, b| Ok(flat_mat(&ric_x(&m, x.as_ref().expect("variant"), &[a, b])?))),
        "|X|^2" => Box::new(move |a, b| Ok(vec![x.as_ref().expect("variant").norm_at(&m, &[a, b])?.powi(2)])),
        _ => {
            let (k, i, j) = christoffel_index(name).expect("known quantity");
            Box::new(move |a, b| Ok(vec![christoffel(&m, &[a, b])?.get(k, i, j)]))
        }
    }
}

fn christoffel_index(name: &str) -> Option<(usize, usize, usize)> {
    let rest = name.strip_prefix("Gamma^")?;
    let b: Vec<usize> = rest.chars().filter_map(|c| c.to_digit(10)).map(|d| d as usize - 1).collect();
    (b.len() == 3).then(|| (b[0], b[1], b[2]))
}

const CHRISTOFFELS: [&str; 6] = ["Gamma^1_11", "Gamma^1_12", "Gamma^1_22", "Gamma^2_11", "Gamma^2_12", "Gamma^2_22"];

fn printed_side(name: &str) -> Eval {
    match name {
        "g" => Box::new(|a, b| Ok(flat(ParaboloidClosedForms::g(a, b)))),
        "g_inv" => Box::new(|a, b| Ok(flat(ParaboloidClosedForms::g_inv(a, b)))),
        "K" => Box::new(|a, b| Ok(vec![ParaboloidClosedForms::gauss_curvature(a, b)])),
        "Ric" => Box::new(|a, b| Ok(flat(ParaboloidClosedForms::ricci(a, b)))),
        "Phi" => Box::new(|a, b| Ok(vec![ParaboloidClosedForms::phi(a, b)?])),
        "grad_eucl_Phi" => Box::new(|a, b| Ok(ParaboloidClosedForms::grad_eucl_phi(a, b).to_vec())),
        "Hess_eucl_Phi" => Box::new(|a, b| Ok(flat(ParaboloidClosedForms::hess_eucl_phi(a, b)))),
        "Hess_Phi" => Box::new(|a, b| Ok(flat(ParaboloidClosedForms::hess_phi(a, b)))),
        "Ric_X" => Box::new(|a, b| Ok(flat(ParaboloidClosedForms::ric_x(a, b)))),
        "|X|^2" => Box::new(|a, b| Ok(vec![ParaboloidClosedForms::x_norm_sq(a, b)])),
        _ => {
            let (k, i, j) = christoffel_index(name).expect("known quantity");
            Box::new(move |a, b| Ok(vec![ParaboloidClosedForms::christoffel(k, i, j, a, b)]))
        }
    }
}

fn compare(m: &ChartManifold, grid: &[[f64; 2]], name: &str, variant: Option<PotentialVariant>, asserted: bool, tol: f64) -> Result<Discrepancy> {
    let ad = ad_side(m, variant, name);
    let printed = printed_side(name);
    let devs: Vec<Result<f64>> = par::map_slice(grid, |&[a, b]| {
        let (u, v) = (ad(a, b)?, printed(a, b)?);
        Ok(u.iter().zip(&v).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max))
    });
    let devs: Vec<f64> = devs.into_iter().collect::<Result<_>>()?;
    let mut best = 0;
    for (k, &v) in devs.iter().enumerate() {
        if v > devs[best] {
            best = k;
        }
    }
    let dev = devs[best];
    Ok(Discrepancy {
        quantity: name.to_string(),
        variant,
        asserted,
        max_abs_deviation: dev,
        at: grid[best],
        tolerance: tol,
        ok: !asserted || dev <= tol,
        flagged: dev > tol,
    })
}

/// Printed closed forms against AD on `grid`. The metric, its inverse,
/// curvature and the Christoffel symbols are asserted; quantities built from
/// `Φ` are compared against both potentials and reported.
pub fn paraboloid_printed_vs_ad(grid: &[[f64; 2]]) -> Result<ClosedFormReport> {
    let half = grid.iter().flat_map(|p| p.iter().map(|v| v.abs())).fold(0.0, f64::max);
    let m = ChartManifold::paraboloid(half + 0.5);
    let tol = 1e-10;
    let mut rows = Vec::new();
    for name in ["g", "g_inv", "K", "Ric"].into_iter().chain(CHRISTOFFELS) {
        rows.push(compare(&m, grid, name, None, true, tol)?);
    }
    rows.push(compare(&m, grid, "Phi", Some(PotentialVariant::Literal), true, tol)?);
    for variant in [PotentialVariant::Literal, PotentialVariant::Alternate] {
        for name in ["grad_eucl_Phi", "Hess_eucl_Phi", "Hess_Phi", "Ric_X", "|X|^2"] {
            rows.push(compare(&m, grid, name, Some(variant), false, tol)?);
        }
    }
    let x_lit = VectorFieldSpec::paraboloid_gradient(&m, PotentialVariant::Literal);
    let spot_values = vec![
        SpotValue {
            name: "K".into(),
            point: [0.0, 0.0],
            printed: ParaboloidClosedForms::gauss_curvature(0.0, 0.0),
            ad: ad_side(&m, None, "K")(0.0, 0.0)?[0],
            expected: 4.0,
        },
        SpotValue {
            name: "Gamma^1_11".into(),
            point: [1.0, 0.0],
            printed: ParaboloidClosedForms::christoffel(0, 0, 0, 1.0, 0.0),
            ad: christoffel(&m, &[1.0, 0.0])?.get(0, 0, 0),
            expected: 0.8,
        },
        SpotValue {
            name: "Gamma^1_22".into(),
            point: [1.0, 0.0],
            printed: ParaboloidClosedForms::christoffel(0, 1, 1, 1.0, 0.0),
            ad: christoffel(&m, &[1.0, 0.0])?.get(0, 1, 1),
            expected: 0.8,
        },
        SpotValue {
            name: "|X|^2".into(),
            point: [1.0, 0.0],
            printed: ParaboloidClosedForms::x_norm_sq(1.0, 0.0),
            ad: x_lit.norm_at(&m, &[1.0, 0.0])?.powi(2),
            expected: 0.002,
        },
    ];
    let inconsistencies: Vec<String> = rows
        .iter()
        .filter(|r| !r.asserted && r.flagged)
        .map(|r| format!("{} ({})", r.quantity, r.variant.map_or("-", |v| v.name())))
        .collect();
    let spots_ok = spot_values.iter().all(|s| s.printed == s.expected && (s.name == "|X|^2" || (s.ad - s.expected).abs() <= tol));
    Ok(ClosedFormReport {
        grid_points: grid.len(),
        pass: rows.iter().all(|r| r.ok) && spots_ok && !inconsistencies.is_empty(),
        rows,
        spot_values,
        inconsistencies,
    })
}

/// `n × n` grid on `[−w, w]²`.
pub fn square_grid(w: f64, n: usize) -> Vec<[f64; 2]> {
    let step = 2.0 * w / (n - 1) as f64;
    (0..n).flat_map(|i| (0..n).map(move |j| [-w + i as f64 * step, -w + j as f64 * step])).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct VariantHypotheses {
    pub variant: PotentialVariant,
    pub min_ric_x_eigenvalue: f64,
    pub argmin: Vec<f64>,
    pub x_norm_at_vertex: f64,
    pub shell_max: Vec<(f64, f64)>,
    pub ric_x_nonnegative: bool,
    pub decreasing: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct HypothesisReport {
    pub tolerance: f64,
    pub variants: Vec<VariantHypotheses>,
    /// Shell maxima of `|X|` from the printed `|X|²` formula.
    pub printed_shell_max: Vec<(f64, f64)>,
    pub printed_decreasing: bool,
    pub satisfying: Vec<PotentialVariant>,
    pub pass: bool,
}

/// `Ric_X ⪰ 0` on `grid` and strictly decreasing shell maxima of `|X|` over
/// geodesic spheres about the vertex, for both potentials.
pub fn paraboloid_hypothesis_check(grid: &[[f64; 2]], radii: &[f64]) -> Result<HypothesisReport> {
    let half = grid.iter().flat_map(|p| p.iter().map(|v| v.abs())).fold(0.0, f64::max);
    let reach = radii.iter().copied().fold(half, f64::max);
    let m = ChartManifold::paraboloid(reach + 0.5);
    let pts: Vec<Vec<f64>> = grid.iter().map(|p| p.to_vec()).collect();
    let tolerance = 1e-9;
    let dirs = 32;
    let mut variants = Vec::new();
    for variant in [PotentialVariant::Literal, PotentialVariant::Alternate] {
        let x = VectorFieldSpec::paraboloid_gradient(&m, variant);
        let (min, argmin) = min_eig_ric_x_on_grid(&m, &x, &pts)?;
        let shell_max: Vec<(f64, f64)> =
            radii.iter().map(|&r| Ok((r, drift_shell_max(&m, &x, &[0.0, 0.0], r, dirs)?))).collect::<Result<_>>()?;
        variants.push(VariantHypotheses {
            variant,
            min_ric_x_eigenvalue: min,
            argmin,
            x_norm_at_vertex: x.norm_at(&m, &[0.0, 0.0])?,
            ric_x_nonnegative: min >= -tolerance,
            decreasing: shell_max.windows(2).all(|w| w[1].1 < w[0].1),
            shell_max,
        });
    }
    let printed_shell_max: Vec<(f64, f64)> = radii
        .iter()
        .map(|&r| {
            let mut worst: f64 = 0.0;
            for k in 0..dirs {
                let th = 2.0 * std::f64::consts::PI * k as f64 / dirs as f64;
                let p = crate::geodesics::shoot_geodesic(&m, &[0.0, 0.0], &[th.cos(), th.sin()], r, 1e-2)?;
                let e = p.endpoint();
                worst = worst.max(ParaboloidClosedForms::x_norm_sq(e[0], e[1]).sqrt());
            }
            Ok((r, worst))
        })
        .collect::<Result<_>>()?;
    let satisfying: Vec<PotentialVariant> =
        variants.iter().filter(|v| v.ric_x_nonnegative && v.decreasing).map(|v| v.variant).collect();
    Ok(HypothesisReport {
        tolerance,
        printed_decreasing: printed_shell_max.windows(2).all(|w| w[1].1 < w[0].1),
        printed_shell_max,
        pass: !satisfying.is_empty(),
        satisfying,
        variants,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printed_spot_values() {
        assert_eq!(ParaboloidClosedForms::gauss_curvature(0.0, 0.0), 4.0);
        assert_eq!(ParaboloidClosedForms::christoffel(0, 0, 0, 1.0, 0.0), 0.8);
        assert_eq!(ParaboloidClosedForms::x_norm_sq(1.0, 0.0), 0.002);
    }

    #[test]
    fn small_grid_report() {
        let rep = paraboloid_printed_vs_ad(&square_grid(3.0, 7)).unwrap();
        assert!(rep.pass, "{:#?}", rep.rows.iter().filter(|r| !r.ok).collect::<Vec<_>>());
        assert!(rep.inconsistencies.iter().any(|s| s.starts_with("|X|^2")));
        let x2 = rep.spot_values.iter().find(|s| s.name == "|X|^2").unwrap();
        assert!((x2.ad - 0.008).abs() < 1e-15);
    }

    #[test]
    fn hypotheses_hold_for_some_variant() {
        let rep = paraboloid_hypothesis_check(&square_grid(3.0, 9), &[1.0, 2.0, 3.0]).unwrap();
        assert!(rep.pass);
        assert!(rep.variants.iter().all(|v| v.x_norm_at_vertex == 0.0));
        assert!(rep.printed_decreasing);
    }
}
