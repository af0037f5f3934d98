//! Quantitative side of the gradient estimate: the bracket
//! `C_n (max{α + 3/2 (n−1) K, 0} + β + Λ² + 1/R²)`, the depressed cubic
//! `t³ + p t + q` from the maximum-principle argument, the Harnack factor,
//! the growth rate `Ω(u)`, empirical constants, and the solver-backed
//! gradient and Liouville experiments.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{min_eig_ric_x_on_grid, ric_x_lower_bound_on_grid, BoxDomain, ChartManifold, VectorFieldSpec};
use crate::geodesics::shoot_geodesic;
use crate::jet::Jet;
use crate::operators::{Nonlinearity, ScalarField};
use crate::par;
use crate::solver::{log_gradient_sup, solve_on_mesh, Boundary, Mesh, Region, SolveOptions};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EstimateParams {
    pub n: usize,
    pub k: f64,
    pub lambda: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Ball radius; `f64::INFINITY` selects the global estimate.
    pub r: f64,
    pub cn: f64,
}

impl EstimateParams {
    /// Parameters with the default `C_n = 8n`.
    pub fn new(n: usize, k: f64, lambda: f64, alpha: f64, beta: f64, r: f64) -> Result<Self> {
        EstimateParams { n, k, lambda, alpha, beta, r, cn: 8.0 * n as f64 }.validated()
    }

    pub fn with_cn(mut self, cn: f64) -> Result<Self> {
        self.cn = cn;
        self.validated()
    }

    pub fn validated(self) -> Result<Self> {
        let bad = |what: &str| Err(Error::Usage(format!("invalid estimate parameters: {what}")));
        if self.n < 2 {
            return bad("n must be >= 2");
        }
        if !(self.k >= 0.0) || !(self.lambda >= 0.0) || !(self.beta >= 0.0) {
            return bad("K, Λ and β must be nonnegative");
        }
        if !self.alpha.is_finite() || !self.k.is_finite() || !self.lambda.is_finite() || !self.beta.is_finite() {
            return bad("α, K, Λ, β must be finite");
        }
        if !(self.r > 0.0) {
            return bad("R must be positive (or infinite)");
        }
        if !(self.cn > 0.0) || !self.cn.is_finite() {
            return bad("C_n must be positive");
        }
        Ok(self)
    }

    /// `α̃ = max{α + 3/2 (n−1) K, 0}`
    pub fn alpha_tilde(&self) -> f64 {
        (self.alpha + 1.5 * (self.n as f64 - 1.0) * self.k).max(0.0)
    }

    /// `γ = √(α̃ + β)`
    pub fn gamma(&self) -> f64 {
        (self.alpha_tilde() + self.beta).sqrt()
    }
}

/// The bracket without `C_n`; `1/R²` vanishes for `R = ∞`.
pub fn raw_bracket(p: &EstimateParams) -> f64 {
    let inv_r2 = if p.r.is_infinite() { 0.0 } else { 1.0 / (p.r * p.r) };
    p.alpha_tilde() + p.beta + p.lambda * p.lambda + inv_r2
}

pub fn gradient_bound_bracket(p: &EstimateParams) -> f64 {
    p.cn * raw_bracket(p)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CubicProvenance {
    pub beta: f64,
    pub lambda: f64,
    pub a: f64,
}

/// `t³ + p t + q`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CubicCoeffs {
    pub p: f64,
    pub q: f64,
    pub a: f64,
    pub provenance: Option<CubicProvenance>,
}

impl CubicCoeffs {
    pub fn new(p: f64, q: f64) -> Self {
        CubicCoeffs { p, q, a: 0.0, provenance: None }
    }

    /// `p = −(4β + 8Λ² + A)`, `q = −4Λβ`.
    pub fn from_beta_lambda_a(beta: f64, lambda: f64, a: f64) -> Result<Self> {
        if !(beta >= 0.0) || !(lambda >= 0.0) || !(a >= 0.0) {
            return Err(Error::Usage(format!("need β, Λ, A >= 0 (got {beta}, {lambda}, {a})")));
        }
        Ok(CubicCoeffs {
            p: -(4.0 * beta + 8.0 * lambda * lambda + a),
            q: -4.0 * lambda * beta,
            a,
            provenance: Some(CubicProvenance { beta, lambda, a }),
        })
    }

    /// Uses the `R`-independent part `A = 2n α̃ + 2n Λ²`.
    pub fn from_params(p: &EstimateParams) -> Result<Self> {
        let n = p.n as f64;
        CubicCoeffs::from_beta_lambda_a(p.beta, p.lambda, 2.0 * n * p.alpha_tilde() + 2.0 * n * p.lambda * p.lambda)
    }

    /// `−(4p³ + 27q²)`
    pub fn discriminant(&self) -> f64 {
        -(4.0 * self.p.powi(3) + 27.0 * self.q * self.q)
    }

    /// `(2/√3) √(−p)`, the bound on the largest root for `p < 0`, `q <= 0`.
    pub fn root_bound(&self) -> f64 {
        2.0 / 3f64.sqrt() * (-self.p).sqrt()
    }

    /// The three real roots, ascending.
    pub fn roots(&self) -> Result<[f64; 3]> {
        let (p, q) = (self.p, self.q);
        if p >= 0.0 {
            return match (p == 0.0, q == 0.0) {
                (true, true) => Ok([0.0; 3]),
                _ => Err(Error::domain(&[p, q], "cubic has complex roots")),
            };
        }
        if self.discriminant() < -1e-12 * p.abs().powi(3).max(1.0) {
            return Err(Error::domain(&[p, q], "negative discriminant: complex roots"));
        }
        let s = (-p).sqrt();
        if q == 0.0 {
            return Ok([-s, 0.0, s]);
        }
        let mut arg = 3.0 * 3f64.sqrt() * q / (2.0 * p * s);
        if arg.abs() > 1.0 {
            if arg.abs() > 1.0 + 1e-12 {
                return Err(Error::domain(&[p, q], "arcsin argument outside [-1, 1]"));
            }
            arg = arg.signum();
        }
        let base = arg.asin() / 3.0;
        let amp = -2.0 * (-p / 3.0).sqrt();
        let mut r = [-1.0, 0.0, 1.0].map(|l: f64| amp * (base + 2.0 * l * std::f64::consts::PI / 3.0).sin());
        r.sort_by(f64::total_cmp);
        Ok(r)
    }
}

pub fn depressed_cubic_discriminant(c: &CubicCoeffs) -> f64 {
    c.discriminant()
}

pub fn depressed_cubic_roots(c: &CubicCoeffs) -> Result<[f64; 3]> {
    c.roots()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HarnackConstants {
    pub c1: f64,
    pub c2: f64,
}

impl HarnackConstants {
    /// `C1 = √C_n`, `C2 = 1`.
    pub fn defaults(p: &EstimateParams) -> Self {
        HarnackConstants { c1: p.cn.sqrt(), c2: 1.0 }
    }
}

/// `C2 exp(C1 (γ + Λ) d)`
pub fn harnack_factor(p: &EstimateParams, distance: f64, c: HarnackConstants) -> Result<f64> {
    if !(distance >= 0.0) {
        return Err(Error::Usage(format!("distance must be >= 0, got {distance}")));
    }
    if !(c.c1 > 0.0) || !(c.c2 > 0.0) {
        return Err(Error::Usage("Harnack constants must be positive".into()));
    }
    Ok(c.c2 * (c.c1 * (p.gamma() + p.lambda) * distance).exp())
}

#[derive(Clone, Debug, Serialize)]
pub struct OmegaReport {
    pub radii: Vec<f64>,
    pub sup_log_u_plus_1: Vec<f64>,
    /// Radii used by the slope fit.
    pub fitted_radii: Vec<f64>,
    pub omega: f64,
}

/// Least-squares slope of `y` against `x`.
pub fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Slope of `R ↦ sup_{B_R(o)} log(u + 1)` over the largest half of `radii`.
/// Balls are sampled along `directions` shot geodesics.
pub fn omega_growth(m: &ChartManifold, u: &ScalarField, o: &[f64], radii: &[f64], directions: usize) -> Result<OmegaReport> {
    if radii.len() < 3 || radii.windows(2).any(|w| !(w[1] > w[0])) || !(radii[0] > 0.0) {
        return Err(Error::Usage("omega_growth needs >= 3 increasing positive radii".into()));
    }
    let per_radius: Vec<Result<f64>> = par::map_slice(radii, |&r| {
        let mut sup = log_plus_1(u, o)?;
        for d in 0..directions.max(1) {
            let th = 2.0 * std::f64::consts::PI * d as f64 / directions.max(1) as f64;
            let path = shoot_geodesic(m, o, &[th.cos(), th.sin()], r, r / 400.0)?;
            for s in &path.samples {
                sup = sup.max(log_plus_1(u, &s.point)?);
            }
        }
        Ok(sup)
    });
    let sups: Vec<f64> = per_radius.into_iter().collect::<Result<_>>()?;
    let half = radii.len().div_ceil(2).max(2);
    let start = radii.len() - half;
    let omega = ls_slope(&radii[start..], &sups[start..]);
    Ok(OmegaReport { radii: radii.to_vec(), sup_log_u_plus_1: sups, fitted_radii: radii[start..].to_vec(), omega })
}

/// `log(u + 1)`; closed-form fields are evaluated as `log u + log(1 + 1/u)`
/// through `log u` when that is cheaper to keep finite.
fn log_plus_1(u: &ScalarField, p: &[f64]) -> Result<f64> {
    let v = u.eval(p)?;
    if !(v > 0.0) {
        return Err(Error::Positivity { value: v, at: p.to_vec() });
    }
    Ok(if v > 1.0 { v.ln() + (1.0 / v).ln_1p() } else { v.ln_1p() })
}

#[derive(Clone, Debug, Serialize)]
pub struct EmpiricalConstant {
    pub ratios: Vec<f64>,
    pub max_ratio: f64,
}

/// `max measured / bracket` over `(measured, bracket)` pairs.
pub fn empirical_constant(experiments: &[(f64, f64)]) -> Result<EmpiricalConstant> {
    if experiments.is_empty() {
        return Err(Error::Usage("no experiments".into()));
    }
    if let Some((_, b)) = experiments.iter().find(|(_, b)| !(*b > 0.0)) {
        return Err(Error::Usage(format!("bracket {b} is not positive")));
    }
    let ratios: Vec<f64> = experiments.iter().map(|(m, b)| m / b).collect();
    let max_ratio = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(EmpiricalConstant { ratios, max_ratio })
}

/// One solve on the chart square `o ± 2R` and the log-gradient sup on the
/// metric ball `B_{ρ}(o)`.
#[derive(Clone, Debug, Serialize)]
pub struct BallExperiment {
    pub r: f64,
    pub inner_radius: f64,
    pub rect: BoxDomain,
    pub intervals: usize,
    pub boundary: String,
    pub q_sup: f64,
    pub q_argmax: Vec<f64>,
    pub inner_nodes: usize,
    pub residual_inf: f64,
    pub newton_iterations: usize,
    pub min_value: f64,
    pub max_value: f64,
    pub max_principle: bool,
}

fn ball_region(m: &ChartManifold, o: &[f64], radius: f64) -> Region {
    let o = o.to_vec();
    match m.closed_form_distance(&o) {
        Some(d) => Region::Predicate(Arc::new(move |p: &[f64]| {
            let pj: Vec<Jet> = p.iter().map(|&v| Jet::constant_with_order(v, 0)).collect();
            d(&pj).value() <= radius
        })),
        // chart boxes of half-width ρ contain metric balls of radius ρ on the
        // graph-type charts
        None => Region::Rect(BoxDomain {
            lo: o.iter().map(|v| v - radius).collect(),
            hi: o.iter().map(|v| v + radius).collect(),
        }),
    }
}

#[allow(clippy::too_many_arguments)]
pub fn ball_experiment(
    m: &ChartManifold,
    x: &VectorFieldSpec,
    nl: &Nonlinearity,
    o: &[f64],
    r: f64,
    inner_radius: f64,
    boundary: &Boundary,
    intervals: usize,
    opts: SolveOptions,
) -> Result<BallExperiment> {
    let rect = BoxDomain { lo: o.iter().map(|v| v - 2.0 * r).collect(), hi: o.iter().map(|v| v + 2.0 * r).collect() };
    let mesh = Mesh::with_intervals(&rect, intervals, intervals);
    let sol = solve_on_mesh(m, x, nl, &mesh, boundary, opts)?;
    let lg = log_gradient_sup(&sol, m, &ball_region(m, o, inner_radius))?;
    Ok(BallExperiment {
        r,
        inner_radius,
        rect,
        intervals,
        boundary: boundary.name.clone(),
        q_sup: lg.value,
        q_argmax: lg.argmax,
        inner_nodes: lg.nodes,
        residual_inf: sol.residual_inf,
        newton_iterations: sol.iterations,
        min_value: sol.min_value(),
        max_value: sol.max_value(),
        max_principle: sol.satisfies_max_principle(1e-12),
    })
}

/// Boundary data for the Liouville experiment at radius `R`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LiouvillePreset {
    /// `1 + ½ · x / (2R)`
    Oscillation,
    Constant(f64),
}

impl LiouvillePreset {
    pub fn boundary(self, r: f64) -> Boundary {
        match self {
            LiouvillePreset::Oscillation => Boundary::from_fn(format!("1+x/(4*{r})"), move |p| 1.0 + 0.5 * p[0] / (2.0 * r)),
            LiouvillePreset::Constant(c) => Boundary::constant(c),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LiouvilleReport {
    pub manifold: String,
    pub drift: String,
    pub preset: LiouvillePreset,
    pub intervals: usize,
    pub min_ric_x_eigenvalue: f64,
    pub ric_x_tolerance: f64,
    pub drift_shell_max: Vec<(f64, f64)>,
    pub drift_decreasing: bool,
    pub hypotheses_ok: bool,
    pub runs: Vec<BallExperiment>,
    pub q_sup: Vec<f64>,
    pub strictly_decreasing: bool,
    pub all_zero: bool,
    /// Slope of `log Q_sup` against `log R` (absent when some `Q_sup` is 0).
    pub decay_exponent: Option<f64>,
    pub pass: bool,
}

/// Largest `|X|_g` on the geodesic sphere of radius `r` about `o`, sampled in
/// `directions` directions.
pub fn drift_shell_max(m: &ChartManifold, x: &VectorFieldSpec, o: &[f64], r: f64, directions: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for d in 0..directions {
        let th = 2.0 * std::f64::consts::PI * d as f64 / directions as f64;
        let p = shoot_geodesic(m, o, &[th.cos(), th.sin()], r, 1e-2)?;
        worst = worst.max(x.norm_at(m, p.endpoint())?);
    }
    Ok(worst)
}

/// For each `R`: solve `Δ_X u = 0` on the chart square `o ± 2R` and measure
/// `Q_sup = sup |∇u|²/u²` on `B_{R/2}(o)`. Passes iff `Q_sup` strictly
/// decreases along `r_list` (or vanishes identically, the constant case).
pub fn liouville_decay_experiment(
    m: &ChartManifold,
    x: &VectorFieldSpec,
    o: &[f64],
    r_list: &[f64],
    preset: LiouvillePreset,
    intervals: usize,
    opts: SolveOptions,
) -> Result<LiouvilleReport> {
    if r_list.len() < 2 || r_list.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Usage("need at least two increasing radii".into()));
    }
    let r_max = *r_list.last().expect("nonempty");
    let big = BoxDomain { lo: o.iter().map(|v| v - 2.0 * r_max).collect(), hi: o.iter().map(|v| v + 2.0 * r_max).collect() };
    let scan = big.shrink(1e-3 * r_max).grid(&[41, 41]);
    let (min_eig, _) = min_eig_ric_x_on_grid(m, x, &scan)?;
    let ric_x_tolerance = 1e-9;
    let shells: Vec<(f64, f64)> = r_list
        .iter()
        .map(|&r| Ok((r, drift_shell_max(m, x, o, r, 16)?)))
        .collect::<Result<_>>()?;
    let drift_decreasing = shells.windows(2).all(|w| w[1].1 <= w[0].1);
    let nl = Nonlinearity::zero();
    let runs: Vec<Result<BallExperiment>> = par::map_slice(r_list, |&r| {
        ball_experiment(m, x, &nl, o, r, 0.5 * r, &preset.boundary(r), intervals, opts)
    });
    let runs: Vec<BallExperiment> = runs.into_iter().collect::<Result<_>>()?;
    let q: Vec<f64> = runs.iter().map(|r| r.q_sup).collect();
    let strictly_decreasing = q.windows(2).all(|w| w[1] < w[0]);
    let all_zero = q.iter().all(|&v| v <= 1e-14);
    let decay_exponent = q.iter().all(|&v| v > 0.0).then(|| {
        let lr: Vec<f64> = r_list.iter().map(|r| r.ln()).collect();
        let lq: Vec<f64> = q.iter().map(|v| v.ln()).collect();
        ls_slope(&lr, &lq)
    });
    Ok(LiouvilleReport {
        manifold: m.kind().tag(),
        drift: x.name().to_string(),
        preset,
        intervals,
        min_ric_x_eigenvalue: min_eig,
        ric_x_tolerance,
        hypotheses_ok: min_eig >= -ric_x_tolerance && drift_decreasing,
        drift_shell_max: shells,
        drift_decreasing,
        runs,
        pass: strictly_decreasing || all_zero,
        q_sup: q,
        strictly_decreasing,
        all_zero,
        decay_exponent,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub experiment: BallExperiment,
    pub params: EstimateParams,
    pub raw_bracket: f64,
    pub bound: f64,
    pub ratio: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct GradientSweepReport {
    pub manifold: String,
    pub drift: String,
    pub nonlinearity: String,
    pub rows: Vec<SweepRow>,
    pub empirical_constant: f64,
    pub cn: f64,
    pub pass: bool,
}

/// Measured `sup_{B_R} |∇ log u|²` against `C_n · bracket` for each `R`, with
/// `K` and `Λ` measured on the solve rectangle and `α`, `β` taken from `nl`.
#[allow(clippy::too_many_arguments)]
pub fn gradient_sweep(
    m: &ChartManifold,
    x: &VectorFieldSpec,
    nl: &Nonlinearity,
    o: &[f64],
    r_list: &[f64],
    boundary: &Boundary,
    intervals: usize,
    cn: Option<f64>,
    opts: SolveOptions,
) -> Result<GradientSweepReport> {
    if r_list.is_empty() {
        return Err(Error::Usage("empty radius list".into()));
    }
    let n = m.dim();
    let rows: Vec<Result<SweepRow>> = par::map_slice(r_list, |&r| {
        let exp = ball_experiment(m, x, nl, o, r, r, boundary, intervals, opts)?;
        let scan = exp.rect.shrink(1e-9).grid(&[21, 21]);
        let (kmin, _) = ric_x_lower_bound_on_grid(m, x, &scan)?;
        let (lambda, _) = x.check_global_bound(m, &scan)?;
        let mut params = EstimateParams::new(n, (-kmin / (n - 1) as f64).max(0.0), lambda, nl.alpha, nl.beta, r)?;
        if let Some(c) = cn {
            params = params.with_cn(c)?;
        }
        let raw = raw_bracket(&params);
        let bound = gradient_bound_bracket(&params);
        Ok(SweepRow { ratio: exp.q_sup / raw, pass: exp.q_sup <= bound, experiment: exp, params, raw_bracket: raw, bound })
    });
    let rows: Vec<SweepRow> = rows.into_iter().collect::<Result<_>>()?;
    let pairs: Vec<(f64, f64)> = rows.iter().map(|r| (r.experiment.q_sup, r.raw_bracket)).collect();
    let ec = empirical_constant(&pairs)?;
    Ok(GradientSweepReport {
        manifold: m.kind().tag(),
        drift: x.name().to_string(),
        nonlinearity: nl.name.clone(),
        pass: rows.iter().all(|r| r.pass),
        cn: rows[0].params.cn,
        rows,
        empirical_constant: ec.max_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn bracket_examples() {
        let p = EstimateParams::new(2, 0.0, 0.0, 0.0, 0.0, 2.0).unwrap();
        assert_eq!(gradient_bound_bracket(&p), 4.0);
        let p = EstimateParams::new(3, 0.0, 3.0, 1.0, 2.0, 1.0).unwrap();
        assert_eq!(raw_bracket(&p), 13.0);
        let p = EstimateParams::new(2, 0.0, 0.0, 0.0, 0.0, f64::INFINITY).unwrap();
        assert_eq!(gradient_bound_bracket(&p), 0.0);
        assert!(EstimateParams::new(1, 0.0, 0.0, 0.0, 0.0, 1.0).is_err());
        assert!(EstimateParams::new(2, -1.0, 0.0, 0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn cubic_examples() {
        let c = CubicCoeffs::from_beta_lambda_a(1.0, 1.0, 0.0).unwrap();
        assert_eq!((c.p, c.q), (-12.0, -4.0));
        assert_eq!(c.discriminant(), 6480.0);
        assert_eq!(CubicCoeffs::new(-7.0, -6.0).discriminant(), 400.0);
        assert_eq!(CubicCoeffs::new(-4.0, 0.0).roots().unwrap(), [-2.0, 0.0, 2.0]);
        let r = CubicCoeffs::new(-7.0, -6.0).roots().unwrap();
        for (a, b) in r.iter().zip([-2.0, -1.0, 3.0]) {
            assert_relative_eq!(*a, b, epsilon = 1e-14);
        }
        assert!(r[2] <= CubicCoeffs::new(-7.0, -6.0).root_bound());
        let r = CubicCoeffs::new(-3.0, -2.0).roots().unwrap();
        for (a, b) in r.iter().zip([-1.0, -1.0, 2.0]) {
            assert_relative_eq!(*a, b, epsilon = 1e-7);
        }
        assert!(CubicCoeffs::new(-1.0, 5.0).roots().is_err());
        assert!(CubicCoeffs::new(1.0, 0.0).roots().is_err());
        assert_eq!(CubicCoeffs::new(0.0, 0.0).roots().unwrap(), [0.0; 3]);
    }

    #[test]
    fn harnack_examples() {
        let zero = EstimateParams::new(2, 0.0, 0.0, 0.0, 0.0, 1.0).unwrap();
        assert_eq!(harnack_factor(&zero, 10.0, HarnackConstants::defaults(&zero)).unwrap(), 1.0);
        let p = EstimateParams::new(2, 0.0, 1.0, 0.0, 0.0, 1.0).unwrap();
        assert_relative_eq!(
            harnack_factor(&p, 2.0, HarnackConstants { c1: 1.0, c2: 1.0 }).unwrap(),
            2f64.exp(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn omega_of_exponential_and_constant() {
        let m = ChartManifold::euclidean(2, 40.0);
        let u = ScalarField::from_expr("e^x", |x| x[0].exp());
        let rep = omega_growth(&m, &u, &[0.0, 0.0], &[4.0, 8.0, 16.0, 32.0], 8).unwrap();
        assert!((rep.omega - 1.0).abs() < 5e-2, "{rep:?}");
        let c = ScalarField::from_expr("2", |x| x[0] * 0.0 + 2.0);
        assert_eq!(omega_growth(&m, &c, &[0.0, 0.0], &[4.0, 8.0, 16.0], 4).unwrap().omega, 0.0);
        assert!(omega_growth(&m, &c, &[0.0, 0.0], &[4.0, 8.0], 4).is_err());
    }

    #[test]
    fn empirical_constant_examples() {
        assert_eq!(empirical_constant(&[(0.0, 3.0)]).unwrap().max_ratio, 0.0);
        assert!(empirical_constant(&[]).is_err());
        assert!(empirical_constant(&[(1.0, 0.0)]).is_err());
        let r = empirical_constant(&[(1.0, 1.0 + 1.0 / 4.0)]).unwrap();
        assert!(r.max_ratio < 1.0);
    }

    #[test]
    fn liouville_constant_boundary_gives_zero() {
        let m = ChartManifold::euclidean(2, 10.0);
        let rep = liouville_decay_experiment(&m, &VectorFieldSpec::zero(2), &[0.0, 0.0], &[1.0, 2.0], LiouvillePreset::Constant(2.0), 16, SolveOptions::default()).unwrap();
        assert!(rep.all_zero && rep.pass);
        assert!(rep.decay_exponent.is_none());
    }

    #[test]
    fn liouville_flat_control_decays_like_r_minus_2() {
        let m = ChartManifold::euclidean(2, 10.0);
        let rep = liouville_decay_experiment(&m, &VectorFieldSpec::zero(2), &[0.0, 0.0], &[1.0, 2.0, 4.0], LiouvillePreset::Oscillation, 32, SolveOptions::default()).unwrap();
        assert!(rep.pass && rep.hypotheses_ok);
        assert!(rep.decay_exponent.unwrap() <= -1.5);
    }
}
