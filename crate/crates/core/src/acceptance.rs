//! The acceptance suite: eleven end-to-end checks with pinned tolerances.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Result;
use crate::estimates::{
    gradient_sweep, harnack_factor, liouville_decay_experiment, CubicCoeffs, EstimateParams, HarnackConstants,
    LiouvillePreset,
};
use crate::geodesics::{comparison_check, ComparisonOptions};
use crate::geometry::{BoxDomain, ChartManifold, JetFn, PotentialVariant, VectorFieldSpec};
use crate::jet::Jet;
use crate::operators::{bochner_residual, Nonlinearity, ScalarField};
use crate::par;
use crate::report::Verdict;
use crate::solver::{solve_elliptic_2d, Boundary, SolveOptions};
use crate::worked_examples::{
    constant_drift_loggrad, counterexample_bound_check, counterexample_loggrad_growth, counterexample_ode_residual,
    paraboloid_hypothesis_check, paraboloid_printed_vs_ad, sharpness_example_check, square_grid,
};

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Criterion {
    pub id: u32,
    pub title: String,
    pub pass: bool,
    pub verdicts: Vec<Verdict>,
    pub error: Option<String>,
    pub details: Value,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct AcceptanceReport {
    pub threads: Option<usize>,
    pub criteria: Vec<Criterion>,
    pub pass: bool,
}

impl AcceptanceReport {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// One `criterion <id> PASS|FAIL <title>` line per criterion.
    pub fn summary_lines(&self) -> Vec<String> {
        self.criteria
            .iter()
            .map(|c| format!("criterion {:>2} {} {}", c.id, if c.pass { "PASS" } else { "FAIL" }, c.title))
            .collect()
    }
}

type Check = fn() -> Result<(Vec<Verdict>, Value)>;

pub const TITLES: [&str; 11] = [
    "Bochner identity over the 3x3x3 fixture matrix",
    "comparison equality on model spaces, slack on the paraboloid",
    "paraboloid closed forms against AD",
    "paraboloid hypotheses for some potential",
    "depressed cubic machinery",
    "solver convergence order and discrete maximum principle",
    "one-dimensional unbounded-drift counterexample",
    "gradient-estimate discipline and sharpness",
    "Harnack factor on the exponential fixture",
    "Liouville decay",
    "determinism at a fixed thread count",
];

const CHECKS: [Check; 10] = [bochner, comparison, appendix, hypotheses, cubic, solver_order, counterexample, gradient, harnack, liouville];

/// Runs a single criterion in `1..=10`.
pub fn run_criterion(id: u32) -> Criterion {
    let title = TITLES[(id - 1) as usize].to_string();
    match CHECKS[(id - 1) as usize]() {
        Ok((verdicts, details)) => Criterion { id, title, pass: verdicts.iter().all(|v| v.pass || v.informational), verdicts, error: None, details },
        Err(e) => Criterion { id, title, pass: false, verdicts: vec![], error: Some(e.to_string()), details: Value::Null },
    }
}

/// Criteria 1-10 on a pool of `threads` workers.
pub fn run_numeric(threads: Option<usize>) -> Result<Vec<Criterion>> {
    par::with_threads(threads, || (1..=10).map(run_criterion).collect())
}

/// The whole suite. Criterion 11 reruns 1-10 and compares the serialized
/// results byte for byte.
pub fn run_all(threads: Option<usize>) -> Result<AcceptanceReport> {
    let first = run_numeric(threads)?;
    let second = run_numeric(threads)?;
    let (a, b) = (serde_json::to_string(&first)?, serde_json::to_string(&second)?);
    let same = a == b;
    let mut criteria = first;
    criteria.push(Criterion {
        id: 11,
        title: TITLES[10].to_string(),
        pass: same,
        verdicts: vec![Verdict::holds("identical_bytes", same, "two runs serialize identically")],
        error: None,
        details: json!({ "bytes": a.len(), "threads": threads }),
    });
    Ok(AcceptanceReport { threads, pass: criteria.iter().all(|c| c.pass), criteria })
}

fn jf(f: impl Fn(&[Jet]) -> Jet + Send + Sync + 'static) -> JetFn {
    Arc::new(f)
}

fn bochner() -> Result<(Vec<Verdict>, Value)> {
    let manifolds = vec![
        (ChartManifold::euclidean(2, 2.0), vec![[0.3, -0.2], [-0.7, 0.4], [1.1, 0.9]]),
        (ChartManifold::hyperbolic_halfplane(1.0, BoxDomain::new(vec![-1.0, 0.5], vec![1.0, 2.0])?)?, vec![[0.0, 1.0], [-0.5, 0.7], [0.6, 1.6]]),
        (ChartManifold::paraboloid(2.0), vec![[0.0, 0.0], [0.5, -0.3], [-1.0, 1.2]]),
    ];
    let fields = [
        ScalarField::from_expr("exp(0.3x+0.2y)", |c| (c[0] * 0.3 + c[1] * 0.2).exp()),
        ScalarField::from_expr("x^2 y + sin(y)", |c| c[0] * c[0] * c[1] + c[1].sin()),
        ScalarField::from_expr("1/(1+x^2+y^2)", |c| (c[0] * c[0] + c[1] * c[1] + 1.0).recip()),
    ];
    let drifts = [
        VectorFieldSpec::zero(2),
        VectorFieldSpec::constant(vec![0.5, -0.25]),
        VectorFieldSpec::from_exprs("rotation", vec![jf(|c| -c[1]), jf(|c| c[0])]),
    ];
    let mut worst: f64 = 0.0;
    let mut rows = Vec::new();
    for (m, pts) in &manifolds {
        for u in &fields {
            for x in &drifts {
                let mut r: f64 = 0.0;
                for p in pts {
                    r = r.max(bochner_residual(m, x, u, p)?.relative_residual());
                }
                worst = worst.max(r);
                rows.push(json!({ "manifold": m.kind().tag(), "field": u.name(), "drift": x.name(), "max_relative_residual": r }));
            }
        }
    }
    Ok((vec![Verdict::at_most("max_relative_residual", worst, 1e-6)], json!({ "fixtures": rows })))
}

fn comparison() -> Result<(Vec<Verdict>, Value)> {
    let radii = [0.5, 1.0, 2.0];
    let opts = ComparisonOptions::default();
    let flat = comparison_check(&ChartManifold::euclidean(2, 4.0), &VectorFieldSpec::zero(2), &[0.0, 0.0], &radii, 8, opts)?;
    let hyp_m = ChartManifold::hyperbolic_halfplane(1.0, BoxDomain::new(vec![-6.0, 0.0], vec![6.0, 10.0])?)?;
    let hyp = comparison_check(&hyp_m, &VectorFieldSpec::zero(2), &[0.0, 1.0], &radii, 8, opts)?;
    let par_m = ChartManifold::paraboloid(3.0);
    let x = VectorFieldSpec::paraboloid_gradient(&par_m, PotentialVariant::Literal);
    let para = comparison_check(&par_m, &x, &[0.0, 0.0], &radii, 8, opts)?;
    let eq = |r: &crate::geodesics::ComparisonReport| r.rows.iter().map(|row| row.slack.abs()).fold(0.0, f64::max);
    let verdicts = vec![
        Verdict::at_most("euclidean_max_equality_gap", eq(&flat), 1e-6),
        Verdict::at_most("hyperbolic_max_equality_gap", eq(&hyp), 1e-6),
        Verdict::at_least("paraboloid_min_slack_sharp", para.min_slack, -1e-6),
        Verdict::at_least("paraboloid_min_slack_simplified", para.min_slack_simplified, -1e-6),
    ];
    let summary = |r: &crate::geodesics::ComparisonReport| {
        json!({ "manifold": r.manifold, "drift": r.drift, "k": r.k, "lambda": r.lambda, "min_slack": r.min_slack, "min_slack_simplified": r.min_slack_simplified })
    };
    Ok((verdicts, json!([summary(&flat), summary(&hyp), summary(&para)])))
}

fn appendix() -> Result<(Vec<Verdict>, Value)> {
    let grid = square_grid(3.0, 41);
    let rep = paraboloid_printed_vs_ad(&grid)?;
    let again = paraboloid_printed_vs_ad(&grid)?;
    let stable = serde_json::to_string(&rep)? == serde_json::to_string(&again)?;
    let mut verdicts: Vec<Verdict> = rep
        .rows
        .iter()
        .filter(|r| r.asserted && r.quantity != "Phi")
        .map(|r| Verdict::at_most(format!("{}_vs_ad", r.quantity), r.max_abs_deviation, r.tolerance))
        .collect();
    for s in &rep.spot_values {
        verdicts.push(Verdict::holds(format!("printed_{}_spot", s.name), s.printed == s.expected, format!("== {}", s.expected)));
    }
    verdicts.push(Verdict::holds("inconsistency_report_nonempty", !rep.inconsistencies.is_empty(), "nonempty"));
    verdicts.push(Verdict::holds("inconsistency_report_stable", stable, "identical on rerun"));
    Ok((verdicts, json!({ "grid_points": rep.grid_points, "spot_values": rep.spot_values, "inconsistencies": rep.inconsistencies })))
}

fn hypotheses() -> Result<(Vec<Verdict>, Value)> {
    let rep = paraboloid_hypothesis_check(&square_grid(3.0, 41), &[1.0, 2.0, 3.0])?;
    let v = vec![Verdict::holds("some_variant_satisfies", rep.pass, "Ric_X >= -1e-9 and shell max |X| decreasing")];
    Ok((v, serde_json::to_value(&rep)?))
}

fn cubic() -> Result<(Vec<Verdict>, Value)> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut disc_margin, mut root_margin) = (f64::INFINITY, f64::INFINITY);
    let mut single_positive = true;
    for _ in 0..1000 {
        let beta = rng.gen_range(1e-3..10.0);
        let lambda = rng.gen_range(1e-3..10.0);
        let a = rng.gen_range(0.0..100.0);
        let c = CubicCoeffs::from_beta_lambda_a(beta, lambda, a)?;
        let floor = 1104.0 * beta * beta * lambda * lambda - 1e-9 * c.p.abs().powi(3).max(1.0);
        disc_margin = disc_margin.min(c.discriminant() - floor);
        let r = c.roots()?;
        single_positive &= r.iter().filter(|&&t| t > 0.0).count() == 1;
        root_margin = root_margin.min(c.root_bound() + 1e-12 - r[2]);
    }
    let zero_q = [-1.0f64, -4.0, -9.0].iter().all(|&p| {
        let s = (-p).sqrt();
        CubicCoeffs::new(p, 0.0).roots().map(|r| r == [-s, 0.0, s]).unwrap_or(false)
    });
    let verdicts = vec![
        Verdict::at_least("discriminant_minus_floor", disc_margin, 0.0),
        Verdict::holds("exactly_one_positive_root", single_positive, "1000 draws"),
        Verdict::at_least("root_bound_margin", root_margin, 0.0),
        Verdict::holds("q_zero_roots_exact", zero_q, "(-sqrt(-p), 0, sqrt(-p))"),
    ];
    Ok((verdicts, json!({ "draws": 1000, "seed": 5 })))
}

fn solver_order() -> Result<(Vec<Verdict>, Value)> {
    let m = ChartManifold::euclidean(2, 2.0);
    let x = VectorFieldSpec::constant(vec![1.0, 0.0]);
    let unit = BoxDomain::square(2, 0.0, 1.0);
    let hs = [1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0];
    let mut errors = Vec::new();
    for &h in &hs {
        let sol = solve_elliptic_2d(&m, &x, &Nonlinearity::zero(), &unit, &Boundary::exp_x(), h, SolveOptions::default())?;
        let mut e: f64 = 0.0;
        for (k, v) in sol.values.iter().enumerate() {
            let (i, j) = sol.mesh.coords(k);
            e = e.max((v - sol.mesh.point(i, j)[0].exp()).abs());
        }
        errors.push(e);
    }
    let lh: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
    let le: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let order = crate::estimates::ls_slope(&lh, &le);

    let p = ChartManifold::paraboloid(2.0);
    let fixtures: Vec<(ChartManifold, VectorFieldSpec, Boundary)> = vec![
        (m.clone(), x.clone(), Boundary::exp_x()),
        (m.clone(), VectorFieldSpec::from_exprs("rotation", vec![jf(|c| -c[1]), jf(|c| c[0])]), Boundary::from_fn("sin(3x)cos(2y)", |q| (3.0 * q[0]).sin() * (2.0 * q[1]).cos())),
        (p.clone(), VectorFieldSpec::paraboloid_gradient(&p, PotentialVariant::Literal), Boundary::linear(1.0, 0.25, -0.5)),
    ];
    let mut dmp = true;
    let mut rows = Vec::new();
    for (mm, xx, bc) in &fixtures {
        let sol = solve_elliptic_2d(mm, xx, &Nonlinearity::zero(), &BoxDomain::square(2, -1.0, 1.0), bc, 1.0 / 32.0, SolveOptions::default())?;
        let ok = sol.satisfies_max_principle(0.0);
        dmp &= ok;
        rows.push(json!({ "manifold": mm.kind().tag(), "drift": xx.name(), "boundary": bc.name, "extrema": sol.extrema_split(), "max_principle": ok }));
    }
    let mut verdicts = vec![
        Verdict::at_least("order_lower", order, 1.8),
        Verdict::at_most("order_upper", order, 2.2),
    ];
    verdicts.push(Verdict::holds("discrete_max_principle", dmp, "interior within boundary range, tol 0"));
    Ok((verdicts, json!({ "h": hs, "max_errors": errors, "order": order, "max_principle_fixtures": rows })))
}

fn counterexample() -> Result<(Vec<Verdict>, Value)> {
    let residual = counterexample_ode_residual(0.5, (-5.0, 5.0), 201)?;
    let samples: Vec<f64> = (0..200).map(|k| -20.0 + 40.0 * k as f64 / 199.0).collect();
    let bound = counterexample_bound_check(0.5, &samples, None)?;
    let growth = counterexample_loggrad_growth(0.5, &[5.0, 10.0, 20.0])?;
    let control = constant_drift_loggrad(1.0, &[2.0, 5.0, 10.0])?;
    let last = control.rows.last().expect("three rows");
    let worst_bound = bound.rows.iter().map(|r| r.b.abs() - r.bound).fold(f64::NEG_INFINITY, f64::max);
    let min_excess = growth.rows.iter().map(|r| r.log_derivative - growth.reference_b).fold(f64::INFINITY, f64::min);
    let verdicts = vec![
        Verdict::at_most("log_form_ode_residual", residual.max_residual, 1e-8),
        Verdict::at_most("max_abs_b_minus_bound", worst_bound, 0.0),
        Verdict::holds("loggrad_strictly_increasing", growth.strictly_increasing, "u'/u at 5 < 10 < 20"),
        Verdict::greater_than("min_loggrad_minus_b5", min_excess, 0.0),
        Verdict::at_most("control_loggrad_gap_at_10", (last.log_derivative - 1.0).abs(), 1e-4),
    ];
    Ok((verdicts, json!({ "residual": residual, "growth": growth.rows, "b5": growth.reference_b, "control": control.rows })))
}

fn gradient() -> Result<(Vec<Verdict>, Value)> {
    let opts = SolveOptions::default();
    let e = ChartManifold::euclidean(2, 3.0);
    let dx = VectorFieldSpec::constant(vec![1.0, 0.0]);
    let exp_fixture = gradient_sweep(&e, &dx, &Nonlinearity::zero(), &[0.5, 0.5], &[0.25], &Boundary::exp_x(), 64, None, opts)?;
    let harmonic = gradient_sweep(&e, &VectorFieldSpec::zero(2), &Nonlinearity::zero(), &[0.0, 0.0], &[0.25, 0.5, 1.0], &Boundary::linear(3.0, 1.0, 0.5), 64, None, opts)?;
    let semilinear = gradient_sweep(&e, &dx, &Nonlinearity::linear(-0.5), &[0.0, 0.0], &[0.25, 0.5], &Boundary::linear(3.0, 0.5, 0.5), 64, None, opts)?;
    let p = ChartManifold::paraboloid(4.5);
    let px = VectorFieldSpec::paraboloid_gradient(&p, PotentialVariant::Literal);
    let para = gradient_sweep(&p, &px, &Nonlinearity::zero(), &[0.0, 0.0], &[1.0, 2.0], &Boundary::linear(1.0, 0.125, 0.0), 64, None, opts)?;
    let sharp = sharpness_example_check()?;
    let sweeps = [&exp_fixture, &harmonic, &semilinear, &para];
    let worst = sweeps.iter().flat_map(|s| s.rows.iter()).map(|r| r.experiment.q_sup / r.bound).fold(0.0, f64::max);
    // Ω within its tolerance band keeps 1/(Ω+Ω²) below 1/(0.95+0.95²)
    let omega_lo = 1.0 - sharp.omega_tolerance;
    let verdicts = vec![
        Verdict::at_most("max_q_over_8n_bracket", worst, 1.0),
        Verdict::at_most("sharpness_grid_loggrad_error", (sharp.grid_log_gradient - 1.0).abs(), sharp.grid_tolerance),
        Verdict::at_most("sharpness_omega_error", (sharp.omega - 1.0).abs(), sharp.omega_tolerance),
        Verdict::at_most("sharpness_laplacian", sharp.max_abs_laplacian, sharp.laplacian_tolerance),
        Verdict::at_most("sharpness_min_consistent_cn", sharp.min_consistent_cn, 1.0 / (omega_lo + omega_lo * omega_lo)),
    ];
    let rows: Vec<Value> = sweeps
        .iter()
        .map(|s| json!({ "manifold": s.manifold, "drift": s.drift, "nonlinearity": s.nonlinearity, "q_sup": s.rows.iter().map(|r| r.experiment.q_sup).collect::<Vec<_>>(), "bound": s.rows.iter().map(|r| r.bound).collect::<Vec<_>>(), "empirical_constant": s.empirical_constant }))
        .collect();
    Ok((verdicts, json!({ "sweeps": rows, "sharpness": sharp })))
}

fn harnack() -> Result<(Vec<Verdict>, Value)> {
    let m = ChartManifold::euclidean(2, 2.0);
    let unit = BoxDomain::square(2, 0.0, 1.0);
    let sol = solve_elliptic_2d(&m, &VectorFieldSpec::constant(vec![1.0, 0.0]), &Nonlinearity::zero(), &unit, &Boundary::exp_x(), 1.0 / 64.0, SolveOptions::default())?;
    let ratio = sol.max_value() / sol.min_value();
    let params = EstimateParams::new(2, 0.0, 1.0, 0.0, 0.0, 0.5)?;
    let diameter = 2f64.sqrt();
    let factor = harnack_factor(&params, diameter, HarnackConstants::defaults(&params))?;
    Ok((vec![Verdict::at_least("factor_over_ratio", factor / ratio, 1.2)], json!({ "sup_over_inf": ratio, "factor": factor, "distance": diameter })))
}

fn liouville() -> Result<(Vec<Verdict>, Value)> {
    let opts = SolveOptions::default();
    let radii = [1.0, 2.0, 4.0];
    let p = ChartManifold::paraboloid(8.5);
    let x = VectorFieldSpec::paraboloid_gradient(&p, PotentialVariant::Literal);
    let para = liouville_decay_experiment(&p, &x, &[0.0, 0.0], &radii, LiouvillePreset::Oscillation, 128, opts)?;
    let e = ChartManifold::euclidean(2, 8.5);
    let flat = liouville_decay_experiment(&e, &VectorFieldSpec::zero(2), &[0.0, 0.0], &radii, LiouvillePreset::Oscillation, 128, opts)?;
    let verdicts = vec![
        Verdict::holds("paraboloid_q_strictly_decreasing", para.strictly_decreasing, "Q(1) > Q(2) > Q(4)"),
        Verdict::at_most("euclidean_decay_exponent", flat.decay_exponent.unwrap_or(f64::INFINITY), -1.5),
    ];
    Ok((verdicts, json!({ "paraboloid_q_sup": para.q_sup, "paraboloid_hypotheses_ok": para.hypotheses_ok, "euclidean_q_sup": flat.q_sup, "euclidean_exponent": flat.decay_exponent })))
}
