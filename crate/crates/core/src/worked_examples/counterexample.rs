//! The one-dimensional family with unbounded drift `b(x) = ∫_0^x (1+t²)^{−δ'/2} dt`,
//! `δ' = 1 − δ`, for which positive `X`-harmonic functions have unbounded
//! logarithmic gradient.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quad::{Antiderivative, QuadOptions};
use crate::solver::{solve_ode_1d, Ode1dSolution};

#[derive(Clone, Debug)]
pub struct CounterexampleFamily {
    pub delta: f64,
    b: Antiderivative,
    pub range: (f64, f64),
}

impl CounterexampleFamily {
    /// Tabulates `b` on `range` (which is widened to contain 0).
    pub fn new(delta: f64, range: (f64, f64)) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::Usage(format!("δ must lie in (0, 1), got {delta}")));
        }
        let dp = 1.0 - delta;
        let integrand = Arc::new(move |t: f64| (1.0 + t * t).powf(-0.5 * dp));
        let b = Antiderivative::new(integrand, range.0.min(0.0), range.1.max(0.0), 0.25, QuadOptions::default())?;
        Ok(CounterexampleFamily { delta, b, range })
    }

    pub fn b(&self, x: f64) -> Result<f64> {
        self.b.eval(x)
    }

    pub fn b_prime(&self, x: f64) -> f64 {
        (1.0 + x * x).powf(-0.5 * (1.0 - self.delta))
    }

    /// `(1/δ)(1 + |x|)^δ`
    pub fn bound(&self, x: f64) -> f64 {
        (1.0 + x.abs()).powf(self.delta) / self.delta
    }

    /// `b` as a plain map (NaN outside the table).
    pub fn b_map(&self) -> Arc<dyn Fn(f64) -> f64 + Send + Sync> {
        let me = self.clone();
        Arc::new(move |x| me.b(x).unwrap_or(f64::NAN))
    }

    /// `u = c1 + c2 ∫_0^x exp(∫_0^t b)`.
    pub fn solve(&self, c1: f64, c2: f64, quad_tol: f64) -> Result<Ode1dSolution> {
        solve_ode_1d(self.b_map(), c1, c2, self.range, quad_tol)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundRow {
    pub x: f64,
    pub b: f64,
    pub bound: f64,
    pub odd_defect: f64,
    pub b_prime: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CounterexampleBoundReport {
    pub delta: f64,
    pub rows: Vec<BoundRow>,
    pub bound_ok: bool,
    pub odd_tolerance: f64,
    pub odd_ok: bool,
    pub increasing_ok: bool,
    pub divergence_threshold: f64,
    pub divergence_ok: bool,
    pub pass: bool,
}

/// `|b(x)| <= (1/δ)(1+|x|)^δ` at the samples, oddness of `b`, `b' > 0`, and
/// divergence: `b` at the largest `|x|` reaches `threshold` (default: half of
/// the asymptotic growth `|x|^δ/δ`).
pub fn counterexample_bound_check(delta: f64, x_samples: &[f64], threshold: Option<f64>) -> Result<CounterexampleBoundReport> {
    if x_samples.is_empty() || x_samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::Usage("need finite samples".into()));
    }
    let reach = x_samples.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let fam = CounterexampleFamily::new(delta, (-reach, reach))?;
    let rows: Vec<BoundRow> = x_samples
        .iter()
        .map(|&x| {
            let b = fam.b(x)?;
            Ok(BoundRow { x, b, bound: fam.bound(x), odd_defect: (fam.b(-x)? + b).abs(), b_prime: fam.b_prime(x) })
        })
        .collect::<Result<_>>()?;
    let odd_tolerance = 1e-10;
    let mut pos: Vec<&BoundRow> = rows.iter().filter(|r| r.x > 0.0).collect();
    pos.sort_by(|a, b| a.x.total_cmp(&b.x));
    let divergence_threshold = threshold.unwrap_or(0.5 * reach.powf(delta) / delta);
    let b_far = fam.b(reach)?;
    let bound_ok = rows.iter().all(|r| r.b.abs() <= r.bound);
    let odd_ok = rows.iter().all(|r| r.odd_defect <= odd_tolerance);
    let increasing_ok = rows.iter().all(|r| r.b_prime > 0.0) && pos.windows(2).all(|w| w[1].b > w[0].b);
    let divergence_ok = b_far >= divergence_threshold;
    Ok(CounterexampleBoundReport {
        delta,
        rows,
        bound_ok,
        odd_tolerance,
        odd_ok,
        increasing_ok,
        divergence_threshold,
        divergence_ok,
        pass: bound_ok && odd_ok && increasing_ok && divergence_ok,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthRow {
    pub x: f64,
    pub b: f64,
    pub log_u: f64,
    pub log_derivative: f64,
    pub gap: f64,
    pub b_prime: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthReport {
    pub label: String,
    pub c1: f64,
    pub c2: f64,
    pub rows: Vec<GrowthRow>,
    /// `|gap_last| / |gap_first|`, required `<= 0.5`.
    pub gap_ratio: f64,
    pub gap_shrinks: bool,
    pub strictly_increasing: bool,
    /// `b` at the first sample.
    pub reference_b: f64,
    pub exceeds_reference: bool,
    pub b_prime_nonnegative: bool,
    pub pass: bool,
}

fn growth_report(label: String, sol: &Ode1dSolution, x_list: &[f64], b_prime: impl Fn(f64) -> f64) -> Result<GrowthReport> {
    if x_list.is_empty() || x_list.windows(2).any(|w| !(w[1] > w[0])) || !(x_list[0] > 0.0) {
        return Err(Error::Usage("x_list must be increasing and positive".into()));
    }
    let rows: Vec<GrowthRow> = x_list
        .iter()
        .map(|&x| {
            let b = sol.b(x);
            let ld = sol.log_derivative(x)?;
            Ok(GrowthRow { x, b, log_u: sol.log_u(x)?, log_derivative: ld, gap: ld - b, b_prime: b_prime(x) })
        })
        .collect::<Result<_>>()?;
    let gap_ratio = rows[rows.len() - 1].gap.abs() / rows[0].gap.abs();
    let reference_b = rows[0].b;
    let gap_shrinks = gap_ratio <= 0.5;
    let strictly_increasing = rows.windows(2).all(|w| w[1].log_derivative > w[0].log_derivative);
    let exceeds_reference = rows.iter().all(|r| r.log_derivative > reference_b);
    let b_prime_nonnegative = rows.iter().all(|r| r.b_prime >= 0.0);
    Ok(GrowthReport {
        label,
        c1: sol.c1,
        c2: sol.c2,
        rows,
        gap_ratio,
        gap_shrinks,
        strictly_increasing,
        reference_b,
        exceeds_reference,
        b_prime_nonnegative,
        pass: gap_shrinks && strictly_increasing && exceeds_reference && b_prime_nonnegative,
    })
}

/// `u'/u` against `b` along `x_list` for `u = ∫_0^x exp(∫_0^t b)`.
pub fn counterexample_loggrad_growth(delta: f64, x_list: &[f64]) -> Result<GrowthReport> {
    let reach = x_list.iter().copied().fold(0.0, f64::max);
    let fam = CounterexampleFamily::new(delta, (0.0, reach))?;
    let sol = fam.solve(0.0, 1.0, 1e-12)?;
    growth_report(format!("delta={delta}"), &sol, x_list, |x| fam.b_prime(x))
}

/// The bounded control `b ≡ c`.
pub fn constant_drift_loggrad(c: f64, x_list: &[f64]) -> Result<GrowthReport> {
    let reach = x_list.iter().copied().fold(0.0, f64::max);
    let sol = solve_ode_1d(Arc::new(move |_| c), 0.0, 1.0, (0.0, reach), 1e-12)?;
    growth_report(format!("b={c}"), &sol, x_list, |_| 0.0)
}

#[derive(Clone, Debug, Serialize)]
pub struct OdeResidualReport {
    pub delta: f64,
    pub range: (f64, f64),
    pub samples: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// `|(log u')' − b|` on `samples` equally spaced points of `range`.
pub fn counterexample_ode_residual(delta: f64, range: (f64, f64), samples: usize) -> Result<OdeResidualReport> {
    let fam = CounterexampleFamily::new(delta, (range.0 - 0.5, range.1 + 0.5))?;
    let sol = fam.solve(1.0, 1.0, 1e-12)?;
    let xs: Vec<f64> = (0..samples).map(|k| range.0 + (range.1 - range.0) * k as f64 / (samples - 1) as f64).collect();
    let res: Vec<Result<f64>> = crate::par::map_slice(&xs, |&x| sol.ode_residual(x));
    let max_residual = crate::par::ordered_max(&res.into_iter().collect::<Result<Vec<_>>>()?);
    let tolerance = 1e-8;
    Ok(OdeResidualReport { delta, range, samples, max_residual, tolerance, pass: max_residual <= tolerance })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate;

    #[test]
    fn b_examples() {
        let rep = counterexample_bound_check(0.5, &[0.0, 1.0, -3.0, 3.0], None).unwrap();
        assert!(rep.bound_ok && rep.odd_ok);
        let r1 = rep.rows.iter().find(|r| r.x == 1.0).unwrap();
        let oracle = integrate(|t| (1.0 + t * t).powf(-0.25), 0.0, 1.0, Default::default()).unwrap();
        assert!((r1.b - oracle).abs() < 1e-14);
        assert!((r1.bound - 2.0 * 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(rep.rows[0].b, 0.0);
    }

    #[test]
    fn bounded_control() {
        let rep = constant_drift_loggrad(1.0, &[2.0, 5.0, 10.0]).unwrap();
        let last = rep.rows.last().unwrap();
        assert!((last.log_derivative - 1.0).abs() <= 1e-4);
        let exact = 10f64.exp() / 10f64.exp_m1();
        assert!((last.log_derivative - exact).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_delta() {
        assert!(CounterexampleFamily::new(1.0, (0.0, 1.0)).is_err());
    }
}
