//! `u'' − b(x) u' = 0` by quadrature:
//! `u(x) = c1 + c2 ∫_0^x exp(B(t)) dt` with `B(t) = ∫_0^t b`.
//!
//! `B` and `U = ∫_0^x exp(B)` are tabulated on a uniform grid of nodes on
//! each side of 0, and `U` is kept as `log |U|` so growth beyond `e^700`
//! stays representable. Values between nodes integrate from the nearest
//! node towards 0.

use std::cell::RefCell;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::operators::ScalarField;
use crate::quad::{integrate, QuadOptions};

pub type ScalarMap = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

const SEGMENT: f64 = 0.25;

#[derive(Clone, Debug)]
struct Side {
    /// +1 for `x >= 0`, −1 for `x <= 0`.
    sign: f64,
    big_b: Vec<f64>,
    log_u: Vec<f64>,
}

#[derive(Clone)]
pub struct Ode1dSolution {
    b: ScalarMap,
    pub c1: f64,
    pub c2: f64,
    pub lo: f64,
    pub hi: f64,
    opts: QuadOptions,
    pos: Side,
    neg: Side,
}

impl std::fmt::Debug for Ode1dSolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Ode1dSolution(c1={}, c2={}, [{}, {}])", self.c1, self.c2, self.lo, self.hi)
    }
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Runs `integrate` where the integrand itself may fail.
fn integrate_fallible(f: impl Fn(f64) -> Result<f64>, a: f64, b: f64, opts: QuadOptions) -> Result<f64> {
    let err = RefCell::new(None);
    let v = integrate(
        |t| match f(t) {
            Ok(v) => v,
            Err(e) => {
                err.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        },
        a,
        b,
        opts,
    );
    if let Some(e) = err.into_inner() {
        return Err(e);
    }
    let v = v?;
    if !v.is_finite() {
        return Err(Error::Numeric(format!("integral over [{a}, {b}] is not finite")));
    }
    Ok(v)
}

pub fn solve_ode_1d(b: ScalarMap, c1: f64, c2: f64, x_range: (f64, f64), quad_tol: f64) -> Result<Ode1dSolution> {
    if !(quad_tol > 0.0) {
        return Err(Error::Usage(format!("quadrature tolerance must be positive, got {quad_tol}")));
    }
    let (lo, hi) = x_range;
    if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Usage(format!("invalid range [{lo}, {hi}]")));
    }
    let opts = QuadOptions { abs_tol: quad_tol, rel_tol: quad_tol, ..Default::default() };
    let build = |sign: f64, extent: f64| -> Result<Side> {
        let n = (extent / SEGMENT).ceil() as usize;
        let (mut big_b, mut log_u) = (vec![0.0], vec![f64::NEG_INFINITY]);
        for k in 0..n {
            let (xa, xb) = (sign * k as f64 * SEGMENT, sign * (k + 1) as f64 * SEGMENT);
            let bk = big_b[k];
            let b_end = bk + integrate(|t| b(t), xa, xb, opts)?;
            // shifted by B(x_k) so the integrand stays O(1)
            let shifted =
                integrate_fallible(|t| Ok(integrate(|s| b(s), xa, t, opts)?.exp()), xa.min(xb), xa.max(xb), opts)?;
            big_b.push(b_end);
            log_u.push(log_add(log_u[k], bk + shifted.ln()));
        }
        Ok(Side { sign, big_b, log_u })
    };
    let pos = build(1.0, hi.max(0.0))?;
    let neg = build(-1.0, (-lo).max(0.0))?;
    Ok(Ode1dSolution { b, c1, c2, lo, hi, opts, pos, neg })
}

impl Ode1dSolution {
    fn locate(&self, x: f64) -> Result<(&Side, usize)> {
        if !(x >= self.lo - 1e-12 && x <= self.hi + 1e-12) {
            return Err(Error::domain(&[x], format!("outside the solved range [{}, {}]", self.lo, self.hi)));
        }
        let side = if x >= 0.0 { &self.pos } else { &self.neg };
        let k = ((x.abs() / SEGMENT).floor() as usize).min(side.big_b.len().saturating_sub(2));
        Ok((side, k))
    }

    pub fn b(&self, x: f64) -> f64 {
        (self.b)(x)
    }

    /// `B(x) = ∫_0^x b`.
    pub fn big_b(&self, x: f64) -> Result<f64> {
        let (side, k) = self.locate(x)?;
        if side.big_b.len() == 1 {
            return Ok(0.0);
        }
        let xk = side.sign * k as f64 * SEGMENT;
        Ok(side.big_b[k] + integrate(|s| (self.b)(s), xk, x, self.opts)?)
    }

    /// `log |U(x)|` with `U(x) = ∫_0^x exp(B)`; `−∞` at 0.
    pub fn log_abs_u_integral(&self, x: f64) -> Result<f64> {
        let (side, k) = self.locate(x)?;
        if side.big_b.len() == 1 {
            return Ok(f64::NEG_INFINITY);
        }
        let xk = side.sign * k as f64 * SEGMENT;
        if x == xk {
            return Ok(side.log_u[k]);
        }
        let (a, b) = (xk.min(x), xk.max(x));
        let partial = integrate_fallible(|t| Ok(integrate(|s| (self.b)(s), xk, t, self.opts)?.exp()), a, b, self.opts)?;
        Ok(log_add(side.log_u[k], side.big_b[k] + partial.ln()))
    }

    pub fn u(&self, x: f64) -> Result<f64> {
        let l = self.log_abs_u_integral(x)?;
        Ok(self.c1 + self.c2 * x.signum() * l.exp())
    }

    pub fn u_prime(&self, x: f64) -> Result<f64> {
        Ok(self.c2 * self.big_b(x)?.exp())
    }

    pub fn u_double_prime(&self, x: f64) -> Result<f64> {
        Ok(self.b(x) * self.u_prime(x)?)
    }

    /// `log u(x)` for positive `u`, without forming `u`.
    pub fn log_u(&self, x: f64) -> Result<f64> {
        let l = self.log_abs_u_integral(x)?;
        // u = c1 + s e^{l'} with s = sign(c2 x), l' = l + log|c2|
        let s = (self.c2 * x).signum();
        let l2 = l + self.c2.abs().ln();
        let value = if self.c1 == 0.0 || l2 == f64::NEG_INFINITY {
            if self.c1 == 0.0 && s > 0.0 {
                Some(l2)
            } else if l2 == f64::NEG_INFINITY && self.c1 > 0.0 {
                Some(self.c1.ln())
            } else {
                None
            }
        } else {
            let l1 = self.c1.abs().ln();
            let s1 = self.c1.signum();
            if s1 > 0.0 && s > 0.0 {
                Some(log_add(l1, l2))
            } else {
                let (big, small, sbig) = if l1 > l2 { (l1, l2, s1) } else { (l2, l1, s) };
                (sbig > 0.0 && big > small).then(|| big + (-(small - big).exp()).ln_1p())
            }
        };
        value.ok_or_else(|| Error::Positivity { value: self.c1 + s * l2.exp(), at: vec![x] })
    }

    /// `u'(x) / u(x)`, evaluated in log space.
    pub fn log_derivative(&self, x: f64) -> Result<f64> {
        let lu = self.log_u(x)?;
        Ok(self.c2.signum() * (self.c2.abs().ln() + self.big_b(x)? - lu).exp())
    }

    /// ODE residual in log form, `|(log u')' − b|`, with the derivative of
    /// `log u' = log c2 + B` taken by Richardson-extrapolated differences.
    pub fn ode_residual(&self, x: f64) -> Result<f64> {
        let h = 1e-2;
        let d = crate::geometry::fd::derivative(|s| self.big_b(x + s), h)?;
        Ok((d - self.b(x)).abs())
    }

    /// The solution as a 1-D scalar field; jets are available to order 2.
    pub fn to_scalar_field(&self) -> ScalarField {
        let me = self.clone();
        ScalarField::from_point_jet("ode_1d", move |p, order| {
            if order > 2 {
                return Err(Error::Unsupported("ODE solution jets beyond order 2".into()));
            }
            let x = p[0];
            let taylor = [me.u(x)?, me.u_prime(x)?, 0.5 * me.u_double_prime(x)?];
            Ok(Jet::var(x, 0, order).compose(&taylor[..=order]))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn constant_b_gives_exponential() {
        let s = solve_ode_1d(Arc::new(|_| 1.0), 0.0, 1.0, (-2.0, 3.0), 1e-13).unwrap();
        let e = std::f64::consts::E;
        assert_relative_eq!(s.u(1.0).unwrap(), e - 1.0, epsilon = 1e-12);
        assert_relative_eq!(s.u(-1.3).unwrap(), (-1.3f64).exp() - 1.0, epsilon = 1e-12);
        assert_relative_eq!(s.u_prime(2.2).unwrap(), 2.2f64.exp(), max_relative = 1e-13);
        assert_relative_eq!(s.log_derivative(3.0).unwrap(), 3f64.exp() / (3f64.exp() - 1.0), max_relative = 1e-12);
        assert!(s.ode_residual(0.7).unwrap() < 1e-9);
        let f = s.to_scalar_field();
        let j = f.jet(&[0.5], 2).unwrap();
        assert_relative_eq!(j.d2(0, 0), 0.5f64.exp(), max_relative = 1e-13);
        assert!(s.u(3.5).is_err());
    }

    #[test]
    fn zero_b_gives_linear() {
        let s = solve_ode_1d(Arc::new(|_| 0.0), 2.0, -3.0, (-1.0, 1.0), 1e-12).unwrap();
        assert_relative_eq!(s.u(0.8).unwrap(), 2.0 - 2.4, epsilon = 1e-13);
        assert_relative_eq!(s.u(-0.3).unwrap(), 2.9, epsilon = 1e-13);
        assert_eq!(s.u(0.0).unwrap(), 2.0);
    }

    #[test]
    fn large_growth_stays_in_log_space() {
        // B(x) = x^2, so u' = e^{x^2} overflows long before x = 30
        let s = solve_ode_1d(Arc::new(|t| 2.0 * t), 0.0, 1.0, (0.0, 30.0), 1e-12).unwrap();
        let l = s.log_u(30.0).unwrap();
        assert!(l.is_finite() && l > 800.0);
        // u'/u ~ 2x for large x
        assert_relative_eq!(s.log_derivative(30.0).unwrap(), 60.0, max_relative = 2e-3);
    }

    #[test]
    fn shifted_start_has_unit_log_derivative_at_zero() {
        let s = solve_ode_1d(Arc::new(|_| 1.0), 1.0, 1.0, (0.0, 1.0), 1e-12).unwrap();
        assert_eq!(s.log_derivative(0.0).unwrap(), 1.0);
    }

    #[test]
    fn rejects_bad_tolerance() {
        assert!(matches!(solve_ode_1d(Arc::new(|_| 1.0), 0.0, 1.0, (0.0, 1.0), 0.0), Err(Error::Usage(_))));
    }
}
