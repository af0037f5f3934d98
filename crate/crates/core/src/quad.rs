//! Adaptive Gauss-Kronrod (7/15) quadrature by recursive bisection.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One G7/K15 panel: (Kronrod estimate, |Kronrod - Gauss|).
pub fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let dx = h * XGK[i];
        let s = f(c - dx) + f(c + dx);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

#[derive(Clone, Copy, Debug)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_depth: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions { abs_tol: 1e-13, rel_tol: 1e-13, max_depth: 40 }
    }
}

/// `∫_a^b f` with adaptive bisection. `b < a` yields the negated integral.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, opts: QuadOptions) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if b < a {
        return integrate(f, b, a, opts).map(|v| -v);
    }
    let (whole, err) = gk15(&f, a, b);
    refine(&f, a, b, whole, err, opts.abs_tol, opts, 0)
}

#[allow(clippy::too_many_arguments)]
fn refine(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    est: f64,
    err: f64,
    tol: f64,
    opts: QuadOptions,
    depth: usize,
) -> Result<f64> {
    if err <= tol.max(opts.rel_tol * est.abs()) || err <= 64.0 * f64::EPSILON * est.abs() {
        return Ok(est);
    }
    if depth >= opts.max_depth {
        return Err(Error::Numeric(format!(
            "quadrature on [{a}, {b}] did not converge (error estimate {err:e})"
        )));
    }
    let m = 0.5 * (a + b);
    let (l, el) = gk15(f, a, m);
    let (r, er) = gk15(f, m, b);
    Ok(refine(f, a, m, l, el, 0.5 * tol, opts, depth + 1)?
        + refine(f, m, b, r, er, 0.5 * tol, opts, depth + 1)?)
}

/// `F(x) = ∫_0^x f` tabulated at nodes spaced `step` apart on each side of
/// 0; values between nodes integrate from the node nearer 0.
#[derive(Clone)]
pub struct Antiderivative {
    f: std::sync::Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    step: f64,
    pos: Vec<f64>,
    neg: Vec<f64>,
    opts: QuadOptions,
}

impl std::fmt::Debug for Antiderivative {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Antiderivative(step={}, nodes={}+{})", self.step, self.pos.len(), self.neg.len())
    }
}

impl Antiderivative {
    pub fn new(
        f: std::sync::Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        lo: f64,
        hi: f64,
        step: f64,
        opts: QuadOptions,
    ) -> Result<Self> {
        if !(step > 0.0) || !(lo <= hi) {
            return Err(Error::Usage(format!("bad antiderivative table [{lo}, {hi}] step {step}")));
        }
        let side = |sign: f64, extent: f64| -> Result<Vec<f64>> {
            let n = (extent.max(0.0) / step).ceil() as usize;
            let mut acc = vec![0.0];
            for k in 0..n {
                let v = acc[k] + integrate(|t| f(t), sign * k as f64 * step, sign * (k + 1) as f64 * step, opts)?;
                acc.push(v);
            }
            Ok(acc)
        };
        let pos = side(1.0, hi)?;
        let neg = side(-1.0, -lo)?;
        Ok(Antiderivative { f, step, pos, neg, opts })
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let (table, sign) = if x >= 0.0 { (&self.pos, 1.0) } else { (&self.neg, -1.0) };
        let k = (x.abs() / self.step).floor() as usize;
        if k >= table.len() && !(k == table.len() && x.abs() == k as f64 * self.step) {
            return Err(Error::domain(&[x], "outside the tabulated range"));
        }
        let k = k.min(table.len() - 1);
        let xk = sign * k as f64 * self.step;
        Ok(table[k] + integrate(|t| (self.f)(t), xk, x, self.opts)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn integrates_smooth_functions() {
        let o = QuadOptions::default();
        assert_relative_eq!(integrate(f64::exp, 0.0, 1.0, o).unwrap(), std::f64::consts::E - 1.0, epsilon = 1e-14);
        assert_relative_eq!(integrate(|t| 1.0 / (1.0 + t * t), 0.0, 10.0, o).unwrap(), 10f64.atan(), epsilon = 1e-13);
        assert_relative_eq!(integrate(f64::cos, 1.0, 0.0, o).unwrap(), -1f64.sin(), epsilon = 1e-14);
    }

    #[test]
    fn reports_nonconvergence() {
        let o = QuadOptions { max_depth: 3, ..Default::default() };
        assert!(integrate(|t: f64| t.abs().sqrt().recip(), -1.0, 1.0, o).is_err());
    }

    #[test]
    fn antiderivative_table() {
        let a = Antiderivative::new(std::sync::Arc::new(f64::cos), -2.0, 3.0, 0.25, QuadOptions::default()).unwrap();
        for x in [-2.0, -1.1, 0.0, 0.3, 2.99, 3.0] {
            assert_relative_eq!(a.eval(x).unwrap(), f64::sin(x), epsilon = 1e-13);
        }
        assert!(a.eval(3.5).is_err());
    }
}
