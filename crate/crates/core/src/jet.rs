//! Truncated multivariate Taylor jets for forward-mode differentiation.
//!
//! A [`Jet`] stores the Taylor coefficients of a function of up to three
//! chart coordinates around a base point, truncated at total degree
//! `order <= 4`. Arithmetic propagates all mixed partials at once, so a
//! single evaluation of a metric or scalar field at an order-`k` jet yields
//! every partial derivative up to order `k`.
//!
//! Coefficients are stored per monomial `x^a y^b z^c` in graded order, so the
//! first `count(k)` entries are exactly the monomials of degree `<= k`.

use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::OnceLock;

pub const MAX_VARS: usize = 3;
pub const MAX_ORDER: usize = 4;
const N_MONO: usize = 35;
const COUNT: [usize; MAX_ORDER + 1] = [1, 4, 10, 20, 35];

struct Table {
    exps: [[u8; MAX_VARS]; N_MONO],
    index: [[[u8; MAX_ORDER + 1]; MAX_ORDER + 1]; MAX_ORDER + 1],
    /// (i, j, i*j) sorted by total degree of the product.
    pairs: Vec<(u8, u8, u8)>,
    /// pairs_upto[k] = number of pairs whose product has degree <= k.
    pairs_upto: [usize; MAX_ORDER + 1],
}

fn table() -> &'static Table {
    static TABLE: OnceLock<Table> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut exps = [[0u8; MAX_VARS]; N_MONO];
        let mut deg = [0u8; N_MONO];
        let mut index = [[[u8::MAX; MAX_ORDER + 1]; MAX_ORDER + 1]; MAX_ORDER + 1];
        let mut k = 0;
        for d in 0..=MAX_ORDER {
            for a in (0..=d).rev() {
                for b in (0..=(d - a)).rev() {
                    let c = d - a - b;
                    exps[k] = [a as u8, b as u8, c as u8];
                    deg[k] = d as u8;
                    index[a][b][c] = k as u8;
                    k += 1;
                }
            }
        }
        debug_assert_eq!(k, N_MONO);
        let mut pairs = Vec::new();
        for i in 0..N_MONO {
            for j in 0..N_MONO {
                let e = [
                    exps[i][0] + exps[j][0],
                    exps[i][1] + exps[j][1],
                    exps[i][2] + exps[j][2],
                ];
                if (e[0] + e[1] + e[2]) as usize <= MAX_ORDER {
                    let p = index[e[0] as usize][e[1] as usize][e[2] as usize];
                    pairs.push((i as u8, j as u8, p));
                }
            }
        }
        pairs.sort_by_key(|&(_, _, p)| (deg[p as usize], p));
        let mut pairs_upto = [0usize; MAX_ORDER + 1];
        for (d, slot) in pairs_upto.iter_mut().enumerate() {
            *slot = pairs.iter().filter(|&&(_, _, p)| deg[p as usize] as usize <= d).count();
        }
        Table { exps, index, pairs, pairs_upto }
    })
}

fn mono(e: [usize; MAX_VARS]) -> usize {
    table().index[e[0]][e[1]][e[2]] as usize
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    order: u8,
    c: [f64; N_MONO],
}

impl Jet {
    /// Constant jet. Constants carry the maximal order so that they never
    /// truncate the operand they are combined with.
    pub fn constant(v: f64) -> Self {
        let mut c = [0.0; N_MONO];
        c[0] = v;
        Jet { order: MAX_ORDER as u8, c }
    }

    pub fn constant_with_order(v: f64, order: usize) -> Self {
        assert!(order <= MAX_ORDER, "jet order {order} exceeds {MAX_ORDER}");
        let mut c = [0.0; N_MONO];
        c[0] = v;
        Jet { order: order as u8, c }
    }

    /// The coordinate function `x_var` expanded around `value`.
    pub fn var(value: f64, var: usize, order: usize) -> Self {
        assert!(var < MAX_VARS, "jets support at most {MAX_VARS} variables");
        let mut j = Jet::constant_with_order(value, order);
        if order >= 1 {
            let mut e = [0; MAX_VARS];
            e[var] = 1;
            j.c[mono(e)] = 1.0;
        }
        j
    }

    /// Coordinate jets for every component of `p`.
    pub fn vars(p: &[f64], order: usize) -> Vec<Jet> {
        p.iter().enumerate().map(|(i, &v)| Jet::var(v, i, order)).collect()
    }

    pub fn order(&self) -> usize {
        self.order as usize
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// Taylor coefficient of the monomial with exponents `e`.
    pub fn coeff(&self, e: [usize; MAX_VARS]) -> f64 {
        let d: usize = e.iter().sum();
        if d > self.order() {
            return 0.0;
        }
        self.c[mono(e)]
    }

    /// Partial derivative with multi-index `e`; zero beyond the truncation order.
    pub fn partial(&self, e: [usize; MAX_VARS]) -> f64 {
        let fact = |k: usize| (1..=k).product::<usize>() as f64;
        self.coeff(e) * e.iter().map(|&k| fact(k)).product::<f64>()
    }

    /// First partial derivative `∂_i`.
    pub fn d1(&self, i: usize) -> f64 {
        let mut e = [0; MAX_VARS];
        e[i] = 1;
        self.partial(e)
    }

    /// Second partial derivative `∂_i ∂_j`.
    pub fn d2(&self, i: usize, j: usize) -> f64 {
        let mut e = [0; MAX_VARS];
        e[i] += 1;
        e[j] += 1;
        self.partial(e)
    }

    /// Jet of the partial derivative `∂_var f`, one order lower.
    pub fn d(&self, var: usize) -> Jet {
        assert!(self.order >= 1, "cannot differentiate an order-0 jet");
        let t = table();
        let order = self.order() - 1;
        let mut out = Jet::constant_with_order(0.0, order);
        for k in 0..COUNT[order] {
            let mut e = t.exps[k];
            e[var] += 1;
            let src = t.index[e[0] as usize][e[1] as usize][e[2] as usize] as usize;
            out.c[k] = f64::from(e[var]) * self.c[src];
        }
        out
    }

    /// Copy truncated to a lower order.
    pub fn truncate(&self, order: usize) -> Jet {
        let order = order.min(self.order());
        let mut out = Jet::constant_with_order(0.0, order);
        out.c[..COUNT[order]].copy_from_slice(&self.c[..COUNT[order]]);
        out
    }

    fn nilpotent(&self) -> Jet {
        let mut h = *self;
        h.c[0] = 0.0;
        h
    }

    /// `φ(self)` given the Taylor coefficients `taylor[k] = φ^(k)(a)/k!` of
    /// `φ` at the base value `a`.
    pub fn compose(&self, taylor: &[f64]) -> Jet {
        let order = self.order();
        assert!(taylor.len() > order, "need {} Taylor coefficients", order + 1);
        let h = self.nilpotent();
        let mut acc = Jet::constant_with_order(taylor[order], order);
        for k in (0..order).rev() {
            acc = acc * h;
            acc.c[0] += taylor[k];
        }
        acc
    }

    /// `φ(self)` where `φ(a) = value` and `φ'` is itself available on jets.
    /// Higher derivatives of `φ` come from differentiating `φ'` through a
    /// univariate jet, so any function with a jet-capable derivative lifts.
    pub fn lift(&self, value: f64, derivative: impl Fn(Jet) -> Jet) -> Jet {
        let order = self.order();
        if order == 0 {
            return Jet::constant_with_order(value, 0);
        }
        let dphi = derivative(Jet::var(self.value(), 0, order - 1));
        let mut taylor = [0.0; MAX_ORDER + 1];
        taylor[0] = value;
        for (k, slot) in taylor.iter_mut().enumerate().take(order + 1).skip(1) {
            *slot = dphi.coeff([k - 1, 0, 0]) / k as f64;
        }
        self.compose(&taylor[..=order])
    }

    pub fn exp(self) -> Jet {
        let e = self.value().exp();
        let mut t = [0.0; MAX_ORDER + 1];
        let mut f = 1.0;
        for (k, slot) in t.iter_mut().enumerate() {
            if k > 0 {
                f *= k as f64;
            }
            *slot = e / f;
        }
        self.compose(&t[..=self.order()])
    }

    pub fn ln(self) -> Jet {
        let a = self.value();
        let mut t = [a.ln(), 0.0, 0.0, 0.0, 0.0];
        for (k, slot) in t.iter_mut().enumerate().skip(1) {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            *slot = sign / (k as f64 * a.powi(k as i32));
        }
        self.compose(&t[..=self.order()])
    }

    pub fn powf(self, s: f64) -> Jet {
        let a = self.value();
        let mut t = [0.0; MAX_ORDER + 1];
        let mut falling = 1.0;
        let mut fact = 1.0;
        for (k, slot) in t.iter_mut().enumerate() {
            if k > 0 {
                falling *= s - (k as f64 - 1.0);
                fact *= k as f64;
            }
            *slot = falling / fact * a.powf(s - k as f64);
        }
        self.compose(&t[..=self.order()])
    }

    pub fn sqrt(self) -> Jet {
        self.powf(0.5)
    }

    pub fn recip(self) -> Jet {
        let a = self.value();
        let mut t = [0.0; MAX_ORDER + 1];
        for (k, slot) in t.iter_mut().enumerate() {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            *slot = sign / a.powi(k as i32 + 1);
        }
        self.compose(&t[..=self.order()])
    }

    pub fn powi(self, n: i32) -> Jet {
        match n {
            0 => Jet::constant_with_order(1.0, self.order()),
            1 => self,
            2 => self * self,
            n if n < 0 => self.powi(-n).recip(),
            n => {
                let half = self.powi(n / 2);
                let sq = half * half;
                if n % 2 == 1 {
                    sq * self
                } else {
                    sq
                }
            }
        }
    }

    fn trig_taylor(s: f64, c: f64, hyperbolic: bool, start_with_sin: bool) -> [f64; MAX_ORDER + 1] {
        // derivative cycle of sin: s, c, -s, -c ; of sinh: s, c, s, c
        let cycle = if hyperbolic { [s, c, s, c] } else { [s, c, -s, -c] };
        let offset = if start_with_sin { 0 } else { 1 };
        let mut t = [0.0; MAX_ORDER + 1];
        let mut fact = 1.0;
        for (k, slot) in t.iter_mut().enumerate() {
            if k > 0 {
                fact *= k as f64;
            }
            *slot = cycle[(k + offset) % 4] / fact;
        }
        t
    }

    pub fn sin(self) -> Jet {
        let a = self.value();
        let t = Self::trig_taylor(a.sin(), a.cos(), false, true);
        self.compose(&t[..=self.order()])
    }

    pub fn cos(self) -> Jet {
        let a = self.value();
        let t = Self::trig_taylor(a.sin(), a.cos(), false, false);
        self.compose(&t[..=self.order()])
    }

    pub fn sinh(self) -> Jet {
        let a = self.value();
        let t = Self::trig_taylor(a.sinh(), a.cosh(), true, true);
        self.compose(&t[..=self.order()])
    }

    pub fn cosh(self) -> Jet {
        let a = self.value();
        let t = Self::trig_taylor(a.sinh(), a.cosh(), true, false);
        self.compose(&t[..=self.order()])
    }

    pub fn atan(self) -> Jet {
        self.lift(self.value().atan(), |x| (x * x + 1.0).recip())
    }

    pub fn asinh(self) -> Jet {
        self.lift(self.value().asinh(), |x| (x * x + 1.0).powf(-0.5))
    }

    /// Requires `self > 1`.
    pub fn acosh(self) -> Jet {
        self.lift(self.value().acosh(), |x| (x * x - 1.0).powf(-0.5))
    }

    pub fn tanh(self) -> Jet {
        self.sinh() / self.cosh()
    }
}

impl From<f64> for Jet {
    fn from(v: f64) -> Self {
        Jet::constant(v)
    }
}

impl Default for Jet {
    fn default() -> Self {
        Jet::constant(0.0)
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        let order = self.order.min(rhs.order);
        let mut out = Jet::constant_with_order(0.0, order as usize);
        for k in 0..COUNT[order as usize] {
            out.c[k] = self.c[k] + rhs.c[k];
        }
        out
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        let order = self.order.min(rhs.order);
        let mut out = Jet::constant_with_order(0.0, order as usize);
        for k in 0..COUNT[order as usize] {
            out.c[k] = self.c[k] - rhs.c[k];
        }
        out
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let order = self.order.min(rhs.order) as usize;
        let t = table();
        let mut out = Jet::constant_with_order(0.0, order);
        for &(i, j, p) in &t.pairs[..t.pairs_upto[order]] {
            out.c[p as usize] += self.c[i as usize] * rhs.c[j as usize];
        }
        out
    }
}

impl Div for Jet {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Jet) -> Jet {
        self * rhs.recip()
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(mut self) -> Jet {
        for v in self.c[..COUNT[self.order as usize]].iter_mut() {
            *v = -*v;
        }
        self
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: f64) -> Jet {
        self.c[0] += rhs;
        self
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: f64) -> Jet {
        self.c[0] -= rhs;
        self
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(mut self, rhs: f64) -> Jet {
        for v in self.c[..COUNT[self.order as usize]].iter_mut() {
            *v *= rhs;
        }
        self
    }
}

impl Div<f64> for Jet {
    type Output = Jet;
    fn div(mut self, rhs: f64) -> Jet {
        for v in self.c[..COUNT[self.order as usize]].iter_mut() {
            *v /= rhs;
        }
        self
    }
}

impl Add<Jet> for f64 {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        rhs + self
    }
}

impl Sub<Jet> for f64 {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        -rhs + self
    }
}

impl Mul<Jet> for f64 {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        rhs * self
    }
}

impl Div<Jet> for f64 {
    type Output = Jet;
    fn div(self, rhs: Jet) -> Jet {
        rhs.recip() * self
    }
}

macro_rules! assign_ops {
    ($($tr:ident $m:ident $op:tt),*) => {$(
        impl $tr for Jet {
            fn $m(&mut self, rhs: Jet) { *self = *self $op rhs; }
        }
        impl $tr<f64> for Jet {
            fn $m(&mut self, rhs: f64) { *self = *self $op rhs; }
        }
    )*};
}
assign_ops!(AddAssign add_assign +, SubAssign sub_assign -, MulAssign mul_assign *, DivAssign div_assign /);

impl std::iter::Sum for Jet {
    fn sum<I: Iterator<Item = Jet>>(iter: I) -> Jet {
        iter.fold(Jet::constant(0.0), |a, b| a + b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomial_partials() {
        // f = x^3 y + 2 y^2 z
        let v = Jet::vars(&[1.5, -0.5, 2.0], 4);
        let f = v[0].powi(3) * v[1] + 2.0 * v[1] * v[1] * v[2];
        assert_relative_eq!(f.value(), 1.5f64.powi(3) * -0.5 + 2.0 * 0.25 * 2.0);
        assert_relative_eq!(f.d1(0), 3.0 * 2.25 * -0.5);
        assert_relative_eq!(f.d2(0, 1), 3.0 * 2.25);
        assert_relative_eq!(f.partial([3, 1, 0]), 6.0);
        assert_relative_eq!(f.partial([0, 2, 1]), 4.0);
        assert_eq!(f.partial([4, 0, 0]), 0.0);
    }

    #[test]
    fn derivative_jet_matches_partials() {
        let v = Jet::vars(&[0.3, 0.7], 4);
        let f = (v[0] * v[1]).sin() + v[0].exp() * v[1].powi(2);
        let fx = f.d(0);
        assert_eq!(fx.order(), 3);
        assert_relative_eq!(fx.value(), f.d1(0), epsilon = 1e-14);
        assert_relative_eq!(fx.d2(0, 1), f.partial([2, 1, 0]), epsilon = 1e-13);
        assert_relative_eq!(fx.partial([1, 2, 0]), f.partial([2, 2, 0]), epsilon = 1e-12);
    }

    #[test]
    fn elementary_functions_against_closed_forms() {
        let a = 0.8;
        let x = Jet::var(a, 0, 4);
        let checks: Vec<(Jet, [f64; 5])> = vec![
            (x.exp(), [a.exp(); 5]),
            (x.ln(), [a.ln(), 1.0 / a, -1.0 / (a * a), 2.0 / a.powi(3), -6.0 / a.powi(4)]),
            (x.sin(), [a.sin(), a.cos(), -a.sin(), -a.cos(), a.sin()]),
            (x.cosh(), [a.cosh(), a.sinh(), a.cosh(), a.sinh(), a.cosh()]),
            (
                x.atan(),
                [
                    a.atan(),
                    1.0 / (1.0 + a * a),
                    -2.0 * a / (1.0 + a * a).powi(2),
                    (6.0 * a * a - 2.0) / (1.0 + a * a).powi(3),
                    -24.0 * a * (a * a - 1.0) / (1.0 + a * a).powi(4),
                ],
            ),
            (
                x.sqrt(),
                [a.sqrt(), 0.5 / a.sqrt(), -0.25 * a.powf(-1.5), 0.375 * a.powf(-2.5), -0.9375 * a.powf(-3.5)],
            ),
        ];
        for (j, d) in checks {
            for (k, &want) in d.iter().enumerate() {
                assert_relative_eq!(j.partial([k, 0, 0]), want, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn division_and_truncation() {
        let v = Jet::vars(&[2.0, 3.0], 2);
        let q = v[0] / v[1];
        assert_relative_eq!(q.d1(1), -2.0 / 9.0);
        assert_relative_eq!(q.d2(1, 1), 4.0 / 27.0);
        let low = Jet::var(1.0, 0, 1);
        assert_eq!((low * v[0]).order(), 1);
        assert_eq!((Jet::constant(2.0) * v[0]).order(), 2);
    }
}
