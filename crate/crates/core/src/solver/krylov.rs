//! Right-preconditioned BiCGSTAB for matrix-free operators.

use crate::par;

pub trait LinearOperator: Sync {
    fn len(&self) -> usize;
    fn apply(&self, x: &[f64], out: &mut [f64]);
    fn diagonal(&self) -> Vec<f64>;
}

#[derive(Clone, Copy, Debug)]
pub struct KrylovOptions {
    /// Stop once `max |b − A x| <= tol`.
    pub tol: f64,
    pub max_iter: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KrylovStats {
    pub iterations: usize,
    pub residual_inf: f64,
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let prod = par::map_range(a.len(), |k| a[k] * b[k]);
    par::ordered_sum(&prod)
}

fn inf_norm(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m: f64, v| m.max(v.abs()))
}

fn build(n: usize, f: impl Fn(usize) -> f64 + Sync + Send) -> Vec<f64> {
    par::map_range(n, f)
}

/// Solves `A x = b` starting from `x`. Breakdowns restart from the current
/// iterate; the true residual is recomputed at every restart.
pub fn bicgstab(op: &impl LinearOperator, b: &[f64], x: &mut [f64], opts: KrylovOptions) -> KrylovStats {
    let n = op.len();
    let dinv: Vec<f64> = op.diagonal().iter().map(|&d| if d != 0.0 { 1.0 / d } else { 1.0 }).collect();
    let mut tmp = vec![0.0; n];
    let mut iterations = 0;

    'restart: loop {
        op.apply(x, &mut tmp);
        let mut r = build(n, |k| b[k] - tmp[k]);
        let mut res = inf_norm(&r);
        if res <= opts.tol || iterations >= opts.max_iter {
            return KrylovStats { iterations, residual_inf: res, converged: res <= opts.tol };
        }
        let r_hat = r.clone();
        let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
        let mut v = vec![0.0; n];
        let mut p = vec![0.0; n];
        let mut t = vec![0.0; n];
        while iterations < opts.max_iter {
            iterations += 1;
            let rho_new = dot(&r_hat, &r);
            if rho_new.abs() < 1e-300 || omega == 0.0 {
                continue 'restart;
            }
            let beta = (rho_new / rho) * (alpha / omega);
            rho = rho_new;
            p = build(n, |k| r[k] + beta * (p[k] - omega * v[k]));
            let y = build(n, |k| dinv[k] * p[k]);
            op.apply(&y, &mut v);
            let rv = dot(&r_hat, &v);
            if rv.abs() < 1e-300 {
                continue 'restart;
            }
            alpha = rho / rv;
            let s = build(n, |k| r[k] - alpha * v[k]);
            if inf_norm(&s) <= opts.tol {
                let xn = build(n, |k| x[k] + alpha * y[k]);
                x.copy_from_slice(&xn);
                continue 'restart;
            }
            let z = build(n, |k| dinv[k] * s[k]);
            op.apply(&z, &mut t);
            let tt = dot(&t, &t);
            omega = if tt > 0.0 { dot(&t, &s) / tt } else { 0.0 };
            let xn = build(n, |k| x[k] + alpha * y[k] + omega * z[k]);
            x.copy_from_slice(&xn);
            r = build(n, |k| s[k] - omega * t[k]);
            res = inf_norm(&r);
            if res <= opts.tol {
                continue 'restart;
            }
        }
        op.apply(x, &mut tmp);
        res = inf_norm(&build(n, |k| b[k] - tmp[k]));
        return KrylovStats { iterations, residual_inf: res, converged: res <= opts.tol };
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// 1-D Dirichlet Laplacian plus a convection term.
    struct Tri {
        n: usize,
        c: f64,
    }

    impl LinearOperator for Tri {
        fn len(&self) -> usize {
            self.n
        }
        fn apply(&self, x: &[f64], out: &mut [f64]) {
            for k in 0..self.n {
                let l = if k > 0 { x[k - 1] } else { 0.0 };
                let r = if k + 1 < self.n { x[k + 1] } else { 0.0 };
                out[k] = 2.0 * x[k] - (1.0 + self.c) * l - (1.0 - self.c) * r;
            }
        }
        fn diagonal(&self) -> Vec<f64> {
            vec![2.0; self.n]
        }
    }

    #[test]
    fn solves_nonsymmetric_tridiagonal() {
        let op = Tri { n: 200, c: 0.3 };
        let x_true: Vec<f64> = (0..200).map(|k| (k as f64 * 0.1).sin()).collect();
        let mut b = vec![0.0; 200];
        op.apply(&x_true, &mut b);
        let mut x = vec![0.0; 200];
        let st = bicgstab(&op, &b, &mut x, KrylovOptions { tol: 1e-12, max_iter: 5000 });
        assert!(st.converged, "{st:?}");
        let err = x.iter().zip(&x_true).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-9, "{err}");
    }
}
