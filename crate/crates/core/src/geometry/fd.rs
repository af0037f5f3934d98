//! Finite-difference route to the connection and curvature, used only to
//! cross-check the jet pipeline. Derivatives use the 4th-order central
//! stencil with one Richardson extrapolation step.

use super::{ChartManifold, Christoffel};
use crate::error::Result;
use crate::linalg::Mat;

fn central4(f: &impl Fn(f64) -> Result<f64>, h: f64) -> Result<f64> {
    Ok((-f(2.0 * h)? + 8.0 * f(h)? - 8.0 * f(-h)? + f(-2.0 * h)?) / (12.0 * h))
}

/// Derivative at 0 of `f(t)` along a line, Richardson-extrapolated.
pub fn derivative(f: impl Fn(f64) -> Result<f64>, h: f64) -> Result<f64> {
    let coarse = central4(&f, h)?;
    let fine = central4(&f, 0.5 * h)?;
    Ok((16.0 * fine - coarse) / 15.0)
}

fn shifted(p: &[f64], axis: usize, t: f64) -> Vec<f64> {
    let mut q = p.to_vec();
    q[axis] += t;
    q
}

/// Christoffel symbols from finite differences of `metric_at`.
pub fn christoffel_fd(m: &ChartManifold, p: &[f64], h: f64) -> Result<Christoffel> {
    let n = m.dim();
    let ginv = m.metric_at(p)?.inverse()?;
    let mut dg = vec![0.0; n * n * n];
    for t in 0..n {
        for i in 0..n {
            for j in i..n {
                let d = derivative(|s| Ok(m.metric_at(&shifted(p, t, s))?[(i, j)]), h)?;
                dg[(t * n + i) * n + j] = d;
                dg[(t * n + j) * n + i] = d;
            }
        }
    }
    let dgi = |t: usize, i: usize, j: usize| dg[(t * n + i) * n + j];
    let mut data = Vec::with_capacity(n * n * n);
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let s: f64 = (0..n).map(|t| ginv[(k, t)] * (dgi(j, i, t) + dgi(i, j, t) - dgi(t, i, j))).sum();
                data.push(0.5 * s);
            }
        }
    }
    Ok(Christoffel { n, data })
}

/// Ricci tensor from finite differences of [`christoffel_fd`]; `h_outer` is
/// the step for the second differentiation, `h_inner` for the metric.
pub fn ricci_fd(m: &ChartManifold, p: &[f64], h_outer: f64, h_inner: f64) -> Result<Mat<f64>> {
    let n = m.dim();
    let c = christoffel_fd(m, p, h_inner)?;
    // dc[a][k][i][j] = ∂_a Γ^k_ij
    let mut dc = vec![0.0; n * n * n * n];
    for a in 0..n {
        let along: Vec<Christoffel> = [-2.0, -1.0, -0.5, 0.5, 1.0, 2.0]
            .iter()
            .map(|&s| christoffel_fd(m, &shifted(p, a, s * h_outer), h_inner))
            .collect::<Result<_>>()?;
        for idx in 0..n * n * n {
            let at = |k: usize| along[k].data[idx];
            let coarse = (-at(5) + 8.0 * at(4) - 8.0 * at(1) + at(0)) / (12.0 * h_outer);
            // half step: ±h/2 and ±h
            let fine = (-at(4) + 8.0 * at(3) - 8.0 * at(2) + at(1)) / (6.0 * h_outer);
            dc[a * n * n * n + idx] = (16.0 * fine - coarse) / 15.0;
        }
    }
    let dgam = |a: usize, k: usize, i: usize, j: usize| dc[a * n * n * n + (k * n + i) * n + j];
    Ok(Mat::from_fn(n, |i, j| {
        let mut acc = 0.0;
        for k in 0..n {
            acc += dgam(k, k, i, j) - dgam(j, k, i, k);
            for l in 0..n {
                acc += c.get(k, k, l) * c.get(l, i, j) - c.get(k, j, l) * c.get(l, i, k);
            }
        }
        acc
    }))
}
