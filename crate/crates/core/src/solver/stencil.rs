//! Second-order central stencils for `Δ_X` in chart-coefficient form
//! `a^{ij} ∂_i∂_j u + b^k ∂_k u` with `a = g^{-1}` and
//! `b^k = −(g^{ij} Γ^k_ij + X^k)`. Mixed derivatives use the 4-point corner
//! stencil.

use super::Mesh;
use crate::error::Result;
use crate::geometry::{ChartManifold, LocalGeometry, VectorFieldSpec};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NodeCoeffs {
    pub a: [[f64; 2]; 2],
    pub b: [f64; 2],
}

pub fn node_coeffs(m: &ChartManifold, x: &VectorFieldSpec, p: &[f64]) -> Result<NodeCoeffs> {
    let geo = LocalGeometry::at(m, p, 0)?;
    let ginv = geo.ginv.values();
    let gamma = geo.christoffel();
    let xv = x.components_at(p)?;
    let mut b = [0.0; 2];
    for (k, bk) in b.iter_mut().enumerate() {
        let mut s = xv[k];
        for i in 0..2 {
            for j in 0..2 {
                s += ginv[(i, j)] * gamma.get(k, i, j);
            }
        }
        *bk = -s;
    }
    let a = [[ginv[(0, 0)], 0.5 * (ginv[(0, 1)] + ginv[(1, 0)])], [0.5 * (ginv[(0, 1)] + ginv[(1, 0)]), ginv[(1, 1)]]];
    Ok(NodeCoeffs { a, b })
}

/// Weights on the 3x3 neighbourhood, indexed `(dj + 1) * 3 + (di + 1)`.
pub type Weights = [f64; 9];

pub fn weights(c: &NodeCoeffs, mesh: &Mesh) -> Weights {
    let (hx, hy) = (mesh.hx, mesh.hy);
    let mut w = [0.0; 9];
    let at = |di: i32, dj: i32| ((dj + 1) * 3 + (di + 1)) as usize;
    let xx = c.a[0][0] / (hx * hx);
    let yy = c.a[1][1] / (hy * hy);
    let xy = 2.0 * c.a[0][1] / (4.0 * hx * hy);
    let bx = c.b[0] / (2.0 * hx);
    let by = c.b[1] / (2.0 * hy);
    w[at(-1, 0)] += xx - bx;
    w[at(1, 0)] += xx + bx;
    w[at(0, -1)] += yy - by;
    w[at(0, 1)] += yy + by;
    w[at(0, 0)] -= 2.0 * (xx + yy);
    w[at(1, 1)] += xy;
    w[at(-1, -1)] += xy;
    w[at(1, -1)] -= xy;
    w[at(-1, 1)] -= xy;
    w
}

/// `Σ w · v` over the neighbourhood of interior node `(i, j)`, in a fixed order.
pub fn apply_weights(w: &Weights, mesh: &Mesh, v: &[f64], i: usize, j: usize) -> f64 {
    let mut acc = 0.0;
    for dj in 0..3 {
        let row = (j + dj - 1) * mesh.row_len();
        for di in 0..3 {
            acc += w[dj * 3 + di] * v[row + i + di - 1];
        }
    }
    acc
}

pub fn apply(c: &NodeCoeffs, mesh: &Mesh, v: &[f64], i: usize, j: usize) -> f64 {
    apply_weights(&weights(c, mesh), mesh, v, i, j)
}

pub fn central_gradient(mesh: &Mesh, v: &[f64], i: usize, j: usize) -> [f64; 2] {
    let at = |a: usize, b: usize| v[mesh.index(a, b)];
    [(at(i + 1, j) - at(i - 1, j)) / (2.0 * mesh.hx), (at(i, j + 1) - at(i, j - 1)) / (2.0 * mesh.hy)]
}

pub fn central_second(mesh: &Mesh, v: &[f64], i: usize, j: usize) -> [[f64; 2]; 2] {
    let at = |a: usize, b: usize| v[mesh.index(a, b)];
    let c = at(i, j);
    let xx = (at(i + 1, j) - 2.0 * c + at(i - 1, j)) / (mesh.hx * mesh.hx);
    let yy = (at(i, j + 1) - 2.0 * c + at(i, j - 1)) / (mesh.hy * mesh.hy);
    let xy = (at(i + 1, j + 1) - at(i + 1, j - 1) - at(i - 1, j + 1) + at(i - 1, j - 1)) / (4.0 * mesh.hx * mesh.hy);
    [[xx, xy], [xy, yy]]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::BoxDomain;

    #[test]
    fn quadratics_are_differentiated_exactly() {
        let mesh = Mesh::new(&BoxDomain::square(2, 0.0, 1.0), 0.125).unwrap();
        let v: Vec<f64> = (0..mesh.node_count())
            .map(|k| {
                let (i, j) = mesh.coords(k);
                let [x, y] = mesh.point(i, j);
                x * x + 3.0 * x * y - y * y + x
            })
            .collect();
        let c = NodeCoeffs { a: [[1.0, 0.5], [0.5, 2.0]], b: [1.0, -1.0] };
        let [x, y] = mesh.point(3, 5);
        let exact = 2.0 + 2.0 * 0.5 * 3.0 + 2.0 * -2.0 + (2.0 * x + 3.0 * y + 1.0) - (3.0 * x - 2.0 * y);
        assert!((apply(&c, &mesh, &v, 3, 5) - exact).abs() < 1e-11);
        let s = central_second(&mesh, &v, 3, 5);
        assert!((s[0][1] - 3.0).abs() < 1e-11);
    }
}
