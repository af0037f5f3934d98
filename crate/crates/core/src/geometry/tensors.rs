use serde::Serialize;

use super::{check_spd, ChartManifold, VectorFieldSpec};
use crate::error::{Error, Result};
use crate::jet::{Jet, MAX_ORDER};
use crate::linalg::{generalized_sym_eigenvalues, sym_eigenvalues, Mat};

/// Christoffel symbols `Γ^k_ij`, stored `[k][i][j]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Christoffel {
    pub n: usize,
    pub data: Vec<f64>,
}

impl Christoffel {
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.data[(k * self.n + i) * self.n + j]
    }

    pub fn max_torsion(&self) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for k in 0..n {
            for i in 0..n {
                for j in 0..i {
                    worst = worst.max((self.get(k, i, j) - self.get(k, j, i)).abs());
                }
            }
        }
        worst
    }
}

/// Metric, inverse metric and Christoffel symbols as jets around a point.
///
/// `gamma` has order `order`; `g` and `ginv` carry one order more, which is
/// what the connection needs.
#[derive(Clone, Debug)]
pub struct LocalGeometry {
    pub point: Vec<f64>,
    pub order: usize,
    pub g: Mat<Jet>,
    pub ginv: Mat<Jet>,
    pub gamma: Vec<Jet>,
}

impl LocalGeometry {
    pub fn at(m: &ChartManifold, p: &[f64], order: usize) -> Result<Self> {
        if order + 1 > MAX_ORDER {
            return Err(Error::Unsupported(format!("connection jets of order {order}")));
        }
        let n = m.dim();
        let g = m.metric_jet(p, order + 1)?;
        check_spd(&g.values(), p)?;
        let ginv = g.inverse()?;
        // dg[t][i][j] = ∂_t g_ij
        let dg: Vec<Jet> = (0..n)
            .flat_map(|t| (0..n).flat_map(move |i| (0..n).map(move |j| (t, i, j))))
            .map(|(t, i, j)| g[(i, j)].d(t))
            .collect();
        let dgi = |t: usize, i: usize, j: usize| dg[(t * n + i) * n + j];
        let mut gamma = Vec::with_capacity(n * n * n);
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut acc = Jet::constant_with_order(0.0, order);
                    for t in 0..n {
                        acc += ginv[(k, t)] * (dgi(j, i, t) + dgi(i, j, t) - dgi(t, i, j));
                    }
                    gamma.push(acc * 0.5);
                }
            }
        }
        Ok(LocalGeometry { point: p.to_vec(), order, g, ginv, gamma })
    }

    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    pub fn gamma(&self, k: usize, i: usize, j: usize) -> Jet {
        let n = self.dim();
        self.gamma[(k * n + i) * n + j]
    }

    pub fn christoffel(&self) -> Christoffel {
        Christoffel { n: self.dim(), data: self.gamma.iter().map(Jet::value).collect() }
    }

    /// `R_ij = ∂_k Γ^k_ij − ∂_j Γ^k_ik + Γ^k_kl Γ^l_ij − Γ^k_jl Γ^l_ik`,
    /// one order below `gamma`.
    pub fn ricci(&self) -> Mat<Jet> {
        assert!(self.order >= 1, "Ricci needs connection jets of order >= 1");
        let n = self.dim();
        Mat::from_fn(n, |i, j| {
            let mut acc = Jet::constant_with_order(0.0, self.order - 1);
            for k in 0..n {
                acc += self.gamma(k, i, j).d(k) - self.gamma(k, i, k).d(j);
                for l in 0..n {
                    acc += self.gamma(k, k, l) * self.gamma(l, i, j) - self.gamma(k, j, l) * self.gamma(l, i, k);
                }
            }
            acc
        })
    }

    /// `(∇X)_ij = g_jk (∂_i X^k + Γ^k_il X^l)`, one order below `x`.
    pub fn covariant_derivative(&self, x: &[Jet]) -> Mat<Jet> {
        let n = self.dim();
        let nabla_up = |i: usize, k: usize| {
            let mut acc = x[k].d(i);
            for l in 0..n {
                acc += self.gamma(k, i, l) * x[l];
            }
            acc
        };
        let up: Vec<Jet> = (0..n).flat_map(|i| (0..n).map(move |k| (i, k))).map(|(i, k)| nabla_up(i, k)).collect();
        Mat::from_fn(n, |i, j| (0..n).map(|k| self.g[(j, k)] * up[i * n + k]).sum())
    }

    /// `L_X g = (∇X)_ij + (∇X)_ji`.
    pub fn lie_derivative(&self, x: &[Jet]) -> Mat<Jet> {
        let c = self.covariant_derivative(x);
        Mat::from_fn(self.dim(), |i, j| c[(i, j)] + c[(j, i)])
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TensorAtPoint {
    pub christoffel: Christoffel,
    pub ricci: Mat<f64>,
    /// `L_X g` (not halved).
    pub lie_deriv_metric: Mat<f64>,
    pub ric_x: Mat<f64>,
}

pub fn christoffel(m: &ChartManifold, p: &[f64]) -> Result<Christoffel> {
    Ok(LocalGeometry::at(m, p, 0)?.christoffel())
}

pub fn ricci(m: &ChartManifold, p: &[f64]) -> Result<Mat<f64>> {
    Ok(LocalGeometry::at(m, p, 1)?.ricci().values())
}

pub fn lie_derivative_metric(m: &ChartManifold, x: &VectorFieldSpec, p: &[f64]) -> Result<Mat<f64>> {
    let geo = LocalGeometry::at(m, p, 1)?;
    let xj = x.components_jet(p, 1)?;
    Ok(geo.lie_derivative(&xj).values())
}

/// `Ric_X = Ric + ½ L_X g`.
pub fn ric_x(m: &ChartManifold, x: &VectorFieldSpec, p: &[f64]) -> Result<Mat<f64>> {
    Ok(tensors_at(m, x, p)?.ric_x)
}

pub fn tensors_at(m: &ChartManifold, x: &VectorFieldSpec, p: &[f64]) -> Result<TensorAtPoint> {
    let geo = LocalGeometry::at(m, p, 1)?;
    let xj = x.components_jet(p, 1)?;
    let ricci = geo.ricci().values();
    let lie = geo.lie_derivative(&xj).values();
    let n = m.dim();
    let ric_x = Mat::from_fn(n, |i, j| ricci[(i, j)] + 0.5 * lie[(i, j)]);
    Ok(TensorAtPoint { christoffel: geo.christoffel(), ricci, lie_deriv_metric: lie, ric_x })
}

fn scan_grid(
    grid: &[Vec<f64>],
    eig: impl Fn(&[f64]) -> Result<f64> + Sync + Send,
) -> Result<(f64, Vec<f64>)> {
    if grid.is_empty() {
        return Err(Error::Usage("empty grid".into()));
    }
    let values: Result<Vec<f64>> = crate::par::map_slice(grid, |p| eig(p)).into_iter().collect();
    let values = values?;
    // first strict minimum wins, so ties resolve to the lowest grid index
    let mut best = 0;
    for (k, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = k;
        }
    }
    Ok((values[best], grid[best].clone()))
}

/// Smallest eigenvalue of the chart matrix of `Ric_X` over `grid`, with the
/// point where it is attained.
pub fn min_eig_ric_x_on_grid(m: &ChartManifold, x: &VectorFieldSpec, grid: &[Vec<f64>]) -> Result<(f64, Vec<f64>)> {
    scan_grid(grid, |p| Ok(sym_eigenvalues(&ric_x(m, x, p)?)[0]))
}

/// Largest `k` with `Ric_X >= k g` over `grid`: the smallest eigenvalue of
/// `Ric_X` relative to the metric.
pub fn ric_x_lower_bound_on_grid(
    m: &ChartManifold,
    x: &VectorFieldSpec,
    grid: &[Vec<f64>],
) -> Result<(f64, Vec<f64>)> {
    scan_grid(grid, |p| {
        let g = m.metric_at(p)?;
        Ok(generalized_sym_eigenvalues(&ric_x(m, x, p)?, &g)?[0])
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{BoxDomain, JetFn, PotentialVariant};
    use approx::assert_relative_eq;
    use std::sync::Arc;

    fn halfplane() -> ChartManifold {
        ChartManifold::hyperbolic_halfplane(1.0, BoxDomain::new(vec![-3.0, 0.0], vec![3.0, 5.0]).unwrap()).unwrap()
    }

    #[test]
    fn paraboloid_christoffel_spot_value() {
        let m = ChartManifold::paraboloid(3.0);
        let c = christoffel(&m, &[1.0, 0.0]).unwrap();
        assert_relative_eq!(c.get(0, 0, 0), 0.8, epsilon = 1e-15);
        assert_relative_eq!(c.get(0, 1, 1), 0.8, epsilon = 1e-15);
        assert_eq!(c.get(0, 0, 1), 0.0);
    }

    #[test]
    fn euclidean_connection_and_curvature_vanish() {
        let m = ChartManifold::euclidean(3, 1.0);
        let t = tensors_at(&m, &VectorFieldSpec::zero(3), &[0.2, 0.1, -0.4]).unwrap();
        assert!(t.christoffel.data.iter().all(|&v| v == 0.0));
        assert_eq!(t.ricci, Mat::zeros(3));
    }

    #[test]
    fn halfplane_christoffel_matches_finite_differences() {
        let m = halfplane();
        let c = christoffel(&m, &[0.0, 1.0]).unwrap();
        assert_relative_eq!(c.get(0, 0, 1), -1.0, epsilon = 1e-14);
        assert_relative_eq!(c.get(1, 0, 0), 1.0, epsilon = 1e-14);
        assert_relative_eq!(c.get(1, 1, 1), -1.0, epsilon = 1e-14);
        let fd = crate::geometry::fd::christoffel_fd(&m, &[0.0, 1.0], 1e-3).unwrap();
        for (a, b) in c.data.iter().zip(&fd.data) {
            assert_relative_eq!(a, b, epsilon = 1e-9);
        }
    }

    #[test]
    fn paraboloid_ricci_is_gauss_curvature_times_metric() {
        let m = ChartManifold::paraboloid(3.0);
        assert_relative_eq!(ricci(&m, &[0.0, 0.0]).unwrap()[(0, 0)], 4.0, epsilon = 1e-13);
        let r = ricci(&m, &[0.5, 0.0]).unwrap();
        let g = m.metric_at(&[0.5, 0.0]).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_relative_eq!(r[(i, j)], g[(i, j)], epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn ric_x_examples() {
        let m = ChartManifold::euclidean(2, 5.0);
        let r = ric_x(&m, &VectorFieldSpec::constant(vec![1.0, 0.0]), &[0.3, 0.4]).unwrap();
        assert_eq!(r, Mat::zeros(2));
        let b: JetFn = Arc::new(|x| x[0]);
        let x = VectorFieldSpec::along_first_axis("linear_x1", 3, b);
        let m3 = ChartManifold::euclidean(3, 5.0);
        let r = ric_x(&m3, &x, &[1.0, -2.0, 0.5]).unwrap();
        assert_eq!(r, Mat::from_fn(3, |i, j| if i == 0 && j == 0 { 1.0 } else { 0.0 }));
        let p = ChartManifold::paraboloid(3.0);
        let zero = ric_x(&p, &VectorFieldSpec::zero(2), &[0.4, -0.2]).unwrap();
        assert_eq!(zero, ricci(&p, &[0.4, -0.2]).unwrap());
    }

    #[test]
    fn lie_derivative_matches_coordinate_formula() {
        // L_X g_ij = X^k ∂_k g_ij + g_kj ∂_i X^k + g_ik ∂_j X^k
        let m = ChartManifold::paraboloid(3.0);
        let x = VectorFieldSpec::paraboloid_gradient(&m, PotentialVariant::Literal);
        let p = [0.6, -0.9];
        let lie = lie_derivative_metric(&m, &x, &p).unwrap();
        let g = m.metric_jet(&p, 1).unwrap();
        let xj = x.components_jet(&p, 1).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let mut want = 0.0;
                for k in 0..2 {
                    want += xj[k].value() * g[(i, j)].d1(k)
                        + g[(k, j)].value() * xj[k].d1(i)
                        + g[(i, k)].value() * xj[k].d1(j);
                }
                assert_relative_eq!(lie[(i, j)], want, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn min_eig_scans() {
        let m = ChartManifold::euclidean(2, 1.0);
        let grid = BoxDomain::square(2, -0.5, 0.5).grid(&[3, 3]);
        let (v, at) = min_eig_ric_x_on_grid(&m, &VectorFieldSpec::zero(2), &grid).unwrap();
        assert_eq!(v, 0.0);
        assert_eq!(at, grid[0]);
        assert!(matches!(min_eig_ric_x_on_grid(&m, &VectorFieldSpec::zero(2), &[]), Err(Error::Usage(_))));

        let h = halfplane();
        let grid = BoxDomain::new(vec![-1.0, 0.5], vec![1.0, 2.0]).unwrap().grid(&[5, 7]);
        let (v, _) = min_eig_ric_x_on_grid(&h, &VectorFieldSpec::zero(2), &grid).unwrap();
        let largest = grid.iter().map(|p| sym_eigenvalues(&h.metric_at(p).unwrap())[1]).fold(0.0, f64::max);
        assert_relative_eq!(v, -largest, epsilon = 1e-8);
        let (k, _) = ric_x_lower_bound_on_grid(&h, &VectorFieldSpec::zero(2), &grid).unwrap();
        assert_relative_eq!(k, -1.0, epsilon = 1e-12);
    }
}
