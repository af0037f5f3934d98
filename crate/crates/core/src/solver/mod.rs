//! Solvers for `Δ_X u + F(u) = 0`: a quadrature solver for the 1-D equation
//! `u'' − b u' = 0` and a damped-Newton finite-difference solver on chart
//! rectangles with Dirichlet data.

pub mod krylov;
mod mesh;
pub mod ode1d;
pub mod stencil;

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

pub use mesh::Mesh;
pub use ode1d::{solve_ode_1d, Ode1dSolution};

use crate::error::{Error, Result};
use crate::geometry::{BoxDomain, ChartManifold, VectorFieldSpec};
use crate::operators::Nonlinearity;
use crate::par;
use krylov::{bicgstab, KrylovOptions, LinearOperator};
use stencil::Weights;

/// Dirichlet data on the rectangle boundary.
#[derive(Clone)]
pub struct Boundary {
    pub name: String,
    f: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
}

impl fmt::Debug for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Boundary({})", self.name)
    }
}

impl Boundary {
    pub fn from_fn(name: impl Into<String>, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Boundary { name: name.into(), f: Arc::new(f) }
    }

    pub fn constant(c: f64) -> Self {
        Boundary::from_fn(format!("constant({c})"), move |_| c)
    }

    pub fn exp_x() -> Self {
        Boundary::from_fn("exp_x", |p| p[0].exp())
    }

    /// `c0 + cx x + cy y`
    pub fn linear(c0: f64, cx: f64, cy: f64) -> Self {
        Boundary::from_fn(format!("linear({c0},{cx},{cy})"), move |p| c0 + cx * p[0] + cy * p[1])
    }

    /// Values listed per node as `(x, y, value)`; every boundary node of the
    /// mesh must be covered.
    pub fn from_samples(name: impl Into<String>, samples: Vec<[f64; 3]>) -> Self {
        Boundary::from_fn(name, move |p| {
            samples
                .iter()
                .find(|s| (s[0] - p[0]).abs() <= 1e-9 && (s[1] - p[1]).abs() <= 1e-9)
                .map_or(f64::NAN, |s| s[2])
        })
    }

    pub fn eval(&self, p: &[f64]) -> f64 {
        (self.f)(p)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundaryRecord {
    pub name: String,
    pub min: f64,
    pub max: f64,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SolveOptions {
    pub newton_tol: f64,
    pub max_iter: usize,
    /// Reject Newton iterates with a nonpositive node value.
    pub require_positive: bool,
    pub linear_max_iter: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { newton_tol: 1e-8, max_iter: 50, require_positive: false, linear_max_iter: 20_000 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GridSolution {
    pub mesh: Mesh,
    pub values: Vec<f64>,
    pub boundary: BoundaryRecord,
    pub residual_inf: f64,
    pub iterations: usize,
    pub converged: bool,
    pub linear_iterations: usize,
}

impl GridSolution {
    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn value_at(&self, i: usize, j: usize) -> f64 {
        self.values[self.mesh.index(i, j)]
    }

    /// Interior and boundary extrema, `(interior_min, interior_max, boundary_min, boundary_max)`.
    pub fn extrema_split(&self) -> (f64, f64, f64, f64) {
        let (mut imin, mut imax, mut bmin, mut bmax) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for (k, &v) in self.values.iter().enumerate() {
            let (i, j) = self.mesh.coords(k);
            if self.mesh.is_boundary(i, j) {
                bmin = bmin.min(v);
                bmax = bmax.max(v);
            } else {
                imin = imin.min(v);
                imax = imax.max(v);
            }
        }
        (imin, imax, bmin, bmax)
    }

    /// Discrete maximum principle: interior values within the boundary range
    /// (up to `tol`).
    pub fn satisfies_max_principle(&self, tol: f64) -> bool {
        let (imin, imax, bmin, bmax) = self.extrema_split();
        imin >= bmin - tol && imax <= bmax + tol
    }
}

/// The discrete operator on one mesh: stencil weights at every interior node.
pub struct Discretization {
    pub mesh: Mesh,
    weights: Vec<Weights>,
}

impl Discretization {
    pub fn new(m: &ChartManifold, x: &VectorFieldSpec, mesh: &Mesh) -> Result<Self> {
        if m.dim() != 2 || x.dim() != 2 {
            return Err(Error::Usage("the grid solver works on 2-D charts".into()));
        }
        let rect = mesh.rect();
        let d = m.domain();
        if (0..2).any(|k| rect.lo[k] < d.lo[k] || rect.hi[k] > d.hi[k]) {
            return Err(Error::domain(&rect.lo, format!("rectangle {:?}..{:?} is not inside the chart", rect.lo, rect.hi)));
        }
        let per_node: Vec<Result<Weights>> = par::map_range(mesh.node_count(), |k| {
            let (i, j) = mesh.coords(k);
            if mesh.is_boundary(i, j) {
                return Ok([0.0; 9]);
            }
            let c = stencil::node_coeffs(m, x, &mesh.point(i, j))?;
            Ok(stencil::weights(&c, mesh))
        });
        Ok(Discretization { mesh: mesh.clone(), weights: per_node.into_iter().collect::<Result<_>>()? })
    }

    /// `Δ_X u + F(u)` at interior nodes, zero on the boundary.
    pub fn residual(&self, nl: &Nonlinearity, u: &[f64]) -> Vec<f64> {
        let mesh = &self.mesh;
        let mut out = vec![0.0; mesh.node_count()];
        par::for_each_row(&mut out, mesh.row_len(), |j, row| {
            if j == 0 || j == mesh.ny {
                return;
            }
            for i in 1..mesh.nx {
                let k = mesh.index(i, j);
                row[i] = stencil::apply_weights(&self.weights[k], mesh, u, i, j) + (nl.f)(u[k]);
            }
        });
        out
    }

    pub fn residual_inf(&self, nl: &Nonlinearity, u: &[f64]) -> f64 {
        self.residual(nl, u).iter().fold(0.0, |m: f64, v| if v.is_nan() { f64::NAN } else { m.max(v.abs()) })
    }
}

/// Newton Jacobian: the stencil plus `F'(u)` on the diagonal at interior
/// nodes, identity on boundary nodes.
struct Jacobian<'a> {
    disc: &'a Discretization,
    fprime: Vec<f64>,
}

impl LinearOperator for Jacobian<'_> {
    fn len(&self) -> usize {
        self.disc.mesh.node_count()
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        let mesh = &self.disc.mesh;
        par::for_each_row(out, mesh.row_len(), |j, row| {
            for i in 0..=mesh.nx {
                let k = mesh.index(i, j);
                row[i] = if mesh.is_boundary(i, j) {
                    x[k]
                } else {
                    stencil::apply_weights(&self.disc.weights[k], mesh, x, i, j) + self.fprime[k] * x[k]
                };
            }
        });
    }

    fn diagonal(&self) -> Vec<f64> {
        let mesh = &self.disc.mesh;
        (0..mesh.node_count())
            .map(|k| {
                let (i, j) = mesh.coords(k);
                if mesh.is_boundary(i, j) {
                    1.0
                } else {
                    self.disc.weights[k][4] + self.fprime[k]
                }
            })
            .collect()
    }
}

/// Solves `Δ_X u + F(u) = 0` on `rect` with `u = boundary` on its edges.
pub fn solve_elliptic_2d(
    m: &ChartManifold,
    x: &VectorFieldSpec,
    nl: &Nonlinearity,
    rect: &BoxDomain,
    boundary: &Boundary,
    h: f64,
    opts: SolveOptions,
) -> Result<GridSolution> {
    let mesh = Mesh::new(rect, h)?;
    solve_on_mesh(m, x, nl, &mesh, boundary, opts)
}

pub fn solve_on_mesh(
    m: &ChartManifold,
    x: &VectorFieldSpec,
    nl: &Nonlinearity,
    mesh: &Mesh,
    boundary: &Boundary,
    opts: SolveOptions,
) -> Result<GridSolution> {
    if !(opts.newton_tol > 0.0) {
        return Err(Error::Usage("newton_tol must be positive".into()));
    }
    let disc = Discretization::new(m, x, mesh)?;
    let n = mesh.node_count();

    let bvals: Vec<Option<f64>> = (0..n)
        .map(|k| {
            let (i, j) = mesh.coords(k);
            mesh.is_boundary(i, j).then(|| boundary.eval(&mesh.point(i, j)))
        })
        .collect();
    if let Some(k) = bvals.iter().position(|b| b.is_some_and(|v| !v.is_finite())) {
        let (i, j) = mesh.coords(k);
        return Err(Error::Usage(format!("boundary data '{}' undefined at {:?}", boundary.name, mesh.point(i, j))));
    }
    let bs: Vec<f64> = bvals.iter().flatten().copied().collect();
    let record = BoundaryRecord {
        name: boundary.name.clone(),
        min: bs.iter().copied().fold(f64::INFINITY, f64::min),
        max: bs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    };
    if opts.require_positive && !(record.min > 0.0) {
        return Err(Error::Positivity { value: record.min, at: vec![] });
    }
    let mean = par::ordered_sum(&bs) / bs.len() as f64;
    let mut u: Vec<f64> = bvals.iter().map(|b| b.unwrap_or(mean)).collect();

    let lin_tol = (1e-2 * opts.newton_tol).max(1e-12);
    let mut res = disc.residual(nl, &u);
    let mut res_inf = inf(&res);
    let mut iterations = 0;
    let mut linear_iterations = 0;
    let finish = |u: Vec<f64>, res_inf: f64, iterations: usize, linear_iterations: usize, converged: bool| GridSolution {
        mesh: mesh.clone(),
        values: u,
        boundary: record.clone(),
        residual_inf: res_inf,
        iterations,
        converged,
        linear_iterations,
    };

    while res_inf > opts.newton_tol {
        if iterations >= opts.max_iter {
            return Err(Error::NonConvergence {
                iterations,
                residual: res_inf,
                last: Box::new(finish(u, res_inf, iterations, linear_iterations, false)),
            });
        }
        iterations += 1;
        let jac = Jacobian {
            disc: &disc,
            fprime: u.iter().map(|&v| (nl.f_prime)(v)).collect(),
        };
        let rhs: Vec<f64> = res.iter().map(|v| -v).collect();
        let mut delta = vec![0.0; n];
        let st = bicgstab(&jac, &rhs, &mut delta, KrylovOptions { tol: lin_tol, max_iter: opts.linear_max_iter });
        linear_iterations += st.iterations;

        let mut step = 1.0;
        let mut positivity_blocked = false;
        loop {
            let trial: Vec<f64> = u.iter().zip(&delta).map(|(a, d)| a + step * d).collect();
            let min = trial.iter().copied().fold(f64::INFINITY, f64::min);
            if opts.require_positive && !(min > 0.0) {
                positivity_blocked = true;
            } else {
                let tres = disc.residual(nl, &trial);
                let tinf = inf(&tres);
                if tinf <= (1.0 - 1e-4 * step) * res_inf || tinf <= opts.newton_tol {
                    u = trial;
                    res = tres;
                    res_inf = tinf;
                    break;
                }
            }
            step *= 0.5;
            if step < 2f64.powi(-20) {
                if positivity_blocked {
                    let k = u.iter().zip(&delta).position(|(a, d)| a + d <= 0.0).unwrap_or(0);
                    let (i, j) = mesh.coords(k);
                    return Err(Error::Positivity { value: u[k] + delta[k], at: mesh.point(i, j).to_vec() });
                }
                return Err(Error::NonConvergence {
                    iterations,
                    residual: res_inf,
                    last: Box::new(finish(u, res_inf, iterations, linear_iterations, false)),
                });
            }
        }
    }
    Ok(finish(u, res_inf, iterations, linear_iterations, true))
}

fn inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m: f64, x| if x.is_nan() { f64::NAN } else { m.max(x.abs()) })
}

/// Where [`log_gradient_sup`] looks.
#[derive(Clone)]
pub enum Region {
    Rect(BoxDomain),
    Predicate(Arc<dyn Fn(&[f64]) -> bool + Send + Sync>),
}

impl Region {
    fn contains(&self, p: &[f64]) -> bool {
        match self {
            Region::Rect(r) => (0..2).all(|k| p[k] >= r.lo[k] - 1e-12 && p[k] <= r.hi[k] + 1e-12),
            Region::Predicate(f) => f(p),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LogGradientSup {
    pub value: f64,
    pub argmax: Vec<f64>,
    pub nodes: usize,
}

/// Largest `|∇u|²_g / u²` over interior nodes in `region`; the first node in
/// storage order wins ties.
pub fn log_gradient_sup(sol: &GridSolution, m: &ChartManifold, region: &Region) -> Result<LogGradientSup> {
    let mesh = &sol.mesh;
    let nodes: Vec<(usize, usize)> = (0..mesh.node_count())
        .map(|k| mesh.coords(k))
        .filter(|&(i, j)| !mesh.is_boundary(i, j) && region.contains(&mesh.point(i, j)))
        .collect();
    if nodes.is_empty() {
        return Err(Error::Usage("region contains no interior mesh nodes".into()));
    }
    let vals: Vec<Result<f64>> = par::map_slice(&nodes, |&(i, j)| {
        let p = mesh.point(i, j);
        let u = sol.value_at(i, j);
        if !(u > 0.0) {
            return Err(Error::Positivity { value: u, at: p.to_vec() });
        }
        let d = stencil::central_gradient(mesh, &sol.values, i, j);
        let ginv = m.metric_at(&p)?.inverse()?;
        Ok(ginv.bilinear(&d, &d) / (u * u))
    });
    let vals: Vec<f64> = vals.into_iter().collect::<Result<_>>()?;
    let mut best = 0;
    for (k, &v) in vals.iter().enumerate() {
        if v > vals[best] {
            best = k;
        }
    }
    let (i, j) = nodes[best];
    Ok(LogGradientSup { value: vals[best], argmax: mesh.point(i, j).to_vec(), nodes: nodes.len() })
}
