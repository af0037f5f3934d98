//! Differential operators on scalar fields: gradient, covariant Hessian,
//! drifted Laplacian `Δ_X = Δ − g(X, ∇·)`, the Bochner residual for `Δ_X`,
//! and the structural conditions on nonlinearities `F`.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{ChartManifold, LocalGeometry, VectorFieldSpec};
use crate::jet::Jet;
use crate::linalg::Mat;
use crate::solver::{stencil, Mesh};

type PointJet = Arc<dyn Fn(&[f64], usize) -> Result<Jet> + Send + Sync>;

/// Values of a function on a rectangular mesh.
#[derive(Clone, Debug)]
pub struct GridField {
    pub mesh: Mesh,
    pub values: Vec<f64>,
}

#[derive(Clone)]
pub enum ScalarField {
    /// Closed form on jets; derivatives to order 4 are available.
    ClosedForm { name: String, f: PointJet, positivity_claimed: bool },
    /// Mesh values; only first and second differences are supported.
    Grid { field: GridField, positivity_claimed: bool },
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarField::ClosedForm { name, positivity_claimed, .. } => {
                write!(f, "ScalarField::ClosedForm({name}, positive={positivity_claimed})")
            }
            ScalarField::Grid { field, positivity_claimed } => {
                write!(f, "ScalarField::Grid({:?}, positive={positivity_claimed})", field.mesh)
            }
        }
    }
}

impl ScalarField {
    /// A closed-form field written against the coordinate jets.
    pub fn from_expr(name: impl Into<String>, f: impl Fn(&[Jet]) -> Jet + Send + Sync + 'static) -> Self {
        ScalarField::ClosedForm {
            name: name.into(),
            f: Arc::new(move |p, order| Ok(f(&Jet::vars(p, order)))),
            positivity_claimed: false,
        }
    }

    /// A closed-form field given directly as `(point, order) -> jet`.
    pub fn from_point_jet(
        name: impl Into<String>,
        f: impl Fn(&[f64], usize) -> Result<Jet> + Send + Sync + 'static,
    ) -> Self {
        ScalarField::ClosedForm { name: name.into(), f: Arc::new(f), positivity_claimed: false }
    }

    pub fn grid(mesh: Mesh, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.node_count() {
            return Err(Error::Usage(format!("{} values for {} mesh nodes", values.len(), mesh.node_count())));
        }
        Ok(ScalarField::Grid { field: GridField { mesh, values }, positivity_claimed: false })
    }

    pub fn claim_positive(mut self) -> Self {
        match &mut self {
            ScalarField::ClosedForm { positivity_claimed, .. } | ScalarField::Grid { positivity_claimed, .. } => {
                *positivity_claimed = true
            }
        }
        self
    }

    pub fn name(&self) -> &str {
        match self {
            ScalarField::ClosedForm { name, .. } => name,
            ScalarField::Grid { .. } => "grid",
        }
    }

    pub fn positivity_claimed(&self) -> bool {
        match self {
            ScalarField::ClosedForm { positivity_claimed, .. } | ScalarField::Grid { positivity_claimed, .. } => {
                *positivity_claimed
            }
        }
    }

    fn check_positive(&self, v: f64, p: &[f64]) -> Result<f64> {
        if self.positivity_claimed() && !(v > 0.0) {
            return Err(Error::Positivity { value: v, at: p.to_vec() });
        }
        Ok(v)
    }

    /// Jet of the field at `p` (closed form only).
    pub fn jet(&self, p: &[f64], order: usize) -> Result<Jet> {
        match self {
            ScalarField::ClosedForm { f, .. } => {
                let j = f(p, order)?;
                self.check_positive(j.value(), p)?;
                Ok(j)
            }
            ScalarField::Grid { .. } => Err(Error::Unsupported("jets of grid fields".into())),
        }
    }

    pub fn eval(&self, p: &[f64]) -> Result<f64> {
        match self {
            ScalarField::ClosedForm { .. } => Ok(self.jet(p, 0)?.value()),
            ScalarField::Grid { field, .. } => {
                let (i, j) = field.mesh.locate(p).ok_or_else(|| Error::domain(p, "not a mesh node"))?;
                self.check_positive(field.values[field.mesh.index(i, j)], p)
            }
        }
    }
}

/// Interior node of a grid field at `p`, or a domain error.
fn interior_node(field: &GridField, p: &[f64]) -> Result<(usize, usize)> {
    let (i, j) = field.mesh.locate(p).ok_or_else(|| Error::domain(p, "not a mesh node"))?;
    if field.mesh.is_boundary(i, j) {
        return Err(Error::domain(p, "boundary node has no central stencil"));
    }
    Ok((i, j))
}

/// Covariant Hessian `∂_i∂_j u − Γ^k_ij ∂_k u` as jets, two orders below `u`
/// (capped by the connection order).
pub fn covariant_hessian_jet(geo: &LocalGeometry, u: &Jet) -> Mat<Jet> {
    let n = geo.dim();
    let du: Vec<Jet> = (0..n).map(|k| u.d(k)).collect();
    Mat::from_fn(n, |i, j| {
        let mut h = du[i].d(j);
        for (k, duk) in du.iter().enumerate() {
            h -= geo.gamma(k, i, j) * *duk;
        }
        h
    })
}

/// `Δ_X u = g^{ij} Hess(u)_ij − X^k ∂_k u` on jets.
pub fn drifted_laplacian_jet(geo: &LocalGeometry, x: &[Jet], u: &Jet) -> Jet {
    let n = geo.dim();
    let h = covariant_hessian_jet(geo, u);
    let mut acc = Jet::constant(0.0);
    for i in 0..n {
        for j in 0..n {
            acc += geo.ginv[(i, j)] * h[(i, j)];
        }
        acc -= x[i] * u.d(i);
    }
    acc
}

/// Riemannian gradient `g^{ij} ∂_j u`.
pub fn gradient(m: &ChartManifold, u: &ScalarField, p: &[f64]) -> Result<Vec<f64>> {
    match u {
        ScalarField::ClosedForm { .. } => {
            let uj = u.jet(p, 1)?;
            let du: Vec<f64> = (0..m.dim()).map(|i| uj.d1(i)).collect();
            Ok(m.metric_at(p)?.inverse()?.mul_vec(&du))
        }
        ScalarField::Grid { field, .. } => {
            let (i, j) = interior_node(field, p)?;
            let d = stencil::central_gradient(&field.mesh, &field.values, i, j);
            Ok(m.metric_at(p)?.inverse()?.mul_vec(&d))
        }
    }
}

/// Covariant Hessian `∂_i∂_j u − Γ^k_ij ∂_k u`.
pub fn hessian(m: &ChartManifold, u: &ScalarField, p: &[f64]) -> Result<Mat<f64>> {
    match u {
        ScalarField::ClosedForm { .. } => {
            let geo = LocalGeometry::at(m, p, 0)?;
            Ok(covariant_hessian_jet(&geo, &u.jet(p, 2)?).values())
        }
        ScalarField::Grid { field, .. } => {
            let (i, j) = interior_node(field, p)?;
            let gamma = LocalGeometry::at(m, p, 0)?.christoffel();
            let d = stencil::central_gradient(&field.mesh, &field.values, i, j);
            let d2 = stencil::central_second(&field.mesh, &field.values, i, j);
            Ok(Mat::from_fn(2, |a, b| d2[a][b] - (0..2).map(|k| gamma.get(k, a, b) * d[k]).sum::<f64>()))
        }
    }
}

/// `Δ_X u = tr_g Hess(u) − g(X, ∇u)` at `p`. Grid fields use the same
/// discrete operator as the elliptic solver.
pub fn drifted_laplacian(m: &ChartManifold, x: &VectorFieldSpec, u: &ScalarField, p: &[f64]) -> Result<f64> {
    match u {
        ScalarField::ClosedForm { .. } => {
            let geo = LocalGeometry::at(m, p, 0)?;
            let xj = x.components_jet(p, 0)?;
            Ok(drifted_laplacian_jet(&geo, &xj, &u.jet(p, 2)?).value())
        }
        ScalarField::Grid { field, .. } => {
            let (i, j) = interior_node(field, p)?;
            let c = stencil::node_coeffs(m, x, p)?;
            Ok(stencil::apply(&c, &field.mesh, &field.values, i, j))
        }
    }
}

/// Both sides of `½Δ_X|∇u|² = |Hess u|² + g(∇u, ∇Δ_X u) + Ric_X(∇u, ∇u)`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BochnerTerms {
    pub lhs: f64,
    pub hess_norm_sq: f64,
    pub grad_dot_grad_lap: f64,
    pub ric_x_term: f64,
    pub rhs: f64,
    pub residual: f64,
}

impl BochnerTerms {
    /// `|lhs − rhs| / (1 + |rhs|)`
    pub fn relative_residual(&self) -> f64 {
        self.residual.abs() / (1.0 + self.rhs.abs())
    }
}

pub fn bochner_residual(m: &ChartManifold, x: &VectorFieldSpec, u: &ScalarField, p: &[f64]) -> Result<BochnerTerms> {
    if let ScalarField::Grid { .. } = u {
        return Err(Error::Unsupported("Bochner residual needs third derivatives; grid fields only have two".into()));
    }
    let n = m.dim();
    let geo = LocalGeometry::at(m, p, 1)?;
    let xj = x.components_jet(p, 1)?;
    let uj = u.jet(p, 3)?;
    let du: Vec<Jet> = (0..n).map(|i| uj.d(i)).collect();

    // left side: Δ_X applied to the field q = g^{ij} ∂_i u ∂_j u
    let q = geo.ginv.bilinear(&du, &du);
    let lhs = 0.5 * drifted_laplacian_jet(&geo, &xj, &q).value();

    // right side, assembled term by term
    let ginv = geo.ginv.values();
    let h = covariant_hessian_jet(&geo, &uj).values();
    let mut hess_norm_sq = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    hess_norm_sq += ginv[(i, k)] * ginv[(j, l)] * h[(i, j)] * h[(k, l)];
                }
            }
        }
    }
    let lap = drifted_laplacian_jet(&geo, &xj, &uj);
    let dlap: Vec<f64> = (0..n).map(|i| lap.d1(i)).collect();
    let du0: Vec<f64> = du.iter().map(Jet::value).collect();
    let grad_dot_grad_lap = ginv.bilinear(&du0, &dlap);
    let ricci = geo.ricci().values();
    let lie = geo.lie_derivative(&xj).values();
    let rx = Mat::from_fn(n, |i, j| ricci[(i, j)] + 0.5 * lie[(i, j)]);
    let grad_u = ginv.mul_vec(&du0);
    let ric_x_term = rx.bilinear(&grad_u, &grad_u);
    let rhs = hess_norm_sq + grad_dot_grad_lap + ric_x_term;
    Ok(BochnerTerms { lhs, hess_norm_sq, grad_dot_grad_lap, ric_x_term, rhs, residual: lhs - rhs })
}

/// A semilinearity `F` with its derivative and structural constants `α`, `β`
/// for `tF'(t) − F(t) <= αt` and `|F(t)| <= βt`.
#[derive(Clone)]
pub struct Nonlinearity {
    pub name: String,
    pub f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub f_prime: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub alpha: f64,
    pub beta: f64,
}

impl fmt::Debug for Nonlinearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Nonlinearity({}, α={}, β={})", self.name, self.alpha, self.beta)
    }
}

impl Nonlinearity {
    pub fn zero() -> Self {
        Nonlinearity { name: "zero".into(), f: Arc::new(|_| 0.0), f_prime: Arc::new(|_| 0.0), alpha: 0.0, beta: 0.0 }
    }

    /// `F(t) = c t`.
    pub fn linear(c: f64) -> Self {
        Nonlinearity {
            name: format!("linear({c})"),
            f: Arc::new(move |t| c * t),
            f_prime: Arc::new(move |_| c),
            alpha: 0.0,
            beta: c.abs(),
        }
    }

    /// `F(t) = a t / (t + b)^σ` with `b > 0`, `σ >= -1`. `α` and `β` are the
    /// global suprema where those are finite; otherwise the suprema over the
    /// default structural sample.
    pub fn saturating_family(a: f64, b: f64, sigma: f64) -> Result<Self> {
        if !(b > 0.0) || sigma < -1.0 {
            return Err(Error::Usage(format!("family needs b > 0 and σ >= -1 (got b={b}, σ={sigma})")));
        }
        let mut nl = Nonlinearity {
            name: format!("saturating_family({a},{b},{sigma})"),
            f: Arc::new(move |t| a * t / (t + b).powf(sigma)),
            f_prime: Arc::new(move |t| a * (t + b).powf(-sigma) - a * sigma * t * (t + b).powf(-sigma - 1.0)),
            alpha: 0.0,
            beta: 0.0,
        };
        let (alpha_fit, beta_fit) = fit_structural_constants(&nl, &default_structural_sample())?;
        // (tF' − F)/t = −aσ t (t+b)^{−σ−1}
        nl.alpha = if a * sigma >= 0.0 {
            0.0
        } else if sigma > 0.0 {
            let t = b / sigma;
            -a * sigma * t * (t + b).powf(-sigma - 1.0)
        } else {
            alpha_fit
        };
        // |F|/t = |a| (t+b)^{−σ}
        nl.beta = if sigma >= 0.0 { a.abs() * b.powf(-sigma) } else { beta_fit };
        Ok(nl)
    }

    pub fn with_constants(mut self, alpha: f64, beta: f64) -> Self {
        self.alpha = alpha;
        self.beta = beta;
        self
    }

    /// Largest relative mismatch between `f_prime` and a central difference
    /// of `f` over `sample`.
    pub fn derivative_consistency(&self, sample: &[f64]) -> f64 {
        sample
            .iter()
            .map(|&t| {
                let h = 1e-5 * t;
                let fd = ((self.f)(t + h) - (self.f)(t - h)) / (2.0 * h);
                let exact = (self.f_prime)(t);
                (fd - exact).abs() / (exact.abs() + (self.f)(t).abs() / t).max(1e-300)
            })
            .fold(0.0, f64::max)
    }
}

/// 400 log-spaced points in `[1e-6, 1e6]`.
pub fn default_structural_sample() -> Vec<f64> {
    log_spaced(1e-6, 1e6, 400)
}

pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|k| (a + (b - a) * k as f64 / (n - 1).max(1) as f64).exp()).collect()
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct StructuralReport {
    /// `max (tF' − F − αt)/t`
    pub max_condition_1: f64,
    /// `max (|F| − βt)/t`
    pub max_condition_2: f64,
    pub tolerance: f64,
    pub pass: bool,
}

fn check_sample(sample: &[f64]) -> Result<()> {
    if sample.is_empty() {
        return Err(Error::Usage("empty structural sample".into()));
    }
    if let Some(&t) = sample.iter().find(|&&t| !(t > 0.0)) {
        return Err(Error::Usage(format!("structural sample point {t} is not positive")));
    }
    Ok(())
}

pub fn check_structural_f(nl: &Nonlinearity, sample: &[f64]) -> Result<StructuralReport> {
    check_sample(sample)?;
    let (mut c1, mut c2) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for &t in sample {
        let f = (nl.f)(t);
        c1 = c1.max((t * (nl.f_prime)(t) - f - nl.alpha * t) / t);
        c2 = c2.max((f.abs() - nl.beta * t) / t);
    }
    let tolerance = 1e-12;
    Ok(StructuralReport { max_condition_1: c1, max_condition_2: c2, tolerance, pass: c1 <= tolerance && c2 <= tolerance })
}

/// Sample suprema of `(tF' − F)/t` and `|F|/t`.
pub fn fit_structural_constants(nl: &Nonlinearity, sample: &[f64]) -> Result<(f64, f64)> {
    check_sample(sample)?;
    let mut alpha = f64::NEG_INFINITY;
    let mut beta: f64 = 0.0;
    for &t in sample {
        let f = (nl.f)(t);
        alpha = alpha.max((t * (nl.f_prime)(t) - f) / t);
        beta = beta.max(f.abs() / t);
    }
    Ok((alpha, beta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::BoxDomain;
    use approx::assert_relative_eq;

    #[test]
    fn flat_gradient_and_hessian() {
        let m = ChartManifold::euclidean(2, 5.0);
        let u = ScalarField::from_expr("x2-y2", |x| x[0] * x[0] - x[1] * x[1]);
        assert_eq!(gradient(&m, &u, &[1.0, 2.0]).unwrap(), vec![2.0, -4.0]);
        let h = hessian(&m, &u, &[1.0, 2.0]).unwrap();
        assert_eq!(h, Mat::from_fn(2, |i, j| if i != j { 0.0 } else if i == 0 { 2.0 } else { -2.0 }));
    }

    #[test]
    fn halfplane_gradient_of_log_y() {
        let m = ChartManifold::hyperbolic_halfplane(1.0, BoxDomain::new(vec![-2.0, 0.0], vec![2.0, 4.0]).unwrap()).unwrap();
        let u = ScalarField::from_expr("log y", |x| x[1].ln());
        let g = gradient(&m, &u, &[0.0, 2.0]).unwrap();
        assert_relative_eq!(g[0], 0.0);
        assert_relative_eq!(g[1], 2.0, epsilon = 1e-14);
        // oracle: g^{ij} times a central difference of u
        let d = (3.0f64.ln() - 1.0f64.ln()) / 2.0;
        let fd = crate::geometry::fd::derivative(|s| Ok((2.0 + s).ln()), 1e-3).unwrap();
        assert_relative_eq!(4.0 * fd, g[1], epsilon = 1e-10);
        assert!(d > 0.0);
    }

    #[test]
    fn exp_x_is_x_harmonic_for_unit_drift() {
        let m = ChartManifold::euclidean(2, 5.0);
        let x = VectorFieldSpec::constant(vec![1.0, 0.0]);
        let u = ScalarField::from_expr("e^x", |x| x[0].exp());
        for p in [[0.3, -1.2], [2.0, 1.0], [-3.0, 0.0]] {
            assert!(drifted_laplacian(&m, &x, &u, &p).unwrap().abs() < 1e-12);
        }
        let c = ScalarField::from_expr("const", |x| x[0] * 0.0 + 3.0);
        let p = ChartManifold::paraboloid(2.0);
        let xp = VectorFieldSpec::paraboloid_gradient(&p, crate::geometry::PotentialVariant::Literal);
        assert_eq!(drifted_laplacian(&p, &xp, &c, &[0.3, 0.2]).unwrap(), 0.0);
    }

    #[test]
    fn bochner_flat_and_drifted() {
        let m = ChartManifold::euclidean(2, 5.0);
        let u = ScalarField::from_expr("x^3 y", |x| x[0].powi(3) * x[1]);
        let t = bochner_residual(&m, &VectorFieldSpec::zero(2), &u, &[0.7, -0.4]).unwrap();
        assert!(t.residual.abs() <= 1e-8, "{t:?}");
        let e = ScalarField::from_expr("e^x", |x| x[0].exp());
        let t = bochner_residual(&m, &VectorFieldSpec::constant(vec![1.0, 0.0]), &e, &[0.5, 0.1]).unwrap();
        assert!(t.residual.abs() <= 1e-8, "{t:?}");
        // both sides equal e^{2x}: |Hess|² = e^{2x}, Δ_X u = 0, Ric_X = 0
        assert_relative_eq!(t.rhs, 1f64.exp(), epsilon = 1e-12);
    }

    #[test]
    fn bochner_rejects_grid_fields() {
        let mesh = Mesh::new(&BoxDomain::square(2, 0.0, 1.0), 0.25).unwrap();
        let u = ScalarField::grid(mesh, vec![1.0; 25]).unwrap();
        let m = ChartManifold::euclidean(2, 5.0);
        assert!(matches!(
            bochner_residual(&m, &VectorFieldSpec::zero(2), &u, &[0.5, 0.5]),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn positivity_claim_is_enforced() {
        let u = ScalarField::from_expr("x", |x| x[0]).claim_positive();
        assert!(u.eval(&[0.5]).is_ok());
        assert!(matches!(u.eval(&[-0.5]), Err(Error::Positivity { .. })));
    }

    #[test]
    fn structural_examples() {
        let sample = default_structural_sample();
        assert!(check_structural_f(&Nonlinearity::zero(), &sample).unwrap().pass);
        assert!(check_structural_f(&Nonlinearity::linear(1.0), &sample).unwrap().pass);
        let fam = Nonlinearity::saturating_family(1.0, 1.0, 1.0).unwrap();
        assert_eq!((fam.alpha, fam.beta), (0.0, 1.0));
        assert!(check_structural_f(&fam, &sample).unwrap().pass);
        assert!(fam.derivative_consistency(&sample) < 1e-6);
        assert_eq!(fit_structural_constants(&Nonlinearity::linear(1.0), &sample).unwrap(), (0.0, 1.0));
        assert_eq!(fit_structural_constants(&Nonlinearity::zero(), &sample).unwrap(), (0.0, 0.0));
        let (a, b) = fit_structural_constants(&fam, &sample).unwrap();
        assert!(a <= 0.0);
        assert_relative_eq!(b, 1.0 / (1.0 + 1e-6), epsilon = 1e-15);
        assert!(matches!(check_structural_f(&fam, &[1.0, 0.0]), Err(Error::Usage(_))));
        assert!(matches!(fit_structural_constants(&fam, &[]), Err(Error::Usage(_))));
    }

    #[test]
    fn structural_oracle_dense_maximization() {
        // dense scan of tF' − F over the sample before fixing α
        let fam = Nonlinearity::saturating_family(1.0, 1.0, 1.0).unwrap();
        let dense = log_spaced(1e-6, 1e6, 20_000);
        let worst = dense.iter().map(|&t| t * (fam.f_prime)(t) - (fam.f)(t)).fold(f64::NEG_INFINITY, f64::max);
        assert!(worst <= 0.0);
    }
}
