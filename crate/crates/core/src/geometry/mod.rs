//! Chart-based metric geometry.
//!
//! A [`ChartManifold`] is a single coordinate chart (an open box) together
//! with a metric given in chart components. Every metric is produced on
//! [`Jet`] inputs, so Christoffel symbols, curvature and Lie derivatives come
//! out of forward-mode differentiation; the [`fd`] module holds the
//! finite-difference path used only for cross-checks.

pub mod fd;
mod field;
mod tensors;

use std::fmt;
use std::sync::Arc;

pub use field::{PotentialVariant, VectorFieldSpec};
pub use tensors::{
    christoffel, lie_derivative_metric, min_eig_ric_x_on_grid, ric_x, ric_x_lower_bound_on_grid, ricci,
    tensors_at, Christoffel, LocalGeometry, TensorAtPoint,
};

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::linalg::{sym_eigenvalues, Mat};

/// A function of the coordinate jets, e.g. a height function or a warp.
pub type JetFn = Arc<dyn Fn(&[Jet]) -> Jet + Send + Sync>;

/// Default safety margin kept from the chart boundary.
pub const DEFAULT_MARGIN: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct BoxDomain {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoxDomain {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::Usage("domain bounds must have equal, nonzero length".into()));
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a < b)) {
            return Err(Error::Usage(format!("empty domain box {lo:?}..{hi:?}")));
        }
        Ok(BoxDomain { lo, hi })
    }

    pub fn square(n: usize, lo: f64, hi: f64) -> Self {
        BoxDomain { lo: vec![lo; n], hi: vec![hi; n] }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    /// Strict interior test with margin `eps`.
    pub fn contains(&self, p: &[f64], eps: f64) -> bool {
        p.len() == self.dim()
            && p.iter().zip(self.lo.iter().zip(&self.hi)).all(|(&x, (&a, &b))| x > a + eps && x < b - eps)
    }

    /// Tensor grid with `counts[i]` points per axis including both ends,
    /// lexicographic with the last axis varying fastest.
    pub fn grid(&self, counts: &[usize]) -> Vec<Vec<f64>> {
        let n = self.dim();
        assert_eq!(counts.len(), n);
        let axis = |i: usize, k: usize| {
            if counts[i] == 1 {
                0.5 * (self.lo[i] + self.hi[i])
            } else {
                self.lo[i] + (self.hi[i] - self.lo[i]) * k as f64 / (counts[i] - 1) as f64
            }
        };
        let total: usize = counts.iter().product();
        (0..total)
            .map(|mut idx| {
                let mut p = vec![0.0; n];
                for i in (0..n).rev() {
                    p[i] = axis(i, idx % counts[i]);
                    idx /= counts[i];
                }
                p
            })
            .collect()
    }

    pub fn intersect(&self, other: &BoxDomain) -> Option<BoxDomain> {
        let lo: Vec<f64> = self.lo.iter().zip(&other.lo).map(|(a, b)| a.max(*b)).collect();
        let hi: Vec<f64> = self.hi.iter().zip(&other.hi).map(|(a, b)| a.min(*b)).collect();
        BoxDomain::new(lo, hi).ok()
    }

    pub fn shrink(&self, eps: f64) -> BoxDomain {
        BoxDomain {
            lo: self.lo.iter().map(|v| v + eps).collect(),
            hi: self.hi.iter().map(|v| v - eps).collect(),
        }
    }
}

/// Height function of a graph chart `(x, f(x))` in `R^{n+1}`.
#[derive(Clone)]
pub enum GraphHeight {
    /// `f(x) = a |x|^2`; `a = 1` is the paraboloid `z = x^2 + y^2`.
    Paraboloid { a: f64 },
    Custom { name: String, f: JetFn, injectivity_radius: f64 },
}

/// Warp `w(r)` of a rotationally symmetric metric `dr^2 + w(r)^2 dθ^2`.
#[derive(Clone)]
pub enum Warp {
    Flat,
    Hyperbolic { curvature: f64 },
    Custom { name: String, w: JetFn, injectivity_radius: f64 },
}

impl Warp {
    fn eval(&self, r: Jet) -> Jet {
        match self {
            Warp::Flat => r,
            Warp::Hyperbolic { curvature } => {
                let s = curvature.sqrt();
                (r * s).sinh() / s
            }
            Warp::Custom { w, .. } => w(&[r]),
        }
    }
}

#[derive(Clone)]
pub enum ChartKind {
    Euclidean,
    /// Upper half-space `x_n > 0` with metric `δ / (κ x_n^2)`, sectional
    /// curvature `-κ`.
    HyperbolicHalfSpace { curvature: f64 },
    /// Induced metric `δ + ∇f ∇f^T` of a graph.
    GraphSurface(GraphHeight),
    /// Polar chart `(r, θ)` of `dr^2 + w(r)^2 dθ^2`; the pole sits at `r = 0`
    /// on the chart boundary.
    RotationallySymmetric(Warp),
}

impl fmt::Debug for ChartKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tag())
    }
}

impl ChartKind {
    pub fn tag(&self) -> String {
        match self {
            ChartKind::Euclidean => "euclidean".into(),
            ChartKind::HyperbolicHalfSpace { curvature } => format!("hyperbolic_halfplane({curvature})"),
            ChartKind::GraphSurface(GraphHeight::Paraboloid { a }) => format!("graph_surface(paraboloid,{a})"),
            ChartKind::GraphSurface(GraphHeight::Custom { name, .. }) => format!("graph_surface({name})"),
            ChartKind::RotationallySymmetric(Warp::Flat) => "rotationally_symmetric(flat)".into(),
            ChartKind::RotationallySymmetric(Warp::Hyperbolic { curvature }) => {
                format!("rotationally_symmetric(hyperbolic,{curvature})")
            }
            ChartKind::RotationallySymmetric(Warp::Custom { name, .. }) => {
                format!("rotationally_symmetric({name})")
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct ChartManifold {
    dim: usize,
    domain: BoxDomain,
    kind: ChartKind,
    margin: f64,
}

impl ChartManifold {
    pub fn new(kind: ChartKind, domain: BoxDomain) -> Result<Self> {
        let dim = domain.dim();
        if dim > crate::jet::MAX_VARS {
            return Err(Error::Usage(format!("charts of dimension {dim} are not supported (max 3)")));
        }
        match &kind {
            ChartKind::HyperbolicHalfSpace { curvature } => {
                if !(*curvature > 0.0) {
                    return Err(Error::Usage("hyperbolic curvature scale must be positive".into()));
                }
                if domain.lo[dim - 1] < 0.0 {
                    return Err(Error::Usage("half-space chart requires last coordinate >= 0".into()));
                }
            }
            ChartKind::RotationallySymmetric(_) => {
                if dim != 2 || domain.lo[0] < 0.0 {
                    return Err(Error::Usage("rotationally symmetric chart is (r, θ) with r >= 0".into()));
                }
            }
            _ => {}
        }
        Ok(ChartManifold { dim, domain, kind, margin: DEFAULT_MARGIN })
    }

    pub fn euclidean(n: usize, half_width: f64) -> Self {
        ChartManifold::new(ChartKind::Euclidean, BoxDomain::square(n, -half_width, half_width))
            .expect("valid euclidean chart")
    }

    /// Upper half-plane with metric `(dx^2 + dy^2) / (κ y^2)`.
    pub fn hyperbolic_halfplane(curvature: f64, domain: BoxDomain) -> Result<Self> {
        ChartManifold::new(ChartKind::HyperbolicHalfSpace { curvature }, domain)
    }

    /// The paraboloid `z = x^2 + y^2` on the chart `[-w, w]^2`.
    pub fn paraboloid(half_width: f64) -> Self {
        ChartManifold::new(
            ChartKind::GraphSurface(GraphHeight::Paraboloid { a: 1.0 }),
            BoxDomain::square(2, -half_width, half_width),
        )
        .expect("valid paraboloid chart")
    }

    pub fn with_margin(mut self, margin: f64) -> Self {
        self.margin = margin;
        self
    }

    pub fn with_domain(&self, domain: BoxDomain) -> Result<Self> {
        let mut m = ChartManifold::new(self.kind.clone(), domain)?;
        m.margin = self.margin;
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    pub fn kind(&self) -> &ChartKind {
        &self.kind
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }

    pub fn check_point(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.dim {
            return Err(Error::domain(p, format!("expected {} coordinates", self.dim)));
        }
        if !self.domain.contains(p, self.margin) {
            return Err(Error::domain(p, format!("not inside {:?}..{:?} with margin {}", self.domain.lo, self.domain.hi, self.margin)));
        }
        Ok(())
    }

    /// Metric components as jets of the given order around `p`.
    pub fn metric_jet(&self, p: &[f64], order: usize) -> Result<Mat<Jet>> {
        self.check_point(p)?;
        let n = self.dim;
        let x = Jet::vars(p, order);
        let g = match &self.kind {
            ChartKind::Euclidean => Mat::identity(n),
            ChartKind::HyperbolicHalfSpace { curvature } => {
                let y = x[n - 1];
                let s = (y * y * *curvature).recip();
                Mat::from_fn(n, |i, j| if i == j { s } else { Jet::constant(0.0) })
            }
            ChartKind::GraphSurface(h) => {
                if order + 1 > crate::jet::MAX_ORDER {
                    return Err(Error::Unsupported(format!("graph metric jets of order {order}")));
                }
                let x1 = Jet::vars(p, order + 1);
                let f = match h {
                    GraphHeight::Paraboloid { a } => x1.iter().map(|&v| v * v).sum::<Jet>() * *a,
                    GraphHeight::Custom { f, .. } => f(&x1),
                };
                let df: Vec<Jet> = (0..n).map(|i| f.d(i)).collect();
                Mat::from_fn(n, |i, j| {
                    let base = df[i] * df[j];
                    if i == j {
                        base + 1.0
                    } else {
                        base
                    }
                })
            }
            ChartKind::RotationallySymmetric(w) => {
                let wr = w.eval(x[0]);
                Mat::from_fn(2, |i, j| match (i, j) {
                    (0, 0) => Jet::constant(1.0),
                    (1, 1) => wr * wr,
                    _ => Jet::constant(0.0),
                })
            }
        };
        Ok(g)
    }

    /// Metric at `p`, checked for symmetry and positive definiteness.
    pub fn metric_at(&self, p: &[f64]) -> Result<Mat<f64>> {
        let g = self.metric_jet(p, 0)?.values();
        check_spd(&g, p)?;
        Ok(g)
    }

    /// Conservative injectivity-radius bound at `o`.
    pub fn injectivity_radius_bound(&self) -> f64 {
        match &self.kind {
            ChartKind::GraphSurface(GraphHeight::Custom { injectivity_radius, .. })
            | ChartKind::RotationallySymmetric(Warp::Custom { injectivity_radius, .. }) => *injectivity_radius,
            _ => f64::INFINITY,
        }
    }

    /// Closed-form distance from `o`, when the chart kind provides one.
    pub fn closed_form_distance(&self, o: &[f64]) -> Option<JetFn> {
        let o = o.to_vec();
        match &self.kind {
            ChartKind::Euclidean => Some(Arc::new(move |x: &[Jet]| {
                x.iter().zip(&o).map(|(&xi, &oi)| (xi - oi) * (xi - oi)).sum::<Jet>().sqrt()
            })),
            ChartKind::HyperbolicHalfSpace { curvature } => {
                let s = curvature.sqrt();
                Some(Arc::new(move |x: &[Jet]| {
                    let n = x.len();
                    let d2 = x.iter().zip(&o).map(|(&xi, &oi)| (xi - oi) * (xi - oi)).sum::<Jet>();
                    (d2 / (x[n - 1] * (2.0 * o[n - 1])) + 1.0).acosh() / s
                }))
            }
            ChartKind::GraphSurface(GraphHeight::Paraboloid { a }) if o.iter().all(|&v| v == 0.0) => {
                let a = *a;
                // meridian arclength ∫_0^ρ sqrt(1 + 4a²t²) dt
                Some(Arc::new(move |x: &[Jet]| {
                    let rho = x.iter().map(|&v| v * v).sum::<Jet>().sqrt();
                    let s = (rho * rho * (4.0 * a * a) + 1.0).sqrt();
                    rho * s * 0.5 + (rho * (2.0 * a)).asinh() / (4.0 * a)
                }))
            }
            ChartKind::RotationallySymmetric(_) if o[0] == 0.0 => Some(Arc::new(|x: &[Jet]| x[0])),
            _ => None,
        }
    }

    /// Chart box containing the metric ball `B_R(o)`, clipped to the domain.
    pub fn ball_bounding_box(&self, o: &[f64], radius: f64) -> Result<BoxDomain> {
        let n = self.dim;
        let raw = match &self.kind {
            ChartKind::Euclidean | ChartKind::GraphSurface(_) => {
                // graph metrics dominate the chart metric, so chart balls contain metric balls
                BoxDomain { lo: o.iter().map(|v| v - radius).collect(), hi: o.iter().map(|v| v + radius).collect() }
            }
            ChartKind::HyperbolicHalfSpace { curvature } => {
                let t = curvature.sqrt() * radius;
                let y = o[n - 1];
                let mut lo: Vec<f64> = o.iter().map(|v| v - y * t.sinh()).collect();
                let mut hi: Vec<f64> = o.iter().map(|v| v + y * t.sinh()).collect();
                lo[n - 1] = y * (-t).exp();
                hi[n - 1] = y * t.exp();
                BoxDomain { lo, hi }
            }
            ChartKind::RotationallySymmetric(_) => BoxDomain {
                lo: vec![0.0, self.domain.lo[1]],
                hi: vec![o[0] + radius, self.domain.hi[1]],
            },
        };
        raw.intersect(&self.domain.shrink(2.0 * self.margin))
            .ok_or_else(|| Error::domain(o, "ball does not meet the chart"))
    }
}

pub(crate) fn check_spd(g: &Mat<f64>, p: &[f64]) -> Result<()> {
    if g.max_asymmetry() > 1e-14 {
        return Err(Error::Geometry(format!("metric not symmetric at {p:?}")));
    }
    let e = sym_eigenvalues(g);
    if !(e[0] > 0.0) || !e[e.len() - 1].is_finite() {
        return Err(Error::Geometry(format!("metric not positive definite at {p:?} (eigenvalues {e:?})")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn euclidean_metric_is_identity() {
        let m = ChartManifold::euclidean(3, 2.0);
        assert_eq!(m.metric_at(&[0.1, -0.3, 1.2]).unwrap(), Mat::identity(3));
    }

    #[test]
    fn paraboloid_metric_matches_induced_form() {
        let m = ChartManifold::paraboloid(3.0);
        let (x, y) = (0.7, -1.1);
        let g = m.metric_at(&[x, y]).unwrap();
        assert_relative_eq!(g[(0, 0)], 1.0 + 4.0 * x * x, epsilon = 1e-14);
        assert_relative_eq!(g[(0, 1)], 4.0 * x * y, epsilon = 1e-14);
        assert_relative_eq!(g[(1, 1)], 1.0 + 4.0 * y * y, epsilon = 1e-14);
    }

    #[test]
    fn domain_errors() {
        let m = ChartManifold::euclidean(2, 1.0);
        assert!(matches!(m.metric_at(&[1.0, 0.0]), Err(Error::Domain { .. })));
        assert!(matches!(m.metric_at(&[0.0]), Err(Error::Domain { .. })));
        let h = ChartManifold::hyperbolic_halfplane(1.0, BoxDomain::new(vec![-1.0, 0.0], vec![1.0, 2.0]).unwrap()).unwrap();
        // inside the box with the default margin but the metric blows up
        let g = h.metric_at(&[0.0, 1e-5]).unwrap();
        assert!(g[(0, 0)] > 1e9);
        assert!(ChartManifold::hyperbolic_halfplane(1.0, BoxDomain::new(vec![-1.0, -1.0], vec![1.0, 2.0]).unwrap()).is_err());
    }

    #[test]
    fn grid_is_lexicographic() {
        let d = BoxDomain::square(2, 0.0, 1.0);
        let g = d.grid(&[2, 3]);
        assert_eq!(g[0], vec![0.0, 0.0]);
        assert_eq!(g[1], vec![0.0, 0.5]);
        assert_eq!(g[3], vec![1.0, 0.0]);
        assert_eq!(g.len(), 6);
    }

    #[test]
    fn closed_form_distances() {
        let h = ChartManifold::hyperbolic_halfplane(1.0, BoxDomain::new(vec![-5.0, 0.0], vec![5.0, 10.0]).unwrap()).unwrap();
        let r = h.closed_form_distance(&[0.0, 1.0]).unwrap();
        let e = std::f64::consts::E;
        assert_relative_eq!(r(&[Jet::constant(0.0), Jet::constant(e)]).value(), 1.0, epsilon = 1e-14);
        let p = ChartManifold::paraboloid(3.0);
        let r = p.closed_form_distance(&[0.0, 0.0]).unwrap();
        let quad = crate::quad::integrate(|t| (1.0 + 4.0 * t * t).sqrt(), 0.0, 1.3, Default::default()).unwrap();
        assert_relative_eq!(r(&[Jet::constant(1.3), Jet::constant(0.0)]).value(), quad, epsilon = 1e-13);
        assert!(p.closed_form_distance(&[0.5, 0.0]).is_none());
    }
}
