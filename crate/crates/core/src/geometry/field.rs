use std::fmt;
use std::sync::Arc;

use super::{ChartManifold, JetFn};
use crate::error::Result;
use crate::jet::Jet;

type ComponentsFn = Arc<dyn Fn(&[f64], usize) -> Result<Vec<Jet>> + Send + Sync>;

/// A drift field `X` in chart components, with optional norm-bound metadata.
#[derive(Clone)]
pub struct VectorFieldSpec {
    name: String,
    dim: usize,
    components: ComponentsFn,
    /// `Λ(r)`: bound on `|X|_g` as a function of the distance from the base point.
    pub norm_bound: Option<Arc<dyn Fn(f64) -> f64 + Send + Sync>>,
    /// Global bound `Λ` on `|X|_g`.
    pub global_bound: Option<f64>,
}

impl fmt::Debug for VectorFieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VectorFieldSpec")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("global_bound", &self.global_bound)
            .finish()
    }
}

/// Which potential `Φ` the paraboloid drift `X = ∇Φ` is built from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialVariant {
    /// `Φ = ½ ∫_0^{x²+y²} dt / (1 + 4t²) = ¼ atan(2(x²+y²))`.
    Literal,
    /// `Φ = ½ ∫_0^{x²+y²} dt / (1 + 4t) = ⅛ log(1 + 4(x²+y²))`.
    Alternate,
}

impl PotentialVariant {
    pub fn potential(self) -> JetFn {
        match self {
            PotentialVariant::Literal => Arc::new(|x: &[Jet]| {
                let s = x[0] * x[0] + x[1] * x[1];
                (s * 2.0).atan() * 0.25
            }),
            PotentialVariant::Alternate => Arc::new(|x: &[Jet]| {
                let s = x[0] * x[0] + x[1] * x[1];
                (s * 4.0 + 1.0).ln() * 0.125
            }),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PotentialVariant::Literal => "literal",
            PotentialVariant::Alternate => "alternate",
        }
    }
}

impl VectorFieldSpec {
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        components: impl Fn(&[f64], usize) -> Result<Vec<Jet>> + Send + Sync + 'static,
    ) -> Self {
        VectorFieldSpec {
            name: name.into(),
            dim,
            components: Arc::new(components),
            norm_bound: None,
            global_bound: None,
        }
    }

    /// Components given as expressions in the coordinate jets.
    pub fn from_exprs(name: impl Into<String>, exprs: Vec<JetFn>) -> Self {
        let dim = exprs.len();
        VectorFieldSpec::new(name, dim, move |p, order| {
            let x = Jet::vars(p, order);
            Ok(exprs.iter().map(|e| e(&x)).collect())
        })
    }

    pub fn zero(dim: usize) -> Self {
        VectorFieldSpec::new("zero", dim, move |_, order| Ok(vec![Jet::constant_with_order(0.0, order); dim]))
            .with_global_bound(0.0)
    }

    /// Constant chart components; `|X|_g` is only globally bounded on flat charts.
    pub fn constant(components: Vec<f64>) -> Self {
        let dim = components.len();
        VectorFieldSpec::new("constant", dim, move |_, order| {
            Ok(components.iter().map(|&c| Jet::constant_with_order(c, order)).collect())
        })
    }

    /// `X = b(x_1) ∂/∂x_1` on an `n`-dimensional chart.
    pub fn along_first_axis(name: impl Into<String>, dim: usize, b: JetFn) -> Self {
        VectorFieldSpec::new(name, dim, move |p, order| {
            let x1 = Jet::var(p[0], 0, order);
            let mut out = vec![Jet::constant_with_order(0.0, order); dim];
            out[0] = b(&[x1]);
            Ok(out)
        })
    }

    /// Riemannian gradient `X = ∇Φ` on `m`.
    pub fn gradient_of(name: impl Into<String>, m: &ChartManifold, potential: JetFn) -> Self {
        let m = m.clone();
        let dim = m.dim();
        VectorFieldSpec::new(name, dim, move |p, order| {
            let phi = potential(&Jet::vars(p, order + 1));
            let dphi: Vec<Jet> = (0..dim).map(|i| phi.d(i)).collect();
            let ginv = m.metric_jet(p, order)?.inverse()?;
            Ok(ginv.mul_vec(&dphi))
        })
    }

    /// The paraboloid drift `X = ∇Φ` for the chosen potential.
    pub fn paraboloid_gradient(m: &ChartManifold, variant: PotentialVariant) -> Self {
        VectorFieldSpec::gradient_of(format!("grad_phi_{}", variant.name()), m, variant.potential())
    }

    pub fn with_global_bound(mut self, bound: f64) -> Self {
        self.global_bound = Some(bound);
        self
    }

    pub fn with_norm_bound(mut self, bound: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.norm_bound = Some(Arc::new(bound));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components_jet(&self, p: &[f64], order: usize) -> Result<Vec<Jet>> {
        (self.components)(p, order)
    }

    pub fn components_at(&self, p: &[f64]) -> Result<Vec<f64>> {
        Ok(self.components_jet(p, 0)?.iter().map(Jet::value).collect())
    }

    /// `|X|_g` at `p`.
    pub fn norm_at(&self, m: &ChartManifold, p: &[f64]) -> Result<f64> {
        let g = m.metric_at(p)?;
        let x = self.components_at(p)?;
        Ok(g.bilinear(&x, &x).max(0.0).sqrt())
    }

    /// Largest `|X|_g` over `points`, and whether the declared global bound
    /// holds on them (within 1e-9).
    pub fn check_global_bound(&self, m: &ChartManifold, points: &[Vec<f64>]) -> Result<(f64, bool)> {
        let norms: Result<Vec<f64>> = crate::par::map_slice(points, |p| self.norm_at(m, p)).into_iter().collect();
        let sup = crate::par::ordered_max(&norms?);
        let ok = self.global_bound.is_none_or(|b| sup <= b + 1e-9);
        Ok((sup, ok))
    }
}
