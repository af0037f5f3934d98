//! Geodesics on charts and numerical checks of the comparison bound
//! `Δ_X r <= (n−1) sn'_{−K}(r)/sn_{−K}(r) + Λ` together with its simplified
//! form `(n−1)/r + (n−1)√K + Λ`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{christoffel, ric_x_lower_bound_on_grid, ChartManifold, LocalGeometry, VectorFieldSpec};
use crate::jet::Jet;
use crate::operators::drifted_laplacian_jet;
use crate::par;

/// `(sn_{−K}(t), sn'_{−K}(t))`: `t` for `K = 0`, `sinh(√K t)/√K` otherwise.
pub fn sn_minus_k(k: f64, t: f64) -> Result<(f64, f64)> {
    if !(t > 0.0) {
        return Err(Error::Usage(format!("sn_(-K) needs t > 0, got {t}")));
    }
    if !(k >= 0.0) {
        return Err(Error::Usage(format!("sn_(-K) needs K >= 0, got {k}")));
    }
    let z = k * t * t;
    if z < 1e-6 {
        // series in z = K t²; the first omitted terms are O(z³)
        let sn = t * (1.0 + z / 6.0 + z * z / 120.0);
        let dsn = 1.0 + z / 2.0 + z * z / 24.0;
        return Ok((sn, dsn));
    }
    let s = k.sqrt();
    Ok(((s * t).sinh() / s, (s * t).cosh()))
}

#[derive(Clone, Debug, Serialize)]
pub struct GeodesicSample {
    pub t: f64,
    pub point: Vec<f64>,
    pub velocity: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GeodesicPath {
    pub origin: Vec<f64>,
    pub samples: Vec<GeodesicSample>,
    pub length: f64,
    /// Largest `| |v|_g − 1 |` seen before the per-step renormalisation.
    pub max_speed_drift: f64,
}

impl GeodesicPath {
    pub fn endpoint(&self) -> &[f64] {
        &self.samples.last().expect("paths hold at least the origin").point
    }

    /// Largest `| |v|_g − 1 |` over the stored samples.
    pub fn max_speed_error(&self, m: &ChartManifold) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for s in &self.samples {
            let g = m.metric_at(&s.point)?;
            worst = worst.max((g.bilinear(&s.velocity, &s.velocity).sqrt() - 1.0).abs());
        }
        Ok(worst)
    }

    /// Largest `|ẍ^k + Γ^k_ij ẋ^i ẋ^j|` at interior samples, with `ẍ` from
    /// second differences of the stored points.
    pub fn max_equation_residual(&self, m: &ChartManifold) -> Result<f64> {
        let n = m.dim();
        let mut worst: f64 = 0.0;
        for w in self.samples.windows(3) {
            let dt = w[1].t - w[0].t;
            let c = christoffel(m, &w[1].point)?;
            for k in 0..n {
                let acc = (w[2].point[k] - 2.0 * w[1].point[k] + w[0].point[k]) / (dt * dt);
                let mut q = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        q += c.get(k, i, j) * w[1].velocity[i] * w[1].velocity[j];
                    }
                }
                worst = worst.max((acc + q).abs());
            }
        }
        Ok(worst)
    }
}

fn geodesic_rhs(m: &ChartManifold, x: &[f64], v: &[f64]) -> Result<Vec<f64>> {
    let c = christoffel(m, x)?;
    let n = x.len();
    Ok((0..n)
        .map(|k| {
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    s += c.get(k, i, j) * v[i] * v[j];
                }
            }
            -s
        })
        .collect())
}

/// One classical RK4 step of `(x, v)` for the geodesic system.
fn rk4_step(m: &ChartManifold, x: &[f64], v: &[f64], dt: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = x.len();
    let add = |a: &[f64], b: &[f64], s: f64| -> Vec<f64> { a.iter().zip(b).map(|(p, q)| p + s * q).collect() };
    let k1x = v.to_vec();
    let k1v = geodesic_rhs(m, x, v)?;
    let (x2, v2) = (add(x, &k1x, 0.5 * dt), add(v, &k1v, 0.5 * dt));
    let k2x = v2.clone();
    let k2v = geodesic_rhs(m, &x2, &v2)?;
    let (x3, v3) = (add(x, &k2x, 0.5 * dt), add(v, &k2v, 0.5 * dt));
    let k3x = v3.clone();
    let k3v = geodesic_rhs(m, &x3, &v3)?;
    let (x4, v4) = (add(x, &k3x, dt), add(v, &k3v, dt));
    let k4x = v4.clone();
    let k4v = geodesic_rhs(m, &x4, &v4)?;
    let xn = (0..n).map(|i| x[i] + dt / 6.0 * (k1x[i] + 2.0 * k2x[i] + 2.0 * k3x[i] + k4x[i])).collect();
    let vn = (0..n).map(|i| v[i] + dt / 6.0 * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i])).collect();
    Ok((xn, vn))
}

fn unit_at(m: &ChartManifold, p: &[f64], v: &[f64]) -> Result<(Vec<f64>, f64)> {
    let norm = m.metric_at(p)?.bilinear(v, v).sqrt();
    if !(norm > 0.0) {
        return Err(Error::Usage("initial velocity must be nonzero".into()));
    }
    Ok((v.iter().map(|c| c / norm).collect(), norm))
}

/// Integrates the geodesic from `o` with initial direction `v0` (rescaled to
/// unit speed) for arclength `length`, in steps of at most `step`.
pub fn shoot_geodesic(m: &ChartManifold, o: &[f64], v0: &[f64], length: f64, step: f64) -> Result<GeodesicPath> {
    if !(length >= 0.0) || !(step > 0.0) {
        return Err(Error::Usage(format!("need length >= 0 and step > 0 (got {length}, {step})")));
    }
    if length > m.injectivity_radius_bound() {
        return Err(Error::Usage(format!(
            "length {length} exceeds the injectivity-radius bound {}",
            m.injectivity_radius_bound()
        )));
    }
    m.check_point(o)?;
    let (mut v, _) = unit_at(m, o, v0)?;
    let mut x = o.to_vec();
    let steps = ((length / step).ceil() as usize).max(1);
    let dt = length / steps as f64;
    let mut path = GeodesicPath {
        origin: o.to_vec(),
        samples: vec![GeodesicSample { t: 0.0, point: x.clone(), velocity: v.clone() }],
        length: 0.0,
        max_speed_drift: 0.0,
    };
    if length == 0.0 {
        return Ok(path);
    }
    for s in 1..=steps {
        let stepped = rk4_step(m, &x, &v, dt).and_then(|(xn, vn)| {
            let (u, norm) = unit_at(m, &xn, &vn)?;
            Ok((xn, u, norm))
        });
        match stepped {
            Ok((xn, u, norm)) => {
                path.max_speed_drift = path.max_speed_drift.max((norm - 1.0).abs());
                x = xn;
                v = u;
                path.length = s as f64 * dt;
                path.samples.push(GeodesicSample { t: path.length, point: x.clone(), velocity: v.clone() });
            }
            Err(e) => {
                return Err(Error::TruncatedPath { partial: Box::new(path), reason: e.to_string() });
            }
        }
    }
    Ok(path)
}

const SHOOT_STEP: f64 = 1e-3;
const BISECTION_TOL: f64 = 1e-10;
const BISECTION_MAX_ITER: usize = 200;

/// Closest approach of the geodesic with angle `theta` to `p`: returns the
/// arclength there and the signed miss (positive when `p` lies to the left
/// of the geodesic).
fn closest_approach(m: &ChartManifold, o: &[f64], p: &[f64], theta: f64, max_len: f64) -> Result<(f64, f64)> {
    let v0 = [theta.cos(), theta.sin()];
    let (mut v, _) = unit_at(m, o, &v0)?;
    let mut x = o.to_vec();
    let mut t = 0.0;
    let g_dot = |x: &[f64], v: &[f64]| -> Result<f64> {
        let g = m.metric_at(x)?;
        let d: Vec<f64> = x.iter().zip(p).map(|(a, b)| b - a).collect();
        Ok(g.bilinear(v, &d))
    };
    // march until the tangent stops pointing towards p
    let mut prev = g_dot(&x, &v)?;
    while t < max_len {
        let (xn, vn) = rk4_step(m, &x, &v, SHOOT_STEP).map_err(|e| Error::ComparisonUnavailable(e.to_string()))?;
        let (un, _) = unit_at(m, &xn, &vn)?;
        let cur = g_dot(&xn, &un)?;
        if cur <= 0.0 && prev > 0.0 {
            // secant/bisection for the partial step where ⟨v, p − x⟩ = 0
            let (mut a, mut b) = (0.0, SHOOT_STEP);
            let (mut fa, mut fb) = (prev, cur);
            let mut best = (x.clone(), v.clone(), 0.0);
            for _ in 0..60 {
                let s = if fa != fb { (a * fb - b * fa) / (fb - fa) } else { 0.5 * (a + b) };
                let s = if s <= a || s >= b { 0.5 * (a + b) } else { s };
                let (xs, vs) = rk4_step(m, &x, &v, s)?;
                let (us, _) = unit_at(m, &xs, &vs)?;
                let fs = g_dot(&xs, &us)?;
                best = (xs, us, s);
                if fs.abs() < 1e-15 || b - a < 1e-15 {
                    break;
                }
                if fs > 0.0 {
                    a = s;
                    fa = fs;
                } else {
                    b = s;
                    fb = fs;
                }
            }
            let (xs, us, s) = best;
            let d: Vec<f64> = xs.iter().zip(p).map(|(a, b)| b - a).collect();
            let cross = us[0] * d[1] - us[1] * d[0];
            let miss = (d[0] * d[0] + d[1] * d[1]).sqrt();
            return Ok((t + s, miss.copysign(cross)));
        }
        x = xn;
        v = un;
        t += SHOOT_STEP;
        prev = cur;
    }
    Err(Error::ComparisonUnavailable(format!("geodesic at angle {theta} never passes {p:?}")))
}

/// Geodesic distance from `o` to `p` on a 2-D chart by shooting with
/// bisection on the initial angle.
pub fn shooting_distance(m: &ChartManifold, o: &[f64], p: &[f64]) -> Result<f64> {
    if m.dim() != 2 {
        return Err(Error::Unsupported("shooting is implemented for 2-D charts".into()));
    }
    m.check_point(p)?;
    let d = [p[0] - o[0], p[1] - o[1]];
    let chart = (d[0] * d[0] + d[1] * d[1]).sqrt();
    if chart < 1e-12 {
        return Err(Error::Usage("p coincides with o".into()));
    }
    let theta0 = d[1].atan2(d[0]);
    let g = m.metric_at(o)?;
    let max_len = (4.0 * chart * crate::linalg::sym_eigenvalues(&g)[1].sqrt() + 1.0).min(m.injectivity_radius_bound());
    let miss_at = |th: f64| closest_approach(m, o, p, th, max_len);
    let (mut t, mut miss) = miss_at(theta0)?;
    if miss.abs() <= BISECTION_TOL {
        return Ok(t);
    }
    // bracket: widen the angle window until the miss changes sign
    let mut width = 0.05;
    let (mut lo, mut hi) = (theta0, theta0);
    let mut bracketed = false;
    while width < PI {
        let (a, b) = (theta0 - width, theta0 + width);
        let ma = miss_at(a).map(|r| r.1).ok();
        let mb = miss_at(b).map(|r| r.1).ok();
        if let Some(mb) = mb {
            if mb.signum() != miss.signum() {
                (lo, hi) = (theta0, b);
                bracketed = true;
                break;
            }
        }
        if let Some(ma) = ma {
            if ma.signum() != miss.signum() {
                (lo, hi) = (a, theta0);
                bracketed = true;
                break;
            }
        }
        width *= 2.0;
    }
    if !bracketed {
        return Err(Error::ComparisonUnavailable(format!("no shooting bracket towards {p:?}")));
    }
    let mut m_lo = miss_at(lo)?.1;
    for _ in 0..BISECTION_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        (t, miss) = miss_at(mid)?;
        if miss.abs() <= BISECTION_TOL || hi - lo < 1e-15 {
            return Ok(t);
        }
        if miss.signum() == m_lo.signum() {
            lo = mid;
            m_lo = miss;
        } else {
            hi = mid;
        }
    }
    Err(Error::ComparisonUnavailable(format!(
        "shooting towards {p:?} did not converge (miss {miss:e})"
    )))
}

/// `Δ_X r` at `p` for `r = d(o, ·)`. Charts with a closed-form distance use
/// automatic differentiation; otherwise `r` comes from shooting and its
/// derivatives from Richardson-extrapolated central differences.
pub fn drifted_laplacian_of_distance(m: &ChartManifold, x: &VectorFieldSpec, o: &[f64], p: &[f64]) -> Result<f64> {
    m.check_point(p)?;
    let n = m.dim();
    if o.iter().zip(p).all(|(a, b)| (a - b).abs() < 1e-12) {
        return Err(Error::Usage("Δ_X r is singular at the base point".into()));
    }
    let geo = LocalGeometry::at(m, p, 0)?;
    let xv = x.components_jet(p, 0)?;
    if let Some(r) = m.closed_form_distance(o) {
        let rj = r(&Jet::vars(p, 2));
        return Ok(drifted_laplacian_jet(&geo, &xv, &rj).value());
    }
    let r = |q: &[f64]| shooting_distance(m, o, q);
    let fd = |h: f64| -> Result<f64> {
        let shift = |di: f64, dj: f64, i: usize, j: usize| {
            let mut q = p.to_vec();
            q[i] += di * h;
            q[j] += dj * h;
            q
        };
        let r0 = r(p)?;
        let mut grad = vec![0.0; n];
        let mut hess = vec![vec![0.0; n]; n];
        for i in 0..n {
            let (rp, rm) = (r(&shift(1.0, 0.0, i, i))?, r(&shift(-1.0, 0.0, i, i))?);
            grad[i] = (rp - rm) / (2.0 * h);
            hess[i][i] = (rp - 2.0 * r0 + rm) / (h * h);
            for j in 0..i {
                let v = (r(&shift(1.0, 1.0, i, j))? - r(&shift(1.0, -1.0, i, j))? - r(&shift(-1.0, 1.0, i, j))?
                    + r(&shift(-1.0, -1.0, i, j))?)
                    / (4.0 * h * h);
                hess[i][j] = v;
                hess[j][i] = v;
            }
        }
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                let mut hij = hess[i][j];
                for (k, gk) in grad.iter().enumerate() {
                    hij -= geo.gamma(k, i, j).value() * gk;
                }
                acc += geo.ginv[(i, j)].value() * hij;
            }
            acc -= xv[i].value() * grad[i];
        }
        Ok(acc)
    };
    let h = 2e-2;
    let (coarse, fine) = (fd(h)?, fd(0.5 * h)?);
    Ok((4.0 * fine - coarse) / 3.0)
}

#[derive(Clone, Debug, Serialize)]
pub struct ComparisonRow {
    pub r: f64,
    pub direction: usize,
    pub point: Vec<f64>,
    pub delta_x_r: f64,
    pub sharp: f64,
    pub simplified: f64,
    pub slack: f64,
    pub slack_simplified: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComparisonReport {
    pub manifold: String,
    pub drift: String,
    pub origin: Vec<f64>,
    /// Measured `K >= 0` with `Ric_X >= −(n−1) K g` on the scanned box.
    pub k: f64,
    /// Measured `sup |X|_g` on the scanned box.
    pub lambda: f64,
    pub scan_points: usize,
    pub rows: Vec<ComparisonRow>,
    pub min_slack: f64,
    pub min_slack_simplified: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl ComparisonReport {
    pub const CSV_HEADER: [&'static str; 7] =
        ["r", "direction", "delta_x_r", "sharp", "simplified", "slack", "slack_simplified"];

    pub fn csv_rows(&self) -> Vec<Vec<f64>> {
        self.rows
            .iter()
            .map(|r| vec![r.r, r.direction as f64, r.delta_x_r, r.sharp, r.simplified, r.slack, r.slack_simplified])
            .collect()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ComparisonOptions {
    /// Grid points per axis for the `K`/`Λ` scan.
    pub scan_resolution: usize,
    pub r_min: f64,
    pub tolerance: f64,
    pub step: f64,
}

impl Default for ComparisonOptions {
    fn default() -> Self {
        ComparisonOptions { scan_resolution: 41, r_min: 1e-2, tolerance: 1e-6, step: 1e-3 }
    }
}

/// Evaluates both comparison bounds at `exp_o(r v_d)` for every radius and
/// `directions` equally spaced initial angles. `K` and `Λ` are measured on a
/// grid covering the largest ball.
pub fn comparison_check(
    m: &ChartManifold,
    x: &VectorFieldSpec,
    o: &[f64],
    radii: &[f64],
    directions: usize,
    opts: ComparisonOptions,
) -> Result<ComparisonReport> {
    let n = m.dim();
    if n != 2 {
        return Err(Error::Unsupported("comparison checks use 2-D charts".into()));
    }
    if radii.is_empty() || directions == 0 {
        return Err(Error::Usage("need at least one radius and one direction".into()));
    }
    if let Some(r) = radii.iter().find(|&&r| !(r >= opts.r_min)) {
        return Err(Error::Usage(format!("radius {r} is below r_min = {}", opts.r_min)));
    }
    let r_max = radii.iter().copied().fold(0.0, f64::max);
    let bbox = m.ball_bounding_box(o, r_max)?;
    let grid = bbox.grid(&[opts.scan_resolution, opts.scan_resolution]);
    let (kmin, _) = ric_x_lower_bound_on_grid(m, x, &grid)?;
    let k = (-kmin / (n - 1) as f64).max(0.0);
    let (lambda, _) = x.check_global_bound(m, &grid)?;

    let tasks: Vec<(f64, usize)> = radii.iter().flat_map(|&r| (0..directions).map(move |d| (r, d))).collect();
    let rows: Vec<Result<ComparisonRow>> = par::map_slice(&tasks, |&(r, d)| {
        let theta = 2.0 * PI * d as f64 / directions as f64;
        let path = shoot_geodesic(m, o, &[theta.cos(), theta.sin()], r, opts.step)?;
        let p = path.endpoint().to_vec();
        let lap = drifted_laplacian_of_distance(m, x, o, &p)?;
        let (sn, dsn) = sn_minus_k(k, r)?;
        let nm1 = (n - 1) as f64;
        let sharp = nm1 * dsn / sn + lambda;
        let simplified = nm1 / r + nm1 * k.sqrt() + lambda;
        Ok(ComparisonRow {
            r,
            direction: d,
            point: p,
            delta_x_r: lap,
            sharp,
            simplified,
            slack: sharp - lap,
            slack_simplified: simplified - lap,
        })
    });
    let rows: Vec<ComparisonRow> = rows.into_iter().collect::<Result<_>>()?;
    let min_slack = rows.iter().map(|r| r.slack).fold(f64::INFINITY, f64::min);
    let min_slack_simplified = rows.iter().map(|r| r.slack_simplified).fold(f64::INFINITY, f64::min);
    Ok(ComparisonReport {
        manifold: m.kind().tag(),
        drift: x.name().to_string(),
        origin: o.to_vec(),
        k,
        lambda,
        scan_points: grid.len(),
        pass: min_slack >= -opts.tolerance && min_slack_simplified >= -opts.tolerance,
        rows,
        min_slack,
        min_slack_simplified,
        tolerance: opts.tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{BoxDomain, PotentialVariant};
    use approx::assert_relative_eq;

    fn halfplane() -> ChartManifold {
        ChartManifold::hyperbolic_halfplane(1.0, BoxDomain::new(vec![-6.0, 0.0], vec![6.0, 10.0]).unwrap()).unwrap()
    }

    #[test]
    fn sn_values() {
        assert_eq!(sn_minus_k(0.0, 2.0).unwrap(), (2.0, 1.0));
        let (s, c) = sn_minus_k(1.0, 1.0).unwrap();
        assert_relative_eq!(s, 1f64.sinh(), epsilon = 1e-15);
        assert_relative_eq!(c, 1f64.cosh(), epsilon = 1e-15);
        let (s, c) = sn_minus_k(1.0, 40.0).unwrap();
        assert_relative_eq!(c / s, 1.0, epsilon = 1e-15);
        // the series branch agrees with the closed form just below the switch
        for t in [1e-3, 0.5, 3.0] {
            let k = 0.999e-6 / (t * t);
            let (s, c) = sn_minus_k(k, t).unwrap();
            let q = k.sqrt();
            assert_relative_eq!(s, (q * t).sinh() / q, max_relative = 1e-15);
            assert_relative_eq!(c, (q * t).cosh(), max_relative = 1e-15);
        }
        assert!(matches!(sn_minus_k(1.0, 0.0), Err(Error::Usage(_))));
    }

    #[test]
    fn straight_line_in_flat_chart() {
        let m = ChartManifold::euclidean(2, 5.0);
        let path = shoot_geodesic(&m, &[0.0, 0.0], &[1.0, 0.0], 3.0, 1e-2).unwrap();
        assert_relative_eq!(path.endpoint()[0], 3.0, epsilon = 1e-12);
        assert_eq!(path.endpoint()[1], 0.0);
    }

    #[test]
    fn vertical_hyperbolic_geodesic() {
        let path = shoot_geodesic(&halfplane(), &[0.0, 1.0], &[0.0, 1.0], 1.0, 1e-3).unwrap();
        assert!((path.endpoint()[1] - std::f64::consts::E).abs() < 1e-6);
        assert!(path.max_speed_error(&halfplane()).unwrap() < 1e-8);
        assert!(path.max_equation_residual(&halfplane()).unwrap() < 1e-5);
    }

    #[test]
    fn leaving_the_chart_truncates() {
        let m = ChartManifold::euclidean(2, 1.0);
        match shoot_geodesic(&m, &[0.0, 0.0], &[1.0, 0.0], 3.0, 1e-2) {
            Err(Error::TruncatedPath { partial, .. }) => assert!(partial.length > 0.9 && partial.length < 1.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn distance_laplacian_examples() {
        let e = ChartManifold::euclidean(2, 5.0);
        let lap = drifted_laplacian_of_distance(&e, &VectorFieldSpec::zero(2), &[0.0, 0.0], &[2.0, 0.0]).unwrap();
        assert_relative_eq!(lap, 0.5, epsilon = 1e-14);
        let lap = drifted_laplacian_of_distance(&e, &VectorFieldSpec::constant(vec![1.0, 0.0]), &[0.0, 0.0], &[2.0, 0.0]).unwrap();
        assert_relative_eq!(lap, -0.5, epsilon = 1e-14);
        let h = halfplane();
        let p = shoot_geodesic(&h, &[0.0, 1.0], &[1.0, 0.0], 1.0, 1e-3).unwrap();
        let lap = drifted_laplacian_of_distance(&h, &VectorFieldSpec::zero(2), &[0.0, 1.0], p.endpoint()).unwrap();
        assert_relative_eq!(lap, 1.0 / 1f64.tanh(), epsilon = 1e-8);
    }

    #[test]
    fn shooting_matches_flat_distance() {
        let m = ChartManifold::euclidean(2, 5.0);
        let d = shooting_distance(&m, &[0.1, -0.2], &[1.3, 0.9]).unwrap();
        assert_relative_eq!(d, (1.2f64.powi(2) + 1.1f64.powi(2)).sqrt(), epsilon = 1e-10);
    }

    #[test]
    fn comparison_equality_in_flat_space() {
        let m = ChartManifold::euclidean(2, 5.0);
        let rep = comparison_check(&m, &VectorFieldSpec::zero(2), &[0.0, 0.0], &[0.5, 1.0, 2.0], 8, Default::default()).unwrap();
        assert_eq!(rep.k, 0.0);
        assert!(rep.rows.iter().all(|r| r.slack.abs() < 1e-12));
        assert!(rep.pass);
    }

    #[test]
    fn paraboloid_comparison_has_nonnegative_slack() {
        let m = ChartManifold::paraboloid(3.0);
        let x = VectorFieldSpec::paraboloid_gradient(&m, PotentialVariant::Literal);
        let rep = comparison_check(&m, &x, &[0.0, 0.0], &[0.5, 1.0], 4, Default::default()).unwrap();
        assert!(rep.pass, "{}", rep.min_slack);
    }
}
