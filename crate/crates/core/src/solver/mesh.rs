use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::BoxDomain;

/// Uniform node grid on a chart rectangle. Nodes are stored row by row
/// (`y` index outer), so row `j` holds `nx + 1` consecutive values.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Mesh {
    pub x0: f64,
    pub y0: f64,
    pub hx: f64,
    pub hy: f64,
    /// Number of intervals along `x`.
    pub nx: usize,
    /// Number of intervals along `y`.
    pub ny: usize,
}

fn intervals(len: f64, h: f64) -> Result<usize> {
    let k = (len / h).round();
    if !(k >= 2.0) || ((k * h - len).abs() > 1e-9 * len) {
        return Err(Error::Usage(format!("spacing {h} does not divide side length {len} into >= 2 intervals")));
    }
    Ok(k as usize)
}

impl Mesh {
    pub fn new(rect: &BoxDomain, h: f64) -> Result<Self> {
        if rect.dim() != 2 {
            return Err(Error::Usage(format!("meshes are two-dimensional, got a {}-D rectangle", rect.dim())));
        }
        if !(h > 0.0) {
            return Err(Error::Usage(format!("mesh spacing must be positive, got {h}")));
        }
        let nx = intervals(rect.hi[0] - rect.lo[0], h)?;
        let ny = intervals(rect.hi[1] - rect.lo[1], h)?;
        Ok(Mesh::with_intervals(rect, nx, ny))
    }

    pub fn with_intervals(rect: &BoxDomain, nx: usize, ny: usize) -> Self {
        Mesh {
            x0: rect.lo[0],
            y0: rect.lo[1],
            hx: (rect.hi[0] - rect.lo[0]) / nx as f64,
            hy: (rect.hi[1] - rect.lo[1]) / ny as f64,
            nx,
            ny,
        }
    }

    pub fn row_len(&self) -> usize {
        self.nx + 1
    }

    pub fn node_count(&self) -> usize {
        (self.nx + 1) * (self.ny + 1)
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * (self.nx + 1) + i
    }

    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx % (self.nx + 1), idx / (self.nx + 1))
    }

    pub fn point(&self, i: usize, j: usize) -> [f64; 2] {
        [self.x0 + i as f64 * self.hx, self.y0 + j as f64 * self.hy]
    }

    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i == self.nx || j == self.ny
    }

    pub fn rect(&self) -> BoxDomain {
        BoxDomain {
            lo: vec![self.x0, self.y0],
            hi: vec![self.x0 + self.nx as f64 * self.hx, self.y0 + self.ny as f64 * self.hy],
        }
    }

    /// Node indices `(i, j)` of `p` if it sits on a node.
    pub fn locate(&self, p: &[f64]) -> Option<(usize, usize)> {
        if p.len() != 2 {
            return None;
        }
        let fi = (p[0] - self.x0) / self.hx;
        let fj = (p[1] - self.y0) / self.hy;
        let (i, j) = (fi.round(), fj.round());
        if i < 0.0 || j < 0.0 || i > self.nx as f64 || j > self.ny as f64 {
            return None;
        }
        if (fi - i).abs() > 1e-9 || (fj - j).abs() > 1e-9 {
            return None;
        }
        Some((i as usize, j as usize))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_and_lookup() {
        let m = Mesh::new(&BoxDomain::square(2, 0.0, 1.0), 0.25).unwrap();
        assert_eq!((m.nx, m.ny, m.node_count()), (4, 4, 25));
        assert_eq!(m.index(1, 2), 11);
        assert_eq!(m.coords(11), (1, 2));
        assert_eq!(m.point(1, 2), [0.25, 0.5]);
        assert_eq!(m.locate(&[0.25, 0.5]), Some((1, 2)));
        assert_eq!(m.locate(&[0.3, 0.5]), None);
        assert!(m.is_boundary(0, 2) && !m.is_boundary(1, 1));
        assert!(Mesh::new(&BoxDomain::square(2, 0.0, 1.0), 0.3).is_err());
    }
}
