//! Small dense matrices (n <= 3 in practice) over `f64` or [`Jet`].

use std::ops::{Add, Div, Index, IndexMut, Mul, Neg, Sub};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::jet::Jet;

pub trait Field:
    Copy
    + From<f64>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn re(&self) -> f64;
}

impl Field for f64 {
    fn re(&self) -> f64 {
        *self
    }
}

impl Field for Jet {
    fn re(&self) -> f64 {
        self.value()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mat<T = f64> {
    n: usize,
    data: Vec<T>,
}

impl<T: Field> Mat<T> {
    pub fn zeros(n: usize) -> Self {
        Mat { n, data: vec![T::from(0.0); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = T::from(1.0);
        }
        m
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Mat { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn map<U: Field>(&self, f: impl Fn(&T) -> U) -> Mat<U> {
        Mat { n: self.n, data: self.data.iter().map(f).collect() }
    }

    pub fn values(&self) -> Mat<f64> {
        self.map(|v| v.re())
    }

    /// Gauss-Jordan inverse with partial pivoting on the real parts.
    pub fn inverse(&self) -> Result<Mat<T>> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = Mat::identity(n);
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&r, &s| a[(r, col)].re().abs().total_cmp(&a[(s, col)].re().abs()))
                .unwrap_or(col);
            if a[(pivot, col)].re().abs() < 1e-300 {
                return Err(Error::Geometry("singular matrix".into()));
            }
            if pivot != col {
                for j in 0..n {
                    a.data.swap(pivot * n + j, col * n + j);
                    inv.data.swap(pivot * n + j, col * n + j);
                }
            }
            let p = a[(col, col)];
            for j in 0..n {
                a[(col, j)] = a[(col, j)] / p;
                inv[(col, j)] = inv[(col, j)] / p;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a[(r, col)];
                for j in 0..n {
                    a[(r, j)] = a[(r, j)] - factor * a[(col, j)];
                    inv[(r, j)] = inv[(r, j)] - factor * inv[(col, j)];
                }
            }
        }
        Ok(inv)
    }

    /// `v^T A w`
    pub fn bilinear(&self, v: &[T], w: &[T]) -> T {
        let mut acc = T::from(0.0);
        for i in 0..self.n {
            for j in 0..self.n {
                acc = acc + self[(i, j)] * v[i] * w[j];
            }
        }
        acc
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        (0..self.n)
            .map(|i| (0..self.n).fold(T::from(0.0), |acc, j| acc + self[(i, j)] * v[j]))
            .collect()
    }
}

impl<T> Index<(usize, usize)> for Mat<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.n + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.n + j]
    }
}

impl Serialize for Mat<f64> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let n = self.dim();
        let rows: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| self[(i, j)]).collect()).collect();
        rows.serialize(s)
    }
}

impl Mat<f64> {
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for j in 0..i {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }

    /// Lower Cholesky factor of a symmetric positive-definite matrix.
    pub fn cholesky(&self) -> Result<Mat<f64>> {
        let n = self.n;
        let mut l = Mat::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                if i == j {
                    if s <= 0.0 {
                        return Err(Error::Geometry("matrix is not positive definite".into()));
                    }
                    l[(i, i)] = s.sqrt();
                } else {
                    l[(i, j)] = s / l[(j, j)];
                }
            }
        }
        Ok(l)
    }
}

/// Eigenvalues of a symmetric matrix with n <= 3, ascending.
///
/// Closed forms: the 2x2 case uses the trace/discriminant formula and the
/// 3x3 case the trigonometric formula for the characteristic cubic.
pub fn sym_eigenvalues(a: &Mat<f64>) -> Vec<f64> {
    match a.dim() {
        0 => vec![],
        1 => vec![a[(0, 0)]],
        2 => {
            let (p, q, r) = (a[(0, 0)], 0.5 * (a[(0, 1)] + a[(1, 0)]), a[(1, 1)]);
            let mean = 0.5 * (p + r);
            let rad = (0.25 * (p - r) * (p - r) + q * q).sqrt();
            vec![mean - rad, mean + rad]
        }
        3 => {
            let s = |i: usize, j: usize| 0.5 * (a[(i, j)] + a[(j, i)]);
            let p1 = s(0, 1).powi(2) + s(0, 2).powi(2) + s(1, 2).powi(2);
            let tr = s(0, 0) + s(1, 1) + s(2, 2);
            if p1 == 0.0 {
                let mut e = vec![s(0, 0), s(1, 1), s(2, 2)];
                e.sort_by(f64::total_cmp);
                return e;
            }
            let q = tr / 3.0;
            let p2 = (s(0, 0) - q).powi(2) + (s(1, 1) - q).powi(2) + (s(2, 2) - q).powi(2) + 2.0 * p1;
            let p = (p2 / 6.0).sqrt();
            let b = Mat::from_fn(3, |i, j| (s(i, j) - if i == j { q } else { 0.0 }) / p);
            let det_b = b[(0, 0)] * (b[(1, 1)] * b[(2, 2)] - b[(1, 2)] * b[(2, 1)])
                - b[(0, 1)] * (b[(1, 0)] * b[(2, 2)] - b[(1, 2)] * b[(2, 0)])
                + b[(0, 2)] * (b[(1, 0)] * b[(2, 1)] - b[(1, 1)] * b[(2, 0)]);
            let r = (det_b / 2.0).clamp(-1.0, 1.0);
            let phi = r.acos() / 3.0;
            let largest = q + 2.0 * p * phi.cos();
            let smallest = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
            let middle = 3.0 * q - largest - smallest;
            let mut e = vec![smallest, middle, largest];
            e.sort_by(f64::total_cmp);
            e
        }
        n => panic!("closed-form eigenvalues implemented for n <= 3, got {n}"),
    }
}

/// Eigenvalues of `A` relative to the inner product `B` (i.e. of
/// `L^{-1} A L^{-T}` with `B = L L^T`), ascending.
pub fn generalized_sym_eigenvalues(a: &Mat<f64>, b: &Mat<f64>) -> Result<Vec<f64>> {
    let l = b.cholesky()?;
    let linv = l.inverse()?;
    let n = a.dim();
    let c = Mat::from_fn(n, |i, j| {
        let mut s = 0.0;
        for k in 0..n {
            for m in 0..n {
                s += linv[(i, k)] * a[(k, m)] * linv[(j, m)];
            }
        }
        s
    });
    Ok(sym_eigenvalues(&c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn eigenvalues_small_cases() {
        let a = Mat::from_fn(2, |i, j| [[2.0, 1.0], [1.0, 2.0]][i][j]);
        assert_eq!(sym_eigenvalues(&a), vec![1.0, 3.0]);
        let b = Mat::from_fn(3, |i, j| [[2.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 2.0]][i][j]);
        let e = sym_eigenvalues(&b);
        let s2 = 2f64.sqrt();
        assert_relative_eq!(e[0], 2.0 - s2, epsilon = 1e-14);
        assert_relative_eq!(e[1], 2.0, epsilon = 1e-14);
        assert_relative_eq!(e[2], 2.0 + s2, epsilon = 1e-14);
        let d = Mat::from_fn(3, |i, j| if i == j { [3.0, -1.0, 0.5][i] } else { 0.0 });
        assert_eq!(sym_eigenvalues(&d), vec![-1.0, 0.5, 3.0]);
    }

    #[test]
    fn inverse_and_generalized() {
        let g = Mat::from_fn(2, |i, j| [[5.0, 4.0], [4.0, 5.0]][i][j]);
        let gi = g.inverse().unwrap();
        assert_relative_eq!(gi[(0, 0)], 5.0 / 9.0, epsilon = 1e-15);
        assert_relative_eq!(gi[(0, 1)], -4.0 / 9.0, epsilon = 1e-15);
        let e = generalized_sym_eigenvalues(&g.map(|v| -2.0 * v), &g).unwrap();
        assert_relative_eq!(e[0], -2.0, epsilon = 1e-14);
        assert_relative_eq!(e[1], -2.0, epsilon = 1e-14);
    }
}
