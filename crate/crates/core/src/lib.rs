//! Chart-based numerics for drifted Laplacians `Δ_X = Δ − g(X, ∇·)` on
//! Riemannian manifolds: Bakry–Émery–Ricci tensors, Bochner residuals,
//! geodesic comparison checks, elliptic solvers for `Δ_X u + F(u) = 0`, and
//! the quantitative gradient, Harnack and Liouville experiments built on them.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod config;
pub mod error;
pub mod estimates;
pub mod geodesics;
pub mod geometry;
pub mod jet;
pub mod linalg;
pub mod operators;
pub mod par;
pub mod quad;
pub mod report;
pub mod solver;
pub mod worked_examples;

pub use error::{Error, Result};
