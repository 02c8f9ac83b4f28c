//! Complex scalar, polynomial and dense matrix primitives.

mod eigen;
mod linalg;
mod matrix;
mod poly;
mod roots;

pub use eigen::herm_eigen;
pub use linalg::{cholesky_herm, determinant, solve_linear};
pub use matrix::CMatrix;
pub use poly::Poly;
pub use roots::poly_roots;

pub type C64 = num_complex::Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `sqrt(a * b)` for nonnegative reals without intermediate overflow.
#[inline]
pub(crate) fn geometric_mean(a: f64, b: f64) -> f64 {
    a.sqrt() * b.sqrt()
}
