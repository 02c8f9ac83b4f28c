use thiserror::Error;

use crate::numerics::C64;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} did not converge within {budget} sweeps")]
    NonConvergence { what: &'static str, budget: usize },

    #[error("deflation point is not a root (remainder {residual:.3e}, tolerance {tol:.3e})")]
    NotARoot { residual: f64, tol: f64 },

    #[error("matrix is singular to working precision (pivot {pivot:.3e})")]
    Singular { pivot: f64 },

    #[error("matrix is not positive semidefinite (pivot {pivot:.3e}, trace {trace:.3e})")]
    NotPsd { pivot: f64, trace: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid measure: {0}")]
    Validation(String),

    #[error("factor root with modulus {modulus} lies on the unit circle")]
    RootOnCircle { modulus: f64 },

    #[error("reflection pairing failed: {0}")]
    PairingFailure(String),

    #[error("factorization identity residual {residual:.3e} exceeds {tol:.3e}")]
    IdentityResidual { residual: f64, tol: f64 },

    #[error("evaluation point {z} is (numerically) a pole")]
    PoleHit { z: C64 },

    #[error("atom {index} is degenerate: |O'(zeta)| = {modulus:.3e}")]
    DegenerateAtom { index: usize, modulus: f64 },

    #[error("interpolation nodes are ill-conditioned (condition {condition:.3e})")]
    IllConditioned { condition: f64 },

    #[error("exterior roots {r} and {t} are not distinct")]
    DegenerateAlphas { r: usize, t: usize },

    #[error("vector needs {needed} free top coefficients but only {available} are zero")]
    Headroom { needed: usize, available: usize },

    #[error("{0}")]
    Domain(String),

    #[error("consistency check failed: {0}")]
    Consistency(String),
}
