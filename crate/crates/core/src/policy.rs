//! Numeric policy: every tolerance and budget the pipeline uses, in one record.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NumericPolicy {
    /// Backward-error target for polynomial roots, relative to `sum |a_i| |z|^i`.
    pub root_tol: f64,
    pub root_max_sweeps: usize,
    /// Jacobi stops when the off-diagonal Frobenius norm drops below `eigen_tol * ||M||_F`.
    pub eigen_tol: f64,
    pub eigen_max_sweeps: usize,
    /// Roots of the factorization polynomial closer than this to the circle are rejected.
    pub circle_margin: f64,
    pub pairing_tol: f64,
    /// Relative residual allowed in the factorization identity.
    pub identity_tol: f64,
    /// Largest entrywise asymmetry tolerated in the Gram matrix before symmetrization.
    pub gram_asymmetry_tol: f64,
    /// Normalized off-diagonal sums at or below this count as zero.
    pub zero_accept: f64,
    /// Normalized off-diagonal sums above this count as nonzero.
    pub zero_reject: f64,
    /// A truncation probe is flagged when `min_eig < -psd_tol * scale`.
    pub psd_tol: f64,
    /// A flagged probe decides the verdict only when `min_eig < -psd_reject * scale`.
    pub psd_reject: f64,
    pub l_max: usize,
    pub n_trunc: usize,
    pub exhaustive_psd: bool,
    pub oracle_n: usize,
    pub seed: u64,
}

impl Default for NumericPolicy {
    fn default() -> Self {
        Self {
            root_tol: 1e-13,
            root_max_sweeps: 500,
            eigen_tol: 1e-14,
            eigen_max_sweeps: 100,
            circle_margin: 1e-7,
            pairing_tol: 1e-7,
            identity_tol: 1e-9,
            gram_asymmetry_tol: 1e-10,
            zero_accept: 1e-7,
            zero_reject: 1e-4,
            psd_tol: 1e-10,
            psd_reject: 1e-8,
            l_max: 16,
            n_trunc: 64,
            exhaustive_psd: false,
            oracle_n: 64,
            seed: 20_250_101,
        }
    }
}

impl NumericPolicy {
    pub fn validate(&self) -> Result<()> {
        let tolerances = [
            ("root_tol", self.root_tol),
            ("eigen_tol", self.eigen_tol),
            ("circle_margin", self.circle_margin),
            ("pairing_tol", self.pairing_tol),
            ("identity_tol", self.identity_tol),
            ("gram_asymmetry_tol", self.gram_asymmetry_tol),
            ("zero_accept", self.zero_accept),
            ("zero_reject", self.zero_reject),
            ("psd_tol", self.psd_tol),
            ("psd_reject", self.psd_reject),
        ];
        for (name, value) in tolerances {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::Domain(format!("{name} must be positive, got {value}")));
            }
        }
        if self.zero_accept >= self.zero_reject {
            return Err(Error::Domain(format!(
                "zero_accept ({}) must be below zero_reject ({})",
                self.zero_accept, self.zero_reject
            )));
        }
        if self.n_trunc < 8 {
            return Err(Error::Domain("n_trunc must be at least 8".into()));
        }
        if self.oracle_n < 8 {
            return Err(Error::Domain("oracle_n must be at least 8".into()));
        }
        if self.root_max_sweeps == 0 || self.eigen_max_sweeps == 0 {
            return Err(Error::Domain("sweep budgets must be positive".into()));
        }
        Ok(())
    }
}
