//! Cyclic Jacobi eigenvalues for complex Hermitian matrices.
//!
//! Each rotation first removes the phase of `a_pq` with a diagonal unitary and
//! then applies the classical real rotation, so the 2x2 pivot block is
//! diagonalized exactly and the diagonal stays real.

use super::{CMatrix, C64};
use crate::error::{Error, Result};

const HERMITIAN_TOL: f64 = 1e-12;

/// Eigenvalues of a Hermitian matrix, ascending.
///
/// Sweeps until the off-diagonal Frobenius norm is at most `tol * ||M||_F`.
pub fn herm_eigen(m: &CMatrix, tol: f64, max_sweeps: usize) -> Result<Vec<f64>> {
    if !m.is_square() {
        return Err(Error::Domain("herm_eigen: matrix must be square".into()));
    }
    let n = m.rows();
    let scale = m.frobenius();
    if !scale.is_finite() {
        return Err(Error::Domain("herm_eigen: non-finite entries".into()));
    }
    if m.hermitian_defect() > HERMITIAN_TOL * scale.max(1.0) {
        return Err(Error::Domain(format!(
            "herm_eigen: matrix is not Hermitian (defect {:.3e})",
            m.hermitian_defect()
        )));
    }

    let mut a = m.hermitian_part();
    let target = tol * scale;
    let mut converged = scale == 0.0;
    for _ in 0..max_sweeps {
        if off_diagonal_norm(&a) <= target {
            converged = true;
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                rotate(&mut a, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > target {
        return Err(Error::NonConvergence { what: "Jacobi eigensolver", budget: max_sweeps });
    }
    let mut values: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.rows();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[(i, j)].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// `A <- J^* A J` with `J` acting on the `(p, q)` plane.
fn rotate(a: &mut CMatrix, p: usize, q: usize) {
    let h = a[(p, q)];
    let habs = h.norm();
    if habs == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Phase removal: with D_qq = e^{-i phi}, (D^* A D)_pq = |h|.
    let phase = h / habs;
    let theta = 0.5 * (aqq - app) / habs;
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let cos = 1.0 / (t * t + 1.0).sqrt();
    let sin = t * cos;

    // J = [[c, s], [-s e^{-i phi}, c e^{-i phi}]] on rows/cols (p, q).
    let jqp = -phase.conj() * sin;
    let jqq = phase.conj() * cos;
    let n = a.rows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * cos + akq * jqp;
        a[(k, q)] = akp * sin + akq * jqq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * cos + aqk * jqp.conj();
        a[(q, k)] = apk * sin + aqk * jqq.conj();
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(app - t * habs, 0.0);
    a[(q, q)] = C64::new(aqq + t * habs, 0.0);
}
