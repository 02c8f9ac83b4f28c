use super::{CMatrix, C64, ONE, ZERO};
use crate::error::{Error, Result};

/// Pivots below this fraction of the trace are treated as exact zeros.
const ZERO_PIVOT: f64 = 1e-13;
/// Pivots below `-NEGATIVE_PIVOT * trace` mean the input is not PSD.
const NEGATIVE_PIVOT: f64 = 1e-8;
const SINGULAR_PIVOT: f64 = 1e-14;

/// Upper-triangular `R` with `M = R^* R` and a real nonnegative diagonal.
///
/// Semidefinite inputs are accepted: a vanishing pivot zeroes its row of `R`.
pub fn cholesky_herm(m: &CMatrix) -> Result<CMatrix> {
    if !m.is_square() {
        return Err(Error::Domain("cholesky_herm: matrix must be square".into()));
    }
    let n = m.rows();
    let trace = m.trace().re.abs().max(f64::MIN_POSITIVE);
    let mut r = CMatrix::zeros(n, n);
    for j in 0..n {
        let mut pivot = m[(j, j)].re;
        for k in 0..j {
            pivot -= r[(k, j)].norm_sqr();
        }
        if pivot < -NEGATIVE_PIVOT * trace {
            return Err(Error::NotPsd { pivot, trace });
        }
        if pivot <= ZERO_PIVOT * trace {
            continue;
        }
        let diag = pivot.sqrt();
        r[(j, j)] = C64::new(diag, 0.0);
        for col in (j + 1)..n {
            let mut acc = m[(j, col)];
            for k in 0..j {
                acc -= r[(k, j)].conj() * r[(k, col)];
            }
            r[(j, col)] = acc / diag;
        }
    }
    Ok(r)
}

struct Lu {
    lu: CMatrix,
    perm: Vec<usize>,
    swaps: usize,
}

fn lu_decompose(m: &CMatrix) -> Result<Lu> {
    if !m.is_square() {
        return Err(Error::Domain("LU: matrix must be square".into()));
    }
    let n = m.rows();
    let scale = m.max_abs();
    if scale == 0.0 || !scale.is_finite() {
        return Err(Error::Singular { pivot: 0.0 });
    }
    let mut lu = m.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut swaps = 0;
    for k in 0..n {
        let (best, best_abs) = (k..n)
            .map(|i| (i, lu[(i, k)].norm()))
            .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best_abs < SINGULAR_PIVOT * scale {
            return Err(Error::Singular { pivot: best_abs });
        }
        if best != k {
            for j in 0..n {
                let tmp = lu[(k, j)];
                lu[(k, j)] = lu[(best, j)];
                lu[(best, j)] = tmp;
            }
            perm.swap(k, best);
            swaps += 1;
        }
        let pivot = lu[(k, k)];
        for i in (k + 1)..n {
            let factor = lu[(i, k)] / pivot;
            lu[(i, k)] = factor;
            if factor == ZERO {
                continue;
            }
            for j in (k + 1)..n {
                let u = lu[(k, j)];
                lu[(i, j)] -= factor * u;
            }
        }
    }
    Ok(Lu { lu, perm, swaps })
}

/// Solves `M X = rhs` by LU with partial pivoting.
pub fn solve_linear(m: &CMatrix, rhs: &CMatrix) -> Result<CMatrix> {
    if m.rows() != rhs.rows() {
        return Err(Error::Domain("solve_linear: rhs row count does not match".into()));
    }
    let Lu { lu, perm, .. } = lu_decompose(m)?;
    let n = m.rows();
    let mut x = CMatrix::zeros(n, rhs.cols());
    for col in 0..rhs.cols() {
        let mut y: Vec<C64> = perm.iter().map(|&p| rhs[(p, col)]).collect();
        for i in 0..n {
            for k in 0..i {
                let l = lu[(i, k)];
                y[i] = y[i] - l * y[k];
            }
        }
        for i in (0..n).rev() {
            let mut acc = y[i];
            for k in (i + 1)..n {
                acc -= lu[(i, k)] * y[k];
            }
            y[i] = acc / lu[(i, i)];
        }
        for (i, v) in y.into_iter().enumerate() {
            x[(i, col)] = v;
        }
    }
    Ok(x)
}

pub fn determinant(m: &CMatrix) -> Result<C64> {
    match lu_decompose(m) {
        Ok(Lu { lu, swaps, .. }) => {
            let sign = if swaps % 2 == 0 { ONE } else { -ONE };
            Ok(lu.diagonal().into_iter().fold(sign, |acc, d| acc * d))
        }
        Err(Error::Singular { .. }) => Ok(ZERO),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::c;

    fn reconstruct(r: &CMatrix) -> CMatrix {
        &r.adjoint() * r
    }

    #[test]
    fn cholesky_identity_and_diagonal() {
        let id = CMatrix::identity(4);
        assert_eq!(cholesky_herm(&id).unwrap(), id);
        let d = CMatrix::from_diagonal(&[c(4.0, 0.0), c(9.0, 0.0)]);
        assert_eq!(cholesky_herm(&d).unwrap(), CMatrix::from_diagonal(&[c(2.0, 0.0), c(3.0, 0.0)]));
    }

    #[test]
    fn cholesky_rank_one() {
        let v = [c(1.0, 2.0), c(-0.5, 0.25), c(3.0, -1.0)];
        let m = CMatrix::from_fn(3, 3, |i, j| v[i] * v[j].conj());
        let r = cholesky_herm(&m).unwrap();
        let nonzero_rows = (0..3).filter(|&i| r.row(i).iter().any(|z| z.norm() > 0.0)).count();
        assert_eq!(nonzero_rows, 1);
        assert!(reconstruct(&r).sub(&m).frobenius() <= 1e-12 * m.frobenius());
    }

    #[test]
    fn cholesky_complex_positive_definite() {
        let a = CMatrix::from_rows(&[
            vec![c(2.0, 0.0), c(1.0, -1.0), c(0.0, 0.5)],
            vec![c(1.0, 1.0), c(3.0, 0.0), c(-1.0, 0.0)],
            vec![c(0.0, -0.5), c(-1.0, 0.0), c(4.0, 0.0)],
        ]);
        let r = cholesky_herm(&a).unwrap();
        for i in 0..3 {
            assert_eq!(r[(i, i)].im, 0.0);
            assert!(r[(i, i)].re > 0.0);
            for j in 0..i {
                assert_eq!(r[(i, j)], ZERO);
            }
        }
        assert!(reconstruct(&r).sub(&a).frobenius() <= 1e-14 * a.frobenius());
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let m = CMatrix::from_rows(&[vec![c(1.0, 0.0), c(2.0, 0.0)], vec![c(2.0, 0.0), c(1.0, 0.0)]]);
        assert!(matches!(cholesky_herm(&m), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn solve_cases() {
        let rhs = CMatrix::from_rows(&[vec![c(1.0, 2.0)], vec![c(-3.0, 0.0)]]);
        assert_eq!(solve_linear(&CMatrix::identity(2), &rhs).unwrap(), rhs);

        let m = CMatrix::from_diagonal(&[c(2.0, 0.0), c(4.0, 0.0)]);
        let inv = solve_linear(&m, &CMatrix::identity(2)).unwrap();
        assert_eq!(inv, CMatrix::from_diagonal(&[c(0.5, 0.0), c(0.25, 0.0)]));
    }

    #[test]
    fn solve_needs_pivoting() {
        let m = CMatrix::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 1.0)]]);
        let x = solve_linear(&m, &CMatrix::identity(2)).unwrap();
        assert!((&m * &x).sub(&CMatrix::identity(2)).max_abs() < 1e-15);
        assert_eq!(determinant(&m).unwrap(), c(-1.0, 0.0));
    }

    #[test]
    fn singular_detected() {
        let m = CMatrix::from_rows(&[vec![c(1.0, 0.0), c(2.0, 0.0)], vec![c(2.0, 0.0), c(4.0, 0.0)]]);
        assert!(matches!(solve_linear(&m, &CMatrix::identity(2)), Err(Error::Singular { .. })));
        assert_eq!(determinant(&m).unwrap(), ZERO);
    }
}
