//! The sesquilinear polynomial `S(z, u) = sum_j p_j(z) conj(p_j(u))` attached to
//! `D(μ)`, its coefficient matrix `C`, the triangular factor `P` and the
//! row-valued Schur function `B = (p_1/q, ..., p_k/q)`.

use crate::dirichlet::DirichletData;
use crate::error::{Error, Result};
use crate::numerics::{cholesky_herm, herm_eigen, solve_linear, CMatrix, Poly, C64, ONE, ZERO};
use crate::policy::NumericPolicy;

const REFIT_TOL: f64 = 1e-9;
const MAX_CONDITION: f64 = 1e10;
const PRIMARY_RADIUS: f64 = 1.0;
const FALLBACK_RADIUS: f64 = 0.75;
const HERMITIAN_TOL: f64 = 1e-10;
const PSD_TOL: f64 = 1e-9;

/// Anything that can evaluate `S(z, u)`.
pub trait SForm {
    fn k(&self) -> usize;
    fn s(&self, z: C64, u: C64) -> C64;
}

impl DirichletData {
    /// `S(z, u) = q(z) conj(q(u)) - p(z) conj(p(u))
    ///   - (1 - z conj(u)) sum_{i,j} conj(B_ji) h_j(z) conj(h_i(u)) / (O'(ζ_j) conj(O'(ζ_i)))`
    /// with `h_j = p / (z - ζ_j)`.
    pub fn eval_s(&self, z: C64, u: C64) -> C64 {
        let q = self.outer.q.eval(z) * self.outer.q.eval(u).conj();
        let p = self.outer.p.eval(z) * self.outer.p.eval(u).conj();
        let hz: Vec<C64> = (0..self.k())
            .map(|j| self.deflated[j].eval(z) / self.fprime_at_zeta[j])
            .collect();
        let hu: Vec<C64> = (0..self.k())
            .map(|i| self.deflated[i].eval(u) / self.fprime_at_zeta[i])
            .collect();
        let mut sum = ZERO;
        for (j, a) in hz.iter().enumerate() {
            for (i, b) in hu.iter().enumerate() {
                sum += self.inverse[(j, i)].conj() * a * b.conj();
            }
        }
        q - p - (ONE - z * u.conj()) * sum
    }
}

impl SForm for DirichletData {
    fn k(&self) -> usize {
        DirichletData::k(self)
    }

    fn s(&self, z: C64, u: C64) -> C64 {
        self.eval_s(z, u)
    }
}

/// `S(z, u) = sum_{m,n=1..k} C[m-1][n-1] z^m conj(u)^n` and `C = P^T conj(P)`.
#[derive(Debug, Clone)]
pub struct HermForm {
    pub c: CMatrix,
    /// Upper triangular, nonnegative diagonal; row `j` holds the coefficients of
    /// `z, z², ..., z^k` in `p_j`.
    pub p: CMatrix,
    /// Node radius used for the interpolation.
    pub radius: f64,
    pub condition: f64,
    pub refit_residual: f64,
}

impl HermForm {
    pub fn build(dd: &DirichletData, policy: &NumericPolicy) -> Result<Self> {
        let (c, radius, condition, refit_residual) = extract_c(dd, policy)?;
        let p = factor_p(&c)?;
        Ok(Self { c, p, radius, condition, refit_residual })
    }

    /// Row polynomials `p_j` (zero constant term).
    pub fn rows(&self) -> Vec<Poly> {
        (0..self.p.rows())
            .map(|j| {
                let mut coeffs = vec![ZERO];
                coeffs.extend_from_slice(self.p.row(j));
                Poly::new(coeffs)
            })
            .collect()
    }

    /// `S` reconstructed from the rows of `P`.
    pub fn s_from_rows(&self, z: C64, u: C64) -> C64 {
        self.rows().iter().map(|p| p.eval(z) * p.eval(u).conj()).sum()
    }
}

impl SForm for HermForm {
    fn k(&self) -> usize {
        self.c.rows()
    }

    fn s(&self, z: C64, u: C64) -> C64 {
        let x = powers(z, self.k());
        let y = powers(u, self.k());
        let mut acc = ZERO;
        for (m, xm) in x.iter().enumerate() {
            for (n, yn) in y.iter().enumerate() {
                acc += self.c[(m, n)] * xm * yn.conj();
            }
        }
        acc
    }
}

/// `(z, z², ..., z^k)`.
fn powers(z: C64, k: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(k);
    let mut acc = ONE;
    for _ in 0..k {
        acc *= z;
        out.push(acc);
    }
    out
}

fn nodes(k: usize, radius: f64) -> Vec<C64> {
    (0..k)
        .map(|a| C64::from_polar(radius, std::f64::consts::TAU * a as f64 / k as f64))
        .collect()
}

fn refit_points(k: usize) -> Vec<C64> {
    (0..2 * k + 4)
        .map(|a| C64::from_polar(0.3 + 0.6 * ((a * 7 % 11) as f64 / 11.0), 0.37 + 2.1 * a as f64))
        .collect()
}

/// Interpolates `C` from `S` on a `k × k` grid of nodes `r e^{2πi a/k}`.
/// Returns `(C, radius, condition, refit residual)`.
pub fn extract_c(dd: &DirichletData, policy: &NumericPolicy) -> Result<(CMatrix, f64, f64, f64)> {
    let k = dd.k();
    let mut last = Error::IllConditioned { condition: f64::INFINITY };
    for radius in [PRIMARY_RADIUS, FALLBACK_RADIUS] {
        match extract_at(dd, policy, k, radius) {
            Ok(v) => return Ok(v),
            Err(e @ Error::IllConditioned { .. }) => last = e,
            Err(e) => return Err(e),
        }
    }
    Err(last)
}

fn extract_at(
    dd: &DirichletData,
    policy: &NumericPolicy,
    k: usize,
    radius: f64,
) -> Result<(CMatrix, f64, f64, f64)> {
    let z = nodes(k, radius);
    let v = CMatrix::from_fn(k, k, |a, m| z[a].powu(m as u32 + 1));
    let v_inv = solve_linear(&v, &CMatrix::identity(k))?;
    let condition = v.frobenius() * v_inv.frobenius() / k as f64;
    if condition > MAX_CONDITION {
        return Err(Error::IllConditioned { condition });
    }
    let samples = CMatrix::from_fn(k, k, |a, b| dd.eval_s(z[a], z[b]));
    let c = &(&v_inv * &samples) * &v_inv.adjoint();
    let scale = c.max_abs().max(f64::MIN_POSITIVE);
    if c.hermitian_defect() > HERMITIAN_TOL * scale {
        return Err(Error::Consistency(format!(
            "coefficient matrix asymmetry {:.3e}",
            c.hermitian_defect() / scale
        )));
    }
    let c = c.hermitian_part();
    let eig = herm_eigen(&c, policy.eigen_tol, policy.eigen_max_sweeps)?;
    let trace = c.trace().re;
    if eig[0] < -PSD_TOL * trace {
        return Err(Error::NotPsd { pivot: eig[0], trace });
    }

    let form = HermForm {
        c: c.clone(),
        p: CMatrix::zeros(k, k),
        radius,
        condition,
        refit_residual: 0.0,
    };
    let s_scale = samples.max_abs();
    let pts = refit_points(k);
    let mut residual: f64 = 0.0;
    for (i, &a) in pts.iter().enumerate() {
        let b = pts[(i * 5 + 3) % pts.len()];
        residual = residual.max((form.s(a, b) - dd.eval_s(a, b)).norm() / s_scale);
    }
    if residual > REFIT_TOL {
        return Err(Error::Consistency(format!("coefficient refit residual {residual:.3e}")));
    }
    Ok((c, radius, condition, residual))
}

/// Upper triangular `P` with `C = P^T conj(P)` and nonnegative diagonal.
pub fn factor_p(c: &CMatrix) -> Result<CMatrix> {
    Ok(cholesky_herm(c)?.conj())
}

/// `B = (p_1/q, ..., p_k/q)`.
#[derive(Debug, Clone)]
pub struct SchurData {
    pub components: Vec<Poly>,
    pub q: Poly,
}

const SCHUR_RADIUS: f64 = 0.999;
const SCHUR_SAMPLES: usize = 512;

impl SchurData {
    pub fn new(hf: &HermForm, dd: &DirichletData) -> Self {
        Self { components: hf.rows(), q: dd.outer.q.clone() }
    }

    pub fn eval(&self, z: C64) -> Vec<C64> {
        let q = self.q.eval(z);
        self.components.iter().map(|p| p.eval(z) / q).collect()
    }

    pub fn norm_at(&self, z: C64) -> f64 {
        self.eval(z).iter().map(|b| b.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max ||B(z)||` over 512 equally spaced points of `|z| = 0.999`.
    pub fn sampled_sup(&self) -> f64 {
        (0..SCHUR_SAMPLES)
            .map(|i| {
                let z = C64::from_polar(SCHUR_RADIUS, std::f64::consts::TAU * i as f64 / SCHUR_SAMPLES as f64);
                self.norm_at(z)
            })
            .fold(0.0, f64::max)
    }

    pub fn at_origin(&self) -> f64 {
        self.norm_at(ZERO)
    }

    /// `K_B(z, w) = (1 - B(z) B(w)^*) / (1 - z conj(w))`.
    pub fn kernel(&self, z: C64, w: C64) -> Result<C64> {
        for v in [z, w] {
            if v.norm() >= 1.0 {
                return Err(Error::Domain(format!("kernel argument {v} is not in the open unit disc")));
            }
        }
        let bz = self.eval(z);
        let bw = self.eval(w);
        let inner: C64 = bz.iter().zip(&bw).map(|(a, b)| a * b.conj()).sum();
        Ok((ONE - inner) / (ONE - z * w.conj()))
    }
}
