//! The Dirichlet space `D(μ)` of a finitely supported measure, built from its
//! spectral factor: the outer-type function `O_μ = p / q`, the functions
//! `f_j = O_μ / (O_μ'(ζ_j) (z - ζ_j))`, their Gram matrix and the two pieces of
//! the reproducing kernel.
//!
//! The norm is `||f||²_{H²} + ∫ |f'|² P_μ dA`.

use crate::error::{Error, Result};
use crate::fejer_riesz::FejerRiesz;
use crate::measure::Measure;
use crate::numerics::{herm_eigen, solve_linear, CMatrix, Poly, C64, ONE, ZERO};
use crate::policy::NumericPolicy;

const DEFLATION_TOL: f64 = 1e-10;
const POLE_TOL: f64 = 1e-13;
const DEGENERATE_DERIVATIVE: f64 = 1e-10;
const INVERSE_RESIDUAL: f64 = 1e-9;

/// `O_μ = p / q` with `p = e^{iθ} / sqrt(d) prod (z - ζ_j)` and `q = prod (z - α_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OuterData {
    pub p: Poly,
    pub q: Poly,
    pub theta: f64,
}

impl OuterData {
    pub fn eval(&self, z: C64) -> Result<C64> {
        let qz = self.q.eval(z);
        if qz.norm() < POLE_TOL {
            return Err(Error::PoleHit { z });
        }
        Ok(self.p.eval(z) / qz)
    }
}

pub fn build_outer(m: &Measure, fr: &FejerRiesz) -> OuterData {
    let q = fr.q();
    let unnormalized = Poly::from_roots(&m.points()).scale(C64::new(fr.d.sqrt().recip(), 0.0));
    let ratio = unnormalized.eval(ZERO) / q.eval(ZERO);
    let theta = -ratio.arg();
    OuterData { p: unnormalized.scale(C64::from_polar(1.0, theta)), q, theta }
}

#[derive(Debug, Clone)]
pub struct DirichletData {
    pub measure: Measure,
    pub factor: FejerRiesz,
    pub outer: OuterData,
    /// `O_μ'(ζ_j)`.
    pub fprime_at_zeta: Vec<C64>,
    /// `p / (z - ζ_j)`.
    pub deflated: Vec<Poly>,
    /// `D[i][j] = <f_i, f_j>`.
    pub gram: CMatrix,
    /// `B = D^{-1}`.
    pub inverse: CMatrix,
    /// Entrywise asymmetry of `D` before symmetrization.
    pub gram_asymmetry: f64,
}

impl DirichletData {
    pub fn build(m: &Measure, fr: &FejerRiesz, policy: &NumericPolicy) -> Result<Self> {
        if fr.k() != m.k() {
            return Err(Error::Consistency(format!("{} atoms but {} exterior roots", m.k(), fr.k())));
        }
        let outer = build_outer(m, fr);
        let points = m.points();
        let deflated = points
            .iter()
            .map(|&z| outer.p.synthetic_division(z, DEFLATION_TOL))
            .collect::<Result<Vec<_>>>()?;
        let fprime_at_zeta = points
            .iter()
            .zip(&deflated)
            .map(|(&z, h)| h.eval(z) / outer.q.eval(z))
            .collect::<Vec<_>>();
        for (index, v) in fprime_at_zeta.iter().enumerate() {
            if v.norm() <= DEGENERATE_DERIVATIVE {
                return Err(Error::DegenerateAtom { index, modulus: v.norm() });
            }
        }

        let mut data = Self {
            measure: m.clone(),
            factor: fr.clone(),
            outer,
            fprime_at_zeta,
            deflated,
            gram: CMatrix::zeros(0, 0),
            inverse: CMatrix::zeros(0, 0),
            gram_asymmetry: 0.0,
        };
        let raw = data.raw_gram();
        let scale = raw.max_abs().max(1.0);
        data.gram_asymmetry = raw.hermitian_defect();
        if data.gram_asymmetry > policy.gram_asymmetry_tol * scale {
            return Err(Error::Consistency(format!(
                "Gram matrix asymmetry {:.3e} exceeds {:.3e}",
                data.gram_asymmetry,
                policy.gram_asymmetry_tol * scale
            )));
        }
        data.gram = raw.hermitian_part();

        let eigen = herm_eigen(&data.gram, policy.eigen_tol, policy.eigen_max_sweeps)?;
        if eigen[0] <= 0.0 {
            return Err(Error::Consistency(format!(
                "Gram matrix is not positive definite (min eigenvalue {:.3e})",
                eigen[0]
            )));
        }
        let k = m.k();
        data.inverse = solve_linear(&data.gram, &CMatrix::identity(k))?;
        let residual = (&data.gram * &data.inverse).sub(&CMatrix::identity(k)).max_abs();
        if residual > INVERSE_RESIDUAL {
            return Err(Error::Consistency(format!("||D B - I|| = {residual:.3e}")));
        }
        Ok(data)
    }

    pub fn k(&self) -> usize {
        self.measure.k()
    }

    /// `c_i ζ_i f_i'(ζ_i)` on the diagonal and
    /// `1 / (O'(ζ_i) conj(O'(ζ_j)) (1 - ζ_i conj(ζ_j)))` off it.
    fn raw_gram(&self) -> CMatrix {
        let points = self.measure.points();
        let weights = self.measure.weights();
        let k = points.len();
        CMatrix::from_fn(k, k, |i, j| {
            if i == j {
                weights[i] * points[i] * self.f_derivative(i, points[i])
            } else {
                (self.fprime_at_zeta[i]
                    * self.fprime_at_zeta[j].conj()
                    * (ONE - points[i] * points[j].conj()))
                .inv()
            }
        })
    }

    /// `f_j'(z)` from the deflated form (`z` must not be a pole).
    fn f_derivative(&self, j: usize, z: C64) -> C64 {
        let (h, dh) = self.deflated[j].eval_with_derivative(z);
        let (q, dq) = self.outer.q.eval_with_derivative(z);
        (dh * q - h * dq) / (q * q * self.fprime_at_zeta[j])
    }

    pub fn outer_at(&self, z: C64) -> Result<C64> {
        self.outer.eval(z)
    }

    /// `f_j(z) = (p / (z - ζ_j))(z) / (O'(ζ_j) q(z))`, finite at `ζ_j`.
    pub fn eval_f(&self, j: usize, z: C64) -> Result<C64> {
        let q = self.outer.q.eval(z);
        if q.norm() < POLE_TOL {
            return Err(Error::PoleHit { z });
        }
        Ok(self.deflated[j].eval(z) / (self.fprime_at_zeta[j] * q))
    }

    pub fn eval_f_all(&self, z: C64) -> Result<Vec<C64>> {
        (0..self.k()).map(|j| self.eval_f(j, z)).collect()
    }

    /// `conj(g(λ)) = B f(λ)`, returned conjugated back to `g(λ)`.
    pub fn g(&self, lam: C64) -> Result<Vec<C64>> {
        let f = self.eval_f_all(lam)?;
        Ok(self.inverse.mul_vec(&f).into_iter().map(|v| v.conj()).collect())
    }

    /// Kernel of `O_μ H²`: `O(z) conj(O(λ)) / (1 - conj(λ) z)`.
    pub fn kernel_omu(&self, z: C64, lam: C64) -> Result<C64> {
        check_disc(z)?;
        check_disc(lam)?;
        Ok(self.outer_at(z)? * self.outer_at(lam)?.conj() / (ONE - lam.conj() * z))
    }

    /// Kernel of the orthogonal complement: `sum_j g_j(λ) f_j(z)`.
    pub fn kernel_perp(&self, z: C64, lam: C64) -> Result<C64> {
        check_disc(z)?;
        check_disc(lam)?;
        let g = self.g(lam)?;
        let f = self.eval_f_all(z)?;
        Ok(g.iter().zip(&f).map(|(a, b)| a * b).sum())
    }

    pub fn kernel_full(&self, z: C64, lam: C64) -> Result<C64> {
        Ok(self.kernel_omu(z, lam)? + self.kernel_perp(z, lam)?)
    }
}

fn check_disc(z: C64) -> Result<()> {
    if z.norm() < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("kernel argument {z} is not in the open unit disc")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fejer_riesz::{build_trig, factorize};
    use crate::measure::parse_measure;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn data(spec: &str) -> DirichletData {
        let m = parse_measure(spec).unwrap();
        let policy = NumericPolicy::default();
        let fr = factorize(&build_trig(&m), &policy).unwrap();
        DirichletData::build(&m, &fr, &policy).unwrap()
    }

    fn three() -> DirichletData {
        data("0,1/3,2/3:1,1,1")
    }

    fn random_disc(rng: &mut ChaCha8Rng, radius: f64) -> C64 {
        C64::from_polar(radius * rng.random::<f64>().sqrt(), rng.random_range(0.0..std::f64::consts::TAU))
    }

    // Closed-form constants for the equispaced case, by rationalization:
    // b = (11 + 3√13)/2, x = -(2+b)/(1-b) = (√13 - 1)/2.
    fn b() -> f64 {
        (11.0 + 3.0 * 13f64.sqrt()) / 2.0
    }
    fn x() -> f64 {
        (13f64.sqrt() - 1.0) / 2.0
    }
    fn w() -> C64 {
        C64::new(-0.5, 3f64.sqrt() / 2.0)
    }

    #[test]
    fn rationalized_constants() {
        let b = b();
        assert!((-(2.0 + b) / (1.0 - b) - x()).abs() < 1e-14);
        assert!((x() - 1.302776).abs() < 1e-6);
    }

    #[test]
    fn outer_function_equispaced() {
        let dd = three();
        assert!(dd.outer.theta.abs() < 1e-15);
        let sqrt_d = dd.factor.d.sqrt();
        for z in [C64::new(0.3, 0.1), C64::new(-0.5, 0.6), ZERO] {
            let expected = (z.powu(3) - 1.0) / (sqrt_d * (z.powu(3) - b()));
            assert!((dd.outer_at(z).unwrap() - expected).norm() < 1e-13);
        }
        assert!(dd.outer_at(ZERO).unwrap().re > 0.0);
        for z in dd.measure.points() {
            assert!(dd.outer_at(z).unwrap().norm() < 1e-14);
        }
    }

    #[test]
    fn outer_function_single_atom() {
        let dd = data("0:1");
        assert!(dd.outer.theta.abs() < 1e-15);
        let alpha = dd.factor.alphas[0];
        let at_zero = dd.outer_at(ZERO).unwrap();
        assert!((at_zero - (dd.factor.d.sqrt() * alpha).inv()).norm() < 1e-14);
        assert!(at_zero.re > 0.0 && at_zero.im.abs() < 1e-15);
    }

    #[test]
    fn outer_derivative_at_atoms() {
        let dd = three();
        let o1 = dd.fprime_at_zeta[0];
        for v in &dd.fprime_at_zeta {
            assert!((v.norm() - 1.0).abs() < 1e-10);
        }
        assert!((dd.fprime_at_zeta[1] - w() * w() * o1).norm() < 1e-10);
        assert!((dd.fprime_at_zeta[2] - w() * o1).norm() < 1e-10);
        let expected = 3.0 / (dd.factor.d.sqrt() * (1.0 - b()));
        assert!((o1 - C64::new(expected, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn basis_functions() {
        let dd = three();
        let w = w();
        let z = C64::new(0.2, -0.7);
        let f1 = (1.0 - b()) * (z - w) * (z - w * w) / (3.0 * (z.powu(3) - b()));
        assert!((dd.eval_f(0, z).unwrap() - f1).norm() < 1e-13);
        let points = dd.measure.points();
        for j in 0..3 {
            for (i, &point) in points.iter().enumerate() {
                let v = dd.eval_f(j, point).unwrap();
                let want = if i == j { ONE } else { ZERO };
                assert!((v - want).norm() < 1e-13, "f_{j}(ζ_{i}) = {v}");
            }
            // the removable singularity is continuous
            for eps in [1e-6, -1e-6] {
                let near = points[j] * (1.0 + eps);
                assert!((dd.eval_f(j, near).unwrap() - ONE).norm() < 1e-5);
            }
        }
    }

    #[test]
    fn gram_equispaced() {
        let dd = three();
        let s = (w() - 1.0).inv();
        assert!((s - C64::new(-0.5, -3f64.sqrt() / 6.0)).norm() < 1e-15);
        for i in 0..3 {
            assert!((dd.gram[(i, i)] - C64::new(x(), 0.0)).norm() < 1e-10);
        }
        assert!((dd.gram[(0, 1)] - s).norm() < 1e-10);
        assert!((dd.gram[(1, 2)] - s).norm() < 1e-10);
        assert!((dd.gram[(2, 0)] - s).norm() < 1e-10);
        assert!((dd.gram[(0, 2)] - (w() * w() - 1.0).inv()).norm() < 1e-10);
        assert!(dd.gram_asymmetry < 1e-12);
    }

    #[test]
    fn inverse_matches_closed_form() {
        let dd = three();
        let x = x();
        let s = (w() - 1.0).inv();
        let det = x * (x * x - 1.0);
        let diag = C64::new(x * x - 1.0 / 3.0, 0.0) / det;
        let upper = (s.conj() * s.conj() - x * s) / det;
        let lower = (s * s - x * s.conj()) / det;
        let expected = CMatrix::from_rows(&[
            vec![diag, upper, lower],
            vec![lower, diag, upper],
            vec![upper, lower, diag],
        ]);
        assert!(dd.inverse.sub(&expected).max_abs() < 1e-9);
        let via_solve = solve_linear(&dd.gram, &CMatrix::identity(3)).unwrap();
        for i in 0..3 {
            assert!((via_solve[(i, i)] - diag).norm() < 1e-9);
        }
    }

    #[test]
    fn single_atom_gram_is_positive() {
        let dd = data("0:1");
        assert_eq!(dd.gram.rows(), 1);
        let alpha = dd.factor.alphas[0].re;
        assert!((dd.gram[(0, 0)].re - 1.0 / (alpha - 1.0)).abs() < 1e-13);
        assert!(dd.gram[(0, 0)].re > 0.0);
    }

    #[test]
    fn kernels_basic() {
        let dd = three();
        let o0 = dd.outer_at(ZERO).unwrap();
        assert!((dd.kernel_omu(ZERO, ZERO).unwrap() - o0 * o0).norm() < 1e-14);
        assert!(dd.kernel_omu(ZERO, ZERO).unwrap().re > 0.0);
        let zeta = dd.measure.points()[1];
        let lam = C64::new(0.1, 0.2);
        let near = dd.kernel_omu(zeta * 0.999_999, lam).unwrap().norm();
        assert!(near < 1e-5);
        assert!(dd.kernel_omu(C64::new(1.0, 0.0), lam).is_err());
    }

    #[test]
    fn kernels_are_hermitian_and_positive() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for spec in ["0:1", "0,1/2:1,1", "0,1/4:1,1", "0,1/3,2/3:1,1,1", "0,1/5,1/2:2,0.5,1"] {
            let dd = data(spec);
            for _ in 0..100 {
                let z = random_disc(&mut rng, 0.95);
                let l = random_disc(&mut rng, 0.95);
                let a = dd.kernel_omu(z, l).unwrap();
                let b = dd.kernel_omu(l, z).unwrap();
                assert!((a - b.conj()).norm() <= 1e-10 * (1.0 + a.norm()));
                let a = dd.kernel_perp(z, l).unwrap();
                let b = dd.kernel_perp(l, z).unwrap();
                assert!((a - b.conj()).norm() <= 1e-10 * (1.0 + a.norm()));
            }
            let pts: Vec<C64> = (0..6).map(|_| random_disc(&mut rng, 0.9)).collect();
            for kernel in [DirichletData::kernel_perp, DirichletData::kernel_full] {
                let gram = CMatrix::from_fn(6, 6, |a, b| kernel(&dd, pts[a], pts[b]).unwrap()).hermitian_part();
                let e = herm_eigen(&gram, 1e-14, 100).unwrap();
                assert!(e[0] >= -1e-9 * e[5].max(1.0), "{spec}: {e:?}");
            }
        }
    }

    #[test]
    fn single_atom_perp_kernel() {
        let dd = data("0:1");
        let z = C64::new(0.3, -0.4);
        let l = C64::new(-0.6, 0.1);
        let f = |x| dd.eval_f(0, x).unwrap();
        let expected = f(z) * f(l).conj() / dd.gram[(0, 0)];
        assert!((dd.kernel_perp(z, l).unwrap() - expected).norm() < 1e-14);
    }

    #[test]
    fn normalized_at_origin() {
        // <f, 1> = f(0) in D(μ), so K(z, 0) = 1.
        for spec in ["0:1", "0,1/3,2/3:1,1,1", "0,1/5,1/2:2,0.5,1"] {
            let dd = data(spec);
            for z in [ZERO, C64::new(0.5, 0.2), C64::new(-0.1, -0.8)] {
                assert!((dd.kernel_full(z, ZERO).unwrap() - ONE).norm() < 1e-10, "{spec}");
            }
        }
    }
}
