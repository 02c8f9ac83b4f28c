//! Spectral factorization of the trigonometric polynomial attached to a measure:
//!
//! ```text
//! prod_j |z - ζ_j|² + sum_j c_j prod_{i != j} |z - ζ_i|² = d prod_j |z - α_j|²,   |z| = 1
//! ```
//!
//! with every `α_j` strictly outside the closed disc and `d > 0`.

use std::f64::consts::PI;

use num_rational::Rational64;

use crate::error::{Error, Result};
use crate::measure::{CirclePoint, Measure};
use crate::numerics::{poly_roots, Poly, C64, ONE, ZERO};
use crate::policy::NumericPolicy;

/// Laurent polynomial `sum_{m=-k}^{k} t_m z^m`, real on the circle.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPoly {
    k: usize,
    coeffs: Vec<C64>,
}

impl TrigPoly {
    pub fn k(&self) -> usize {
        self.k
    }

    /// `t_m` for `m` in `-k..=k`; zero outside that range.
    pub fn coeff(&self, m: i64) -> C64 {
        let idx = m + self.k as i64;
        if idx < 0 {
            return ZERO;
        }
        self.coeffs.get(idx as usize).copied().unwrap_or(ZERO)
    }

    /// Coefficients of `z^k t(z)`, ascending.
    pub fn shifted_coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn eval(&self, z: C64) -> C64 {
        let shifted = Poly::new(self.coeffs.clone()).eval(z);
        shifted / z.powu(self.k as u32)
    }

    /// Largest `|t_{-m} - conj(t_m)|`.
    pub fn hermitian_defect(&self) -> f64 {
        (0..=self.k as i64)
            .map(|m| (self.coeff(-m) - self.coeff(m).conj()).norm())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FejerRiesz {
    pub alphas: Vec<C64>,
    pub d: f64,
}

impl FejerRiesz {
    pub fn k(&self) -> usize {
        self.alphas.len()
    }

    pub fn q(&self) -> Poly {
        Poly::from_roots(&self.alphas)
    }

    /// `d prod_j |z - α_j|²`.
    pub fn rhs(&self, z: C64) -> f64 {
        self.d * self.alphas.iter().map(|a| (z - a).norm_sqr()).product::<f64>()
    }
}

/// On the circle `|z - ζ|² = 2 - conj(ζ) z - ζ / z`.
fn circle_factor(zeta: C64) -> Vec<C64> {
    vec![-zeta, C64::new(2.0, 0.0), -zeta.conj()]
}

fn convolve(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = vec![ZERO; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

pub fn build_trig(m: &Measure) -> TrigPoly {
    let points = m.points();
    let k = points.len();
    let product = |skip: Option<usize>| {
        points
            .iter()
            .enumerate()
            .filter(|(i, _)| Some(*i) != skip)
            .fold(vec![ONE], |acc, (_, &z)| convolve(&acc, &circle_factor(z)))
    };
    let mut coeffs = product(None);
    for (j, weight) in m.weights().into_iter().enumerate() {
        // degree k-1 Laurent polynomial, centered inside the degree k one
        for (i, t) in product(Some(j)).into_iter().enumerate() {
            coeffs[i + 1] += t * weight;
        }
    }
    // The extreme coefficients are (-1)^k prod ζ_j and its conjugate.
    let turns: Option<Vec<_>> = m.atoms().iter().map(|a| a.point.exact_turns()).collect();
    if let Some(turns) = turns {
        let total = turns.into_iter().fold(Rational64::from_integer(0), |acc, t| acc + t);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let top = CirclePoint::from_turns(total).value() * sign;
        coeffs[0] = top;
        coeffs[2 * k] = top.conj();
    }
    TrigPoly { k, coeffs }
}

fn circle_samples(count: usize) -> impl Iterator<Item = C64> {
    (0..count).map(move |s| C64::from_polar(1.0, 2.0 * PI * (s as f64 + 0.25) / count as f64))
}

pub fn factorize(t: &TrigPoly, policy: &NumericPolicy) -> Result<FejerRiesz> {
    let k = t.k();
    let shifted = Poly::new(t.shifted_coeffs().to_vec());
    if shifted.degree() != 2 * k {
        return Err(Error::Consistency(format!(
            "z^k t(z) has degree {} instead of {}",
            shifted.degree(),
            2 * k
        )));
    }
    let roots = poly_roots(&shifted, policy.root_tol, policy.root_max_sweeps)?;
    if let Some(r) = roots.iter().find(|r| (r.norm() - 1.0).abs() < policy.circle_margin) {
        return Err(Error::RootOnCircle { modulus: r.norm() });
    }
    let (outside, mut inside): (Vec<C64>, Vec<C64>) = roots.into_iter().partition(|r| r.norm() > 1.0);
    if outside.len() != k {
        return Err(Error::PairingFailure(format!(
            "{} roots outside the disc, expected {k}",
            outside.len()
        )));
    }
    for alpha in &outside {
        let mirror = alpha.conj().inv();
        let (best, gap) = inside
            .iter()
            .enumerate()
            .map(|(i, b)| (i, (b - mirror).norm()))
            .fold((usize::MAX, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
        if best == usize::MAX || gap > policy.pairing_tol * (1.0 + mirror.norm()) {
            return Err(Error::PairingFailure(format!(
                "no reflected partner for {alpha} (closest at distance {gap:.3e})"
            )));
        }
        inside.swap_remove(best);
    }

    let mut alphas = outside;
    alphas.sort_by(|a, b| a.arg().total_cmp(&b.arg()).then(a.norm().total_cmp(&b.norm())));

    let z0 = C64::from_polar(1.0, 0.7);
    let denom: f64 = alphas.iter().map(|a| (z0 - a).norm_sqr()).product();
    let d = t.eval(z0).re / denom;
    if !(d.is_finite() && d > 0.0) {
        return Err(Error::Consistency(format!("factorization constant d = {d} is not positive")));
    }
    let fr = FejerRiesz { alphas, d };

    let residual = circle_samples(4 * k + 16)
        .map(|z| {
            let lhs = t.eval(z).re;
            (lhs - fr.rhs(z)).abs() / lhs.abs()
        })
        .fold(0.0, f64::max);
    if residual.is_nan() || residual > policy.identity_tol {
        return Err(Error::IdentityResidual { residual, tol: policy.identity_tol });
    }
    Ok(fr)
}

/// Largest relative mismatch of the factorization identity over `8k + 32` circle
/// samples, with the left side evaluated straight from the measure.
pub fn verify_identity(m: &Measure, fr: &FejerRiesz) -> f64 {
    circle_samples(8 * m.k() + 32)
        .map(|z| {
            let lhs = m.riesz_fejer_lhs(z);
            (lhs - fr.rhs(z)).abs() / lhs.abs()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::parse_measure;

    fn policy() -> NumericPolicy {
        NumericPolicy::default()
    }

    fn assert_trig(t: &TrigPoly, expected: &[(i64, f64)]) {
        for m in -(t.k() as i64)..=(t.k() as i64) {
            let want = expected.iter().find(|(i, _)| *i == m).map_or(0.0, |(_, v)| *v);
            assert!((t.coeff(m) - C64::new(want, 0.0)).norm() <= 1e-12, "t_{m} = {}", t.coeff(m));
        }
    }

    #[test]
    fn trig_equispaced_three() {
        let t = build_trig(&Measure::equispaced_three());
        assert_trig(&t, &[(0, 11.0), (3, -1.0), (-3, -1.0)]);
        assert_eq!(t.coeff(0), C64::new(11.0, 0.0));
        assert_eq!(t.coeff(3), C64::new(-1.0, 0.0));
        assert_eq!(t.coeff(-3), C64::new(-1.0, 0.0));
    }

    #[test]
    fn trig_single_and_antipodal() {
        assert_trig(&build_trig(&parse_measure("0:1").unwrap()), &[(0, 3.0), (1, -1.0), (-1, -1.0)]);
        assert_trig(&build_trig(&parse_measure("0,1/2:1,1").unwrap()), &[(0, 6.0), (2, -1.0), (-2, -1.0)]);
    }

    #[test]
    fn trig_matches_direct_evaluation() {
        let m = parse_measure("0,1/5,3/7:0.5,2,1.25").unwrap();
        let t = build_trig(&m);
        assert!(t.hermitian_defect() < 1e-12);
        for z in circle_samples(40) {
            let v = t.eval(z);
            assert!(v.im.abs() < 1e-12);
            assert!((v.re - m.riesz_fejer_lhs(z)).abs() < 1e-12 * v.re);
        }
    }

    #[test]
    fn factorize_equispaced_three() {
        let m = Measure::equispaced_three();
        let fr = factorize(&build_trig(&m), &policy()).unwrap();
        let b = (11.0 + 3.0 * 13f64.sqrt()) / 2.0;
        let alpha = b.cbrt();
        assert!((alpha - 2.2177847).abs() < 1e-7);
        for a in &fr.alphas {
            assert!((a.norm() - alpha).abs() < 1e-12);
            assert!((a.powu(3) - C64::new(b, 0.0)).norm() < 1e-10 * b);
        }
        assert!((fr.d * b - 1.0).abs() < 1e-10);
        assert!((fr.d - 0.091673).abs() < 1e-6);
        // ascending argument: α w², α, α w
        assert!(fr.alphas[0].arg() < 0.0 && fr.alphas[2].arg() > 0.0);
        assert!(verify_identity(&m, &fr) <= 1e-9);
    }

    #[test]
    fn factorize_single_atom() {
        let m = parse_measure("0:1").unwrap();
        let fr = factorize(&build_trig(&m), &policy()).unwrap();
        let s5 = 5f64.sqrt();
        assert!((fr.alphas[0] - C64::new((3.0 + s5) / 2.0, 0.0)).norm() < 1e-13);
        assert!((fr.d - (3.0 - s5) / 2.0).abs() < 1e-13);
        let alpha = fr.alphas[0].re;
        assert!((fr.d * (1.0 + alpha * alpha) - 3.0).abs() < 1e-12);
        assert!((fr.d * alpha - 1.0).abs() < 1e-12);
        assert!(verify_identity(&m, &fr) <= 1e-12);
    }

    #[test]
    fn factorize_antipodal() {
        let m = parse_measure("0,1/2:1,1").unwrap();
        let fr = factorize(&build_trig(&m), &policy()).unwrap();
        let r = 1.0 + 2f64.sqrt();
        let mut re: Vec<f64> = fr.alphas.iter().map(|a| a.re).collect();
        re.sort_by(f64::total_cmp);
        assert!((re[0] + r).abs() < 1e-12 && (re[1] - r).abs() < 1e-12);
        assert!(fr.alphas.iter().all(|a| a.im.abs() < 1e-12));
        assert!((fr.d - 1.0 / (3.0 + 2.0 * 2f64.sqrt())).abs() < 1e-13);
    }

    #[test]
    fn corrupted_constant_is_detected() {
        let m = parse_measure("0:1").unwrap();
        let mut fr = factorize(&build_trig(&m), &policy()).unwrap();
        fr.d *= 1.01;
        let residual = verify_identity(&m, &fr);
        assert!((residual - 0.01).abs() < 1e-9);
    }

    #[test]
    fn every_root_has_a_reflection() {
        let m = parse_measure("0,1/7,1/2,5/6:1,0.3,2,1").unwrap();
        let t = build_trig(&m);
        let roots = poly_roots(&Poly::new(t.shifted_coeffs().to_vec()), 1e-13, 500).unwrap();
        for r in &roots {
            let mirror = r.conj().inv();
            assert!(roots.iter().any(|s| (s - mirror).norm() < 1e-7));
        }
        let fr = factorize(&t, &policy()).unwrap();
        assert_eq!(fr.k(), 4);
        assert!(fr.alphas.iter().all(|a| a.norm() > 1.0 + 1e-8));
        assert!(fr.d > 0.0);
    }
}
