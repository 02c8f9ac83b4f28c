//! Operator-level cross-checks on a truncated monomial model of `D(μ)`:
//! the shift `M_z`, its Agler forms, and the Cauchy dual `M_z (M_z^* M_z)^{-1}`.

pub mod quadrature;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dirichlet::DirichletData;
use crate::error::{Error, Result};
use crate::measure::Measure;
use crate::numerics::{cholesky_herm, herm_eigen, solve_linear, CMatrix, C64, ZERO};
use crate::policy::NumericPolicy;

pub type CoeffVec = Vec<C64>;

/// Test vectors for the probes live on the first few monomials.
pub const PROBE_SUPPORT: usize = 8;
const TAYLOR_DEGREE: usize = 200;

#[derive(Debug, Clone)]
pub struct MonomialModel {
    pub n: usize,
    /// `G[a][b] = <z^a, z^b>`.
    pub gram: CMatrix,
    /// `conj(G)`, so that `<x, y> = y^* form x`.
    pub form: CMatrix,
}

/// `G[a][b] = δ_ab + min(a, b) sum_j c_j ζ_j^{a-b}`.
pub fn monomial_gram(m: &Measure, n: usize) -> Result<MonomialModel> {
    if n < 4 {
        return Err(Error::Domain(format!("monomial model needs at least 4 monomials, got {n}")));
    }
    let points = m.points();
    let weights = m.weights();
    let k = points.len();
    // moments[d] = sum_j c_j ζ_j^d
    let mut moments = vec![ZERO; n];
    let mut powers = vec![C64::new(1.0, 0.0); k];
    for moment in moments.iter_mut() {
        *moment = powers.iter().zip(&weights).map(|(p, c)| p * c).sum();
        for (p, z) in powers.iter_mut().zip(&points) {
            *p *= z;
        }
    }
    let gram = CMatrix::from_fn(n, n, |a, b| {
        let local = if a >= b { moments[a - b] } else { moments[b - a].conj() };
        let diag = if a == b { 1.0 } else { 0.0 };
        C64::new(diag, 0.0) + local * a.min(b) as f64
    });
    let form = gram.conj();
    Ok(MonomialModel { n, gram, form })
}

impl MonomialModel {
    pub fn norm_sq(&self, v: &[C64]) -> f64 {
        self.form.quadratic_form(v).re
    }

    pub fn inner(&self, x: &[C64], y: &[C64]) -> C64 {
        self.form.sesquilinear(x, y)
    }

    /// Multiplication by `z`.
    pub fn apply_mz(&self, v: &[C64]) -> Result<CoeffVec> {
        check_len(v, self.n)?;
        if v[self.n - 1] != ZERO {
            return Err(Error::Headroom { needed: 1, available: 0 });
        }
        let mut out = vec![ZERO; self.n];
        out[1..].copy_from_slice(&v[..self.n - 1]);
        Ok(out)
    }

    /// `<B_n(M_z) v, v> = sum_k (-1)^k C(n, k) ||z^k v||²`.
    pub fn bn_form(&self, n: usize, v: &[C64]) -> Result<f64> {
        check_len(v, self.n)?;
        let free = v.iter().rev().take_while(|x| **x == ZERO).count();
        if free < n {
            return Err(Error::Headroom { needed: n, available: free });
        }
        let mut shifted = v.to_vec();
        let mut total = 0.0;
        for k in 0..=n {
            if k > 0 {
                shifted = self.apply_mz(&shifted)?;
            }
            total += sign(k) * binomial(n, k) * self.norm_sq(&shifted);
        }
        Ok(total)
    }
}

fn check_len(v: &[C64], n: usize) -> Result<()> {
    if v.len() != n {
        return Err(Error::Domain(format!("coefficient vector has length {}, model has {n}", v.len())));
    }
    Ok(())
}

fn sign(k: usize) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

pub fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Cauchy dual of the shift from `span{1, ..., z^{n-2}}` into `span{1, ..., z^{n-1}}`.
///
/// With `G' = H[0..n-1, 0..n-1]` and `G_s = H[1..n, 1..n]`, `H = conj(G)`, the compressed
/// `M_z^* M_z` is `G'^{-1} G_s`, so `T' x = z · (G_s^{-1} G' x)`.
#[derive(Debug, Clone)]
pub struct CauchyDual {
    /// `n × (n-1)`.
    pub matrix: CMatrix,
    domain_gram: CMatrix,
    shifted_gram: CMatrix,
}

pub fn cauchy_dual_matrix(mm: &MonomialModel) -> Result<CauchyDual> {
    let n = mm.n;
    let domain_gram = mm.form.block(0, 0, n - 1, n - 1);
    let shifted_gram = mm.form.block(1, 1, n - 1, n - 1);
    let x = solve_linear(&shifted_gram, &domain_gram)?;
    let matrix = CMatrix::from_fn(n, n - 1, |a, b| if a == 0 { ZERO } else { x[(a - 1, b)] });
    Ok(CauchyDual { matrix, domain_gram, shifted_gram })
}

impl CauchyDual {
    pub fn domain_dim(&self) -> usize {
        self.matrix.cols()
    }

    /// `T' x` for `x` in the domain (length `n-1`), result of length `n`.
    pub fn apply(&self, x: &[C64]) -> CoeffVec {
        self.matrix.mul_vec(x)
    }

    /// Operator norm between the `G`-weighted spaces:
    /// `||T'||² = λ_max(R G_s^{-1} R^*)` where `G' = R^* R`.
    pub fn norm(&self, policy: &NumericPolicy) -> Result<f64> {
        let r = cholesky_herm(&self.domain_gram)?;
        let y = solve_linear(&self.shifted_gram, &r.adjoint())?;
        let m = (&r * &y).hermitian_part();
        let eig = herm_eigen(&m, policy.eigen_tol, policy.eigen_max_sweeps)?;
        Ok(eig.last().copied().unwrap_or(0.0).max(0.0).sqrt())
    }

    /// `<B_n(T') v, v>` with `T'^k v` computed by applying `T'` and dropping
    /// the top coefficient; returns the form and the largest dropped modulus.
    pub fn bn_form(&self, mm: &MonomialModel, n: usize, v: &[C64]) -> (f64, f64) {
        let d = self.domain_dim();
        let mut x = v.to_vec();
        x.resize(d, ZERO);
        let mut padded = x.clone();
        padded.push(ZERO);
        let mut total = mm.norm_sq(&padded);
        let mut dropped: f64 = 0.0;
        for k in 1..=n {
            let y = self.apply(&x);
            total += sign(k) * binomial(n, k) * mm.norm_sq(&y);
            dropped = dropped.max(y[d].norm());
            x = y[..d].to_vec();
        }
        (total, dropped)
    }
}

/// Largest entrywise difference of the leading `size × size` corners of the
/// Cauchy dual at truncations `n` and `2n`.
pub fn stabilization(m: &Measure, n: usize, size: usize) -> Result<f64> {
    let a = cauchy_dual_matrix(&monomial_gram(m, n)?)?;
    let b = cauchy_dual_matrix(&monomial_gram(m, 2 * n)?)?;
    let size = size.min(n - 1);
    Ok(a.matrix.block(0, 0, size, size).sub(&b.matrix.block(0, 0, size, size)).max_abs())
}

fn random_vectors(seed: u64, trials: usize, len: usize) -> Vec<CoeffVec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..trials)
        .map(|_| {
            let mut v = vec![ZERO; len];
            for x in v.iter_mut().take(PROBE_SUPPORT.min(len)) {
                *x = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            }
            v
        })
        .collect()
}

/// Largest `<B_n(M_z) v, v> / ||v||²` for each `n = 1..=n_max` over seeded
/// random vectors on the first monomials.
pub fn bn_mz_probe(mm: &MonomialModel, n_max: usize, trials: usize, seed: u64) -> Result<Vec<f64>> {
    let vectors = random_vectors(seed, trials, mm.n);
    (1..=n_max)
        .map(|n| {
            vectors.iter().try_fold(f64::NEG_INFINITY, |acc, v| {
                Ok(acc.max(mm.bn_form(n, v)? / mm.norm_sq(v)))
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualProbe {
    pub n_max: usize,
    pub trials: usize,
    pub seed: u64,
    /// Most negative `<B_n(T') v, v> / ||v||²` at truncation `N`.
    pub most_negative: f64,
    pub witness_n: usize,
    pub witness_trial: usize,
    /// The same witness evaluated at truncation `2N`.
    pub most_negative_2n: f64,
    /// The two truncations differ by more than 10%.
    pub caution: bool,
    pub max_dropped: f64,
}

/// Searches for a negative Agler form of the Cauchy dual; a negative value
/// rules out subnormality of the truncated operator.
pub fn bn_dual_probe(m: &Measure, n_trunc: usize, n_max: usize, trials: usize, seed: u64) -> Result<DualProbe> {
    let small = monomial_gram(m, n_trunc)?;
    let large = monomial_gram(m, 2 * n_trunc)?;
    let dual_small = cauchy_dual_matrix(&small)?;
    let dual_large = cauchy_dual_matrix(&large)?;
    let vectors = random_vectors(seed, trials, n_trunc - 1);
    let results: Vec<(usize, usize, f64, f64)> = vectors
        .par_iter()
        .enumerate()
        .flat_map_iter(|(trial, v)| {
            let mut padded = v.clone();
            padded.push(ZERO);
            let norm = small.norm_sq(&padded);
            let dual = &dual_small;
            let small = &small;
            (1..=n_max).map(move |n| {
                let (value, dropped) = dual.bn_form(small, n, v);
                (trial, n, value / norm, dropped)
            })
        })
        .collect();
    let mut best = (0, 1, f64::INFINITY);
    let mut max_dropped: f64 = 0.0;
    for &(trial, n, value, dropped) in &results {
        max_dropped = max_dropped.max(dropped);
        if value < best.2 {
            best = (trial, n, value);
        }
    }
    let (witness_trial, witness_n, most_negative) = best;
    let mut v2 = vectors[witness_trial].clone();
    v2.resize(2 * n_trunc - 1, ZERO);
    let mut padded = v2.clone();
    padded.push(ZERO);
    let (value_2n, _) = dual_large.bn_form(&large, witness_n, &v2);
    let most_negative_2n = value_2n / large.norm_sq(&padded);
    let caution = (most_negative - most_negative_2n).abs() > 0.1 * most_negative.abs().max(most_negative_2n.abs());
    Ok(DualProbe {
        n_max,
        trials,
        seed,
        most_negative,
        witness_n,
        witness_trial,
        most_negative_2n,
        caution,
        max_dropped,
    })
}

/// `<f_i, f_j>` from the Taylor coefficients of `f_i` up to degree 200 paired
/// through the monomial Gram matrix.
pub fn taylor_gram(dd: &DirichletData) -> Result<CMatrix> {
    let len = TAYLOR_DEGREE + 1;
    let model = monomial_gram(&dd.measure, len)?;
    let series = (0..dd.k())
        .map(|j| {
            let coeffs = dd.deflated[j].series_quotient(&dd.outer.q, len)?;
            Ok(coeffs.into_iter().map(|c| c / dd.fprime_at_zeta[j]).collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CMatrix::from_fn(dd.k(), dd.k(), |i, j| model.inner(&series[i], &series[j])))
}
