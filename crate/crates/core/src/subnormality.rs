//! Subnormality tests for the Cauchy dual: the off-diagonal zero test at the
//! exterior roots and truncations of the positivity matrices.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::debranges::SForm;
use crate::error::{Error, Result};
use crate::fejer_riesz::FejerRiesz;
use crate::numerics::{geometric_mean, herm_eigen, CMatrix, C64, ONE, ZERO};
use crate::policy::NumericPolicy;

const PREMISE_TOL: f64 = 1e-10;
const DISTINCT_ALPHAS: f64 = 1e-9;
const HERMITIAN_TOL: f64 = 1e-12;
pub const MAX_K: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairEvidence {
    pub r: usize,
    pub t: usize,
    /// `α_r conj(α_t)`.
    pub product: C64,
    /// The product avoids `[1, ∞)`.
    pub premise_ok: bool,
    pub s_rt: C64,
    /// `sqrt(S(α_r, α_r) S(α_t, α_t))`.
    pub s_scale: f64,
}

impl PairEvidence {
    pub fn normalized(&self) -> f64 {
        if self.s_scale > 0.0 {
            self.s_rt.norm() / self.s_scale
        } else {
            0.0
        }
    }
}

fn premise(product: C64) -> bool {
    !(product.im.abs() <= PREMISE_TOL && product.re >= 1.0 - PREMISE_TOL)
}

/// Pairs `r < t` with the premise evaluated; the `S` fields are left empty.
pub fn pair_premises(fr: &FejerRiesz) -> Vec<PairEvidence> {
    let a = &fr.alphas;
    let mut out = Vec::new();
    for r in 0..a.len() {
        for t in r + 1..a.len() {
            let product = a[r] * a[t].conj();
            out.push(PairEvidence { r, t, product, premise_ok: premise(product), s_rt: ZERO, s_scale: 0.0 });
        }
    }
    out
}

pub fn offdiag_sums(fr: &FejerRiesz, s: &impl SForm) -> Vec<PairEvidence> {
    let diag: Vec<f64> = fr.alphas.iter().map(|&a| s.s(a, a).re.max(0.0)).collect();
    let mut pairs = pair_premises(fr);
    for p in &mut pairs {
        p.s_rt = s.s(fr.alphas[p.r], fr.alphas[p.t]);
        p.s_scale = geometric_mean(diag[p.r], diag[p.t]);
    }
    pairs
}

/// `(log |a_r|, arg a_r)` for `a_r = prod_{t≠r} (α_r - α_t)`.
fn log_a(alphas: &[C64]) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::with_capacity(alphas.len());
    for (r, &ar) in alphas.iter().enumerate() {
        let (mut log_mod, mut phase) = (0.0, 0.0);
        for (t, &at) in alphas.iter().enumerate() {
            if t == r {
                continue;
            }
            let diff = ar - at;
            if diff.norm() <= DISTINCT_ALPHAS {
                return Err(Error::DegenerateAlphas { r, t });
            }
            log_mod += diff.norm().ln();
            phase += diff.arg();
        }
        out.push((log_mod, phase));
    }
    Ok(out)
}

/// `M[m][n] = sum_{r,t} κ_rt (1 - 1/(α_r conj(α_t)))^l α_r^{-(m+2)} conj(α_t)^{-(n+2)}`
/// with `κ_rt = S(α_r, α_t) / (a_r conj(a_t))`, for `m, n < n_trunc`.
pub fn truncation_matrix(fr: &FejerRiesz, s: &impl SForm, l: u32, n_trunc: usize) -> Result<CMatrix> {
    let alphas = &fr.alphas;
    let k = alphas.len();
    if k > MAX_K {
        return Err(Error::Validation(format!("{k} atoms exceed the supported maximum of {MAX_K}")));
    }
    let la = log_a(alphas)?;
    let weights = CMatrix::from_fn(k, k, |r, t| {
        let (lr, pr) = la[r];
        let (lt, pt) = la[t];
        let inv_a = C64::from_polar((-(lr + lt)).exp(), -(pr - pt));
        let rho = ONE - (alphas[r] * alphas[t].conj()).inv();
        s.s(alphas[r], alphas[t]) * inv_a * rho.powu(l)
    });
    let v = CMatrix::from_fn(n_trunc, k, |m, r| alphas[r].inv().powu(m as u32 + 2));
    let m = &(&v * &weights) * &v.adjoint();
    let scale = m.max_abs().max(f64::MIN_POSITIVE);
    if m.hermitian_defect() > HERMITIAN_TOL * scale {
        return Err(Error::Consistency(format!(
            "truncation matrix asymmetry {:.3e}",
            m.hermitian_defect() / scale
        )));
    }
    Ok(m.hermitian_part())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsdProbe {
    pub l: u32,
    pub n: usize,
    pub min_eig: f64,
    pub trace: f64,
    /// Sum of absolute eigenvalues; violations are measured against it.
    pub scale: f64,
    pub violation: bool,
}

impl PsdProbe {
    pub fn relative_min(&self) -> f64 {
        if self.scale > 0.0 {
            self.min_eig / self.scale
        } else {
            0.0
        }
    }
}

pub fn probe(fr: &FejerRiesz, s: &impl SForm, l: u32, n_trunc: usize, policy: &NumericPolicy) -> Result<PsdProbe> {
    let m = truncation_matrix(fr, s, l, n_trunc)?;
    let eig = herm_eigen(&m, policy.eigen_tol, policy.eigen_max_sweeps)?;
    let scale: f64 = eig.iter().map(|e| e.abs()).sum();
    let min_eig = eig[0];
    Ok(PsdProbe {
        l,
        n: n_trunc,
        min_eig,
        trace: m.trace().re,
        scale,
        violation: min_eig < -policy.psd_tol * scale,
    })
}

/// Probes `l = 1..=l_max`; stops after the first violation unless the policy
/// asks for an exhaustive search.
pub fn psd_search<S: SForm + Sync>(
    fr: &FejerRiesz,
    s: &S,
    l_max: u32,
    n_trunc: usize,
    policy: &NumericPolicy,
) -> Result<Vec<PsdProbe>> {
    if policy.exhaustive_psd {
        return (1..=l_max).into_par_iter().map(|l| probe(fr, s, l, n_trunc, policy)).collect();
    }
    let mut out = Vec::new();
    for l in 1..=l_max {
        let p = probe(fr, s, l, n_trunc, policy)?;
        let stop = p.violation;
        out.push(p);
        if stop {
            break;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Decision {
    NotSubnormal,
    SubnormalNumeric,
    Inconclusive,
}

impl std::fmt::Display for Decision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Decision::NotSubnormal => "NotSubnormal",
            Decision::SubnormalNumeric => "SubnormalNumeric",
            Decision::Inconclusive => "Inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub decision: Decision,
    /// The off-diagonal test alone rejects subnormality.
    pub via_offdiagonal: bool,
    /// Some truncation probe is negative beyond `psd_reject`.
    pub via_psd: bool,
    pub premises_hold: bool,
    pub max_offdiag_norm: f64,
    pub argmax_pair: Option<(usize, usize)>,
    pub pair_evidence: Vec<PairEvidence>,
    pub psd_probes: Vec<PsdProbe>,
    pub psd_error: Option<String>,
    pub tolerances: NumericPolicy,
}

pub fn decide<S: SForm + Sync>(fr: &FejerRiesz, s: &S, policy: &NumericPolicy) -> Verdict {
    let pairs = offdiag_sums(fr, s);
    let premises_hold = pairs.iter().all(|p| p.premise_ok);
    let mut max_offdiag_norm = 0.0;
    let mut argmax_pair = None;
    for p in &pairs {
        if argmax_pair.is_none() || p.normalized() > max_offdiag_norm {
            max_offdiag_norm = p.normalized();
            argmax_pair = Some((p.r, p.t));
        }
    }
    let (psd_probes, psd_error) = match psd_search(fr, s, policy.l_max as u32, policy.n_trunc, policy) {
        Ok(p) => (p, None),
        Err(e) => (Vec::new(), Some(e.to_string())),
    };
    let via_psd = psd_probes.iter().any(|p| p.min_eig < -policy.psd_reject * p.scale);
    let via_offdiagonal = premises_hold && max_offdiag_norm > policy.zero_reject;
    let decision = if via_offdiagonal || via_psd {
        Decision::NotSubnormal
    } else if premises_hold && max_offdiag_norm <= policy.zero_accept {
        Decision::SubnormalNumeric
    } else {
        Decision::Inconclusive
    };
    Verdict {
        decision,
        via_offdiagonal,
        via_psd,
        premises_hold,
        max_offdiag_norm,
        argmax_pair,
        pair_evidence: pairs,
        psd_probes,
        psd_error,
        tolerances: policy.clone(),
    }
}
