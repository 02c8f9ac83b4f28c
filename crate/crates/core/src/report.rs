//! End-to-end analysis of a measure and its JSON report.

use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::debranges::{HermForm, SchurData};
use crate::dirichlet::DirichletData;
use crate::error::Error;
use crate::fejer_riesz::{build_trig, factorize, verify_identity, FejerRiesz, TrigPoly};
use crate::measure::{Measure, MeasureDoc};
use crate::numerics::{CMatrix, C64};
use crate::oracle::{self, DualProbe};
use crate::policy::NumericPolicy;
use crate::subnormality::{decide, Verdict};

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Policy,
    Measure,
    FejerRiesz,
    DirichletSpace,
    Debranges,
    CdspTests,
    OperatorOracle,
    Kernel,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Policy => "policy",
            Stage::Measure => "measure",
            Stage::FejerRiesz => "fejer_riesz",
            Stage::DirichletSpace => "dirichlet_space",
            Stage::Debranges => "debranges",
            Stage::CdspTests => "cdsp_tests",
            Stage::OperatorOracle => "operator_oracle",
            Stage::Kernel => "kernel",
        })
    }
}

/// An error tagged with the pipeline stage that raised it.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("[{stage}] {source}")]
pub struct StageError {
    pub stage: Stage,
    pub source: Error,
}

pub trait AtStage<T> {
    fn at(self, stage: Stage) -> Result<T, StageError>;
}

impl<T> AtStage<T> for crate::Result<T> {
    fn at(self, stage: Stage) -> Result<T, StageError> {
        self.map_err(|source| StageError { stage, source })
    }
}

/// Everything computed for one measure.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub measure: Measure,
    pub trig: TrigPoly,
    pub factor: FejerRiesz,
    pub identity_residual: f64,
    pub dirichlet: DirichletData,
    pub form: HermForm,
    pub schur: SchurData,
    pub verdict: Verdict,
    pub timings: BTreeMap<String, f64>,
}

pub fn analyze(m: &Measure, policy: &NumericPolicy) -> Result<Analysis, StageError> {
    policy.validate().at(Stage::Policy)?;
    let mut timings = BTreeMap::new();
    let mut clock = Instant::now();
    let mut lap = |name: &str, timings: &mut BTreeMap<String, f64>| {
        timings.insert(name.to_string(), clock.elapsed().as_secs_f64());
        clock = Instant::now();
    };

    let trig = build_trig(m);
    let factor = factorize(&trig, policy).at(Stage::FejerRiesz)?;
    let identity_residual = verify_identity(m, &factor);
    if identity_residual > policy.identity_tol {
        return Err(StageError {
            stage: Stage::FejerRiesz,
            source: Error::IdentityResidual { residual: identity_residual, tol: policy.identity_tol },
        });
    }
    lap("fejer_riesz", &mut timings);
    let dirichlet = DirichletData::build(m, &factor, policy).at(Stage::DirichletSpace)?;
    lap("dirichlet_space", &mut timings);
    let form = HermForm::build(&dirichlet, policy).at(Stage::Debranges)?;
    let schur = SchurData::new(&form, &dirichlet);
    lap("debranges", &mut timings);
    let verdict = decide(&factor, &dirichlet, policy);
    lap("cdsp_tests", &mut timings);
    Ok(Analysis {
        measure: m.clone(),
        trig,
        factor,
        identity_residual,
        dirichlet,
        form,
        schur,
        verdict,
        timings,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSummary {
    pub n: usize,
    /// Largest `|<B_2(M_z) v, v>| / ||v||²` over the random vectors.
    pub two_isometry_defect: f64,
    /// Largest `<B_n(M_z) v, v> / ||v||²` for `n = 1..=6`.
    pub bn_max: Vec<f64>,
    pub dual_norm: f64,
    pub stabilization: f64,
    pub dual_probe: DualProbe,
    /// `max |<f_i, f_j>` from Taylor series `- D_ij|`.
    pub taylor_gram_deviation: f64,
}

pub const ORACLE_BN_MAX: usize = 6;
pub const ORACLE_TRIALS: usize = 100;
pub const DUAL_PROBE_N_MAX: usize = 12;
pub const DUAL_PROBE_TRIALS: usize = 20;

pub fn run_oracle(a: &Analysis, policy: &NumericPolicy) -> Result<OracleSummary, StageError> {
    let n = policy.oracle_n;
    let stage = Stage::OperatorOracle;
    let mm = oracle::monomial_gram(&a.measure, n).at(stage)?;
    let bn_max = oracle::bn_mz_probe(&mm, ORACLE_BN_MAX, ORACLE_TRIALS, policy.seed).at(stage)?;
    let two_isometry_defect = {
        let vs = oracle::bn_mz_probe(&mm, 2, ORACLE_TRIALS, policy.seed).at(stage)?;
        vs[1].abs()
    };
    let dual = oracle::cauchy_dual_matrix(&mm).at(stage)?;
    let dual_norm = dual.norm(policy).at(stage)?;
    let stabilization = oracle::stabilization(&a.measure, n, 8).at(stage)?;
    let dual_probe =
        oracle::bn_dual_probe(&a.measure, n, DUAL_PROBE_N_MAX, DUAL_PROBE_TRIALS, policy.seed).at(stage)?;
    let taylor = oracle::taylor_gram(&a.dirichlet).at(stage)?;
    Ok(OracleSummary {
        n,
        two_isometry_defect,
        bn_max,
        dual_norm,
        stabilization,
        dual_probe,
        taylor_gram_deviation: taylor.sub(&a.dirichlet.gram).max_abs(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorSection {
    pub alphas: Vec<C64>,
    pub d: f64,
    pub identity_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirichletSection {
    pub theta: f64,
    pub fprime_at_zeta: Vec<C64>,
    pub gram: Vec<Vec<C64>>,
    pub inverse: Vec<Vec<C64>>,
    pub gram_asymmetry: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormSection {
    /// `C[m][n]`, coefficient of `z^{m+1} conj(u)^{n+1}`.
    pub coefficients: Vec<Vec<C64>>,
    pub p: Vec<Vec<C64>>,
    pub node_radius: f64,
    pub refit_residual: f64,
    /// `S(α_r, α_r)`.
    pub s_diagonal: Vec<f64>,
    pub schur_sup: f64,
    pub schur_at_origin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub measure: MeasureDoc,
    pub factorization: FactorSection,
    pub dirichlet: DirichletSection,
    pub form: FormSection,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSummary>,
    pub policy: NumericPolicy,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<BTreeMap<String, f64>>,
}

fn rows(m: &CMatrix) -> Vec<Vec<C64>> {
    m.to_rows()
}

impl Report {
    pub fn new(a: &Analysis, oracle: Option<OracleSummary>, policy: &NumericPolicy, with_timings: bool) -> Self {
        let alphas = &a.factor.alphas;
        Self {
            schema: SCHEMA,
            measure: a.measure.to_doc(),
            factorization: FactorSection {
                alphas: alphas.clone(),
                d: a.factor.d,
                identity_residual: a.identity_residual,
            },
            dirichlet: DirichletSection {
                theta: a.dirichlet.outer.theta,
                fprime_at_zeta: a.dirichlet.fprime_at_zeta.clone(),
                gram: rows(&a.dirichlet.gram),
                inverse: rows(&a.dirichlet.inverse),
                gram_asymmetry: a.dirichlet.gram_asymmetry,
            },
            form: FormSection {
                coefficients: rows(&a.form.c),
                p: rows(&a.form.p),
                node_radius: a.form.radius,
                refit_residual: a.form.refit_residual,
                s_diagonal: alphas.iter().map(|&z| a.dirichlet.eval_s(z, z).re).collect(),
                schur_sup: a.schur.sampled_sup(),
                schur_at_origin: a.schur.at_origin(),
            },
            verdict: a.verdict.clone(),
            oracle,
            policy: policy.clone(),
            timings: with_timings.then(|| a.timings.clone()),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> crate::Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("report JSON: {e}")))
    }
}

/// The two pieces of the `D(μ)` kernel and the de Branges–Rovnyak kernel at one pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelValues {
    pub z: C64,
    pub lambda: C64,
    pub k_outer: C64,
    pub k_perp: C64,
    pub k_full: C64,
    pub k_b: C64,
    pub difference: f64,
}

pub fn kernel_values(a: &Analysis, z: C64, lambda: C64) -> Result<KernelValues, StageError> {
    let stage = Stage::Kernel;
    let k_outer = a.dirichlet.kernel_omu(z, lambda).at(stage)?;
    let k_perp = a.dirichlet.kernel_perp(z, lambda).at(stage)?;
    let k_b = a.schur.kernel(z, lambda).at(stage)?;
    let k_full = k_outer + k_perp;
    Ok(KernelValues { z, lambda, k_outer, k_perp, k_full, k_b, difference: (k_full - k_b).norm() })
}
