//! Numerical tests for subnormality of the Cauchy dual of the shift `M_z` on
//! Dirichlet spaces `D(μ)` of finitely supported measures on the circle.
//!
//! Pipeline: [`fejer_riesz`] factors the measure's trigonometric polynomial,
//! [`dirichlet`] builds the outer function, Gram matrix and kernels,
//! [`debranges`] extracts the sesquilinear form `S` and the Schur function,
//! and [`subnormality`] turns `S` at the exterior roots into a [`Verdict`].
//! [`oracle`] cross-checks the same space through its monomial Gram matrix.

pub mod debranges;
pub mod dirichlet;
pub mod error;
pub mod fejer_riesz;
pub mod measure;
pub mod numerics;
pub mod oracle;
pub mod paper_check;
pub mod policy;
pub mod report;
pub mod subnormality;
pub mod sweep;

pub use debranges::{HermForm, SForm, SchurData};
pub use dirichlet::{DirichletData, OuterData};
pub use error::{Error, Result};
pub use fejer_riesz::{build_trig, factorize, verify_identity, FejerRiesz, TrigPoly};
pub use measure::{parse_measure, Atom, CirclePoint, Measure, MeasureDoc};
pub use numerics::{CMatrix, Poly, C64};
pub use oracle::{CoeffVec, MonomialModel};
pub use paper_check::{paper_check, CheckStatus, PaperCheck};
pub use policy::NumericPolicy;
pub use report::{analyze, kernel_values, run_oracle, Analysis, KernelValues, Report, Stage, StageError};
pub use subnormality::{decide, Decision, PairEvidence, PsdProbe, Verdict};
pub use sweep::{sweep, SweepRow, SweepSpec};
