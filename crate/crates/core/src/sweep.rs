//! Three-atom sweeps `δ_1 + δ_{θ2} + δ_{θ3}` (weighted) over a grid of turns.

use num_rational::Rational64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{format_turns, Measure};
use crate::policy::NumericPolicy;
use crate::report::analyze;
use crate::subnormality::Decision;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    /// Angles run over `i / grid` turns, `i = 0..grid`.
    pub grid: i64,
    pub weights: Vec<[f64; 3]>,
}

impl SweepSpec {
    pub fn cells(&self) -> Vec<(Rational64, Rational64, [f64; 3])> {
        let mut out = Vec::new();
        for w in &self.weights {
            for i in 0..self.grid {
                for j in 0..self.grid {
                    out.push((Rational64::new(i, self.grid), Rational64::new(j, self.grid), *w));
                }
            }
        }
        out
    }
}

/// Parses `"1,1,1;1,2,0.5"`.
pub fn parse_weight_triples(text: &str) -> Result<Vec<[f64; 3]>> {
    text.split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|triple| {
            let v = triple
                .split(',')
                .map(|w| w.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad weight {w:?}"))))
                .collect::<Result<Vec<_>>>()?;
            <[f64; 3]>::try_from(v).map_err(|_| Error::Parse(format!("expected three weights in {triple:?}")))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub theta2: String,
    pub theta3: String,
    pub w1: f64,
    pub w2: f64,
    pub w3: f64,
    pub max_offdiag_norm: Option<f64>,
    pub verdict: Option<Decision>,
    pub error: Option<String>,
}

fn cell(t2: Rational64, t3: Rational64, w: [f64; 3], policy: &NumericPolicy) -> SweepRow {
    let mut row = SweepRow {
        theta2: format_turns(t2),
        theta3: format_turns(t3),
        w1: w[0],
        w2: w[1],
        w3: w[2],
        max_offdiag_norm: None,
        verdict: None,
        error: None,
    };
    let outcome = Measure::from_turns(&[Rational64::from_integer(0), t2, t3], &w)
        .map_err(|e| e.to_string())
        .and_then(|m| analyze(&m, policy).map_err(|e| e.to_string()));
    match outcome {
        Ok(a) => {
            row.max_offdiag_norm = Some(a.verdict.max_offdiag_norm);
            row.verdict = Some(a.verdict.decision);
        }
        Err(e) => row.error = Some(e),
    }
    row
}

/// One row per cell, in grid order; failing cells record their error.
pub fn sweep(spec: &SweepSpec, policy: &NumericPolicy) -> Vec<SweepRow> {
    spec.cells().into_par_iter().map(|(t2, t3, w)| cell(t2, t3, w, policy)).collect()
}

pub fn write_csv<W: std::io::Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for row in rows {
        writer.serialize(row).map_err(|e| Error::Domain(format!("csv: {e}")))?;
    }
    writer.flush().map_err(|e| Error::Domain(format!("csv: {e}")))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_grid() {
        let spec = SweepSpec { grid: 3, weights: vec![[1.0, 1.0, 1.0]] };
        let rows = sweep(&spec, &NumericPolicy::default());
        assert_eq!(rows.len(), 9);
        assert_eq!((rows[0].theta2.as_str(), rows[0].theta3.as_str()), ("0", "0"));
        assert!(rows[0].error.as_deref().unwrap().contains("invalid measure"));
        let equi = rows.iter().find(|r| r.theta2 == "1/3" && r.theta3 == "2/3").unwrap();
        assert_eq!(equi.verdict, Some(Decision::NotSubnormal));
        assert!(equi.error.is_none());
    }

    #[test]
    fn csv_layout() {
        let spec = SweepSpec { grid: 3, weights: vec![[1.0, 1.0, 2.0]] };
        let mut buf = Vec::new();
        write_csv(&sweep(&spec, &NumericPolicy::default()), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "theta2,theta3,w1,w2,w3,max_offdiag_norm,verdict,error");
        assert_eq!(text.lines().count(), 10);
    }

    #[test]
    fn weight_triples() {
        assert_eq!(parse_weight_triples("1,1,1;1,2,0.5").unwrap(), vec![[1.0, 1.0, 1.0], [1.0, 2.0, 0.5]]);
        assert!(parse_weight_triples("1,1").is_err());
    }
}
