//! Aberth–Ehrlich simultaneous root finding with Newton polishing.

use std::f64::consts::PI;

use super::{Poly, C64, ZERO};
use crate::error::{Error, Result};

/// `2π (1 - 1/φ)`.
const GOLDEN_ANGLE: f64 = 2.399_963_229_728_653;
const POLISH_STEPS: usize = 8;

/// All complex roots of `p`, repeated by multiplicity.
///
/// Each returned root `r` satisfies `|p(r)| <= tol * sum |a_i| |r|^i`. Roots at
/// the origin are split off exactly before iterating.
pub fn poly_roots(p: &Poly, tol: f64, max_sweeps: usize) -> Result<Vec<C64>> {
    if p.degree() == 0 {
        return Err(Error::Domain("poly_roots: polynomial must have degree >= 1".into()));
    }
    if p.coeffs().iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
        return Err(Error::Domain("poly_roots: non-finite coefficient".into()));
    }

    let zeros_at_origin = p.coeffs().iter().take_while(|a| **a == ZERO).count();
    let reduced = Poly::new(p.coeffs()[zeros_at_origin..].to_vec());
    let mut roots = vec![ZERO; zeros_at_origin];
    if reduced.degree() == 0 {
        return Ok(roots);
    }

    let lead = reduced.leading();
    let monic = reduced.scale(lead.inv());
    let mut z = initial_guesses(&monic);
    aberth(&monic, &mut z, tol, max_sweeps)?;
    for r in z.iter_mut() {
        *r = polish(&monic, *r);
    }
    roots.extend(z);
    Ok(roots)
}

fn initial_guesses(monic: &Poly) -> Vec<C64> {
    let n = monic.degree();
    let radius = 1.0
        + monic.coeffs()[..n]
            .iter()
            .map(|a| a.norm())
            .fold(0.0, f64::max);
    (0..n)
        .map(|j| {
            let theta = 2.0 * PI * j as f64 / n as f64 + GOLDEN_ANGLE * (j as f64 + 0.5) / n as f64;
            C64::from_polar(radius, theta)
        })
        .collect()
}

fn aberth(p: &Poly, z: &mut [C64], tol: f64, max_sweeps: usize) -> Result<()> {
    let n = z.len();
    for _ in 0..max_sweeps {
        let mut converged = true;
        for j in 0..n {
            let (value, slope) = p.eval_with_derivative(z[j]);
            if value.norm() <= tol * p.magnitude_at(z[j]) {
                continue;
            }
            converged = false;
            let newton = value / slope;
            let repulsion: C64 = (0..n)
                .filter(|&i| i != j)
                .map(|i| {
                    let gap = z[j] - z[i];
                    if gap == ZERO { ZERO } else { gap.inv() }
                })
                .sum();
            let step = newton / (C64::new(1.0, 0.0) - newton * repulsion);
            let next = z[j] - step;
            if !(next.re.is_finite() && next.im.is_finite()) {
                return Err(Error::NonConvergence { what: "Aberth iteration", budget: max_sweeps });
            }
            z[j] = next;
        }
        if converged {
            return Ok(());
        }
    }
    let all_ok = z.iter().all(|&r| p.eval(r).norm() <= tol * p.magnitude_at(r));
    if all_ok {
        Ok(())
    } else {
        Err(Error::NonConvergence { what: "Aberth iteration", budget: max_sweeps })
    }
}

/// Newton steps accepted only while the residual keeps shrinking.
fn polish(p: &Poly, mut r: C64) -> C64 {
    let mut residual = p.eval(r).norm();
    for _ in 0..POLISH_STEPS {
        if residual == 0.0 {
            break;
        }
        let (value, slope) = p.eval_with_derivative(r);
        if slope == ZERO {
            break;
        }
        let candidate = r - value / slope;
        let next = p.eval(candidate).norm();
        if next.is_nan() || next >= residual {
            break;
        }
        r = candidate;
        residual = next;
    }
    r
}
