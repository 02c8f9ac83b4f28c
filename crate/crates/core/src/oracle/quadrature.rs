//! Direct quadrature of the local Dirichlet integrals
//! `(1/π) ∫_D (z^n)' conj((z^m)') P_μ(z) dA(z)` used to validate the closed-form
//! monomial Gram matrix.
//!
//! Radially the integrand is a polynomial in `r` times the angular integral, so
//! a 64-node Gauss–Legendre rule is exact up to the accuracy of the inner
//! integral. In angle the Poisson kernel peaks at the atoms with width `1 - r`;
//! each arc between atoms is split at its midpoint and each half is cut into
//! panels that shrink geometrically toward the atom.

use std::f64::consts::{PI, TAU};

use crate::measure::Measure;
use crate::numerics::{CMatrix, C64, ONE, ZERO};

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// `(P_n(x), P_n'(x))`.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    (p1, n as f64 * (x * p1 - p0) / (x * x - 1.0))
}

#[derive(Debug, Clone, Copy)]
pub struct QuadratureRule {
    pub radial_nodes: usize,
    pub panel_nodes: usize,
    /// Smallest panel near an atom, as a fraction of `1 - r`.
    pub floor: f64,
}

impl Default for QuadratureRule {
    fn default() -> Self {
        Self { radial_nodes: 64, panel_nodes: 16, floor: 1e-2 }
    }
}

impl QuadratureRule {
    /// Every resolution parameter doubled (or halved for the floor).
    pub fn refined(self) -> Self {
        Self { radial_nodes: 2 * self.radial_nodes, panel_nodes: 2 * self.panel_nodes, floor: self.floor / 2.0 }
    }
}

/// Panels `[a, b]` of the circle, graded toward each atom.
fn angular_panels(atoms: &[f64], width: f64, floor: f64) -> Vec<(f64, f64)> {
    let mut sorted = atoms.to_vec();
    sorted.sort_by(f64::total_cmp);
    let k = sorted.len();
    let mut panels = Vec::new();
    for i in 0..k {
        let start = sorted[i];
        let end = if i + 1 < k { sorted[i + 1] } else { sorted[0] + TAU };
        let half = (end - start) / 2.0;
        let mid = start + half;
        let mut h = half;
        let mut cuts = vec![half];
        let smallest = (width * floor).min(half);
        while h > smallest {
            h /= 2.0;
            cuts.push(h);
        }
        cuts.push(0.0);
        for pair in cuts.windows(2) {
            let (outer, inner) = (pair[0], pair[1]);
            panels.push((start + inner, start + outer));
            panels.push((end - outer, end - inner));
        }
        debug_assert!((start + half - mid).abs() < 1e-12);
    }
    panels
}

/// `F_j(r) = ∫_0^{2π} e^{i j θ} P_μ(r e^{iθ}) dθ` for `j = -(n-1)..=n-1`,
/// returned indexed by `j + n - 1`.
fn angular_moments(m: &Measure, r: f64, n: usize, rule: &QuadratureRule, gl: &(Vec<f64>, Vec<f64>)) -> Vec<C64> {
    let atoms: Vec<f64> = m.points().iter().map(|z| z.arg()).collect();
    let panels = angular_panels(&atoms, 1.0 - r, rule.floor);
    let points = m.points();
    let weights = m.weights();
    let mut out = vec![ZERO; 2 * n - 1];
    for (a, b) in panels {
        let half = (b - a) / 2.0;
        let centre = (a + b) / 2.0;
        for (x, w) in gl.0.iter().zip(&gl.1) {
            let theta = centre + half * x;
            let z = C64::from_polar(r, theta);
            let poisson: f64 = points
                .iter()
                .zip(&weights)
                .map(|(zeta, c)| c * (1.0 - r * r) / (z - zeta).norm_sqr())
                .sum();
            let base = C64::from_polar(1.0, theta);
            let weight = w * half * poisson;
            let mut e = ONE;
            out[n - 1] += weight;
            for j in 1..n {
                e *= base;
                out[n - 1 + j] += weight * e;
                out[n - 1 - j] += weight * e.conj();
            }
        }
    }
    out
}

/// Monomial Gram matrix `<z^a, z^b>` for `a, b < n` by quadrature.
pub fn quadrature_gram(m: &Measure, n: usize, rule: QuadratureRule) -> CMatrix {
    let (rn, rw) = gauss_legendre(rule.radial_nodes);
    let gl = gauss_legendre(rule.panel_nodes);
    let mut g = CMatrix::identity(n);
    for (x, w) in rn.iter().zip(&rw) {
        let r = 0.5 * (x + 1.0);
        let dr = 0.5 * w;
        let moments = angular_moments(m, r, n, &rule, &gl);
        // r^{a+b-2} · r dr
        let mut ra = vec![1.0; n];
        for a in 1..n {
            ra[a] = ra[a - 1] * r;
        }
        for a in 1..n {
            for b in 1..n {
                let radial = (a * b) as f64 * ra[a - 1] * ra[b - 1] * r * dr / PI;
                g[(a, b)] += moments[n - 1 + a - b] * radial;
            }
        }
    }
    g
}
