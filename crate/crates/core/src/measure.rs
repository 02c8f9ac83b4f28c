//! Finitely supported positive measures on the unit circle.
//!
//! Points given as rational turns are built from exact values for multiples of
//! 1/12 and 1/8 turn, and from a reduced angle in `[-π/4, π/4]` otherwise, so
//! that identities like `1 + w + w² = 0` hold to the last bit.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::C64;

pub const MIN_CHORD: f64 = 1e-9;
const ON_CIRCLE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CirclePoint {
    value: C64,
    exact_turns: Option<Rational64>,
}

impl CirclePoint {
    /// `e^{2πi t}`; `t` is reduced to `[0, 1)`.
    pub fn from_turns(turns: Rational64) -> Self {
        let reduced = reduce_turns(turns);
        Self { value: exact_root_of_unity(reduced), exact_turns: Some(reduced) }
    }

    pub fn from_angle(radians: f64) -> Result<Self> {
        if !radians.is_finite() {
            return Err(Error::Validation(format!("angle {radians} is not finite")));
        }
        let (s, c) = radians.sin_cos();
        Ok(Self { value: C64::new(c, s), exact_turns: None })
    }

    pub fn from_point(value: C64) -> Result<Self> {
        if !(value.re.is_finite() && value.im.is_finite()) {
            return Err(Error::Validation(format!("point {value} is not finite")));
        }
        if (value.norm() - 1.0).abs() > ON_CIRCLE_TOL {
            return Err(Error::Validation(format!(
                "point {value} is off the unit circle (|z| = {})",
                value.norm()
            )));
        }
        Ok(Self { value, exact_turns: None })
    }

    pub fn value(&self) -> C64 {
        self.value
    }

    pub fn exact_turns(&self) -> Option<Rational64> {
        self.exact_turns
    }

    pub fn rotate(&self, phase: Rational64) -> Self {
        match self.exact_turns {
            Some(t) => Self::from_turns(t + phase),
            None => Self { value: self.value * exact_root_of_unity(reduce_turns(phase)), exact_turns: None },
        }
    }
}

fn reduce_turns(t: Rational64) -> Rational64 {
    let frac = t - t.floor();
    if frac == Rational64::from_integer(1) { Rational64::from_integer(0) } else { frac }
}

/// `e^{2πi t}` for `t` in `[0, 1)`.
fn exact_root_of_unity(t: Rational64) -> C64 {
    // Split into a quarter-turn count q and a remainder r in [-1/8, 1/8].
    let four_t = t * 4;
    let q = four_t.round();
    let r = (four_t - q) / 4;
    let (s, c) = small_sin_cos(r);
    let base = C64::new(c, s);
    match q.to_integer().rem_euclid(4) {
        0 => base,
        1 => C64::new(-base.im, base.re),
        2 => C64::new(-base.re, -base.im),
        _ => C64::new(base.im, -base.re),
    }
}

fn small_sin_cos(r: Rational64) -> (f64, f64) {
    let half_sqrt3 = 3f64.sqrt() / 2.0;
    let is = |n: i64, d: i64| r == Rational64::new(n, d);
    if r == Rational64::from_integer(0) {
        (0.0, 1.0)
    } else if is(1, 12) {
        (0.5, half_sqrt3)
    } else if is(-1, 12) {
        (-0.5, half_sqrt3)
    } else if is(1, 8) {
        (FRAC_1_SQRT_2, FRAC_1_SQRT_2)
    } else if is(-1, 8) {
        (-FRAC_1_SQRT_2, FRAC_1_SQRT_2)
    } else {
        let angle = 2.0 * PI * (*r.numer() as f64 / *r.denom() as f64);
        angle.sin_cos()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub point: CirclePoint,
    pub weight: f64,
}

/// `sum_j c_j δ_{ζ_j}` with distinct `ζ_j` on the circle and `c_j > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Measure {
    atoms: Vec<Atom>,
}

impl Measure {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Validation("measure needs at least one atom".into()));
        }
        for (j, atom) in atoms.iter().enumerate() {
            if !(atom.weight.is_finite() && atom.weight > 0.0) {
                return Err(Error::Validation(format!("atom {j} has nonpositive weight {}", atom.weight)));
            }
        }
        for i in 0..atoms.len() {
            for j in (i + 1)..atoms.len() {
                let chord = (atoms[i].point.value - atoms[j].point.value).norm();
                if chord <= MIN_CHORD {
                    return Err(Error::Validation(format!(
                        "atoms {i} and {j} coincide (chordal distance {chord:.3e})"
                    )));
                }
            }
        }
        Ok(Self { atoms })
    }

    /// Convenience constructor from turns and weights.
    pub fn from_turns(turns: &[Rational64], weights: &[f64]) -> Result<Self> {
        if turns.len() != weights.len() {
            return Err(Error::Validation(format!(
                "{} points but {} weights",
                turns.len(),
                weights.len()
            )));
        }
        Self::new(
            turns
                .iter()
                .zip(weights)
                .map(|(&t, &weight)| Atom { point: CirclePoint::from_turns(t), weight })
                .collect(),
        )
    }

    /// `δ_1 + δ_w + δ_{w²}`.
    pub fn equispaced_three() -> Self {
        Self::from_turns(
            &[Rational64::new(0, 1), Rational64::new(1, 3), Rational64::new(2, 3)],
            &[1.0, 1.0, 1.0],
        )
        .expect("valid measure")
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn k(&self) -> usize {
        self.atoms.len()
    }

    pub fn points(&self) -> Vec<C64> {
        self.atoms.iter().map(|a| a.point.value).collect()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.atoms.iter().map(|a| a.weight).collect()
    }

    pub fn rotate(&self, phase_turns: Rational64) -> Self {
        Self {
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom { point: a.point.rotate(phase_turns), weight: a.weight })
                .collect(),
        }
    }

    pub fn permute(&self, order: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.k()];
        for &i in order {
            if i >= self.k() || std::mem::replace(&mut seen[i], true) {
                return Err(Error::Domain(format!("{order:?} is not a permutation")));
            }
        }
        if order.len() != self.k() {
            return Err(Error::Domain(format!("{order:?} is not a permutation")));
        }
        Ok(Self { atoms: order.iter().map(|&i| self.atoms[i]).collect() })
    }

    /// `prod_j |z - ζ_j|² + sum_j c_j prod_{i != j} |z - ζ_i|²`, evaluated directly.
    pub fn riesz_fejer_lhs(&self, z: C64) -> f64 {
        let sq: Vec<f64> = self.atoms.iter().map(|a| (z - a.point.value).norm_sqr()).collect();
        let all: f64 = sq.iter().product();
        let partial: f64 = (0..sq.len())
            .map(|j| {
                let others: f64 = sq.iter().enumerate().filter(|(i, _)| *i != j).map(|(_, v)| v).product();
                self.atoms[j].weight * others
            })
            .sum();
        all + partial
    }

    pub fn to_doc(&self) -> MeasureDoc {
        MeasureDoc {
            atoms: self
                .atoms
                .iter()
                .map(|a| AtomDoc {
                    turns: a.point.exact_turns.map(format_turns),
                    angle: None,
                    point: if a.point.exact_turns.is_none() { Some(a.point.value.into()) } else { None },
                    weight: a.weight,
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_doc()).expect("measure serializes")
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, a) in self.atoms.iter().enumerate() {
            if j > 0 {
                write!(f, " + ")?;
            }
            match a.point.exact_turns {
                Some(t) => write!(f, "{}·δ[{}]", a.weight, format_turns(t))?,
                None => write!(f, "{}·δ({:.12})", a.weight, a.point.value)?,
            }
        }
        Ok(())
    }
}

pub fn format_turns(t: Rational64) -> String {
    if *t.denom() == 1 { t.numer().to_string() } else { format!("{}/{}", t.numer(), t.denom()) }
}

pub fn parse_turns(text: &str) -> Result<Rational64> {
    let text = text.trim();
    let bad = || Error::Parse(format!("turns must be a rational like 1/3, got {text:?}"));
    let value = match text.split_once('/') {
        Some((n, d)) => {
            let n: i64 = n.trim().parse().map_err(|_| bad())?;
            let d: i64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Rational64::new(n, d)
        }
        None => Rational64::from_integer(text.parse().map_err(|_| bad())?),
    };
    Ok(value)
}

/// JSON point `{"re": .., "im": ..}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cx {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for Cx {
    fn from(z: C64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<Cx> for C64 {
    fn from(z: Cx) -> Self {
        C64::new(z.re, z.im)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub turns: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<Cx>,
    pub weight: f64,
}

/// Wire form of a measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureDoc {
    pub atoms: Vec<AtomDoc>,
}

impl TryFrom<&MeasureDoc> for Measure {
    type Error = Error;

    fn try_from(doc: &MeasureDoc) -> Result<Self> {
        let atoms = doc
            .atoms
            .iter()
            .enumerate()
            .map(|(j, a)| {
                let point = match (&a.turns, a.angle, a.point) {
                    (Some(t), None, None) => CirclePoint::from_turns(parse_turns(t)?),
                    (None, Some(angle), None) => CirclePoint::from_angle(angle)?,
                    (None, None, Some(p)) => CirclePoint::from_point(p.into())?,
                    _ => {
                        return Err(Error::Parse(format!(
                            "atom {j}: exactly one of turns, angle, point is required"
                        )))
                    }
                };
                Ok(Atom { point, weight: a.weight })
            })
            .collect::<Result<Vec<_>>>()?;
        Measure::new(atoms)
    }
}

/// Parses either a JSON measure document or the inline `t1,t2,..:w1,w2,..` form.
pub fn parse_measure(spec: &str) -> Result<Measure> {
    let spec = spec.trim();
    if spec.starts_with('{') {
        let doc: MeasureDoc =
            serde_json::from_str(spec).map_err(|e| Error::Parse(format!("measure JSON: {e}")))?;
        return Measure::try_from(&doc);
    }
    let (points, weights) = spec
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("expected `turns : weights`, got {spec:?}")))?;
    let turns = points.split(',').map(parse_turns).collect::<Result<Vec<_>>>()?;
    let weights = weights
        .split(',')
        .map(|w| {
            w.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("weight {:?} is not a number", w.trim())))
        })
        .collect::<Result<Vec<_>>>()?;
    Measure::from_turns(&turns, &weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn cube_roots_sum_to_zero_exactly() {
        let m = parse_measure("0,1/3,2/3 : 1,1,1").unwrap();
        assert_eq!(m.k(), 3);
        let sum: C64 = m.points().into_iter().sum();
        assert_eq!(sum, C64::new(0.0, 0.0));
        let w = m.points()[1];
        assert_eq!(w, C64::new(-0.5, 3f64.sqrt() / 2.0));
        assert_eq!(m.weights(), vec![1.0; 3]);
    }

    #[test]
    fn single_and_antipodal() {
        let m = parse_measure("0 : 1").unwrap();
        assert_eq!(m.points(), vec![C64::new(1.0, 0.0)]);
        let m = parse_measure("0,1/2:1,1").unwrap();
        assert_eq!(m.points(), vec![C64::new(1.0, 0.0), C64::new(-1.0, 0.0)]);
    }

    #[test]
    fn exact_values_near_quadrants() {
        for (t, want) in [
            (r(1, 4), C64::new(0.0, 1.0)),
            (r(3, 4), C64::new(0.0, -1.0)),
            (r(1, 6), C64::new(0.5, 3f64.sqrt() / 2.0)),
            (r(5, 12), C64::new(-3f64.sqrt() / 2.0, 0.5)),
            (r(7, 8), C64::new(FRAC_1_SQRT_2, -FRAC_1_SQRT_2)),
            (r(-1, 3), C64::new(-0.5, -3f64.sqrt() / 2.0)),
        ] {
            let got = CirclePoint::from_turns(t).value();
            let angle = 2.0 * PI * (*t.numer() as f64) / (*t.denom() as f64);
            assert!((got - C64::from_polar(1.0, angle)).norm() < 1e-15, "{t}");
            assert_eq!(got, want, "{t}");
        }
    }

    #[test]
    fn generic_turns_are_accurate() {
        for d in [5, 7, 11, 13, 97] {
            for n in 0..d {
                let got = CirclePoint::from_turns(r(n, d)).value();
                let want = C64::from_polar(1.0, 2.0 * PI * n as f64 / d as f64);
                assert!((got - want).norm() < 2e-15);
                assert!((got.norm() - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn validation_errors() {
        assert!(matches!(parse_measure("0,1:1,1"), Err(Error::Validation(_))));
        assert!(matches!(parse_measure("0,1/2:1,0"), Err(Error::Validation(_))));
        assert!(matches!(parse_measure("0,1/2:1,-2"), Err(Error::Validation(_))));
        assert!(matches!(parse_measure("0,1/2:1"), Err(Error::Validation(_))));
        assert!(matches!(parse_measure("0.5:1"), Err(Error::Parse(_))));
        assert!(matches!(parse_measure("0;1"), Err(Error::Parse(_))));
        assert!(matches!(parse_measure("1/0:1"), Err(Error::Parse(_))));
        let off = r#"{"atoms":[{"point":{"re":1.1,"im":0.0},"weight":1}]}"#;
        assert!(matches!(parse_measure(off), Err(Error::Validation(_))));
        let both = r#"{"atoms":[{"turns":"0","angle":0.0,"weight":1}]}"#;
        assert!(matches!(parse_measure(both), Err(Error::Parse(_))));
    }

    #[test]
    fn json_forms() {
        let doc = r#"{"atoms":[
            {"turns":"1/3","weight":1},
            {"angle":0.5,"weight":2.5},
            {"point":{"re":0.0,"im":-1.0},"weight":1}
        ]}"#;
        let m = parse_measure(doc).unwrap();
        assert_eq!(m.k(), 3);
        assert_eq!(m.atoms()[0].point.exact_turns(), Some(r(1, 3)));
        assert_eq!(m.atoms()[1].point.exact_turns(), None);
        assert_eq!(parse_measure(&m.to_json()).unwrap(), m);
    }

    #[test]
    fn rotations() {
        let three = Measure::equispaced_three();
        let rotated = three.rotate(r(1, 3));
        let mut a: Vec<_> = three.atoms().iter().map(|x| x.point.exact_turns().unwrap()).collect();
        let mut b: Vec<_> = rotated.atoms().iter().map(|x| x.point.exact_turns().unwrap()).collect();
        a.sort();
        b.sort();
        assert_eq!(a, b);

        let delta = parse_measure("0:1").unwrap().rotate(r(1, 2));
        assert_eq!(delta.points(), vec![C64::new(-1.0, 0.0)]);

        let pair = parse_measure("0,1/4:1,1").unwrap().rotate(r(1, 4));
        assert_eq!(pair.points(), vec![C64::new(0.0, 1.0), C64::new(-1.0, 0.0)]);

        let inexact = Measure::new(vec![Atom { point: CirclePoint::from_angle(0.3).unwrap(), weight: 2.0 }])
            .unwrap()
            .rotate(r(1, 4));
        assert!((inexact.points()[0] - C64::from_polar(1.0, 0.3 + PI / 2.0)).norm() < 1e-15);
        assert_eq!(inexact.weights(), vec![2.0]);
    }

    #[test]
    fn riesz_fejer_lhs_single_atom() {
        let m = parse_measure("0:1").unwrap();
        let z = C64::from_polar(1.0, 0.9);
        assert!((m.riesz_fejer_lhs(z) - ((z - 1.0).norm_sqr() + 1.0)).abs() < 1e-15);
    }
}
