use cdsp_core::numerics::{cholesky_herm, determinant, herm_eigen, poly_roots, solve_linear};
use cdsp_core::{analyze, parse_measure, CMatrix, Measure, NumericPolicy, Poly, C64};
use num_rational::Rational64;
use proptest::prelude::*;

fn complex() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| C64::new(re, im))
}

fn annulus_root() -> impl Strategy<Value = C64> {
    (0.2..5.0f64, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| C64::from_polar(r, t))
}

fn hermitian(n: usize) -> impl Strategy<Value = CMatrix> {
    prop::collection::vec(complex(), n * n).prop_map(move |v| {
        let a = CMatrix::from_fn(n, n, |i, j| v[i * n + j]);
        a.hermitian_part()
    })
}

fn min_separation(roots: &[C64]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            best = best.min((roots[i] - roots[j]).norm() / roots[i].norm().max(roots[j].norm()));
        }
    }
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn roots_are_recovered(roots in prop::collection::vec(annulus_root(), 1..=12)) {
        prop_assume!(min_separation(&roots) > 0.1);
        let p = Poly::from_roots(&roots);
        let found = poly_roots(&p, 1e-13, 500).unwrap();
        prop_assert_eq!(found.len(), roots.len());
        for r in &roots {
            let best = found.iter().map(|f| (f - r).norm()).fold(f64::INFINITY, f64::min);
            prop_assert!(best <= 1e-8 * r.norm(), "root {} missed by {}", r, best);
        }
    }

    #[test]
    fn eigenvalues_match_trace_and_determinant(m in (2usize..7).prop_flat_map(hermitian)) {
        let eig = herm_eigen(&m, 1e-14, 100).unwrap();
        let trace = m.trace().re;
        let sum: f64 = eig.iter().sum();
        prop_assert!((sum - trace).abs() <= 1e-10 * m.frobenius().max(1.0));
        let det = determinant(&m).unwrap().re;
        let prod: f64 = eig.iter().product();
        prop_assert!((prod - det).abs() <= 1e-8 * eig.iter().map(|e| e.abs()).product::<f64>().max(1e-12));
    }

    #[test]
    fn cholesky_reconstructs(a in (1usize..7).prop_flat_map(|n| prop::collection::vec(complex(), n * n).prop_map(move |v| (n, v)))) {
        let (n, v) = a;
        let b = CMatrix::from_fn(n, n, |i, j| v[i * n + j]);
        let m = &b.adjoint() * &b;
        let r = cholesky_herm(&m).unwrap();
        let rebuilt = &r.adjoint() * &r;
        prop_assert!(rebuilt.sub(&m).frobenius() <= 1e-10 * m.frobenius().max(1e-300));
    }

    #[test]
    fn solve_inverts(v in prop::collection::vec(complex(), 25)) {
        let m = CMatrix::from_fn(5, 5, |i, j| v[i * 5 + j] + if i == j { C64::new(6.0, 0.0) } else { C64::new(0.0, 0.0) });
        let inv = solve_linear(&m, &CMatrix::identity(5)).unwrap();
        prop_assert!((&m * &inv).sub(&CMatrix::identity(5)).max_abs() < 1e-9);
    }

    #[test]
    fn measure_json_round_trips(nums in prop::collection::btree_set(0i64..60, 1..6), w in prop::collection::vec(0.01..10.0f64, 6)) {
        let turns: Vec<Rational64> = nums.iter().map(|&n| Rational64::new(n, 60)).collect();
        let m = Measure::from_turns(&turns, &w[..turns.len()]).unwrap();
        let back = parse_measure(&m.to_json()).unwrap();
        prop_assert_eq!(back, m);
    }

    #[test]
    fn rotation_preserves_weights(num in -20i64..20, den in 1i64..20) {
        let m = parse_measure("0,1/5,1/2:2,0.5,1").unwrap();
        let r = m.rotate(Rational64::new(num, den));
        prop_assert_eq!(r.k(), m.k());
        prop_assert_eq!(r.weights(), m.weights());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn offdiagonal_sums_are_hermitian(t2 in 1i64..24, t3 in 1i64..24, w in prop::collection::vec(0.2..5.0f64, 3)) {
        prop_assume!(t2 != t3);
        let m = Measure::from_turns(&[Rational64::from_integer(0), Rational64::new(t2, 24), Rational64::new(t3, 24)], &w).unwrap();
        let a = analyze(&m, &NumericPolicy::default()).unwrap();
        for p in &a.verdict.pair_evidence {
            let s_tr = cdsp_core::SForm::s(&a.dirichlet, a.factor.alphas[p.t], a.factor.alphas[p.r]);
            prop_assert!((p.s_rt - s_tr.conj()).norm() <= 1e-10 * p.s_scale.max(1.0));
            prop_assert!(p.normalized() <= 1.0 + 1e-9);
        }
    }
}
