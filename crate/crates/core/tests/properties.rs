use matvar_core::calculus::{forward_difference, rising_q};
use matvar_core::expectation::{expect, expect_mc};
use matvar_core::linalg::{is_psd, jacobi_eigen, jacobi_eigenvalues};
use matvar_core::{
    beta, binomial, compute_report, gamma, negative_binomial, normal, poisson, BoundReport, BoundsConfig,
    Distribution, EngineConfig, FunctionTuple, Quadratic, SmoothFunction, SymMatrix, Theorem,
};
use proptest::prelude::*;

const BOTH: [Theorem; 2] = [Theorem::Poincare, Theorem::Bessel];

fn member() -> impl Strategy<Value = Distribution> {
    prop_oneof![
        (-2.0..2.0f64, 0.3..3.0f64).prop_map(|(m, v)| normal(m, v).unwrap().into()),
        (1.0..6.0f64, 0.3..2.0f64).prop_map(|(k, s)| gamma(k, s).unwrap().into()),
        (1.0..6.0f64, 1.0..6.0f64).prop_map(|(a, b)| beta(a, b).unwrap().into()),
        (0.3..8.0f64).prop_map(|l| poisson(l).unwrap().into()),
        (2..25i64, 0.1..0.9f64).prop_map(|(n, p)| binomial(n, p).unwrap().into()),
        (1.0..6.0f64, 0.3..0.9f64).prop_map(|(r, p)| negative_binomial(r, p).unwrap().into()),
    ]
}

fn poly(max_degree: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0..1.0f64, 1..=max_degree + 1)
}

fn expression() -> impl Strategy<Value = String> {
    (0..6usize, -1.5..1.5f64, -1.0..1.0f64, 0.1..0.6f64).prop_map(|(kind, a, b, c)| match kind {
        0 => format!("sin({a}*x + {b})"),
        1 => format!("x^2*cos({a}*x)"),
        2 => format!("exp({c}*x)*x"),
        3 => format!("(x + {b})^3 - {a}*x"),
        4 => format!("exp(-{c}*x)*sin(x)"),
        _ => format!("cos({a}*x)/({c}*x + 2)"),
    })
}

fn gram(entries: &[f64], p: usize) -> SymMatrix {
    // M = Vᵀ V for a p×p matrix V.
    SymMatrix::from_fn(p, |i, j| (0..p).map(|k| entries[k * p + i] * entries[k * p + j]).sum())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn derivatives_match_finite_differences(src in expression(), x in 0.2..2.0f64) {
        let f = SmoothFunction::parse(&src).unwrap();
        for k in 1..=3 {
            let h = 1e-3;
            let fd = (f.derivative(k - 1, x + h).unwrap() - f.derivative(k - 1, x - h).unwrap()) / (2.0 * h);
            let exact = f.derivative(k, x).unwrap();
            prop_assert!((fd - exact).abs() <= 1e-5 * (1.0 + exact.abs()), "{src} k={k}: {fd} vs {exact}");
        }
    }

    #[test]
    fn forward_difference_is_iterated_delta(c in poly(5), k in 0..6usize, j in -5..20i64) {
        let f = |x: i64| c.iter().rev().fold(0.0, |acc, a| acc * x as f64 + a);
        fn iterate(f: &dyn Fn(i64) -> f64, k: usize, j: i64) -> f64 {
            if k == 0 { f(j) } else { iterate(f, k - 1, j + 1) - iterate(f, k - 1, j) }
        }
        let want = iterate(&f, k, j);
        let got = forward_difference(f, k, j).unwrap();
        prop_assert!((got - want).abs() <= 1e-9 * (1.0 + want.abs()));
        // Δ^k annihilates polynomials of degree < k.
        if k >= c.len() {
            prop_assert!(got.abs() <= 1e-9 * (1.0 + c.iter().map(|v| v.abs()).sum::<f64>() * 20f64.powi(5)));
        }
    }

    #[test]
    fn rising_product_recurrence(d in -0.5..0.5f64, b in -2.0..2.0f64, g in 0.1..3.0f64, x in -3.0..10.0f64, k in 0..6usize) {
        let q = Quadratic::new(d, b, g).unwrap();
        prop_assert_eq!(rising_q(&q, 0, x), 1.0);
        let next = rising_q(&q, k + 1, x);
        let want = rising_q(&q, k, x) * q.eval(x + k as f64);
        prop_assert!((next - want).abs() <= 1e-12 * (1.0 + want.abs()));
    }

    #[test]
    fn jacobi_reconstructs(entries in prop::collection::vec(-2.0..2.0f64, 16)) {
        let m = SymMatrix::from_fn(4, |i, j| entries[i.min(j) * 4 + i.max(j)]);
        let e = jacobi_eigen(&m, true).unwrap();
        let v = e.vectors.unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let r: f64 = (0..4).map(|k| v[i][k] * e.values[k] * v[j][k]).sum();
                prop_assert!((r - m.get(i, j)).abs() < 1e-12 * (1.0 + m.frobenius()));
            }
        }
        prop_assert!((e.values.iter().sum::<f64>() - m.trace()).abs() < 1e-12 * (1.0 + m.frobenius()));
    }

    #[test]
    fn gram_matrices_are_psd(entries in prop::collection::vec(-2.0..2.0f64, 9)) {
        let m = gram(&entries, 3);
        prop_assert!(is_psd(&m, 1e-12 * (1.0 + m.frobenius())).unwrap().pass);
        let shifted = m.add(&SymMatrix::identity(3).scaled(-(jacobi_eigenvalues(&m).unwrap()[0] + 0.5))).unwrap();
        prop_assert!(!is_psd(&shifted, 1e-9).unwrap().pass);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn polynomial_annihilation(dist in member(), n in 1..=3usize, c1 in poly(3), c2 in poly(3)) {
        let trim = |c: &[f64]| c[..c.len().min(n + 1)].to_vec();
        let g = FunctionTuple::polynomials(&[&trim(&c1), &trim(&c2)]).unwrap();
        let r = compute_report(&dist, &g, n, &BOTH, &BoundsConfig::default()).unwrap();
        let tol = r.verdicts[0].tol;
        prop_assert!(r.a_n.as_ref().unwrap().max_abs() <= tol, "{}", dist.name());
        prop_assert!(r.d.sub(r.l_n.as_ref().unwrap()).unwrap().max_abs() <= tol, "{}", dist.name());
    }

    #[test]
    fn quadratic_form_is_a_variance(dist in member(), c1 in poly(3), c2 in poly(3), a in -1.0..1.0f64, b in -1.0..1.0f64) {
        let g = FunctionTuple::polynomials(&[&c1, &c2]).unwrap();
        let r = compute_report(&dist, &g, 1, &[Theorem::Poincare], &BoundsConfig::default()).unwrap();
        let cfg = EngineConfig::default();
        let h = |x: f64| {
            let p = |c: &[f64]| c.iter().rev().fold(0.0, |acc, v| acc * x + v);
            a * p(&c1) + b * p(&c2)
        };
        let mean = expect(&dist, h, &cfg).unwrap().value;
        let var = expect(&dist, |x| (h(x) - mean).powi(2), &cfg).unwrap().value;
        let qf = r.d.quad_form(&[a, b]).unwrap();
        prop_assert!((qf - var).abs() <= 1e-8 * (1.0 + var), "{qf} vs {var}");
    }

    #[test]
    fn reports_round_trip(dist in member(), n in 1..=2usize, src in expression()) {
        let g = FunctionTuple::smooth(vec![
            SmoothFunction::polynomial(vec![0.0, 1.0]),
            SmoothFunction::parse(&src).unwrap(),
        ]).unwrap();
        let r = compute_report(&dist, &g, n, &BOTH, &BoundsConfig::default());
        // Class or moment failures are legitimate outcomes for random inputs.
        prop_assume!(r.is_ok());
        let r = r.unwrap();
        let back = BoundReport::from_json(&r.to_json().unwrap()).unwrap();
        prop_assert_eq!(&back, &r);
        prop_assert_eq!(back.reverify().unwrap(), r.verdicts.clone());
    }

    #[test]
    fn doubling_nodes_stays_within_bracket(dist in member(), c in poly(3), src in expression()) {
        let g = FunctionTuple::smooth(vec![
            SmoothFunction::polynomial(c),
            SmoothFunction::parse(&src).unwrap(),
        ]).unwrap();
        let base = BoundsConfig::default();
        let mut fine = base;
        fine.engine.quad_nodes *= 2;
        let (r1, r2) = (
            compute_report(&dist, &g, 1, &BOTH, &base),
            compute_report(&dist, &g, 1, &BOTH, &fine),
        );
        prop_assume!(r1.is_ok() && r2.is_ok());
        let (r1, r2) = (r1.unwrap(), r2.unwrap());
        let bracket = r1.provenance.brackets.d;
        let dev = r1.d.sub(&r2.d).unwrap().max_abs();
        prop_assert!(dev <= 10.0 * bracket + 1e-12 * (1.0 + r1.d.max_abs()), "{}: {dev:e} vs bracket {bracket:e}", dist.name());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn monte_carlo_agrees_with_quadrature(dist in member(), c in poly(2), seed in any::<u64>()) {
        let cfg = EngineConfig { mc_samples: 40_000, mc_seed: seed, ..EngineConfig::default() };
        let f = |x: f64| c.iter().rev().fold(0.0, |acc, v| acc * x + v);
        let exact = expect(&dist, f, &cfg).unwrap();
        let mc = expect_mc(&dist, f, &cfg).unwrap();
        let slack = 4.0 * mc.error_bracket + 10.0 * exact.error_bracket + 1e-12;
        prop_assert!((mc.value - exact.value).abs() <= slack, "{}: {} vs {}", dist.name(), mc.value, exact.value);
    }
}
