//! Bound matrices against closed-form moments.

use approx::assert_relative_eq;
use matvar_core::bounds::{bessel_coefficient, poincare_coefficient};
use matvar_core::distributions::student_t;
use matvar_core::{
    beta, binomial, compute_report, gamma, hypergeometric, negative_binomial, normal, poisson,
    BesselWeight, BoundsConfig, Distribution, FunctionTuple, Theorem,
};

const BOTH: [Theorem; 2] = [Theorem::Poincare, Theorem::Bessel];

fn identity_tuple() -> FunctionTuple {
    FunctionTuple::polynomials(&[&[0.0, 1.0]]).unwrap()
}

/// For `g(x) = x` every member has `Var X = E[q(X)]`, so `S_1 = L_1 = D`.
#[test]
fn linear_function_is_tight_everywhere() {
    let members: Vec<(Distribution, f64)> = vec![
        (normal(1.0, 2.5).unwrap().into(), 2.5),
        (gamma(3.0, 0.5).unwrap().into(), 3.0 * 0.25),
        (beta(2.0, 5.0).unwrap().into(), 10.0 / (49.0 * 8.0)),
        (student_t(5.0).unwrap().into(), 5.0 / 3.0),
        (poisson(3.5).unwrap().into(), 3.5),
        (binomial(9, 0.3).unwrap().into(), 9.0 * 0.3 * 0.7),
        (negative_binomial(4.0, 0.6).unwrap().into(), 4.0 * 0.4 / 0.36),
        (
            hypergeometric(30, 12, 8).unwrap().into(),
            8.0 * 12.0 * 18.0 * 22.0 / (900.0 * 29.0),
        ),
    ];
    let cfg = BoundsConfig::default();
    for (dist, var) in members {
        let r = compute_report(&dist, &identity_tuple(), 1, &BOTH, &cfg).unwrap();
        let d = r.d.get(0, 0);
        assert_relative_eq!(d, var, max_relative = 1e-9);
        assert_relative_eq!(r.s_n.as_ref().unwrap().get(0, 0), var, max_relative = 1e-9);
        assert_relative_eq!(r.l_n.as_ref().unwrap().get(0, 0), var, max_relative = 1e-9);
        assert!(r.pass(), "{}", dist.name());
    }
}

/// Gamma(k, θ) with `g = x²`: `Var X² = θ⁴ k(k+1)(4k+6)` and `H_1 = 4θ E[X³]`.
#[test]
fn gamma_square() {
    let (k, th) = (2.5f64, 1.5f64);
    let dist: Distribution = gamma(k, th).unwrap().into();
    let g = FunctionTuple::polynomials(&[&[0.0, 0.0, 1.0]]).unwrap();
    let r = compute_report(&dist, &g, 2, &BOTH, &BoundsConfig::default()).unwrap();
    let m = |j: i32| (0..j).map(|i| k + i as f64).product::<f64>() * th.powi(j);
    let var = m(4) - m(2) * m(2);
    assert_relative_eq!(var, th.powi(4) * k * (k + 1.0) * (4.0 * k + 6.0), max_relative = 1e-12);
    assert_relative_eq!(r.d.get(0, 0), var, max_relative = 1e-9);
    assert_relative_eq!(r.h[0].get(0, 0), 4.0 * th * m(3), max_relative = 1e-9);
    // H_2 = E[q² (g'')²] = 4θ² E[X²].
    assert_relative_eq!(r.h[1].get(0, 0), 4.0 * th * th * m(2), max_relative = 1e-9);
    // Degree 2 = n: both bounds are equalities.
    assert!(r.a_n.as_ref().unwrap().max_abs() < 1e-8 * var);
    assert!((r.d.get(0, 0) - r.l_n.as_ref().unwrap().get(0, 0)).abs() < 1e-8 * var);
}

/// Poisson(λ), `g = x²`: `Var = 4λ³ + 6λ² + λ`, `ΔG = 2x + 1`, so
/// `H_1 = λ E[(2X + 1)²]` and `H_2 = 4λ²`.
#[test]
fn poisson_square() {
    let lambda = 1.7f64;
    let dist: Distribution = poisson(lambda).unwrap().into();
    let g = FunctionTuple::polynomials(&[&[0.0, 0.0, 1.0]]).unwrap();
    let r = compute_report(&dist, &g, 2, &BOTH, &BoundsConfig::default()).unwrap();
    let var = 4.0 * lambda.powi(3) + 6.0 * lambda * lambda + lambda;
    let h1 = lambda * (4.0 * (lambda + lambda * lambda) + 4.0 * lambda + 1.0);
    assert_relative_eq!(r.d.get(0, 0), var, max_relative = 1e-11);
    assert_relative_eq!(r.h[0].get(0, 0), h1, max_relative = 1e-11);
    assert_relative_eq!(r.h[1].get(0, 0), 4.0 * lambda * lambda, max_relative = 1e-11);
    assert_relative_eq!(r.s_n.as_ref().unwrap().get(0, 0), h1 - 2.0 * lambda * lambda, max_relative = 1e-11);
    assert!(r.a_n.as_ref().unwrap().max_abs() < 1e-9);
}

/// Coefficients for a member with `δ ≠ 0`.
#[test]
fn coefficient_products() {
    let delta = -0.25;
    // k = 3: 1 / (3! (1)(1 − δ)(1 − 2δ)).
    let want = 1.0 / (6.0 * 1.25 * 1.5);
    assert_relative_eq!(poincare_coefficient(delta, 3).unwrap(), want, max_relative = 1e-15);

    // Beta(2, 2): δ = −1/4, E[q(X)] = E[X(1 − X)]/4 = 1/20.
    let dist: Distribution = beta(2.0, 2.0).unwrap().into();
    match bessel_coefficient(&dist, 1, &Default::default()).unwrap() {
        BesselWeight::Weight(c) => assert_relative_eq!(c, 20.0, max_relative = 1e-10),
        other => panic!("{other:?}"),
    }
}

/// Mixed tuple on the standard normal: closed-form D and H_1.
#[test]
fn gaussian_exponential_and_sine() {
    let dist: Distribution = normal(0.0, 1.0).unwrap().into();
    let g = FunctionTuple::parse_exprs(&["exp(x/2)", "sin(x)"]).unwrap();
    let r = compute_report(&dist, &g, 1, &BOTH, &BoundsConfig::default()).unwrap();
    let e = std::f64::consts::E;
    // From E e^{zX} = e^{z²/2}: E e^{X/2} = e^{1/8}, E e^{X} = e^{1/2}, E sin X = 0,
    // E sin² X = (1 − e^{−2})/2 and E e^{X/2} sin X = Im e^{(1/2 + i)²/2} = e^{−3/8} sin(1/2).
    let var_exp = e.powf(0.5) - e.powf(0.25);
    let var_sin = (1.0 - e.powf(-2.0)) / 2.0;
    let cross = (0.125f64 - 0.5).exp() * 0.5f64.sin();
    assert_relative_eq!(r.d.get(0, 0), var_exp, max_relative = 1e-10);
    assert_relative_eq!(r.d.get(1, 1), var_sin, max_relative = 1e-10);
    assert_relative_eq!(r.d.get(0, 1), cross, max_relative = 1e-10);
    // H_1: E[(e^{X/2}/2)²] = e^{1/2}/4, E cos² X = (1 + e^{−2})/2,
    // E[e^{X/2} cos X]/2 = e^{−3/8} cos(1/2)/2.
    assert_relative_eq!(r.h[0].get(0, 0), e.powf(0.5) / 4.0, max_relative = 1e-10);
    assert_relative_eq!(r.h[0].get(1, 1), (1.0 + e.powf(-2.0)) / 2.0, max_relative = 1e-10);
    assert_relative_eq!(r.h[0].get(0, 1), (-0.375f64).exp() * 0.5f64.cos() / 2.0, max_relative = 1e-10);
    assert!(r.pass());
}
