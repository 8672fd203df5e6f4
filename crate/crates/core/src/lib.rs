//! Matrix variance inequalities for Integrated Pearson and Cumulative Ord distributions.
//!
//! For a random variable `X` from either family and a tuple `g = (g_1, …, g_p)` of test
//! functions, this crate computes the dispersion matrix `D = Cov(g(X))`, the upper and
//! lower Poincaré-type bounds `S_n` and the Bessel-type lower bound `L_n`, and checks
//! the Loewner-order statements between them by eigenvalues.
//!
//! ```
//! use matvar_core::{compute_report, normal, BoundsConfig, FunctionTuple, Theorem};
//!
//! let z = normal(0.0, 1.0).unwrap().into();
//! let g = FunctionTuple::polynomials(&[&[0.0, 1.0], &[0.0, 0.0, 1.0]]).unwrap();
//! let r = compute_report(&z, &g, 1, &[Theorem::Poincare], &BoundsConfig::default()).unwrap();
//! assert!(r.pass());
//! ```

pub mod bounds;
pub mod calculus;
pub mod distributions;
pub mod document;
pub mod error;
pub mod expectation;
pub mod linalg;
pub mod rng;

pub use bounds::{
    bessel_coefficient, check_class, compute_report, compute_reports, dispersion_matrix,
    mc_cross_check, poincare_coefficient, BesselWeight, BoundReport, BoundsConfig, ClassReport,
    FunctionClass, McReport, Theorem, Verdict,
};
pub use calculus::{
    derivative_value, forward_difference, rising_q, FunctionTuple, SmoothFunction, TestFunction,
};
pub use distributions::{
    beta, binomial, catalog, gamma, hypergeometric, infer_quadratic, moment_finiteness,
    negative_binomial, normal, poisson, student_t, verify_membership, ContinuousIP, DiscreteCO, Distribution,
    Quadratic,
};
pub use document::DistributionDocument;
pub use error::{Error, Result};
pub use expectation::{expect_continuous, expect_discrete, expect_mc, EngineConfig, ExpectationResult};
pub use linalg::{is_psd, jacobi_eigenvalues, loewner_leq, SymMatrix};
pub use rng::SplitMix64;
