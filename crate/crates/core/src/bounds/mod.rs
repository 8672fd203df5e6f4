//! The dispersion matrix `D`, the matrices `H_k` and `B_k`, and the bounds built from them:
//!
//! ```text
//! S_n = Σ_{k=1}^{n} (−1)^{k−1} / (k! Π_{j=0}^{k−1} (1 − jδ)) · H_k,   A_n = (−1)^n (D − S_n) ⪰ 0
//! L_n = Σ_{k=1}^{n} 1 / (k! E[w_k] Π_{j=k−1}^{2k−2} (1 − jδ)) · B_k,   L_n ⪯ D
//! ```
//!
//! with `H_k = E[w_k g^{(k)} g^{(k)ᵗ}]`, `B_k = E[w_k g^{(k)}] E[w_k g^{(k)}]ᵗ` and
//! `w_k = q^k` for continuous members. Discrete members use `w_k = q^{[k]}` and the
//! forward difference `Δ^k` in place of the derivative.

mod class;
mod mc;
mod report;

use serde::{Deserialize, Serialize};

use crate::calculus::{rising_q, FunctionTuple, TestFunction};
use crate::distributions::{moment_check, Distribution, Quadratic};
use crate::error::{Error, Result};
use crate::expectation::{EngineConfig, ExpectationResult, Measure, NodeValues};
use crate::linalg::SymMatrix;

pub use class::{check_class, ClassEntry, ClassReport, FunctionClass};
pub use mc::{mc_cross_check, McEntry, McReport};
pub use report::{
    BoundReport, Brackets, Coefficient, EigenRow, Provenance, Spectrum, Theorem, Verdict,
};

/// Each factor `1 − jδ` must exceed this in magnitude.
pub const SINGULAR_GUARD: f64 = 1e-10;
/// `E[w_k]` at or below this magnitude makes the Bessel summand the null matrix.
pub const NULL_TERM_THRESHOLD: f64 = 1e-12;
/// Relative PSD tolerance; verdicts use `rel_tol · (1 + ρ(D))`.
pub const DEFAULT_REL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundsConfig {
    pub engine: EngineConfig,
    pub rel_tol: f64,
}

impl Default for BoundsConfig {
    fn default() -> Self {
        Self {
            engine: EngineConfig::default(),
            rel_tol: DEFAULT_REL_TOL,
        }
    }
}

fn guarded_product(delta: f64, k: usize, js: std::ops::RangeInclusive<usize>) -> Result<f64> {
    let mut p = 1.0;
    for j in js {
        let f = 1.0 - j as f64 * delta;
        if f.abs() <= SINGULAR_GUARD {
            return Err(Error::SingularCoefficient { k, j });
        }
        p *= f;
    }
    Ok(p)
}

fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |a, i| a * i as f64)
}

/// `(−1)^{k−1} / (k! Π_{j=0}^{k−1} (1 − jδ))`.
pub fn poincare_coefficient(delta: f64, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidArgument("orders start at k = 1".into()));
    }
    let prod = guarded_product(delta, k, 0..=k - 1)?;
    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
    Ok(sign / (factorial(k) * prod))
}

/// `Π_{j=k−1}^{2k−2} (1 − jδ)`, the δ-dependent part of the Bessel weight.
pub fn bessel_product(delta: f64, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidArgument("orders start at k = 1".into()));
    }
    guarded_product(delta, k, k - 1..=2 * k - 2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BesselWeight {
    Weight(f64),
    /// `E[w_k]` vanished; the k-th summand of `L_n` is the zero matrix.
    NullTerm,
}

/// `1 / (k! E[w_k] Π_{j=k−1}^{2k−2} (1 − jδ))`, or the null-term marker.
pub fn bessel_coefficient(dist: &Distribution, k: usize, cfg: &EngineConfig) -> Result<BesselWeight> {
    let q = dist.q()?;
    let prod = bessel_product(q.delta, k)?;
    let m = Measure::new(dist, cfg)?;
    let e = m.expect(|x| weight_at(dist, &q, k, x))?;
    Ok(bessel_weight(e.value, k, prod))
}

fn bessel_weight(expected: f64, k: usize, prod: f64) -> BesselWeight {
    if expected.abs() <= NULL_TERM_THRESHOLD {
        BesselWeight::NullTerm
    } else {
        BesselWeight::Weight(1.0 / (factorial(k) * expected * prod))
    }
}

/// `w_k(x)`: `q(x)^k` for continuous members, `q^{[k]}(x)` for discrete ones.
pub(crate) fn weight_at(dist: &Distribution, q: &Quadratic, k: usize, x: f64) -> f64 {
    if dist.is_discrete() {
        rising_q(q, k, x)
    } else {
        q.eval(x).powi(k as i32)
    }
}

/// `g^{(k)}(x)` or `Δ^k g(x)`; NaN when unavailable (orders are validated up front).
pub(crate) fn derivative_at(dist: &Distribution, g: &TestFunction, k: usize, x: f64) -> f64 {
    let r = if dist.is_discrete() {
        g.difference(k, x as i64)
    } else {
        g.derivative(k, x)
    };
    r.unwrap_or(f64::NAN)
}

/// Rejects orders the tuple cannot serve and integer-only functions on continuous members.
pub(crate) fn check_orders(dist: &Distribution, g: &FunctionTuple, n: usize) -> Result<()> {
    for e in g.entries() {
        match e {
            TestFunction::Smooth(s) if !dist.is_discrete() && n > s.max_order() => {
                return Err(Error::OrderTooLarge { k: n, max: s.max_order() });
            }
            TestFunction::Lattice { label, .. } if !dist.is_discrete() => {
                return Err(Error::InvalidArgument(format!(
                    "`{label}` is integer-valued and cannot be used with a continuous member"
                )));
            }
            _ => {}
        }
    }
    if dist.is_discrete() && n > crate::calculus::MAX_DIFFERENCE_ORDER {
        return Err(Error::OrderTooLarge { k: n, max: crate::calculus::MAX_DIFFERENCE_ORDER });
    }
    Ok(())
}

fn track(bracket: &mut f64, r: &ExpectationResult) -> f64 {
    *bracket = bracket.max(r.error_bracket);
    r.value
}

/// Node values of `w_k` and of every `g_i^{(k)}` up to a maximal order, shared by all
/// matrices built for one (member, tuple) pair.
struct Kernel {
    measure: Measure,
    /// `weights[k]` holds `w_k`.
    weights: Vec<NodeValues>,
    /// `values[i][k]` holds `g_i^{(k)}`, zero wherever `w_k` vanishes.
    values: Vec<Vec<NodeValues>>,
}

impl Kernel {
    fn new(dist: &Distribution, g: &FunctionTuple, n: usize, cfg: &EngineConfig) -> Result<Self> {
        let q = dist.q()?;
        let measure = Measure::new(dist, cfg)?;
        let weights = (0..=n)
            .map(|k| measure.tabulate(|x| weight_at(dist, &q, k, x)))
            .collect::<Result<Vec<_>>>()?;
        let values = g
            .entries()
            .iter()
            .map(|gi| {
                (0..=n)
                    .map(|k| {
                        measure.tabulate(|x| {
                            if weight_at(dist, &q, k, x) == 0.0 {
                                0.0
                            } else {
                                derivative_at(dist, gi, k, x)
                            }
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            measure,
            weights,
            values,
        })
    }

    fn expect(&self, v: &NodeValues) -> Result<ExpectationResult> {
        self.measure.integrate_checked(v)
    }

    fn p(&self) -> usize {
        self.values.len()
    }

    fn means(&self, bracket: &mut f64) -> Result<Vec<f64>> {
        (0..self.p())
            .map(|i| Ok(track(bracket, &self.expect(&self.values[i][0])?)))
            .collect()
    }

    fn dispersion(&self, means: &[f64], bracket: &mut f64) -> Result<SymMatrix> {
        let p = self.p();
        // A function constant on the support has zero variance exactly; centering it
        // by a quadrature mean would leave rounding residue instead.
        let centered: Vec<NodeValues> = (0..p)
            .map(|i| {
                let v = &self.values[i][0];
                let mut live = v.fine().iter().zip(self.measure.weights()).filter(|(_, w)| **w != 0.0);
                let first = live.next().map_or(0.0, |(x, _)| *x);
                let constant = live.all(|(x, _)| *x == first);
                v.map(|x| if constant { 0.0 } else { x - means[i] })
            })
            .collect();
        let mut m = SymMatrix::zeros(p);
        for i in 0..p {
            for j in i..p {
                let r = self.expect(&centered[i].product(&centered[j]))?;
                m.set(i, j, track(bracket, &r));
            }
        }
        Ok(m)
    }

    fn h(&self, k: usize, bracket: &mut f64) -> Result<SymMatrix> {
        let p = self.p();
        let weighted: Vec<NodeValues> = (0..p).map(|i| self.values[i][k].product(&self.weights[k])).collect();
        let mut m = SymMatrix::zeros(p);
        for i in 0..p {
            for j in i..p {
                let r = self.expect(&weighted[i].product(&self.values[j][k]))?;
                m.set(i, j, track(bracket, &r));
            }
        }
        Ok(m)
    }

    fn b(&self, k: usize, bracket: &mut f64) -> Result<SymMatrix> {
        let v = (0..self.p())
            .map(|i| Ok(track(bracket, &self.expect(&self.values[i][k].product(&self.weights[k]))?)))
            .collect::<Result<Vec<f64>>>()?;
        Ok(SymMatrix::outer(&v))
    }

    fn expected_weight(&self, k: usize) -> Result<f64> {
        Ok(self.expect(&self.weights[k])?.value)
    }
}

/// `D_ij = E[g_i g_j] − E[g_i] E[g_j]`, computed in centered form.
pub fn dispersion_matrix(dist: &Distribution, g: &FunctionTuple, cfg: &EngineConfig) -> Result<SymMatrix> {
    check_orders(dist, g, 0)?;
    let k = Kernel::new(dist, g, 0, cfg)?;
    let mut br = 0.0;
    let means = k.means(&mut br)?;
    k.dispersion(&means, &mut br)
}

pub fn matrix_h(dist: &Distribution, g: &FunctionTuple, k: usize, cfg: &EngineConfig) -> Result<SymMatrix> {
    check_orders(dist, g, k)?;
    Kernel::new(dist, g, k, cfg)?.h(k, &mut 0.0)
}

pub fn matrix_b(dist: &Distribution, g: &FunctionTuple, k: usize, cfg: &EngineConfig) -> Result<SymMatrix> {
    check_orders(dist, g, k)?;
    Kernel::new(dist, g, k, cfg)?.b(k, &mut 0.0)
}

/// `S_n` from precomputed `H_1..H_n`.
pub fn combine_s(delta: f64, h: &[SymMatrix]) -> Result<SymMatrix> {
    let mut s = SymMatrix::zeros(h[0].order());
    for (idx, hk) in h.iter().enumerate() {
        s = s.add_scaled(hk, poincare_coefficient(delta, idx + 1)?)?;
    }
    Ok(s)
}

/// `A_n = (−1)^n (D − S_n)`.
pub fn combine_a(n: usize, d: &SymMatrix, s: &SymMatrix) -> Result<SymMatrix> {
    let diff = d.sub(s)?;
    Ok(if n % 2 == 0 { diff } else { diff.scaled(-1.0) })
}

pub fn matrix_s(dist: &Distribution, g: &FunctionTuple, n: usize, cfg: &EngineConfig) -> Result<SymMatrix> {
    let r = compute_report(dist, g, n, &[Theorem::Poincare], &BoundsConfig { engine: *cfg, ..Default::default() })?;
    r.s_n.ok_or_else(|| Error::InvalidArgument("S_n was not computed".into()))
}

pub fn matrix_a(dist: &Distribution, g: &FunctionTuple, n: usize, cfg: &EngineConfig) -> Result<SymMatrix> {
    let r = compute_report(dist, g, n, &[Theorem::Poincare], &BoundsConfig { engine: *cfg, ..Default::default() })?;
    r.a_n.ok_or_else(|| Error::InvalidArgument("A_n was not computed".into()))
}

pub fn matrix_l(dist: &Distribution, g: &FunctionTuple, n: usize, cfg: &EngineConfig) -> Result<SymMatrix> {
    let r = compute_report(dist, g, n, &[Theorem::Bessel], &BoundsConfig { engine: *cfg, ..Default::default() })?;
    r.l_n.ok_or_else(|| Error::InvalidArgument("L_n was not computed".into()))
}

/// Single-order convenience over [`compute_reports`].
pub fn compute_report(
    dist: &Distribution,
    g: &FunctionTuple,
    n: usize,
    theorems: &[Theorem],
    cfg: &BoundsConfig,
) -> Result<BoundReport> {
    Ok(compute_reports(dist, g, &[n], theorems, cfg)?.remove(0))
}

/// Runs the full pipeline for every order in `orders`, sharing the expectations.
///
/// Checks run in this order, each failing fast: coefficient singularity for every
/// requested order, finiteness of `E|X|^{2n}`, then class membership (`H` for the
/// Poincaré bound, `B` for the Bessel bound).
pub fn compute_reports(
    dist: &Distribution,
    g: &FunctionTuple,
    orders: &[usize],
    theorems: &[Theorem],
    cfg: &BoundsConfig,
) -> Result<Vec<BoundReport>> {
    if orders.is_empty() || orders.contains(&0) {
        return Err(Error::InvalidArgument("orders must be a nonempty list of n ≥ 1".into()));
    }
    if theorems.is_empty() {
        return Err(Error::InvalidArgument("no theorem requested".into()));
    }
    cfg.engine.validate()?;
    if !(cfg.rel_tol >= 0.0 && cfg.rel_tol.is_finite()) {
        return Err(Error::InvalidArgument(format!("invalid tolerance {}", cfg.rel_tol)));
    }
    if let Distribution::Continuous(c) = dist {
        if c.is_tabulated() {
            return Err(Error::InvalidArgument(
                "tabulated continuous densities are supported for quadratic inference only".into(),
            ));
        }
    }
    let poincare = theorems.contains(&Theorem::Poincare);
    let bessel = theorems.contains(&Theorem::Bessel);
    let q = dist.q()?;
    let n_max = *orders.iter().max().unwrap();
    check_orders(dist, g, n_max)?;

    for k in 1..=n_max {
        if poincare {
            poincare_coefficient(q.delta, k)?;
        }
        if bessel {
            bessel_product(q.delta, k)?;
        }
    }

    let moments = moment_check(dist, n_max, &cfg.engine)?;
    if !moments.finite() {
        return Err(Error::MomentsDiverge { moment: 2 * n_max });
    }

    let mut annotations = Vec::new();
    let mut classes = Vec::new();
    for (wanted, class) in [(poincare, FunctionClass::H), (bessel, FunctionClass::B)] {
        if !wanted {
            continue;
        }
        let rep = check_class(dist, g, n_max, class, &cfg.engine)?;
        if let Some(e) = rep.first_failure() {
            return Err(Error::ClassFailure {
                function: e.function,
                label: e.label.clone(),
                k: e.k,
                class: class.to_string(),
            });
        }
        classes.push(rep);
    }

    let kernel = Kernel::new(dist, g, n_max, &cfg.engine)?;
    let mut d_bracket = 0.0;
    let means = kernel.means(&mut d_bracket)?;
    let d = kernel.dispersion(&means, &mut d_bracket)?;

    let weight_floor = kernel.weights[1].fine().iter().fold(f64::INFINITY, |m, v| m.min(*v));
    if weight_floor < -1e-12 {
        annotations.push(format!("q takes the negative value {weight_floor:e} on the evaluation grid"));
    }

    let mut h = Vec::new();
    let mut b = Vec::new();
    let mut h_brackets = Vec::new();
    let mut b_brackets = Vec::new();
    let mut coefficients = Vec::new();
    for k in 1..=n_max {
        let mut coef = Coefficient {
            k,
            poincare: None,
            bessel: None,
            expected_weight: kernel.expected_weight(k)?,
            null_term: false,
        };
        if poincare {
            let mut br = 0.0;
            h.push(kernel.h(k, &mut br)?);
            h_brackets.push(br);
            coef.poincare = Some(poincare_coefficient(q.delta, k)?);
        }
        if bessel {
            let mut br = 0.0;
            b.push(kernel.b(k, &mut br)?);
            b_brackets.push(br);
            match bessel_weight(coef.expected_weight, k, bessel_product(q.delta, k)?) {
                BesselWeight::Weight(w) => coef.bessel = Some(w),
                BesselWeight::NullTerm => coef.null_term = true,
            }
        }
        coefficients.push(coef);
    }

    let provenance = Provenance {
        distribution: dist.name().to_string(),
        discrete: dist.is_discrete(),
        mean: dist.mean(),
        quadratic: q,
        functions: g.labels(),
        engine: cfg.engine,
        rel_tol: cfg.rel_tol,
        means,
        moments,
        classes,
        brackets: Brackets {
            d: d_bracket,
            h: h_brackets,
            b: b_brackets,
        },
        annotations,
    };

    orders
        .iter()
        .map(|&n| {
            let s_n = if poincare { Some(combine_s(q.delta, &h[..n])?) } else { None };
            let a_n = match &s_n {
                Some(s) => Some(combine_a(n, &d, s)?),
                None => None,
            };
            let l_n = if bessel {
                let mut l = SymMatrix::zeros(d.order());
                for (idx, bk) in b[..n].iter().enumerate() {
                    if let Some(w) = coefficients[idx].bessel {
                        l = l.add_scaled(bk, w)?;
                    }
                }
                Some(l)
            } else {
                None
            };
            let mut prov = provenance.clone();
            prov.brackets.h.truncate(n);
            prov.brackets.b.truncate(n);
            for c in coefficients[..n].iter().filter(|c| c.null_term) {
                prov.annotations.push(format!(
                    "k={}: |E[w_k(X)]| = {:e} ≤ {NULL_TERM_THRESHOLD:e}, so the k-th Bessel summand is the null matrix",
                    c.k,
                    c.expected_weight.abs()
                ));
            }
            BoundReport::assemble(
                n,
                d.clone(),
                if poincare { h[..n].to_vec() } else { Vec::new() },
                if bessel { b[..n].to_vec() } else { Vec::new() },
                s_n,
                l_n,
                a_n,
                coefficients[..n].to_vec(),
                prov,
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{binomial, normal, poisson};

    fn cfg() -> EngineConfig {
        EngineConfig::default()
    }

    fn z() -> Distribution {
        normal(0.0, 1.0).unwrap().into()
    }

    fn close(a: &SymMatrix, want: &[&[f64]], tol: f64) -> bool {
        let w = SymMatrix::from_rows(&want.iter().map(|r| r.to_vec()).collect::<Vec<_>>(), 0.0).unwrap();
        a.sub(&w).unwrap().max_abs() <= tol
    }

    #[test]
    fn coefficients() {
        assert!((poincare_coefficient(0.0, 3).unwrap() - 1.0 / 6.0).abs() < 1e-16);
        assert!((poincare_coefficient(0.0, 2).unwrap() + 0.5).abs() < 1e-16);
        assert_eq!(poincare_coefficient(1.0, 2).unwrap_err(), Error::SingularCoefficient { k: 2, j: 1 });
        for k in 1..5 {
            match bessel_coefficient(&z(), k, &cfg()).unwrap() {
                BesselWeight::Weight(w) => assert!((w - 1.0 / factorial(k)).abs() < 1e-12),
                BesselWeight::NullTerm => panic!(),
            }
        }
        let p: Distribution = poisson(2.0).unwrap().into();
        match bessel_coefficient(&p, 3, &cfg()).unwrap() {
            BesselWeight::Weight(w) => assert!((w - 1.0 / (6.0 * 8.0)).abs() < 1e-12),
            BesselWeight::NullTerm => panic!(),
        }
    }

    #[test]
    fn gaussian_matrices() {
        let g = FunctionTuple::polynomials(&[&[0.0, 1.0], &[0.0, 0.0, 1.0]]).unwrap();
        assert!(close(&dispersion_matrix(&z(), &g, &cfg()).unwrap(), &[&[1.0, 0.0], &[0.0, 2.0]], 1e-10));
        assert!(close(&matrix_h(&z(), &g, 1, &cfg()).unwrap(), &[&[1.0, 0.0], &[0.0, 4.0]], 1e-10));
        let sq = FunctionTuple::polynomials(&[&[0.0, 0.0, 1.0]]).unwrap();
        assert!(close(&matrix_b(&z(), &sq, 2, &cfg()).unwrap(), &[&[4.0]], 1e-10));
        let odd = FunctionTuple::polynomials(&[&[0.0, 0.0, 0.0, 1.0]]).unwrap();
        assert!(matrix_b(&z(), &odd, 2, &cfg()).unwrap().max_abs() < 1e-12);
        assert!(matrix_h(&z(), &g, 3, &cfg()).unwrap().max_abs() == 0.0);
        let c = FunctionTuple::polynomials(&[&[3.0]]).unwrap();
        assert_eq!(dispersion_matrix(&z(), &c, &cfg()).unwrap().get(0, 0), 0.0);
    }

    #[test]
    fn cube_chain() {
        let g = FunctionTuple::polynomials(&[&[0.0, 0.0, 0.0, 1.0]]).unwrap();
        let s: Vec<f64> = (1..=3).map(|n| matrix_s(&z(), &g, n, &cfg()).unwrap().get(0, 0)).collect();
        assert!((s[0] - 27.0).abs() < 1e-9 && (s[1] - 9.0).abs() < 1e-9 && (s[2] - 15.0).abs() < 1e-9, "{s:?}");
        assert!(matrix_a(&z(), &g, 3, &cfg()).unwrap().max_abs() < 1e-9);
        let sq = FunctionTuple::polynomials(&[&[0.0, 0.0, 1.0]]).unwrap();
        assert!((matrix_l(&z(), &sq, 2, &cfg()).unwrap().get(0, 0) - 2.0).abs() < 1e-10);
    }

    #[test]
    fn poisson_variance() {
        let p: Distribution = poisson(3.5).unwrap().into();
        let g = FunctionTuple::polynomials(&[&[0.0, 1.0]]).unwrap();
        assert!((dispersion_matrix(&p, &g, &cfg()).unwrap().get(0, 0) - 3.5).abs() < 1e-10);
    }

    #[test]
    fn singular_and_moment_failures() {
        let g = FunctionTuple::polynomials(&[&[0.0, 1.0]]).unwrap();
        let b: Distribution = binomial(5, 0.5).unwrap().into();
        // δ = 0 for the binomial, so nothing is singular.
        assert!(compute_report(&b, &g, 3, &[Theorem::Poincare, Theorem::Bessel], &BoundsConfig::default()).is_ok());
        let heavy = z().with_quadratic(Quadratic::new(1.0, 0.0, 1.0).unwrap());
        assert_eq!(
            compute_report(&heavy, &g, 2, &[Theorem::Poincare], &BoundsConfig::default()).unwrap_err(),
            Error::SingularCoefficient { k: 2, j: 1 }
        );
    }

    #[test]
    fn order_and_orders_validation() {
        let g = FunctionTuple::polynomials(&[&[0.0, 1.0]]).unwrap();
        let c = BoundsConfig::default();
        assert!(compute_reports(&z(), &g, &[], &[Theorem::Poincare], &c).is_err());
        assert!(compute_reports(&z(), &g, &[0], &[Theorem::Poincare], &c).is_err());
        assert!(compute_reports(&z(), &g, &[1], &[], &c).is_err());
        assert!(matches!(
            compute_report(&z(), &g, 13, &[Theorem::Poincare], &c),
            Err(Error::OrderTooLarge { .. })
        ));
    }
}
