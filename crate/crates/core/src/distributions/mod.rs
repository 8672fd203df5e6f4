//! Integrated Pearson (continuous) and Cumulative Ord (discrete) family members.
//!
//! A continuous member `X ~ IP(μ; δ, β, γ)` has a density `f` with
//!
//! ```text
//! ∫_{-∞}^{x} (μ − t) f(t) dt = q(x) f(x),   q(x) = δx² + βx + γ,
//! ```
//!
//! and a discrete member `X ~ CO(μ; δ, β, γ)` has a pmf `p` with
//! `Σ_{k ≤ j} (μ − k) p(k) = q(j) p(j)`. The quadratic is optional on the types
//! below so that [`infer_quadratic`] can recover it from the density alone.

mod catalog;
mod inference;
mod moments;
mod table;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SplitMix64;

pub use catalog::{
    beta, binomial, catalog, gamma, hypergeometric, negative_binomial, normal, poisson,
    student_t, CATALOG_NAMES,
};
pub use inference::{
    default_membership_tol, infer_quadratic, verify_membership, verify_membership_with_tol, MembershipReport,
    QuadraticFit, CONTINUOUS_TOL, DISCRETE_TOL, DENSITY_FLOOR, TABULATED_TOL,
};
pub use moments::{moment_check, moment_finiteness, MomentCheck};
pub use table::{DensityTable, PmfTable};

/// `q(x) = δx² + βx + γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quadratic {
    pub delta: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl Quadratic {
    pub fn new(delta: f64, beta: f64, gamma: f64) -> Result<Self> {
        if delta.abs() + beta.abs() + gamma.abs() == 0.0 {
            return Err(Error::DegenerateQuadratic);
        }
        if !(delta.is_finite() && beta.is_finite() && gamma.is_finite()) {
            return Err(Error::InvalidArgument("quadratic coefficients must be finite".into()));
        }
        Ok(Self { delta, beta, gamma })
    }

    /// The constant quadratic `q ≡ c`.
    pub fn constant(c: f64) -> Result<Self> {
        Self::new(0.0, 0.0, c)
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.delta * x + self.beta) * x + self.gamma
    }

    pub fn coefficients(&self) -> [f64; 3] {
        [self.delta, self.beta, self.gamma]
    }

    /// Coefficients divided by the largest magnitude among them.
    pub fn normalized(&self) -> [f64; 3] {
        let c = self.coefficients();
        let m = c.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        [c[0] / m, c[1] / m, c[2] / m]
    }

    /// Componentwise distance between normalized coefficient vectors.
    pub fn normalized_distance(&self, other: &Quadratic) -> f64 {
        let (a, b) = (self.normalized(), other.normalized());
        (0..3).fold(0.0, |m, i| m.max((a[i] - b[i]).abs()))
    }
}

impl fmt::Display for Quadratic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}·x² + {}·x + {}", self.delta, self.beta, self.gamma)
    }
}

pub type DensityFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type PmfFn = Arc<dyn Fn(i64) -> f64 + Send + Sync>;

/// Where a continuous density comes from.
#[derive(Clone)]
pub enum Density {
    Analytic(DensityFn),
    /// Linear interpolation between tabulated nodes, zero outside them.
    Table(Arc<DensityTable>),
}

impl Density {
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Density::Analytic(f) => f(x),
            Density::Table(t) => t.eval(x),
        }
    }
}

#[derive(Clone)]
pub enum ContinuousSampler {
    Normal { mean: f64, sd: f64 },
    Gamma { shape: f64, scale: f64 },
    Beta { a: f64, b: f64 },
    Custom(Arc<dyn Fn(&mut SplitMix64) -> f64 + Send + Sync>),
}

impl ContinuousSampler {
    pub fn draw(&self, rng: &mut SplitMix64) -> f64 {
        match self {
            ContinuousSampler::Normal { mean, sd } => mean + sd * rng.standard_normal(),
            ContinuousSampler::Gamma { shape, scale } => rng.gamma(*shape, *scale),
            ContinuousSampler::Beta { a, b } => rng.beta(*a, *b),
            ContinuousSampler::Custom(f) => f(rng),
        }
    }
}

/// A continuous member with support `(lo, hi)`.
#[derive(Clone)]
pub struct ContinuousIP {
    name: String,
    mean: f64,
    quadratic: Option<Quadratic>,
    lo: f64,
    hi: f64,
    density: Density,
    sampler: Option<ContinuousSampler>,
    center: f64,
    scale: f64,
}

impl fmt::Debug for ContinuousIP {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ContinuousIP")
            .field("name", &self.name)
            .field("mean", &self.mean)
            .field("quadratic", &self.quadratic)
            .field("support", &(self.lo, self.hi))
            .field("sampler", &self.sampler.is_some())
            .finish()
    }
}

impl ContinuousIP {
    pub fn new(name: impl Into<String>, mean: f64, support: (f64, f64), density: Density) -> Result<Self> {
        let (lo, hi) = support;
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(Error::InvalidArgument(format!("empty support ({lo}, {hi})")));
        }
        if !mean.is_finite() || mean <= lo || mean >= hi {
            return Err(Error::InvalidArgument(format!("mean {mean} outside support")));
        }
        let center = mean;
        let scale = match (lo.is_finite(), hi.is_finite()) {
            (true, true) => hi - lo,
            (true, false) => (mean - lo).max(1e-300),
            (false, true) => (hi - mean).max(1e-300),
            (false, false) => 1.0,
        };
        Ok(Self {
            name: name.into(),
            mean,
            quadratic: None,
            lo,
            hi,
            density,
            sampler: None,
            center,
            scale,
        })
    }

    pub fn with_quadratic(mut self, q: Quadratic) -> Self {
        self.quadratic = Some(q);
        if !(self.lo.is_finite() && self.hi.is_finite()) {
            let var = q.eval(self.mean) / (1.0 - q.delta);
            if var.is_finite() && var > 0.0 {
                self.scale = var.sqrt();
            }
        }
        self
    }

    pub fn without_quadratic(mut self) -> Self {
        self.quadratic = None;
        self
    }

    pub fn with_sampler(mut self, sampler: ContinuousSampler) -> Self {
        self.sampler = Some(sampler);
        self
    }

    /// Overrides the location/scale hints that position quadrature nodes on infinite supports.
    pub fn with_scale_hint(mut self, center: f64, scale: f64) -> Self {
        self.center = center;
        self.scale = scale;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn mean(&self) -> f64 {
        self.mean
    }
    pub fn quadratic(&self) -> Option<Quadratic> {
        self.quadratic
    }
    pub fn q(&self) -> Result<Quadratic> {
        self.quadratic.ok_or_else(|| Error::MissingQuadratic(self.name.clone()))
    }
    pub fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }
    pub fn density(&self, x: f64) -> f64 {
        if x <= self.lo || x >= self.hi {
            0.0
        } else {
            self.density.eval(x)
        }
    }
    pub fn density_source(&self) -> &Density {
        &self.density
    }
    pub fn is_tabulated(&self) -> bool {
        matches!(self.density, Density::Table(_))
    }
    pub fn sampler(&self) -> Option<&ContinuousSampler> {
        self.sampler.as_ref()
    }
    pub fn center(&self) -> f64 {
        self.center
    }
    pub fn scale(&self) -> f64 {
        self.scale
    }
}

#[derive(Clone)]
pub enum DiscreteSampler {
    /// Inversion against the cumulative pmf over the truncated support.
    Inversion,
    Custom(Arc<dyn Fn(&mut SplitMix64) -> i64 + Send + Sync>),
}

/// A discrete member on the integer interval `{lo, …, hi}`; `None` marks an infinite end.
#[derive(Clone)]
pub struct DiscreteCO {
    name: String,
    mean: f64,
    quadratic: Option<Quadratic>,
    lo: Option<i64>,
    hi: Option<i64>,
    pmf: PmfFn,
    sampler: Option<DiscreteSampler>,
}

impl fmt::Debug for DiscreteCO {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DiscreteCO")
            .field("name", &self.name)
            .field("mean", &self.mean)
            .field("quadratic", &self.quadratic)
            .field("support", &(self.lo, self.hi))
            .field("sampler", &self.sampler.is_some())
            .finish()
    }
}

/// A finite window of a discrete support together with the mass left outside it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub lo: i64,
    pub hi: i64,
    pub remaining_mass: f64,
}

impl Window {
    pub fn points(&self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi
    }
    pub fn len(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }
    pub fn is_empty(&self) -> bool {
        self.hi < self.lo
    }
}

impl DiscreteCO {
    pub fn new(
        name: impl Into<String>,
        mean: f64,
        support: (Option<i64>, Option<i64>),
        pmf: PmfFn,
    ) -> Result<Self> {
        let (lo, hi) = support;
        if let (Some(a), Some(b)) = (lo, hi) {
            if a > b {
                return Err(Error::InvalidArgument(format!("empty support {{{a}, …, {b}}}")));
            }
        }
        if !mean.is_finite() {
            return Err(Error::InvalidArgument("mean must be finite".into()));
        }
        Ok(Self {
            name: name.into(),
            mean,
            quadratic: None,
            lo,
            hi,
            pmf,
            sampler: None,
        })
    }

    pub fn with_quadratic(mut self, q: Quadratic) -> Self {
        self.quadratic = Some(q);
        self
    }

    pub fn without_quadratic(mut self) -> Self {
        self.quadratic = None;
        self
    }

    pub fn with_sampler(mut self, sampler: DiscreteSampler) -> Self {
        self.sampler = Some(sampler);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn mean(&self) -> f64 {
        self.mean
    }
    pub fn quadratic(&self) -> Option<Quadratic> {
        self.quadratic
    }
    pub fn q(&self) -> Result<Quadratic> {
        self.quadratic.ok_or_else(|| Error::MissingQuadratic(self.name.clone()))
    }
    pub fn support(&self) -> (Option<i64>, Option<i64>) {
        (self.lo, self.hi)
    }
    pub fn in_support(&self, j: i64) -> bool {
        self.lo.is_none_or(|a| j >= a) && self.hi.is_none_or(|b| j <= b)
    }
    pub fn pmf(&self, j: i64) -> f64 {
        if self.in_support(j) {
            (self.pmf)(j)
        } else {
            0.0
        }
    }
    pub fn sampler(&self) -> Option<&DiscreteSampler> {
        self.sampler.as_ref()
    }
    pub fn is_bounded(&self) -> bool {
        self.lo.is_some() && self.hi.is_some()
    }

    /// Window around the mean whose outside mass is below `tol`, grown further on each
    /// open side while the boundary pmf exceeds `tol²`. Finite supports are returned
    /// whole with zero remaining mass.
    pub fn window(&self, tol: f64, max_terms: usize) -> Result<Window> {
        if let (Some(a), Some(b)) = (self.lo, self.hi) {
            if (b - a) as u128 + 1 > max_terms as u128 {
                return Err(Error::TruncationLimit { tol, terms: max_terms });
            }
            return Ok(Window {
                lo: a,
                hi: b,
                remaining_mass: 0.0,
            });
        }
        let mut c = self.mean.round() as i64;
        if let Some(a) = self.lo {
            c = c.max(a);
        }
        if let Some(b) = self.hi {
            c = c.min(b);
        }
        let (mut l, mut r) = (c, c);
        let mut cum = KahanSum::default();
        cum.add(self.pmf(c));
        let mut terms = 1usize;
        loop {
            let left_open = self.lo.is_none_or(|a| l > a);
            let right_open = self.hi.is_none_or(|b| r < b);
            if 1.0 - cum.value() < tol || !(left_open || right_open) {
                break;
            }
            if terms >= max_terms {
                return Err(Error::TruncationLimit { tol, terms });
            }
            let pl = if left_open { self.pmf(l - 1) } else { -1.0 };
            let pr = if right_open { self.pmf(r + 1) } else { -1.0 };
            if pr >= pl {
                r += 1;
                cum.add(pr);
            } else {
                l -= 1;
                cum.add(pl);
            }
            terms += 1;
        }
        // Extend each open side until the boundary pmf is negligible even against tol,
        // so that moments weighted by growing functions lose nothing measurable.
        let floor = tol * tol;
        while self.lo.is_none_or(|a| l > a) && self.pmf(l - 1) > floor && terms < max_terms {
            l -= 1;
            cum.add(self.pmf(l));
            terms += 1;
        }
        while self.hi.is_none_or(|b| r < b) && self.pmf(r + 1) > floor && terms < max_terms {
            r += 1;
            cum.add(self.pmf(r));
            terms += 1;
        }
        Ok(Window {
            lo: l,
            hi: r,
            remaining_mass: (1.0 - cum.value()).max(0.0),
        })
    }
}

/// Either kind of family member.
#[derive(Debug, Clone)]
pub enum Distribution {
    Continuous(ContinuousIP),
    Discrete(DiscreteCO),
}

impl Distribution {
    pub fn name(&self) -> &str {
        match self {
            Distribution::Continuous(c) => c.name(),
            Distribution::Discrete(d) => d.name(),
        }
    }
    pub fn mean(&self) -> f64 {
        match self {
            Distribution::Continuous(c) => c.mean(),
            Distribution::Discrete(d) => d.mean(),
        }
    }
    pub fn quadratic(&self) -> Option<Quadratic> {
        match self {
            Distribution::Continuous(c) => c.quadratic(),
            Distribution::Discrete(d) => d.quadratic(),
        }
    }
    pub fn q(&self) -> Result<Quadratic> {
        self.quadratic().ok_or_else(|| Error::MissingQuadratic(self.name().to_string()))
    }
    pub fn is_discrete(&self) -> bool {
        matches!(self, Distribution::Discrete(_))
    }
    pub fn has_sampler(&self) -> bool {
        match self {
            Distribution::Continuous(c) => c.sampler().is_some(),
            Distribution::Discrete(d) => d.sampler().is_some(),
        }
    }
    pub fn with_quadratic(self, q: Quadratic) -> Self {
        match self {
            Distribution::Continuous(c) => Distribution::Continuous(c.with_quadratic(q)),
            Distribution::Discrete(d) => Distribution::Discrete(d.with_quadratic(q)),
        }
    }
    pub fn without_quadratic(self) -> Self {
        match self {
            Distribution::Continuous(c) => Distribution::Continuous(c.without_quadratic()),
            Distribution::Discrete(d) => Distribution::Discrete(d.without_quadratic()),
        }
    }
    /// True when both ends of the support are finite.
    pub fn is_bounded(&self) -> bool {
        match self {
            Distribution::Continuous(c) => c.lo.is_finite() && c.hi.is_finite(),
            Distribution::Discrete(d) => d.is_bounded(),
        }
    }
}

impl From<ContinuousIP> for Distribution {
    fn from(c: ContinuousIP) -> Self {
        Distribution::Continuous(c)
    }
}

impl From<DiscreteCO> for Distribution {
    fn from(d: DiscreteCO) -> Self {
        Distribution::Discrete(d)
    }
}

#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    #[inline]
    pub(crate) fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }
    #[inline]
    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_rejects_all_zero() {
        assert_eq!(Quadratic::new(0.0, 0.0, 0.0).unwrap_err(), Error::DegenerateQuadratic);
        assert!(Quadratic::new(0.0, 0.0, 1e-300).is_ok());
    }

    #[test]
    fn quadratic_eval_and_normalize() {
        let q = Quadratic::new(-0.2, 0.2, 0.0).unwrap();
        assert_eq!(q.eval(0.5), 0.05);
        assert_eq!(q.normalized(), [-1.0, 1.0, 0.0]);
    }

    #[test]
    fn poisson_window_reaches_tolerance() {
        let d = poisson(2.0).unwrap();
        let w = d.window(1e-12, 10_000_000).unwrap();
        assert_eq!(w.lo, 0);
        assert!(w.remaining_mass < 1e-12);
        let total: f64 = w.points().map(|j| d.pmf(j)).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn window_limit_is_reported() {
        let d = poisson(50.0).unwrap();
        assert!(matches!(d.window(1e-12, 10), Err(Error::TruncationLimit { .. })));
    }
}
