//! Expectations `E[φ(X)]` with an error bracket on every result.
//!
//! Continuous members are integrated with Gauss–Legendre on the mapped support and
//! bracketed by the difference against a half-size rule. Discrete members are summed
//! over a window carrying all but `trunc_tol` of the mass. A seeded Monte Carlo path
//! serves as an independent cross-check.

pub mod quadrature;
pub(crate) mod tails;

use serde::{Deserialize, Serialize};

use crate::distributions::{
    ContinuousIP, DiscreteCO, DiscreteSampler, Distribution, KahanSum,
};
use crate::error::{Error, Result};
use crate::rng::SplitMix64;

pub use quadrature::InfiniteMap;

/// Hard cap on summation terms for discrete windows.
pub const MAX_TERMS: usize = 10_000_000;

/// Two-sided 99% normal quantile.
pub const Z_99: f64 = 2.575_829_303_548_901;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EngineConfig {
    pub quad_nodes: usize,
    pub infinite_map: InfiniteMap,
    pub trunc_tol: f64,
    pub mc_samples: usize,
    pub mc_seed: u64,
    /// Optional ceiling on the error bracket of any single expectation.
    pub bracket_ceiling: Option<f64>,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            quad_nodes: 200,
            infinite_map: InfiniteMap::Rational,
            trunc_tol: 1e-12,
            mc_samples: 200_000,
            mc_seed: 0x5EED_2024,
            bracket_ceiling: None,
        }
    }
}

impl EngineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.quad_nodes < 10 {
            return Err(Error::InvalidArgument(format!(
                "quad_nodes must be at least 10, got {}",
                self.quad_nodes
            )));
        }
        if !(self.trunc_tol > 0.0 && self.trunc_tol <= 1e-6) {
            return Err(Error::InvalidArgument(format!(
                "trunc_tol must lie in (0, 1e-6], got {}",
                self.trunc_tol
            )));
        }
        if self.mc_samples < 2 {
            return Err(Error::InvalidArgument("mc_samples must be at least 2".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Quadrature,
    Summation,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Detail {
    Nodes(usize),
    TruncationMass(f64),
    HalfWidth(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpectationResult {
    pub value: f64,
    pub error_bracket: f64,
    pub method: Method,
    pub detail: Detail,
}

/// Values of some function at the nodes of a [`Measure`].
#[derive(Debug, Clone, PartialEq)]
pub struct NodeValues {
    fine: Vec<f64>,
    coarse: Vec<f64>,
}

impl NodeValues {
    pub fn fine(&self) -> &[f64] {
        &self.fine
    }

    pub fn zip_with(&self, other: &NodeValues, f: impl Fn(f64, f64) -> f64) -> NodeValues {
        NodeValues {
            fine: self.fine.iter().zip(&other.fine).map(|(a, b)| f(*a, *b)).collect(),
            coarse: self.coarse.iter().zip(&other.coarse).map(|(a, b)| f(*a, *b)).collect(),
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> NodeValues {
        NodeValues {
            fine: self.fine.iter().map(|v| f(*v)).collect(),
            coarse: self.coarse.iter().map(|v| f(*v)).collect(),
        }
    }

    pub fn product(&self, other: &NodeValues) -> NodeValues {
        self.zip_with(other, |a, b| a * b)
    }
}

#[derive(Debug, Clone)]
enum Kind {
    Quadrature {
        coarse_points: Vec<f64>,
        coarse_weights: Vec<f64>,
        nodes: usize,
    },
    Summation {
        remaining_mass: f64,
        /// Indices into `points` of the last few included points on each open side.
        edge: Vec<usize>,
    },
}

/// A discretization of a distribution: points with probability weights, reusable
/// across many expectations.
#[derive(Debug, Clone)]
pub struct Measure {
    points: Vec<f64>,
    weights: Vec<f64>,
    kind: Kind,
    ceiling: Option<f64>,
}

impl Measure {
    pub fn new(dist: &Distribution, cfg: &EngineConfig) -> Result<Self> {
        match dist {
            Distribution::Continuous(c) => Self::continuous(c, cfg),
            Distribution::Discrete(d) => Self::discrete(d, cfg),
        }
    }

    pub fn continuous(spec: &ContinuousIP, cfg: &EngineConfig) -> Result<Self> {
        cfg.validate()?;
        let (lo, hi) = spec.support();
        let iv = quadrature::MappedInterval {
            lo,
            hi,
            center: spec.center(),
            scale: spec.scale(),
            map: cfg.infinite_map,
        };
        let weigh = |rule: Vec<(f64, f64)>| -> Result<(Vec<f64>, Vec<f64>)> {
            let mut pts = Vec::with_capacity(rule.len());
            let mut wts = Vec::with_capacity(rule.len());
            for (x, w) in rule {
                let f = spec.density(x);
                if !f.is_finite() {
                    return Err(Error::NonFiniteIntegrand { x });
                }
                pts.push(x);
                wts.push(w * f);
            }
            Ok((pts, wts))
        };
        let (points, weights) = weigh(iv.rule(cfg.quad_nodes))?;
        let (coarse_points, coarse_weights) = weigh(iv.rule(cfg.quad_nodes / 2))?;
        Ok(Self {
            points,
            weights,
            kind: Kind::Quadrature {
                coarse_points,
                coarse_weights,
                nodes: cfg.quad_nodes,
            },
            ceiling: cfg.bracket_ceiling,
        })
    }

    pub fn discrete(spec: &DiscreteCO, cfg: &EngineConfig) -> Result<Self> {
        cfg.validate()?;
        let w = spec.window(cfg.trunc_tol, MAX_TERMS)?;
        let points: Vec<f64> = w.points().map(|j| j as f64).collect();
        let weights: Vec<f64> = w.points().map(|j| spec.pmf(j)).collect();
        let n = points.len();
        let (slo, shi) = spec.support();
        let mut edge = Vec::new();
        if slo.is_none() {
            edge.extend(0..n.min(10));
        }
        if shi.is_none() {
            edge.extend(n.saturating_sub(10)..n);
        }
        Ok(Self {
            points,
            weights,
            kind: Kind::Summation {
                remaining_mass: w.remaining_mass,
                edge,
            },
            ceiling: cfg.bracket_ceiling,
        })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn method(&self) -> Method {
        match self.kind {
            Kind::Quadrature { .. } => Method::Quadrature,
            Kind::Summation { .. } => Method::Summation,
        }
    }

    /// Evaluates `f` at every node. Points with zero weight are skipped (recorded as 0).
    pub fn tabulate(&self, f: impl Fn(f64) -> f64) -> Result<NodeValues> {
        let eval = |pts: &[f64], wts: &[f64]| -> Result<Vec<f64>> {
            pts.iter()
                .zip(wts)
                .map(|(&x, &w)| {
                    if w == 0.0 {
                        return Ok(0.0);
                    }
                    let v = f(x);
                    if v.is_finite() {
                        Ok(v)
                    } else {
                        Err(Error::NonFiniteIntegrand { x })
                    }
                })
                .collect()
        };
        let fine = eval(&self.points, &self.weights)?;
        let coarse = match &self.kind {
            Kind::Quadrature {
                coarse_points,
                coarse_weights,
                ..
            } => eval(coarse_points, coarse_weights)?,
            Kind::Summation { .. } => Vec::new(),
        };
        Ok(NodeValues { fine, coarse })
    }

    fn weighted_sum(values: &[f64], weights: &[f64]) -> f64 {
        let mut acc = KahanSum::default();
        for (v, w) in values.iter().zip(weights) {
            acc.add(v * w);
        }
        acc.value()
    }

    /// `E[φ]` from values produced by [`Measure::tabulate`], without the ceiling check.
    pub fn integrate(&self, v: &NodeValues) -> ExpectationResult {
        let value = Self::weighted_sum(&v.fine, &self.weights);
        match &self.kind {
            Kind::Quadrature {
                coarse_weights,
                nodes,
                ..
            } => {
                let coarse = Self::weighted_sum(&v.coarse, coarse_weights);
                ExpectationResult {
                    value,
                    error_bracket: (value - coarse).abs(),
                    method: Method::Quadrature,
                    detail: Detail::Nodes(*nodes),
                }
            }
            Kind::Summation {
                remaining_mass,
                edge,
            } => {
                let sup = edge.iter().fold(0.0f64, |m, &i| m.max(v.fine[i].abs()));
                ExpectationResult {
                    value,
                    error_bracket: sup * remaining_mass,
                    method: Method::Summation,
                    detail: Detail::TruncationMass(*remaining_mass),
                }
            }
        }
    }

    pub fn integrate_checked(&self, v: &NodeValues) -> Result<ExpectationResult> {
        let r = self.integrate(v);
        if let Some(ceiling) = self.ceiling {
            if r.error_bracket > ceiling {
                return Err(Error::BracketTooLarge {
                    bracket: r.error_bracket,
                    ceiling,
                });
            }
        }
        Ok(r)
    }

    pub fn expect(&self, f: impl Fn(f64) -> f64) -> Result<ExpectationResult> {
        let v = self.tabulate(f)?;
        self.integrate_checked(&v)
    }
}

/// `E[φ(X)]` for a continuous member by mapped Gauss–Legendre quadrature.
pub fn expect_continuous(
    spec: &ContinuousIP,
    phi: impl Fn(f64) -> f64,
    cfg: &EngineConfig,
) -> Result<ExpectationResult> {
    Measure::continuous(spec, cfg)?.expect(phi)
}

/// `E[φ(X)]` for a discrete member by summation over the truncated support.
pub fn expect_discrete(
    spec: &DiscreteCO,
    phi: impl Fn(i64) -> f64,
    cfg: &EngineConfig,
) -> Result<ExpectationResult> {
    Measure::discrete(spec, cfg)?.expect(|x| phi(x as i64))
}

/// Either engine, chosen by the member's kind. Discrete points are passed as exact integers.
pub fn expect(dist: &Distribution, phi: impl Fn(f64) -> f64, cfg: &EngineConfig) -> Result<ExpectationResult> {
    Measure::new(dist, cfg)?.expect(phi)
}

/// Draws `cfg.mc_samples` values from the member's sampler, seeded by `cfg.mc_seed`.
pub fn draw_samples(dist: &Distribution, cfg: &EngineConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    let mut rng = SplitMix64::new(cfg.mc_seed);
    let n = cfg.mc_samples;
    match dist {
        Distribution::Continuous(c) => {
            let s = c.sampler().ok_or_else(|| Error::NoSampler(c.name().to_string()))?;
            Ok((0..n).map(|_| s.draw(&mut rng)).collect())
        }
        Distribution::Discrete(d) => match d.sampler() {
            None => Err(Error::NoSampler(d.name().to_string())),
            Some(DiscreteSampler::Custom(f)) => Ok((0..n).map(|_| f(&mut rng) as f64).collect()),
            Some(DiscreteSampler::Inversion) => {
                let w = d.window(cfg.trunc_tol, MAX_TERMS)?;
                let pts: Vec<i64> = w.points().collect();
                let mut cdf = Vec::with_capacity(pts.len());
                let mut acc = KahanSum::default();
                for &j in &pts {
                    acc.add(d.pmf(j));
                    cdf.push(acc.value());
                }
                Ok((0..n)
                    .map(|_| {
                        let u = rng.next_f64() * acc.value();
                        let i = cdf.partition_point(|&c| c < u).min(pts.len() - 1);
                        pts[i] as f64
                    })
                    .collect())
            }
        },
    }
}

/// Sample mean of `φ` with a 99% confidence half-width as the bracket (Welford update).
pub fn mc_estimate(samples: &[f64], phi: impl Fn(f64) -> f64) -> Result<ExpectationResult> {
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for (k, &x) in samples.iter().enumerate() {
        let v = phi(x);
        if !v.is_finite() {
            return Err(Error::NonFiniteIntegrand { x });
        }
        let d = v - mean;
        mean += d / (k + 1) as f64;
        m2 += d * (v - mean);
    }
    let n = samples.len();
    let var = if n > 1 { m2 / (n - 1) as f64 } else { 0.0 };
    let half = Z_99 * (var / n as f64).sqrt();
    Ok(ExpectationResult {
        value: mean,
        error_bracket: half,
        method: Method::MonteCarlo,
        detail: Detail::HalfWidth(half),
    })
}

/// Monte Carlo estimate of `E[φ(X)]`; deterministic given `(mc_seed, mc_samples)`.
pub fn expect_mc(dist: &Distribution, phi: impl Fn(f64) -> f64, cfg: &EngineConfig) -> Result<ExpectationResult> {
    let samples = draw_samples(dist, cfg)?;
    mc_estimate(&samples, phi)
}
