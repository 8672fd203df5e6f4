use serde::{Deserialize, Serialize};

use super::Distribution;
use crate::error::Result;
use crate::expectation::{tails, EngineConfig};

/// Outcome of the `E[X^{2n}] < ∞` check from the quadratic and from the tails.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MomentCheck {
    /// The order `2n` of the moment examined.
    pub moment: usize,
    pub analytic: bool,
    pub numeric: bool,
}

impl MomentCheck {
    pub fn finite(&self) -> bool {
        self.analytic && self.numeric
    }
}

/// The quadratic criterion: members with `δ > 0` have `E|X|^m < ∞` exactly when
/// `m < 1 + 1/δ`. Bounded supports have every moment regardless of `δ`.
fn analytic(dist: &Distribution, n: usize) -> Result<bool> {
    let q = dist.q()?;
    if dist.is_bounded() || q.delta <= 0.0 {
        return Ok(true);
    }
    Ok(((2 * n) as f64) < 1.0 + 1.0 / q.delta)
}

pub fn moment_check(dist: &Distribution, n: usize, cfg: &EngineConfig) -> Result<MomentCheck> {
    let analytic = analytic(dist, n)?;
    let m = (2 * n) as i32;
    let mu = dist.mean();
    let numeric = tails::expectation_finite(dist, &|x: f64| (x - mu).abs().powi(m), cfg)?;
    Ok(MomentCheck {
        moment: 2 * n,
        analytic,
        numeric,
    })
}

/// True iff `E[X^{2n}]` is finite by both the analytic rule and the tail test.
pub fn moment_finiteness(dist: &Distribution, n: usize) -> Result<bool> {
    Ok(moment_check(dist, n, &EngineConfig::default())?.finite())
}
