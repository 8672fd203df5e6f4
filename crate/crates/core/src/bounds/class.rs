use std::fmt;

use serde::{Deserialize, Serialize};

use super::{derivative_at, weight_at};
use crate::calculus::FunctionTuple;
use crate::distributions::Distribution;
use crate::error::Result;
use crate::expectation::{tails, EngineConfig};

/// `H`: `E[w_k (g^{(k)})²] < ∞` for `k = 0..=n`; `B`: `E[g²] < ∞` and `E[w_k |g^{(k)}|] < ∞`
/// for `k = 1..=n`, with `w_k = q^k` (continuous) or `q^{[k]}` (discrete, differences
/// in place of derivatives).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FunctionClass {
    H,
    B,
}

impl fmt::Display for FunctionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionClass::H => f.write_str("H"),
            FunctionClass::B => f.write_str("B"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassEntry {
    pub function: usize,
    pub label: String,
    pub k: usize,
    pub finite: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassReport {
    pub class: FunctionClass,
    pub n: usize,
    pub entries: Vec<ClassEntry>,
    pub pass: bool,
    pub note: String,
}

impl ClassReport {
    pub fn first_failure(&self) -> Option<&ClassEntry> {
        self.entries.iter().find(|e| !e.finite)
    }

    /// Indices of functions with at least one divergent entry.
    pub fn failing_functions(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.entries.iter().filter(|e| !e.finite).map(|e| e.function).collect();
        out.dedup();
        out
    }
}

const INCLUSION_NOTE: &str = "H-membership together with E|X|^{2n} < ∞ implies B-membership";

/// Per-(function, order) finiteness verdicts from the tail test.
pub fn check_class(
    dist: &Distribution,
    g: &FunctionTuple,
    n: usize,
    class: FunctionClass,
    cfg: &EngineConfig,
) -> Result<ClassReport> {
    let q = dist.q()?;
    super::check_orders(dist, g, n)?;
    let mut entries = Vec::new();
    for (i, gi) in g.entries().iter().enumerate() {
        for k in 0..=n {
            let squared = class == FunctionClass::H || k == 0;
            let h = |x: f64| {
                let w = weight_at(dist, &q, k, x);
                if w == 0.0 {
                    return 0.0;
                }
                let d = derivative_at(dist, gi, k, x);
                if squared {
                    w.abs() * d * d
                } else {
                    w.abs() * d.abs()
                }
            };
            entries.push(ClassEntry {
                function: i,
                label: gi.label().to_string(),
                k,
                finite: tails::expectation_finite(dist, &h, cfg)?,
            });
        }
    }
    let pass = entries.iter().all(|e| e.finite);
    Ok(ClassReport {
        class,
        n,
        entries,
        pass,
        note: INCLUSION_NOTE.to_string(),
    })
}
