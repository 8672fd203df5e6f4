use serde::{Deserialize, Serialize};

use super::{derivative_at, weight_at, BoundReport};
use crate::calculus::FunctionTuple;
use crate::distributions::Distribution;
use crate::error::{Error, Result};
use crate::expectation::{draw_samples, mc_estimate, EngineConfig};
use crate::linalg::SymMatrix;

/// Allowed deviation is `CI_SLACK · half-width + BRACKET_SLACK · bracket + ABS_SLACK·(1 + |ref|)`.
pub const CI_SLACK: f64 = 4.0;
const BRACKET_SLACK: f64 = 10.0;
const ABS_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McEntry {
    pub matrix: String,
    pub i: usize,
    pub j: usize,
    pub reference: f64,
    pub estimate: f64,
    pub half_width: f64,
    pub deviation: f64,
    pub allowed: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub n: usize,
    pub seed: u64,
    pub samples: usize,
    pub entries: Vec<McEntry>,
    pub max_deviation: f64,
    /// Largest `deviation / allowed` over all entries.
    pub max_ratio: f64,
    pub pass: bool,
}

struct Recorder {
    entries: Vec<McEntry>,
}

impl Recorder {
    fn push(&mut self, matrix: String, i: usize, j: usize, reference: f64, estimate: f64, half_width: f64, bracket: f64) {
        let deviation = (estimate - reference).abs();
        let allowed = CI_SLACK * half_width + BRACKET_SLACK * bracket + ABS_SLACK * (1.0 + reference.abs());
        self.entries.push(McEntry {
            matrix,
            i,
            j,
            reference,
            estimate,
            half_width,
            deviation,
            allowed,
            pass: deviation <= allowed,
        });
    }

    fn matrix(&mut self, name: String, reference: &SymMatrix, est: &[Vec<(f64, f64)>], bracket: f64) {
        for i in 0..reference.order() {
            for j in i..reference.order() {
                let (v, hw) = est[i][j];
                self.push(name.clone(), i, j, reference.get(i, j), v, hw, bracket);
            }
        }
    }
}

/// Re-estimates `D`, `H_k` and `B_k` of `report` by Monte Carlo on one shared sample
/// and compares each entry with the quadrature/summation value.
pub fn mc_cross_check(
    dist: &Distribution,
    g: &FunctionTuple,
    report: &BoundReport,
    cfg: &EngineConfig,
) -> Result<McReport> {
    if g.len() != report.p {
        return Err(Error::DimensionMismatch(g.len(), report.p));
    }
    let q = dist.q()?;
    let samples = draw_samples(dist, cfg)?;
    let p = report.p;
    let means = &report.provenance.means;
    let mut rec = Recorder { entries: Vec::new() };

    let grid = |f: &dyn Fn(usize, usize) -> Result<(f64, f64)>| -> Result<Vec<Vec<(f64, f64)>>> {
        (0..p).map(|i| (0..p).map(|j| if j < i { Ok((0.0, 0.0)) } else { f(i, j) }).collect()).collect()
    };

    let gs = g.entries();
    let d = grid(&|i, j| {
        let r = mc_estimate(&samples, |x| (gs[i].eval(x) - means[i]) * (gs[j].eval(x) - means[j]))?;
        Ok((r.value, r.error_bracket))
    })?;
    rec.matrix("D".into(), &report.d, &d, report.provenance.brackets.d);

    let dk = |i: usize, k: usize, x: f64| {
        let w = weight_at(dist, &q, k, x);
        if w == 0.0 {
            (0.0, 0.0)
        } else {
            (w, derivative_at(dist, &gs[i], k, x))
        }
    };
    for (idx, hk) in report.h.iter().enumerate() {
        let k = idx + 1;
        let est = grid(&|i, j| {
            let r = mc_estimate(&samples, |x| {
                let (w, a) = dk(i, k, x);
                if w == 0.0 {
                    0.0
                } else {
                    w * a * derivative_at(dist, &gs[j], k, x)
                }
            })?;
            Ok((r.value, r.error_bracket))
        })?;
        rec.matrix(format!("H_{k}"), hk, &est, report.provenance.brackets.h[idx]);
    }
    for (idx, bk) in report.b.iter().enumerate() {
        let k = idx + 1;
        let v = (0..p)
            .map(|i| {
                let r = mc_estimate(&samples, |x| {
                    let (w, a) = dk(i, k, x);
                    w * a
                })?;
                Ok((r.value, r.error_bracket))
            })
            .collect::<Result<Vec<_>>>()?;
        let est = grid(&|i, j| {
            let (vi, hi) = v[i];
            let (vj, hj) = v[j];
            Ok((vi * vj, vi.abs() * hj + vj.abs() * hi + hi * hj))
        })?;
        rec.matrix(format!("B_{k}"), bk, &est, report.provenance.brackets.b[idx]);
    }

    let entries = rec.entries;
    let max_deviation = entries.iter().fold(0.0f64, |m, e| m.max(e.deviation));
    let max_ratio = entries.iter().fold(0.0f64, |m, e| m.max(e.deviation / e.allowed));
    let pass = entries.iter().all(|e| e.pass);
    Ok(McReport {
        n: report.n,
        seed: cfg.mc_seed,
        samples: samples.len(),
        entries,
        max_deviation,
        max_ratio,
        pass,
    })
}
