//! Recovering and checking the quadratic from the defining cumulative identity.
//!
//! For a grid of support points the ratio
//!
//! ```text
//! r(x) = [∫_{α}^{x} (μ − t) f(t) dt] / f(x)      (continuous)
//! r(j) = [Σ_{k ≤ j} (μ − k) p(k)] / p(j)          (discrete)
//! ```
//!
//! equals `q(x)` exactly for a family member. Left of the mean the integral is taken
//! from `α`; right of it we use the equal quantity `−∫_x^ω (μ − t) f(t) dt`, which
//! keeps both halves free of cancellation.

use serde::{Deserialize, Serialize};

use super::{ContinuousIP, Density, DiscreteCO, Distribution, KahanSum, Quadratic};
use crate::error::{Error, Result};
use crate::expectation::quadrature::{tanh_sinh, MappedInterval};
use crate::expectation::InfiniteMap;

/// Default pass threshold for continuous analytic densities.
pub const CONTINUOUS_TOL: f64 = 1e-8;
/// Default pass threshold for discrete members.
pub const DISCRETE_TOL: f64 = 1e-10;
/// Default pass threshold for linearly interpolated density tables.
pub const TABULATED_TOL: f64 = 1e-4;
/// Grid points need `f(x) ≥ DENSITY_FLOOR · max f`.
pub const DENSITY_FLOOR: f64 = 1e-12;

const GRID_POINTS: usize = 25;
const CUMULATIVE_NODES: usize = 256;
const TANH_SINH_STEP: f64 = 1.0 / 64.0;

/// Least-squares quadratic together with its residual on the fitting grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticFit {
    pub quadratic: Quadratic,
    pub max_residual: f64,
    pub mean_residual: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MembershipReport {
    pub max_residual: f64,
    pub mean_residual: f64,
    pub tol: f64,
    pub points: usize,
    pub pass: bool,
}

/// Samples of `(x, r(x))` on the inference grid.
fn ratio_samples(dist: &Distribution) -> Result<Vec<(f64, f64)>> {
    match dist {
        Distribution::Continuous(c) => continuous_ratios(c),
        Distribution::Discrete(d) => discrete_ratios(d),
    }
}

fn continuous_ratios(c: &ContinuousIP) -> Result<Vec<(f64, f64)>> {
    let mu = c.mean();
    let (lo, hi) = c.support();
    if let Density::Table(table) = c.density_source() {
        let cum = table.cumulative_stein(mu);
        let fmax = table.nodes().fold(0.0f64, |m, (_, f)| m.max(f));
        return Ok(table
            .nodes()
            .zip(cum)
            .filter(|((x, f), _)| *x > lo && *x < hi && *f >= DENSITY_FLOOR * fmax && *f > 0.0)
            .map(|((x, f), s)| (x, s / f))
            .collect());
    }

    let (center, scale) = (c.center(), c.scale());
    let grid: Vec<f64> = match (lo.is_finite(), hi.is_finite()) {
        (true, true) => (1..=GRID_POINTS)
            .map(|i| lo + (hi - lo) * i as f64 / (GRID_POINTS + 1) as f64)
            .collect(),
        (true, false) => (1..=GRID_POINTS)
            .map(|i| lo + 6.0 * (center - lo).max(scale) * i as f64 / GRID_POINTS as f64)
            .collect(),
        (false, true) => (1..=GRID_POINTS)
            .map(|i| hi - 6.0 * (hi - center).max(scale) * i as f64 / GRID_POINTS as f64)
            .collect(),
        (false, false) => (0..GRID_POINTS)
            .map(|i| center + scale * (-5.0 + 10.0 * i as f64 / (GRID_POINTS - 1) as f64))
            .collect(),
    };
    let fmax = grid.iter().fold(0.0f64, |m, &x| m.max(c.density(x)));
    let stein = |t: f64| (mu - t) * c.density(t);
    let mut out = Vec::with_capacity(grid.len());
    for x in grid {
        let fx = c.density(x);
        if !(fx >= DENSITY_FLOOR * fmax && fx > 0.0) {
            continue;
        }
        let (a, b, sign) = if x < mu { (lo, x, 1.0) } else { (x, hi, -1.0) };
        let rule = if a.is_finite() && b.is_finite() {
            tanh_sinh(a, b, TANH_SINH_STEP)
        } else {
            MappedInterval {
                lo: a,
                hi: b,
                center: x,
                scale,
                map: InfiniteMap::Rational,
            }
            .rule(CUMULATIVE_NODES)
        };
        let mut acc = KahanSum::default();
        for (t, w) in rule {
            let v = stein(t);
            if !v.is_finite() {
                return Err(Error::NonFiniteIntegrand { x: t });
            }
            acc.add(w * v);
        }
        out.push((x, sign * acc.value() / fx));
    }
    Ok(out)
}

/// Window for inference: extends infinite sides until the pmf is negligible relative to
/// its peak, so suffix sums are effectively exact.
fn inference_window(d: &DiscreteCO) -> Result<(i64, i64)> {
    let w = d.window(1e-14, 10_000_000)?;
    let pmax = w.points().fold(0.0f64, |m, j| m.max(d.pmf(j)));
    let (mut lo, mut hi) = (w.lo, w.hi);
    let (slo, shi) = d.support();
    while slo.is_none() && d.pmf(lo - 1) > 1e-30 * pmax && (hi - lo) < 10_000_000 {
        lo -= 1;
    }
    while shi.is_none() && d.pmf(hi + 1) > 1e-30 * pmax && (hi - lo) < 10_000_000 {
        hi += 1;
    }
    if slo.is_none() {
        lo -= 8;
    }
    if shi.is_none() {
        hi += 8;
    }
    Ok((lo, hi))
}

fn discrete_ratios(d: &DiscreteCO) -> Result<Vec<(f64, f64)>> {
    let mu = d.mean();
    let (lo, hi) = inference_window(d)?;
    let pts: Vec<i64> = (lo..=hi).collect();
    let p: Vec<f64> = pts.iter().map(|&j| d.pmf(j)).collect();
    let terms: Vec<f64> = pts.iter().zip(&p).map(|(&j, &pj)| (mu - j as f64) * pj).collect();
    let n = pts.len();
    let mut prefix = vec![0.0; n];
    let mut acc = KahanSum::default();
    for i in 0..n {
        acc.add(terms[i]);
        prefix[i] = acc.value();
    }
    // suffix[i] = Σ_{k > i} terms[k]
    let mut suffix = vec![0.0; n];
    let mut acc = KahanSum::default();
    for i in (0..n).rev() {
        suffix[i] = -acc.value();
        acc.add(terms[i]);
    }
    let pmax = p.iter().fold(0.0f64, |m, &v| m.max(v));
    Ok((0..n)
        .filter(|&i| p[i] > 0.0 && p[i] >= DENSITY_FLOOR * pmax)
        .map(|i| {
            let s = if (pts[i] as f64) < mu { prefix[i] } else { suffix[i] };
            (pts[i] as f64, s / p[i])
        })
        .collect())
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    let scale = a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() <= 1e-13 * scale {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in (col + 1)..3 {
            let f = a[r][col] / a[col][col];
            for c in col..3 {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for r in (0..3).rev() {
        let s: f64 = ((r + 1)..3).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

fn fit(samples: &[(f64, f64)]) -> Result<Quadratic> {
    let m = samples.len();
    let mut distinct: Vec<f64> = samples.iter().map(|s| s.0).collect();
    distinct.dedup();
    if m < 3 || distinct.len() < 3 {
        return Err(Error::RankDeficient { points: m });
    }
    let (xmin, xmax) = samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), s| (a.min(s.0), b.max(s.0)));
    let c = 0.5 * (xmin + xmax);
    let s = (0.5 * (xmax - xmin)).max(f64::MIN_POSITIVE);
    let mut ata = [[0.0; 3]; 3];
    let mut atb = [0.0; 3];
    for &(x, r) in samples {
        let u = (x - c) / s;
        let row = [u * u, u, 1.0];
        for i in 0..3 {
            for j in 0..3 {
                ata[i][j] += row[i] * row[j];
            }
            atb[i] += row[i] * r;
        }
    }
    let [a, b, d] = solve3(ata, atb).ok_or(Error::RankDeficient { points: m })?;
    let delta = a / (s * s);
    let beta = b / s - 2.0 * a * c / (s * s);
    let gamma = a * c * c / (s * s) - b * c / s + d;
    // Snap coefficients that are pure rounding noise relative to the fitted scale.
    let mag = delta.abs() * c.abs().max(s).powi(2) + beta.abs() * c.abs().max(s) + gamma.abs();
    let snap = |v: f64, w: f64| if (v * w).abs() <= 1e-13 * mag { 0.0 } else { v };
    let w = c.abs().max(s);
    Quadratic::new(snap(delta, w * w), snap(beta, w), snap(gamma, 1.0))
}

fn residuals(samples: &[(f64, f64)], q: &Quadratic) -> (f64, f64) {
    let mut max = 0.0f64;
    let mut sum = 0.0;
    for &(x, r) in samples {
        let e = (r - q.eval(x)).abs();
        max = max.max(e);
        sum += e;
    }
    (max, sum / samples.len().max(1) as f64)
}

/// Fits `(δ, β, γ)` to the cumulative identity, ignoring any quadratic already attached.
pub fn infer_quadratic(dist: &Distribution) -> Result<QuadraticFit> {
    let samples = ratio_samples(dist)?;
    let quadratic = fit(&samples)?;
    let (max_residual, mean_residual) = residuals(&samples, &quadratic);
    Ok(QuadraticFit {
        quadratic,
        max_residual,
        mean_residual,
        points: samples.len(),
    })
}

/// Default tolerance for a member: tabulated densities get a looser one.
pub fn default_membership_tol(dist: &Distribution) -> f64 {
    match dist {
        Distribution::Continuous(c) if c.is_tabulated() => TABULATED_TOL,
        Distribution::Continuous(_) => CONTINUOUS_TOL,
        Distribution::Discrete(_) => DISCRETE_TOL,
    }
}

/// Checks the attached quadratic against the cumulative identity at the default tolerance.
pub fn verify_membership(dist: &Distribution) -> Result<MembershipReport> {
    verify_membership_with_tol(dist, default_membership_tol(dist))
}

pub fn verify_membership_with_tol(dist: &Distribution, tol: f64) -> Result<MembershipReport> {
    let q = dist.q()?;
    let samples = ratio_samples(dist)?;
    if samples.is_empty() {
        return Err(Error::RankDeficient { points: 0 });
    }
    let (max_residual, mean_residual) = residuals(&samples, &q);
    Ok(MembershipReport {
        max_residual,
        mean_residual,
        tol,
        points: samples.len(),
        pass: max_residual <= tol,
    })
}
